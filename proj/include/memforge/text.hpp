#pragma once
// Text normalization used before hashing, canonicalization and embedding.
//
// Pipeline: NFKC -> lowercase (root locale) -> non-alphanumeric code points to
// space -> collapse spaces -> trim. The result is a fixed point of the pipeline.

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "memforge/error.hpp"

namespace memforge {

namespace detail {

inline std::string normalize_once(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status)) throw InternalError("icu_unavailable", u_errorName(status));

    icu::UnicodeString text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    icu::UnicodeString composed = nfkc->normalize(text, status);
    if (U_FAILURE(status)) throw InternalError("icu_normalize_failed", u_errorName(status));
    composed.toLower(icu::Locale::getRoot());

    icu::UnicodeString cleaned;
    bool pending_space = false;
    for (int32_t i = 0; i < composed.length();) {
        UChar32 cp = composed.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isalnum(cp)) {
            if (pending_space && !cleaned.isEmpty()) cleaned.append(static_cast<UChar>(u' '));
            pending_space = false;
            cleaned.append(cp);
        } else {
            pending_space = true;
        }
    }
    std::string out;
    cleaned.toUTF8String(out);
    return out;
}

}  // namespace detail

inline std::string normalize_text(std::string_view raw) {
    std::string current = detail::normalize_once(raw);
    // Lowercasing can in rare cases leave a string that NFKC would still
    // rewrite; iterate to the fixed point.
    for (int i = 0; i < 8; ++i) {
        std::string next = detail::normalize_once(current);
        if (next == current) return current;
        current = std::move(next);
    }
    return current;
}

// Splits UTF-8 text into code points, each returned as its UTF-8 byte string.
inline std::vector<std::string> utf8_code_points(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if (lead >= 0xF0) len = 4;
        else if (lead >= 0xE0) len = 3;
        else if (lead >= 0xC0) len = 2;
        len = std::min(len, text.size() - i);
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace memforge
