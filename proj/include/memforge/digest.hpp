#pragma once
// 256-bit content digests (SHA-256, via OpenSSL).

#include <openssl/evp.h>

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "memforge/error.hpp"

namespace memforge {

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        out.reserve(64);
        for (auto b : bytes) {
            out.push_back(kHex[b >> 4]);
            out.push_back(kHex[b & 0xF]);
        }
        return out;
    }

    static std::optional<Digest> from_hex(std::string_view hex) {
        if (hex.size() != 64) return std::nullopt;
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        Digest d;
        for (std::size_t i = 0; i < 32; ++i) {
            int hi = nibble(hex[2 * i]);
            int lo = nibble(hex[2 * i + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        return d;
    }
};

// SHA-256 over the raw bytes of `data`.
inline Digest sha256(std::string_view data) {
    Digest d;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != d.bytes.size()) {
        throw InternalError("sha256_failed", "EVP_Digest(SHA-256) failed");
    }
    return d;
}

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
        return h;
    }
};

}  // namespace memforge
