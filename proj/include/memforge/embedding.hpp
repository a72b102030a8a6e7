#pragma once
// Deterministic text embeddings and small dense-vector helpers.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memforge/digest.hpp"
#include "memforge/error.hpp"
#include "memforge/text.hpp"

namespace memforge {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

// Arithmetic mean per coordinate (not re-normalized).
inline Vector centroid(std::span<const Vector> vectors) {
    if (vectors.empty()) throw DataError("empty_centroid", "centroid of an empty vector list");
    const std::size_t d = vectors.front().size();
    Vector mean(d, 0.0);
    for (const Vector& v : vectors) {
        if (v.size() != d) throw DataError("dimension_mismatch", "centroid over mixed dimensions");
        for (std::size_t i = 0; i < d; ++i) mean[i] += v[i];
    }
    const double n = static_cast<double>(vectors.size());
    for (double& x : mean) x /= n;
    return mean;
}

// Feature-hashing embedding over character 3-grams of the normalized text.
//
// The normalized text is padded with one space on each side so that every
// non-empty input yields at least one 3-gram. For each 3-gram g with
// h = SHA-256(g): bucket = (first 8 bytes of h, big-endian) mod d, and the
// contribution is -1 when bit 0 of h (lowest bit of the last byte) is set,
// +1 otherwise. The sum is L2-normalized; empty input gives the zero vector.
inline Vector embed_text(std::string_view text, std::size_t d) {
    if (d < 2) throw ConfigError("invalid_dimension", "embedding dimension must be >= 2");
    Vector v(d, 0.0);
    const std::string normalized = normalize_text(text);
    if (normalized.empty()) return v;

    const std::vector<std::string> cps = utf8_code_points(" " + normalized + " ");
    for (std::size_t i = 0; i + 2 < cps.size(); ++i) {
        const std::string gram = cps[i] + cps[i + 1] + cps[i + 2];
        const Digest h = sha256(gram);
        std::uint64_t prefix = 0;
        for (int b = 0; b < 8; ++b) prefix = (prefix << 8) | h.bytes[b];
        const double sign = (h.bytes[31] & 1u) ? -1.0 : 1.0;
        v[prefix % d] += sign;
    }
    const double n = l2_norm(v);
    if (n == 0.0) return v;
    for (double& x : v) x /= n;
    return v;
}

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    virtual Vector embed(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

class HashingEmbedder final : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t d) : d_(d) {
        if (d_ < 2) throw ConfigError("invalid_dimension", "embedding dimension must be >= 2");
    }
    std::size_t dimension() const override { return d_; }
    Vector embed(std::string_view text) const override { return embed_text(text, d_); }
    std::string name() const override { return "builtin"; }

private:
    std::size_t d_;
};

}  // namespace memforge
