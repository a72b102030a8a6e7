#pragma once
// LTM -> WM activation.
//
// Static mode ranks bank rows by cosine similarity to the pooled query.
// Dynamic mode scores rows with masked scaled dot products
//     J = softmax((P_m M)(P_q q) / sqrt(d) + mask)
// and keeps the top-k of J. Selected rows are scaled by their relevance and the
// two selections are merged into a single working-memory block that is
// prepended to the input sequence.
//
// All ranking ties are broken by ascending bank index.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "memforge/embedding.hpp"
#include "memforge/error.hpp"
#include "memforge/graph.hpp"
#include "memforge/matrix.hpp"
#include "memforge/memory_bank.hpp"

namespace memforge {

// Added to the logits of masked rows in place of -inf.
inline constexpr double kMaskSentinel = -1e9;

enum class ActivationMode { Static, Dynamic, Fused };

inline std::string_view to_string(ActivationMode m) {
    switch (m) {
        case ActivationMode::Static: return "static";
        case ActivationMode::Dynamic: return "dynamic";
        case ActivationMode::Fused: return "fused";
    }
    return "fused";
}

struct ActivationConfig {
    double epsilon = 1e-8;
    std::size_t cap_dynamic = 5;
    std::size_t cap_static = 5;
    std::optional<std::vector<double>> mask;
    std::optional<Matrix> projection_query;
    std::optional<Matrix> projection_memory;
    std::optional<double> relevance_floor;

    void validate(std::size_t bank_rows, std::size_t d) const {
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
            throw ConfigError("invalid_epsilon", "epsilon must be a finite non-negative number");
        }
        if (cap_dynamic < 1 || cap_static < 1) {
            throw ConfigError("invalid_cap", "activation caps must be >= 1");
        }
        if (mask) {
            if (mask->size() != bank_rows) {
                throw ConfigError("invalid_mask", "mask length must equal the bank size");
            }
            for (double m : *mask) {
                if (std::isnan(m) || m == std::numeric_limits<double>::infinity()) {
                    throw ConfigError("invalid_mask", "mask entries must be finite or -inf");
                }
            }
        }
        for (const auto* p : {&projection_query, &projection_memory}) {
            if (*p && ((*p)->rows() != d || (*p)->cols() != d)) {
                throw ConfigError("invalid_projection", "projections must be d x d");
            }
        }
        if (relevance_floor && !(*relevance_floor >= 0.0 && *relevance_floor <= 1.0)) {
            throw ConfigError("invalid_floor", "relevance floor must lie in [0, 1]");
        }
    }
};

struct ActivationResult {
    ActivationMode mode = ActivationMode::Static;
    std::vector<std::size_t> indices;
    std::vector<double> scores;
    std::vector<ActivationMode> sources;  // mode that scored each entry
    Matrix wm_rows;
    std::vector<EdgeKey> provenance;
    // Pre-selection scores over the whole bank: cosine (static) or J (dynamic).
    std::vector<double> distribution;
    bool degenerate_query = false;

    bool empty() const { return indices.empty(); }
};

// q = mean(X) / (||mean(X)|| + eps)
inline Vector compute_query(const Matrix& tokens, double epsilon) {
    if (tokens.rows() == 0) throw DataError("empty_sequence", "input sequence has no tokens");
    Vector mean(tokens.cols(), 0.0);
    for (std::size_t t = 0; t < tokens.rows(); ++t) {
        auto row = tokens.row(t);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
    }
    const double n = static_cast<double>(tokens.rows());
    for (double& x : mean) x /= n;
    const double scale = l2_norm(mean) + epsilon;
    if (scale == 0.0) return mean;  // all-zero input with eps = 0
    for (double& x : mean) x /= scale;
    return mean;
}

// Indices of the k largest scores among eligible rows; ties by ascending index.
inline std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k,
                                      const std::vector<bool>* eligible = nullptr) {
    std::vector<std::size_t> idx;
    idx.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!eligible || (*eligible)[i]) idx.push_back(i);
    }
    k = std::min(k, idx.size());
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
    idx.resize(k);
    return idx;
}

namespace detail {

inline void check_bank_query(const MemoryBank& bank, std::span<const double> q) {
    if (bank.size() == 0) throw DataError("empty_ltm", "empty LTM");
    if (q.size() != bank.dimension()) {
        throw DataError("dimension_mismatch", "query dimension differs from the bank");
    }
}

inline void fill_selection(ActivationResult& r, const MemoryBank& bank,
                           const std::vector<std::size_t>& picked,
                           const std::vector<double>& row_scale) {
    r.indices = picked;
    r.wm_rows = Matrix(picked.size(), bank.dimension());
    for (std::size_t j = 0; j < picked.size(); ++j) {
        const std::size_t i = picked[j];
        r.scores.push_back(r.distribution[i]);
        r.sources.push_back(r.mode);
        if (i < bank.provenance.size()) r.provenance.push_back(bank.provenance[i]);
        auto src = bank.matrix.row(i);
        auto dst = r.wm_rows.row(j);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = row_scale[i] * src[c];
    }
}

}  // namespace detail

inline ActivationResult static_activate(const MemoryBank& bank, std::span<const double> q,
                                        std::size_t cap) {
    detail::check_bank_query(bank, q);
    if (cap < 1) throw ConfigError("invalid_cap", "static cap must be >= 1");

    ActivationResult r;
    r.mode = ActivationMode::Static;
    const double qn = l2_norm(q);
    r.degenerate_query = qn == 0.0;
    r.distribution.assign(bank.size(), 0.0);
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto row = bank.matrix.row(i);
        const double mn = l2_norm(row);
        if (mn == 0.0 || qn == 0.0) continue;
        r.distribution[i] = dot(row, q) / (mn * qn);
    }
    // Anti-correlated rows are injected as zero rows rather than sign-flipped.
    std::vector<double> scale(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) scale[i] = std::clamp(r.distribution[i], 0.0, 1.0);
    detail::fill_selection(r, bank, top_k(r.distribution, cap), scale);
    return r;
}

// Raw logits (before softmax) including mask; exposed for verification.
inline std::vector<double> dynamic_logits(const MemoryBank& bank, std::span<const double> q,
                                          const ActivationConfig& config) {
    const std::size_t d = bank.dimension();
    Vector qp(q.begin(), q.end());
    if (config.projection_query) qp = matvec(*config.projection_query, q);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<double> logits(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto row = bank.matrix.row(i);
        double s = 0.0;
        if (config.projection_memory) {
            s = dot(matvec(*config.projection_memory, row), qp);
        } else {
            s = dot(row, qp);
        }
        logits[i] = s * inv_sqrt_d;
        if (config.mask) {
            const double m = (*config.mask)[i];
            logits[i] += m <= kMaskSentinel ? kMaskSentinel : m;
        }
    }
    return logits;
}

inline bool is_masked(const ActivationConfig& config, std::size_t i) {
    return config.mask && (*config.mask)[i] <= kMaskSentinel;
}

inline std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

inline ActivationResult dynamic_activate(const MemoryBank& bank, std::span<const double> q,
                                         const ActivationConfig& config) {
    detail::check_bank_query(bank, q);
    config.validate(bank.size(), bank.dimension());

    std::vector<bool> eligible(bank.size(), true);
    std::size_t open = 0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        eligible[i] = !is_masked(config, i);
        open += eligible[i] ? 1 : 0;
    }
    if (open == 0) throw DataError("memory_fully_masked", "memory fully masked");

    ActivationResult r;
    r.mode = ActivationMode::Dynamic;
    r.degenerate_query = l2_norm(q) == 0.0;
    r.distribution = softmax(dynamic_logits(bank, q, config));
    detail::fill_selection(r, bank, top_k(r.distribution, config.cap_dynamic, &eligible),
                           r.distribution);
    return r;
}

namespace detail {

inline void append_entry(ActivationResult& out, const ActivationResult& src, std::size_t j,
                         std::vector<std::vector<double>>& rows) {
    out.indices.push_back(src.indices[j]);
    out.scores.push_back(src.scores[j]);
    out.sources.push_back(src.mode);
    if (j < src.provenance.size()) out.provenance.push_back(src.provenance[j]);
    auto r = src.wm_rows.row(j);
    rows.emplace_back(r.begin(), r.end());
}

}  // namespace detail

// Union of the per-mode selections. The floor is applied per mode on that
// mode's own scale, then entries are merged: dynamic entries first (by score),
// then static-only entries (by score). An index chosen by both modes keeps its
// dynamic copy.
inline ActivationResult adaptive_select(const ActivationResult& stat, const ActivationResult& dyn,
                                        const ActivationConfig& config) {
    if (stat.empty() && dyn.empty()) throw DataError("no_activation", "no activation");
    if (stat.wm_rows.cols() != 0 && dyn.wm_rows.cols() != 0 &&
        stat.wm_rows.cols() != dyn.wm_rows.cols()) {
        throw DataError("dimension_mismatch", "static and dynamic results come from different banks");
    }
    auto passes = [&](double score) {
        return !config.relevance_floor || score >= *config.relevance_floor;
    };

    ActivationResult out;
    out.mode = ActivationMode::Fused;
    out.degenerate_query = stat.degenerate_query || dyn.degenerate_query;
    std::vector<std::vector<double>> rows;
    std::unordered_set<std::size_t> taken;

    const std::size_t n_dyn = std::min(dyn.indices.size(), config.cap_dynamic);
    for (std::size_t j = 0; j < n_dyn; ++j) {
        if (!passes(dyn.scores[j])) continue;
        taken.insert(dyn.indices[j]);
        detail::append_entry(out, dyn, j, rows);
    }
    const std::size_t n_stat = std::min(stat.indices.size(), config.cap_static);
    for (std::size_t j = 0; j < n_stat; ++j) {
        if (!passes(stat.scores[j]) || taken.count(stat.indices[j])) continue;
        taken.insert(stat.indices[j]);
        detail::append_entry(out, stat, j, rows);
    }

    const std::size_t d = std::max(stat.wm_rows.cols(), dyn.wm_rows.cols());
    out.wm_rows = Matrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), out.wm_rows.row(i).begin());
    }
    return out;
}

// X* = [WM rows; X]
inline Matrix assemble_augmented(const ActivationResult& wm, const Matrix& tokens) {
    if (wm.empty()) throw DataError("empty_working_memory", "working memory is empty");
    if (wm.wm_rows.cols() != tokens.cols()) {
        throw DataError("dimension_mismatch", "working memory and input dimensions differ");
    }
    Matrix out(wm.wm_rows.rows() + tokens.rows(), tokens.cols());
    std::copy(wm.wm_rows.data().begin(), wm.wm_rows.data().end(), out.data().begin());
    std::copy(tokens.data().begin(), tokens.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(wm.wm_rows.data().size()));
    return out;
}

}  // namespace memforge
