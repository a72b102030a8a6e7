#pragma once
// Single-head self-attention over an augmented sequence, with an analytic
// backward pass. Used to check that working-memory rows actually reach the
// output of a downstream encoder; nothing here is trained.

#include <algorithm>
#include <cmath>
#include <limits>

#include "memforge/error.hpp"
#include "memforge/matrix.hpp"

namespace memforge {

struct AttentionForward {
    Matrix queries, keys, values;  // X Wq, X Wk, X Wv
    Matrix weights;                // row-wise softmax of Q K^T / sqrt(d)
    Matrix output;                 // weights * V
};

inline AttentionForward attention_forward(const Matrix& x, const Matrix& wq, const Matrix& wk,
                                          const Matrix& wv) {
    const std::size_t d = x.cols();
    for (const Matrix* w : {&wq, &wk, &wv}) {
        if (w->rows() != d || w->cols() != d) {
            throw DataError("dimension_mismatch", "attention weights must be d x d");
        }
    }
    AttentionForward f;
    f.queries = matmul(x, wq);
    f.keys = matmul(x, wk);
    f.values = matmul(x, wv);
    f.weights = matmul_transposed(f.queries, f.keys);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < f.weights.rows(); ++i) {
        auto row = f.weights.row(i);
        double mx = -std::numeric_limits<double>::infinity();
        for (double& s : row) {
            s *= inv_sqrt_d;
            mx = std::max(mx, s);
        }
        double sum = 0.0;
        for (double& s : row) {
            s = std::exp(s - mx);
            sum += s;
        }
        for (double& s : row) s /= sum;
    }
    f.output = matmul(f.weights, f.values);
    return f;
}

inline Matrix reference_attention(const Matrix& x, const Matrix& wq, const Matrix& wk,
                                  const Matrix& wv) {
    return attention_forward(x, wq, wk, wv).output;
}

// Gradient of sum(upstream .* output) with respect to x.
inline Matrix attention_input_gradient(const Matrix& x, const Matrix& wq, const Matrix& wk,
                                       const Matrix& wv, const Matrix& upstream) {
    const AttentionForward f = attention_forward(x, wq, wk, wv);
    if (upstream.rows() != f.output.rows() || upstream.cols() != f.output.cols()) {
        throw DataError("dimension_mismatch", "upstream gradient shape differs from output");
    }
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(x.cols()));

    const Matrix d_weights = matmul_transposed(upstream, f.values);        // G V^T
    const Matrix d_values = matmul(transpose(f.weights), upstream);        // A^T G
    Matrix d_scores(f.weights.rows(), f.weights.cols());                   // softmax backward
    for (std::size_t i = 0; i < f.weights.rows(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < f.weights.cols(); ++j) inner += f.weights(i, j) * d_weights(i, j);
        for (std::size_t j = 0; j < f.weights.cols(); ++j) {
            d_scores(i, j) = f.weights(i, j) * (d_weights(i, j) - inner) * inv_sqrt_d;
        }
    }
    const Matrix d_queries = matmul(d_scores, f.keys);
    const Matrix d_keys = matmul(transpose(d_scores), f.queries);

    Matrix grad = matmul_transposed(d_queries, wq);
    const Matrix gk = matmul_transposed(d_keys, wk);
    const Matrix gv = matmul_transposed(d_values, wv);
    for (std::size_t i = 0; i < grad.data().size(); ++i) grad.data()[i] += gk.data()[i] + gv.data()[i];
    return grad;
}

}  // namespace memforge
