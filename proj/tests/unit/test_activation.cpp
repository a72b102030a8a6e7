#include <gtest/gtest.h>

#include <random>

#include "memforge/activation.hpp"
#include "support/oracles.hpp"

using namespace memforge;

namespace {

MemoryBank bank_of(const std::vector<Vector>& rows) {
    MemoryBank b;
    b.matrix = Matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), b.matrix.row(i).begin());
        b.provenance.push_back({"s" + std::to_string(i), "INDICATES", "o"});
    }
    return b;
}

MemoryBank bank_of(Matrix m) {
    MemoryBank b;
    b.matrix = std::move(m);
    for (std::size_t i = 0; i < b.matrix.rows(); ++i) {
        b.provenance.push_back({"s" + std::to_string(i), "INDICATES", "o"});
    }
    return b;
}

Matrix tokens_of(const std::vector<Vector>& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return m;
}

}  // namespace

TEST(ComputeQuery, MeanPooledAndNormalized) {
    const Vector q = compute_query(tokens_of({{1.0, 0.0}, {0.0, 1.0}}), 0.0);
    EXPECT_NEAR(q[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(q[1], 1.0 / std::sqrt(2.0), 1e-15);
    const Vector z = compute_query(tokens_of({{1.0, 0.0}, {-1.0, 0.0}}), 1e-8);
    EXPECT_EQ(z, (Vector{0.0, 0.0}));
    EXPECT_THROW(compute_query(Matrix(0, 4), 1e-8), DataError);
}

TEST(StaticActivate, AxisVectors) {
    const MemoryBank bank = bank_of({{1, 0, 0}, {0, 1, 0}, {0.6, 0.8, 0}});
    const Vector q{1, 0, 0};
    const auto r = static_activate(bank, q, 2);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 2}));
    EXPECT_NEAR(r.scores[0], 1.0, 1e-15);
    EXPECT_NEAR(r.scores[1], 0.6, 1e-15);
    EXPECT_NEAR(r.wm_rows(1, 0), 0.36, 1e-15);
    EXPECT_NEAR(r.wm_rows(1, 1), 0.48, 1e-15);
    EXPECT_EQ(r.provenance[1], bank.provenance[2]);
}

TEST(StaticActivate, TiesBreakByLowerIndex) {
    const MemoryBank bank = bank_of({{0, 1}, {1, 0}, {2, 0}, {3, 0}});
    const auto r = static_activate(bank, Vector{1, 0}, 2);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{1, 2}));
}

TEST(StaticActivate, ZeroRowsAndDegenerateQuery) {
    const MemoryBank bank = bank_of({{0, 0}, {-1, 0}});
    const auto r = static_activate(bank, Vector{1, 0}, 2);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(r.scores[0], 0.0);
    EXPECT_EQ(r.wm_rows(1, 0), 0.0);
    const auto z = static_activate(bank, Vector{0, 0}, 1);
    EXPECT_TRUE(z.degenerate_query);
    EXPECT_EQ(z.indices, (std::vector<std::size_t>{0}));
}

TEST(StaticActivate, MatchesOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const MemoryBank bank = bank_of(oracle::random_matrix(rng, 50, 8));
        const Vector q = oracle::random_unit(rng, 8);
        const auto r = static_activate(bank, q, 5);
        const auto want = oracle::cosine_scores(bank.matrix, q);
        ASSERT_EQ(r.indices, oracle::top_k(want, 5));
        for (std::size_t i = 0; i < 50; ++i) {
            ASSERT_NEAR(r.distribution[i], static_cast<double>(want[i]), 1e-12);
        }
    }
}

TEST(DynamicActivate, SymmetricRowsSplitEvenly) {
    const MemoryBank bank = bank_of({{1, 0}, {1, 0}});
    ActivationConfig cfg;
    cfg.cap_dynamic = 2;
    const auto r = dynamic_activate(bank, Vector{1, 0}, cfg);
    EXPECT_DOUBLE_EQ(r.distribution[0], 0.5);
    EXPECT_DOUBLE_EQ(r.distribution[1], 0.5);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 1}));
    EXPECT_DOUBLE_EQ(r.wm_rows(0, 0), 0.5);
}

TEST(DynamicActivate, MaskedRowNeverSelected) {
    const MemoryBank bank = bank_of({{10, 0}, {1, 0}, {0, 1}});
    ActivationConfig cfg;
    cfg.cap_dynamic = 3;
    cfg.mask = std::vector<double>{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    const auto r = dynamic_activate(bank, Vector{1, 0}, cfg);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{1, 2}));
    EXPECT_LT(r.distribution[0], 1e-100);
    cfg.mask = std::vector<double>{-1e9, -1e12, -std::numeric_limits<double>::infinity()};
    try {
        dynamic_activate(bank, Vector{1, 0}, cfg);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.code(), "memory_fully_masked");
    }
}

TEST(DynamicActivate, MatchesOracleAndSumsToOne) {
    std::mt19937_64 rng(22);
    std::bernoulli_distribution coin(0.2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 20 + static_cast<std::size_t>(trial) * 7;
        const MemoryBank bank = bank_of(oracle::random_matrix(rng, n, 16));
        const Vector q = oracle::random_unit(rng, 16);
        ActivationConfig cfg;
        cfg.cap_dynamic = 4;
        std::vector<bool> masked(n);
        std::vector<double> mask(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            masked[i] = coin(rng);
            if (masked[i]) mask[i] = -std::numeric_limits<double>::infinity();
        }
        cfg.mask = mask;
        const auto r = dynamic_activate(bank, q, cfg);
        const auto want = oracle::softmax_scores(bank.matrix, q, masked);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += r.distribution[i];
            ASSERT_NEAR(r.distribution[i], static_cast<double>(want[i]), 1e-12);
        }
        ASSERT_NEAR(sum, 1.0, 1e-9);
        std::vector<bool> eligible(n);
        for (std::size_t i = 0; i < n; ++i) eligible[i] = !masked[i];
        ASSERT_EQ(r.indices, oracle::top_k(want, 4, eligible));
    }
}

TEST(DynamicActivate, IdentityProjectionsChangeNothing) {
    std::mt19937_64 rng(23);
    const MemoryBank bank = bank_of(oracle::random_matrix(rng, 30, 6));
    const Vector q = oracle::random_unit(rng, 6);
    ActivationConfig plain, proj;
    proj.projection_query = Matrix::identity(6);
    proj.projection_memory = Matrix::identity(6);
    EXPECT_EQ(dynamic_activate(bank, q, plain).distribution, dynamic_activate(bank, q, proj).distribution);
    proj.projection_query = Matrix(6, 6, 0.0);
    const auto flat = dynamic_activate(bank, q, proj);
    for (double p : flat.distribution) EXPECT_NEAR(p, 1.0 / 30.0, 1e-15);
    proj.projection_query = Matrix(5, 5, 0.0);
    EXPECT_THROW(dynamic_activate(bank, q, proj), ConfigError);
}

TEST(StaticDynamicAgreement, UnitNormBankSameArgmax) {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vector> rows;
        for (int i = 0; i < 40; ++i) rows.push_back(oracle::random_unit(rng, 12));
        const MemoryBank bank = bank_of(rows);
        const Vector q = oracle::random_unit(rng, 12);
        ActivationConfig cfg;
        const auto s = static_activate(bank, q, 5);
        const auto d = dynamic_activate(bank, q, cfg);
        ASSERT_EQ(s.indices, d.indices);
    }
}

TEST(ScaleEquivariance, PooledQueryIgnoresTokenScale) {
    std::mt19937_64 rng(25);
    const Matrix x = oracle::random_matrix(rng, 4, 8);
    Matrix scaled = x;
    for (double& v : scaled.data()) v *= 7.5;
    const Vector a = compute_query(x, 0.0), b = compute_query(scaled, 0.0);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
    const MemoryBank bank = bank_of(oracle::random_matrix(rng, 20, 8));
    EXPECT_EQ(static_activate(bank, a, 5).indices, static_activate(bank, b, 5).indices);
}

TEST(AdaptiveSelect, DisjointSelectionsUnion) {
    const MemoryBank bank = bank_of({{1, 0}, {0, 1}});
    ActivationConfig cfg;
    cfg.cap_dynamic = 1;
    cfg.cap_static = 1;
    const auto s = static_activate(bank, Vector{1, 0}, 1);
    const auto d = dynamic_activate(bank, Vector{0, 1}, cfg);
    const auto u = adaptive_select(s, d, cfg);
    EXPECT_EQ(u.indices, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(u.sources[0], ActivationMode::Dynamic);
    EXPECT_EQ(u.sources[1], ActivationMode::Static);
    EXPECT_EQ(u.wm_rows.rows(), 2u);
}

TEST(AdaptiveSelect, SharedIndexKeepsDynamicCopy) {
    const MemoryBank bank = bank_of({{1, 0}, {0, 1}});
    ActivationConfig cfg;
    cfg.cap_dynamic = 1;
    cfg.cap_static = 1;
    const auto s = static_activate(bank, Vector{1, 0}, 1);
    const auto d = dynamic_activate(bank, Vector{1, 0}, cfg);
    const auto u = adaptive_select(s, d, cfg);
    ASSERT_EQ(u.indices, (std::vector<std::size_t>{0}));
    EXPECT_EQ(u.sources[0], ActivationMode::Dynamic);
    EXPECT_EQ(u.wm_rows(0, 0), d.wm_rows(0, 0));
}

TEST(AdaptiveSelect, FloorAppliesPerMode) {
    // Row 0 is a scaled (0.8, 0.6) so its cosine with e1 is 0.8, below the floor,
    // while its softmax mass is essentially 1.
    const MemoryBank bank = bank_of({{80, 60}, {0, 1}});
    ActivationConfig cfg;
    cfg.cap_dynamic = 1;
    cfg.cap_static = 1;
    cfg.relevance_floor = 0.9;
    const Vector q{1, 0};
    const auto s = static_activate(bank, q, 1);
    const auto d = dynamic_activate(bank, q, cfg);
    const auto u = adaptive_select(s, d, cfg);
    ASSERT_EQ(u.indices, (std::vector<std::size_t>{0}));
    EXPECT_EQ(u.sources[0], ActivationMode::Dynamic);
}

TEST(AdaptiveSelect, BothEmptyIsNoActivation) {
    try {
        adaptive_select(ActivationResult{}, ActivationResult{}, ActivationConfig{});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.code(), "no_activation");
    }
}

TEST(AssembleAugmented, PrependsWorkingMemory) {
    const MemoryBank bank = bank_of({{1, 0}, {0, 1}});
    const auto s = static_activate(bank, Vector{1, 0}, 1);
    const Matrix x = tokens_of({{5, 6}, {7, 8}});
    const Matrix a = assemble_augmented(s, x);
    ASSERT_EQ(a.rows(), 3u);
    EXPECT_EQ(a(0, 0), 1.0);
    EXPECT_EQ(a(1, 0), 5.0);
    EXPECT_EQ(a(2, 1), 8.0);
    EXPECT_THROW(assemble_augmented(ActivationResult{}, x), DataError);
    EXPECT_THROW(assemble_augmented(s, tokens_of({{1, 2, 3}})), DataError);
}

TEST(ActivationConfig, Validation) {
    ActivationConfig cfg;
    cfg.cap_dynamic = 0;
    EXPECT_THROW(cfg.validate(3, 2), ConfigError);
    cfg = {};
    cfg.mask = std::vector<double>{0.0};
    EXPECT_THROW(cfg.validate(3, 2), ConfigError);
    cfg.mask = std::vector<double>{0.0, std::nan(""), 0.0};
    EXPECT_THROW(cfg.validate(3, 2), ConfigError);
    cfg = {};
    cfg.relevance_floor = 1.5;
    EXPECT_THROW(cfg.validate(3, 2), ConfigError);
}
