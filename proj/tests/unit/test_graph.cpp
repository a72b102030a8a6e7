#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "memforge/graph.hpp"
#include "support/oracles.hpp"

using namespace memforge;

namespace {

Evidence ev(double c, Vector z) { return Evidence{c, std::move(z), sha256("src")}; }

EvidenceTriple triple(std::string s, std::string r, std::string o, double c, Vector z,
                      std::string source = "doc") {
    EvidenceTriple t;
    t.subject = std::move(s);
    t.relation = std::move(r);
    t.object = std::move(o);
    t.confidence = c;
    t.embedding = std::move(z);
    t.source_digest = sha256(source);
    return t;
}

}  // namespace

TEST(Canonicalize, SynonymLookupOnNormalizedForm) {
    const SynonymTable syn = make_synonym_table({{"GBM", "Glioblastoma"}});
    EXPECT_EQ(canonicalize_entity("GBM", syn), "glioblastoma");
    EXPECT_EQ(canonicalize_entity(" g.b.m ", syn), "g b m");
    EXPECT_EQ(canonicalize_entity("Glioblastoma", {}), "glioblastoma");
    EXPECT_THROW(canonicalize_entity("!!!", {}), DataError);
}

TEST(Canonicalize, RegistersSurfaceForms) {
    KnowledgeGraph g;
    const SynonymTable syn = make_synonym_table({{"gbm", "glioblastoma"}});
    EXPECT_EQ(g.canonicalize("GBM", syn), "glioblastoma");
    EXPECT_EQ(g.canonicalize("Glioblastoma", syn), "glioblastoma");
    const Entity& e = g.entities().at("glioblastoma");
    EXPECT_EQ(e.surface_forms, (std::set<std::string>{"GBM", "Glioblastoma"}));
    EXPECT_EQ(g.phi().at("GBM"), "glioblastoma");
}

TEST(FuseEdgeWeight, SingleEvidenceIsAlphaTimesConfidence) {
    std::vector<Evidence> e{ev(0.9, {0.3, 0.4})};
    EXPECT_EQ(fuse_edge_weight(e, {1.0, 1.0}), 0.9);
    EXPECT_EQ(fuse_edge_weight(e, {0.9, 1.0}), 0.9 * 0.9);
}

TEST(FuseEdgeWeight, IdenticalEmbeddingsGiveClassicalNoisyOr) {
    std::vector<Evidence> e{ev(0.8, {1.0, 0.0}), ev(0.6, {1.0, 0.0})};
    EXPECT_NEAR(fuse_edge_weight(e, {1.0, 1.0}), 0.92, 1e-12);
}

// Frozen from an independent scalar evaluation of the fusion formula
// (Python float arithmetic): 1 - (1 - .9*.8*e^-.5)(1 - .9*.6*e^-.5).
TEST(FuseEdgeWeight, OrthogonalEmbeddingsMatchFrozenOracle) {
    std::vector<Evidence> e{ev(0.8, {1.0, 0.0}), ev(0.6, {0.0, 1.0})};
    EXPECT_NEAR(fuse_edge_weight(e, {0.9, 1.0}), 0.6211971045104614, 1e-12);
    EXPECT_NEAR(fuse_edge_weight(e, {0.9, 1.0}),
                oracle::fused_weight({0.8, 0.6}, {{1.0, 0.0}, {0.0, 1.0}}, 0.9, 1.0), 1e-12);
}

TEST(FuseEdgeWeight, RejectsEmptyAndBadParams) {
    EXPECT_THROW(fuse_edge_weight({}, {}), DataError);
    std::vector<Evidence> e{ev(0.5, {1.0, 0.0})};
    EXPECT_THROW(fuse_edge_weight(e, {0.0, 1.0}), ConfigError);
    EXPECT_THROW(fuse_edge_weight(e, {1.1, 1.0}), ConfigError);
    EXPECT_THROW(fuse_edge_weight(e, {0.9, 0.0}), ConfigError);
    std::vector<Evidence> bad{ev(1.5, {1.0, 0.0})};
    EXPECT_THROW(fuse_edge_weight(bad, {}), DataError);
}

TEST(FuseEdgeWeight, OrderInvariant) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Evidence> e;
        for (int k = 0; k < 6; ++k) e.push_back(ev(u(rng), oracle::random_unit(rng, 5)));
        const double w = fuse_edge_weight(e, {});
        std::shuffle(e.begin(), e.end(), rng);
        ASSERT_NEAR(fuse_edge_weight(e, {}), w, 1e-12);
    }
}

TEST(FuseEdgeWeight, CentroidPreservingAppendStrictlyIncreases) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Evidence> e;
        std::vector<Vector> zs;
        for (int k = 0; k < 4; ++k) {
            zs.push_back(oracle::random_unit(rng, 6));
            e.push_back(ev(u(rng), zs.back()));
        }
        const double before = fuse_edge_weight(e, {});
        e.push_back(ev(u(rng), centroid(zs)));
        const double after = fuse_edge_weight(e, {});
        ASSERT_GT(after, before);
        ASSERT_LT(after, 1.0);
    }
}

// Appending an off-centroid evidence moves the centroid and can lower the
// weight: the embedding penalty makes noisy-or monotonicity conditional.
TEST(FuseEdgeWeight, OffCentroidAppendCanDecrease) {
    std::vector<Evidence> e{ev(0.9, {1.0, 0.0})};
    const double before = fuse_edge_weight(e, {});
    e.push_back(ev(0.01, {0.0, 1.0}));
    EXPECT_LT(fuse_edge_weight(e, {}), before);
}

TEST(FuseEdgeWeight, PenaltyShrinksFartherEvidence) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector center = oracle::random_unit(rng, 4);
        const Vector dir = oracle::random_unit(rng, 4);
        Vector near = center, far = center;
        for (std::size_t i = 0; i < 4; ++i) {
            near[i] += 0.1 * dir[i];
            far[i] += 0.7 * dir[i];
        }
        ASSERT_LE(effective_contribution(0.8, far, center, {}),
                  effective_contribution(0.8, near, center, {}));
    }
}

TEST(Upsert, FreshGraphSingleTriple) {
    KnowledgeGraph g(FusionParams{0.9, 1.0});
    g.upsert(triple("GBM", "EXHIBITS_FEATURE", "Necrosis", 0.9, {1.0, 0.0}), {});
    EXPECT_EQ(g.entities().size(), 2u);
    ASSERT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.edges().begin()->second.fused_weight, 0.9 * 0.9);
    EXPECT_EQ(g.edges().begin()->first, (EdgeKey{"gbm", "EXHIBITS_FEATURE", "necrosis"}));
}

TEST(Upsert, SecondSourceReinforcesSameEdge) {
    KnowledgeGraph g;
    const SynonymTable syn = make_synonym_table({{"gbm", "glioblastoma"}});
    const auto& e1 = g.upsert(triple("GBM", "EXHIBITS_FEATURE", "necrosis", 0.9, {0.6, 0.8}, "a"), syn);
    const double w1 = e1.fused_weight;
    const auto& e2 =
        g.upsert(triple("glioblastoma", "EXHIBITS_FEATURE", "Necrosis", 0.7, {0.6, 0.8}, "b"), syn);
    EXPECT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(e2.evidence.size(), 2u);
    EXPECT_GT(e2.fused_weight, w1);
    EXPECT_EQ(e2.evidence[0].source, sha256("a"));
    EXPECT_EQ(e2.evidence[1].source, sha256("b"));
}

TEST(Upsert, DistinctRelationsAreDistinctEdges) {
    KnowledgeGraph g;
    g.upsert(triple("a", "INDICATES", "b", 0.9, {1.0, 0.0}), {});
    g.upsert(triple("a", "ASSOCIATED_WITH", "b", 0.9, {1.0, 0.0}), {});
    EXPECT_EQ(g.edges().size(), 2u);
    EXPECT_EQ(g.feature_index_lookup("b").edges.size(), 2u);
}

TEST(Upsert, DiseaseTypingFromLexicon) {
    KnowledgeGraph g(FusionParams{}, {"Glioblastoma", "Meningioma"});
    g.upsert(triple("glioblastoma", "EXHIBITS_FEATURE", "necrosis", 0.9, {1.0, 0.0}), {});
    g.upsert(triple("whorls", "INDICATES", "meningioma", 0.9, {1.0, 0.0}), {});
    EXPECT_EQ(g.entities().at("glioblastoma").type, EntityType::Disease);
    EXPECT_EQ(g.entities().at("necrosis").type, EntityType::Feature);
    EXPECT_EQ(g.disease_nodes(), (std::set<std::string>{"glioblastoma", "meningioma"}));
}

TEST(Upsert, RejectionLeavesGraphUntouched) {
    KnowledgeGraph g;
    EXPECT_THROW(g.upsert(triple("fine", "INDICATES", "???", 0.9, {1.0, 0.0}), {}), DataError);
    EXPECT_TRUE(g.entities().empty());
    EXPECT_TRUE(g.phi().empty());
    g.upsert(triple("a", "INDICATES", "b", 0.9, {1.0, 0.0}), {});
    EXPECT_THROW(g.upsert(triple("a", "INDICATES", "b", 0.9, {1.0, 0.0, 0.0}), {}), DataError);
}

TEST(DiseaseNodes, EmptyGraphAndMixedTypes) {
    EXPECT_TRUE(KnowledgeGraph{}.disease_nodes().empty());
    KnowledgeGraph g(FusionParams{}, {"d1", "d2"});
    g.upsert(triple("d1", "EXHIBITS_FEATURE", "f1", 0.9, {1.0, 0.0}), {});
    g.upsert(triple("d2", "EXHIBITS_FEATURE", "f2", 0.9, {1.0, 0.0}), {});
    g.upsert(triple("f3", "ASSOCIATED_WITH", "f1", 0.9, {1.0, 0.0}), {});
    EXPECT_EQ(g.disease_nodes(), (std::set<std::string>{"d1", "d2"}));
}

TEST(FeatureIndex, LookupMatchesDefinition) {
    KnowledgeGraph g;
    g.upsert(triple("a", "R", "b", 0.9, {1.0, 0.0}), {});
    g.upsert(triple("c", "R", "b", 0.9, {1.0, 0.0}), {});
    const auto b = g.feature_index_lookup("b");
    EXPECT_TRUE(b.known);
    EXPECT_EQ(b.edges.size(), 2u);
    EXPECT_EQ(g.feature_index_lookup("a").edges.size(), 1u);
    const auto q = g.feature_index_lookup("q");
    EXPECT_FALSE(q.known);
    EXPECT_TRUE(q.edges.empty());
}

TEST(FeatureIndex, MatchesBruteForceScanOnRandomGraphs) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> ent(0, 14), rel(0, 2);
    const char* rels[] = {"INDICATES", "ASSOCIATED_WITH", "EXHIBITS_FEATURE"};
    for (int trial = 0; trial < 30; ++trial) {
        KnowledgeGraph g;
        for (int i = 0; i < 60; ++i) {
            g.upsert(triple("e" + std::to_string(ent(rng)), rels[rel(rng)], "e" + std::to_string(ent(rng)),
                            0.7, {1.0, 0.0}),
                     {});
        }
        for (int f = 0; f < 16; ++f) {
            const std::string id = "e" + std::to_string(f);
            const auto got = g.feature_index_lookup(id).edges;
            ASSERT_EQ(std::set<EdgeKey>(got.begin(), got.end()), oracle::psi_scan(g, id));
        }
    }
}

TEST(GraphStore, ReadersSeeWholeUpserts) {
    GraphStore store;
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!done) {
            auto view = store.view();
            // Each update adds exactly one edge and two entities.
            if (view->entities().size() != 2 * view->edges().size()) ++bad;
        }
    });
    for (int i = 0; i < 50; ++i) {
        store.update([i](KnowledgeGraph& g) {
            g.upsert(triple("s" + std::to_string(i), "R", "o" + std::to_string(i), 0.8, {1.0, 0.0}), {});
        });
    }
    done = true;
    reader.join();
    EXPECT_EQ(bad.load(), 0);
    EXPECT_EQ(store.view()->edges().size(), 50u);
}
