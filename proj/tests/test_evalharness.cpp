#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "crokage/errors.hpp"
#include "crokage/evalharness.hpp"
#include "synthetic.hpp"

using namespace crokage;
using Ids = std::vector<AnswerId>;
using Rel = std::set<AnswerId>;

namespace {

std::vector<GoldEntry> numbered(std::size_t n) {
    std::vector<GoldEntry> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({"q" + std::to_string(100 + i), "query", {1}});
    return out;
}

}  // namespace

TEST(Metrics, Hit) {
    EXPECT_EQ(hit_at_k(Ids{5, 6, 7}, Rel{7}, 10), 1.0);
    Ids eleven{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    EXPECT_EQ(hit_at_k(eleven, Rel{11}, 10), 0.0);
    EXPECT_EQ(hit_at_k(Ids{}, Rel{1}, 10), 0.0);
    auto report = aggregate({score_query({"a", "", {1}}, Ids{1}, 10), score_query({"b", "", {1}}, Ids{2}, 10),
                             score_query({"c", "", {1}}, Ids{1}, 10), score_query({"d", "", {1}}, Ids{}, 10)},
                            10);
    EXPECT_EQ(report.hit, 0.5);
}

TEST(Metrics, Mrr) {
    EXPECT_EQ(mrr_at_k(Ids{9, 1}, Rel{1}, 10), 0.5);
    EXPECT_EQ(mrr_at_k(Ids{9, 8}, Rel{1}, 10), 0.0);
    EXPECT_EQ(mrr_at_k(Ids{1}, Rel{1}, 10), 1.0);
}

TEST(Metrics, ApAndRecall) {
    EXPECT_EQ(map_at_k(Ids{9, 1}, Rel{1}, 10), 0.5);
    EXPECT_EQ(mr_at_k(Ids{9, 1}, Rel{1}, 10), 1.0);
    EXPECT_NEAR(map_at_k(Ids{1, 9, 2}, Rel{1, 2}, 3), 0.8333333333333333, 1e-15);
    EXPECT_EQ(mr_at_k(Ids{1, 9, 2}, Rel{1, 2}, 3), 1.0);
    EXPECT_EQ(map_at_k(Ids{7, 8}, Rel{1}, 10), 0.0);
    EXPECT_EQ(mr_at_k(Ids{7, 8}, Rel{1}, 10), 0.0);
    EXPECT_THROW(map_at_k(Ids{1}, Rel{1}, 0), ValidationError);
}

TEST(Metrics, MonotoneInKAndBounded) {
    std::vector<Ids> lists{{1, 2, 3, 4, 5, 6}, {6, 5, 4}, {3, 1}, {}};
    for (const auto& l : lists) {
        for (const Rel& rel : {Rel{1}, Rel{2, 5}, Rel{4, 5, 6}}) {
            for (std::size_t k = 1; k < 8; ++k) {
                EXPECT_LE(mrr_at_k(l, rel, k), hit_at_k(l, rel, k));
                EXPECT_LE(mr_at_k(l, rel, k), mr_at_k(l, rel, k + 1));
                EXPECT_LE(hit_at_k(l, rel, k), hit_at_k(l, rel, k + 1));
                for (double v : {map_at_k(l, rel, k), mr_at_k(l, rel, k)}) {
                    EXPECT_GE(v, 0.0);
                    EXPECT_LE(v, 1.0);
                }
            }
        }
    }
}

TEST(GoldSetTest, ParseRatingsAndRelevance) {
    std::istringstream in(R"({"query_id": "b", "query": "x", "relevant": [3], "ratings": {"4": [4, 5], "5": [3, 4]}}
{"query_id": 7, "query": "y", "ratings": {"8": 4}}
{"query_id": "z", "query": "none", "ratings": {"1": [1, 2]}}
)");
    Diagnostics diag;
    auto g = GoldSet::parse(in, &diag);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.entries[0].query_id, "7");
    EXPECT_EQ(g.entries[0].relevant, Rel{8});
    EXPECT_EQ(g.entries[1].relevant, (Rel{3, 4}));
    EXPECT_EQ(diag.count("gold_without_relevant"), 1u);
}

TEST(GoldSetTest, RejectsBadRows) {
    std::istringstream a("{\"query\": \"no id\"}\n");
    EXPECT_THROW(GoldSet::parse(a), ValidationError);
    std::istringstream b("{\"query_id\": 1, \"query\": \"q\", \"relevant\": [1]}\n{\"query_id\": 1, \"query\": \"q\", \"relevant\": [2]}\n");
    EXPECT_THROW(GoldSet::parse(b), ValidationError);
    std::istringstream c("not json\n");
    EXPECT_THROW(GoldSet::parse(c), ValidationError);
}

TEST(GoldSetTest, FixtureFile) {
    Diagnostics diag;
    auto g = GoldSet::load(crokage::testing::data_path("gold.jsonl"), &diag);
    EXPECT_EQ(g.size(), 7u);
    EXPECT_EQ(g.entries[1].relevant, (Rel{5, 6}));
}

TEST(Split, SizesAndDeterminism) {
    auto gold = numbered(97);
    auto [train, test] = split_queries(gold, 42);
    EXPECT_EQ(train.size(), 49u);
    EXPECT_EQ(test.size(), 48u);
    auto [train2, test2] = split_queries(gold, 42);
    for (std::size_t i = 0; i < train.size(); ++i) EXPECT_EQ(train[i].query_id, train2[i].query_id);
    auto [t4, s4] = split_queries(numbered(4), 1);
    EXPECT_EQ(t4.size(), 2u);
    EXPECT_EQ(s4.size(), 2u);
    std::set<std::string> all;
    for (const auto& e : train) all.insert(e.query_id);
    for (const auto& e : test) all.insert(e.query_id);
    EXPECT_EQ(all.size(), 97u);
    auto [other, rest] = split_queries(gold, 43);
    bool differs = false;
    for (std::size_t i = 0; i < other.size(); ++i) differs |= other[i].query_id != train[i].query_id;
    EXPECT_TRUE(differs);
    EXPECT_THROW(split_queries(numbered(1), 1), ValidationError);
}

TEST(Baselines, NamesAndMasks) {
    for (auto name : {"bm25", "tfidf", "semantic", "api_class", "api_method", "fused"}) {
        EXPECT_EQ(baseline_name(parse_baseline(name)), name);
    }
    EXPECT_THROW(parse_baseline("lucene"), ValidationError);
    EXPECT_EQ(baseline_weights(Baseline::semantic, {}), (WeightConfig{1, 0, 0, 0}));
    EXPECT_EQ(baseline_weights(Baseline::api_method, {}), (WeightConfig{0, 0, 0, 1}));
}

class FixtureHarness : public ::testing::Test {
protected:
    Corpus corpus = crokage::testing::fixture_corpus();
    IndexBundle indices = IndexBundle::build(corpus, {}, 1);
    EmbeddingStore store = EmbeddingStore::load(crokage::testing::data_path("vectors.txt"));
    Ranker ranker{corpus, indices, &store, PipelineConfig{}};
    GoldSet gold = GoldSet::load(crokage::testing::data_path("gold.jsonl"));
};

TEST_F(FixtureHarness, Bm25BaselineIsSmallSetOrder) {
    auto cache = build_pools(ranker, gold.entries);
    for (const auto& pool : cache.pools) {
        auto ids = baseline_ranking(Baseline::bm25, ranker, pool, {});
        ASSERT_EQ(ids.size(), pool.sets.small_set.size());
        for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], pool.sets.small_set[i].answer_id);
    }
}

TEST_F(FixtureHarness, SemanticBaselineEqualsMaskedFusion) {
    auto cache = build_pools(ranker, gold.entries);
    auto a = run_baseline(Baseline::semantic, ranker, cache, 10, {});
    auto b = evaluate_weights(ranker, cache, {1, 0, 0, 0}, 10);
    EXPECT_EQ(a.to_json(), b.to_json());
}

TEST_F(FixtureHarness, CalibrationIsExhaustiveAndDeterministic) {
    auto cache = build_pools(ranker, gold.entries);
    auto r1 = calibrate_weights(ranker, cache, 10);
    auto r2 = calibrate_weights(ranker, cache, 10);
    EXPECT_EQ(r1.evaluated, 625u);
    EXPECT_EQ(r1.weights, r2.weights);
    // nothing on the grid beats the winner, and ties resolve to the smallest vector
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (double b : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                for (double d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                    WeightConfig w{a, b, c, d};
                    auto r = evaluate_weights(ranker, cache, w, 10);
                    auto key = std::tie(r.hit, r.mrr, r.map);
                    auto best = std::tie(r1.hit, r1.mrr, r1.map);
                    EXPECT_LE(key, best);
                    if (key == best) EXPECT_LE(r1.weights, w);
                }
            }
        }
    }
    EXPECT_THROW(calibrate_weights(ranker, PoolCache{}, 10), ValidationError);
}

TEST_F(FixtureHarness, ReportJsonShape) {
    auto r = run_baseline(Baseline::fused, ranker, gold.entries, 10, ranker.config().weights);
    auto j = r.to_json();
    EXPECT_EQ(j["k"], 10);
    EXPECT_EQ(j["per_query"].size(), gold.size());
    double mean = 0;
    for (const auto& q : r.per_query) mean += q.hit;
    EXPECT_DOUBLE_EQ(r.hit, mean / static_cast<double>(r.per_query.size()));
    EXPECT_EQ(r.to_json().dump(), j.dump());
}
