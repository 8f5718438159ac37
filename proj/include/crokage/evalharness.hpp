#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crokage/corpus.hpp"
#include "crokage/diagnostics.hpp"
#include "crokage/ranker.hpp"

namespace crokage {

// ---- metrics over one ranked list ----

/// 1 if any of the first k answers is relevant.
double hit_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k);
/// 1/rank of the first relevant answer within the top k, else 0.
double mrr_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k);
/// Average precision at k, normalized by min(|relevant|, k).
double map_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k);
/// Recall at k: |top k ∩ relevant| / |relevant|.
double mr_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k);
std::optional<std::size_t> first_relevant_rank(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant,
                                               std::size_t k);

// ---- gold set ----

struct GoldEntry {
    std::string query_id;
    std::string query;
    std::set<AnswerId> relevant;
};

/// Query to relevant-answer mapping. Entries are kept sorted by query id.
struct GoldSet {
    std::vector<GoldEntry> entries;

    /// JSON lines: {query_id, query, relevant: [ids], ratings: {id: likert | [likert...]}}.
    /// An answer is relevant when listed in `relevant` or when its mean rating
    /// is at least 4. Entries left without relevant answers are skipped and counted.
    static GoldSet parse(std::istream& in, Diagnostics* diag = nullptr);
    static GoldSet load(const std::filesystem::path& path, Diagnostics* diag = nullptr);

    std::size_t size() const { return entries.size(); }
};

/// Deterministic shuffle by seed, then the first ceil(n * train_frac) queries train.
std::pair<std::vector<GoldEntry>, std::vector<GoldEntry>> split_queries(std::span<const GoldEntry> gold,
                                                                        std::uint64_t seed, double train_frac = 0.5);

// ---- reports ----

struct QueryOutcome {
    std::string query_id;
    std::optional<std::size_t> first_relevant_rank;
    double hit = 0.0;
    double reciprocal_rank = 0.0;
    double precision = 0.0;  // average precision at k
    double recall = 0.0;
    std::vector<AnswerId> top;  // first k answers returned
};

struct EvalReport {
    std::size_t k = 10;
    double hit = 0.0;
    double mrr = 0.0;
    double map = 0.0;
    double mr = 0.0;
    std::vector<QueryOutcome> per_query;

    nlohmann::ordered_json to_json() const;
};

QueryOutcome score_query(const GoldEntry& entry, std::span<const AnswerId> ranked, std::size_t k);

/// Aggregates are means over the given outcomes; an empty list gives zeros.
EvalReport aggregate(std::vector<QueryOutcome> outcomes, std::size_t k);

// ---- engine-backed evaluation ----

/// Candidate pools computed once per query; weight choices only re-fuse them.
struct PoolCache {
    std::vector<GoldEntry> queries;
    std::vector<CandidatePool> pools;
};

PoolCache build_pools(const Ranker& ranker, std::span<const GoldEntry> queries);

EvalReport evaluate_weights(const Ranker& ranker, const PoolCache& cache, const WeightConfig& weights, std::size_t k);

struct CalibrationResult {
    WeightConfig weights;
    double hit = 0.0;
    double mrr = 0.0;
    double map = 0.0;
    std::size_t evaluated = 0;  // number of weight vectors tried
};

/// Exhaustive grid over {0, step, ..., 1}^4. Best by (Hit, MRR, MAP) at k;
/// ties go to the lexicographically smallest (sem, api, tfidf, method).
CalibrationResult calibrate_weights(const Ranker& ranker, const PoolCache& train, std::size_t k = 10,
                                    double step = 0.25);
CalibrationResult calibrate_weights(const Ranker& ranker, std::span<const GoldEntry> train, std::size_t k = 10,
                                    double step = 0.25);

enum class Baseline { bm25, tfidf, semantic, api_class, api_method, fused };
Baseline parse_baseline(std::string_view name);
std::string_view baseline_name(Baseline b);

/// Weight mask of a single-factor baseline; `fused` for the fused one.
WeightConfig baseline_weights(Baseline b, const WeightConfig& fused);

/// Answer ids in the order the baseline ranks them for a prepared pool.
std::vector<AnswerId> baseline_ranking(Baseline b, const Ranker& ranker, const CandidatePool& pool,
                                       const WeightConfig& fused);

EvalReport run_baseline(Baseline b, const Ranker& ranker, const PoolCache& cache, std::size_t k,
                        const WeightConfig& fused);
EvalReport run_baseline(Baseline b, const Ranker& ranker, std::span<const GoldEntry> test, std::size_t k,
                        const WeightConfig& fused);

}  // namespace crokage
