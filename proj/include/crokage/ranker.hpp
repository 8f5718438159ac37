#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crokage/apirec.hpp"
#include "crokage/corpus.hpp"
#include "crokage/diagnostics.hpp"
#include "crokage/embedding.hpp"
#include "crokage/indices.hpp"

namespace crokage {

/// Relative weights of the four relevance factors, each in [0, 1].
struct WeightConfig {
    double sem = 1.00;
    double api = 0.25;
    double tfidf = 0.50;
    double method = 0.75;

    void validate() const;
    std::array<double, 4> values() const { return {sem, api, tfidf, method}; }
    static WeightConfig from_values(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }
    /// "sem,api,tfidf,method"
    static WeightConfig parse(std::string_view text);

    auto operator<=>(const WeightConfig&) const = default;
};

struct PipelineConfig {
    std::size_t bm25_limit1 = 5000;  // bigSet, fed to semantic filtering
    std::size_t bm25_limit2 = 100;   // smallSet, merged into the candidate pool
    std::size_t top_asym = 100;
    std::size_t num_api_classes = 20;
    int api_smoothing = 2;
    WeightConfig weights;
    CombineMode combine = CombineMode::round_robin;
    PositionMode position = PositionMode::filter_before;
    bool api_enabled = true;

    void validate() const;
};

struct FactorScores {
    double sem = 0.0;
    double api = 0.0;
    double tfidf = 0.0;
    double method = 0.0;

    std::array<double, 4> values() const { return {sem, api, tfidf, method}; }
    bool operator==(const FactorScores&) const = default;
};

struct ScoredCandidate {
    AnswerId answer_id = 0;
    FactorScores raw;
    FactorScores normalized;
    double factors_score = 0.0;
};

struct CandidateSets {
    std::vector<SearchHit> small_set;
    std::vector<SearchHit> big_set;
};

CandidateSets select_candidates(const Bm25Index& index, std::span<const std::string> query, const PipelineConfig& cfg);

/// Top `top_asym` of `big_set` by semantic score, ties by ascending answer id.
/// `bag_of` yields the resolved text bag of a candidate answer.
std::vector<SearchHit> semantic_filter(std::span<const SearchHit> big_set, const ResolvedBag& query,
                                       const std::function<const ResolvedBag&(AnswerId)>& bag_of,
                                       std::size_t top_asym);

/// Same, resolving candidate texts (title + bodies) on the fly.
std::vector<SearchHit> semantic_filter(std::span<const SearchHit> big_set, std::span<const std::string> query,
                                       const Corpus& corpus, const EmbeddingStore& store, const IdfMap& idf,
                                       std::size_t top_asym);

/// Union of both sets, ascending answer id.
std::vector<AnswerId> merge_candidates(std::span<const SearchHit> small_set, std::span<const SearchHit> sem_top);

/// Cosine of tf * log10(N/df) vectors; 0 if either side is empty.
double tfidf_score(std::span<const std::string> query, std::span<const std::string> answer, const IdfMap& idf);

struct MethodScores {
    std::optional<std::string> top_method;
    std::size_t top_frequency = 0;  // number of candidates using it
    std::vector<double> scores;     // parallel to the input
};

/// log2(freq_m)/10 for candidates calling the most widely used method, 0 otherwise.
/// Ties between methods go to the lexicographically smallest name.
MethodScores method_score(std::span<const std::vector<std::string>> candidate_methods);

/// Per-factor min-max scaling over the pool; a constant factor becomes 0.
void normalize_factors(std::span<ScoredCandidate> candidates);

/// Weighted sum of normalized factors, sorted by (-factors_score, answer_id).
std::vector<ScoredCandidate> fuse(std::vector<ScoredCandidate> candidates, const WeightConfig& weights);

std::vector<ScoredCandidate> normalize_and_fuse(std::vector<ScoredCandidate> candidates, const WeightConfig& weights);

struct StageTimings {
    double lexical_ms = 0.0;
    double semantic_ms = 0.0;
    double api_ms = 0.0;
    double factors_ms = 0.0;
};

/// Everything computed for one query before weights are applied. Fusing the
/// same pool with different weights is cheap, which the calibration grid uses.
struct CandidatePool {
    std::vector<std::string> query_tokens;
    CandidateSets sets;
    std::vector<SearchHit> sem_top;
    ApiRanking recommended;
    std::vector<ScoredCandidate> candidates;  // normalized, ascending answer id
    Diagnostics diagnostics;
    StageTimings timings;
};

/// The four-stage retrieval pipeline over a loaded corpus and its indices.
/// Immutable after construction; safe for concurrent queries.
class Ranker {
public:
    /// `store` may be null, which disables the semantic factor.
    Ranker(const Corpus& corpus, const IndexBundle& indices, const EmbeddingStore* store, PipelineConfig cfg,
           std::vector<std::unique_ptr<ApiProvider>> providers = {});

    CandidatePool build_pool(std::string_view query_text, std::string_view query_id = {}) const;
    CandidatePool build_pool_from_tokens(std::vector<std::string> tokens, std::string_view query_text,
                                         std::string_view query_id) const;

    std::vector<ScoredCandidate> rank(const CandidatePool& pool, const WeightConfig& weights) const;
    std::vector<ScoredCandidate> rank(const CandidatePool& pool) const { return rank(pool, cfg_.weights); }
    std::vector<ScoredCandidate> search(std::string_view query_text, std::string_view query_id = {}) const;

    const PipelineConfig& config() const { return cfg_; }
    const Corpus& corpus() const { return corpus_; }
    const IndexBundle& indices() const { return indices_; }
    bool semantic_enabled() const { return store_ != nullptr; }

private:
    std::size_t doc_pos(AnswerId id) const;

    const Corpus& corpus_;
    const IndexBundle& indices_;
    const EmbeddingStore* store_;
    PipelineConfig cfg_;
    std::vector<std::unique_ptr<ApiProvider>> providers_;
    std::unique_ptr<FallbackProvider> fallback_;

    std::vector<ResolvedBag> text_bags_;
    std::vector<std::set<std::string>> classes_;
    std::vector<std::vector<std::string>> methods_;
};

}  // namespace crokage
