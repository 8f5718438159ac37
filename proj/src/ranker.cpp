#include "crokage/ranker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "crokage/code_elements.hpp"
#include "crokage/errors.hpp"

namespace crokage {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool hit_before(const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.answer_id < b.answer_id;
}

std::map<std::string, double> tfidf_vector(std::span<const std::string> tokens, const IdfMap& idf) {
    std::map<std::string, double> tf;
    for (const auto& t : tokens) tf[t] += 1.0;
    for (auto& [term, w] : tf) w *= idf.idf(term);
    return tf;
}

double norm(const std::map<std::string, double>& v) {
    double s = 0.0;
    for (const auto& [_, w] : v) s += w * w;
    return std::sqrt(s);
}

}  // namespace

void WeightConfig::validate() const {
    for (double w : values()) {
        if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("factor weights must lie in [0, 1]");
    }
}

WeightConfig WeightConfig::parse(std::string_view text) {
    std::array<double, 4> v{};
    std::stringstream in{std::string(text)};
    std::string item;
    std::size_t i = 0;
    while (std::getline(in, item, ',')) {
        if (i >= 4) throw ValidationError("expected four comma-separated weights");
        try {
            std::size_t used = 0;
            v[i] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("invalid weight: " + item);
        }
        ++i;
    }
    if (i != 4) throw ValidationError("expected four comma-separated weights");
    auto w = from_values(v);
    w.validate();
    return w;
}

void PipelineConfig::validate() const {
    if (bm25_limit1 < 1 || bm25_limit2 < 1 || top_asym < 1 || num_api_classes < 1) {
        throw ValidationError("pipeline limits must be at least 1");
    }
    if (bm25_limit2 > bm25_limit1) throw ValidationError("bm25_limit2 must not exceed bm25_limit1");
    if (api_smoothing < 1) throw ValidationError("api smoothing must be at least 1");
    weights.validate();
}

CandidateSets select_candidates(const Bm25Index& index, std::span<const std::string> query, const PipelineConfig& cfg) {
    if (index.doc_count() == 0) throw ValidationError("empty index");
    CandidateSets sets;
    sets.big_set = index.search(query, cfg.bm25_limit1);
    auto small = std::min(cfg.bm25_limit2, sets.big_set.size());
    sets.small_set.assign(sets.big_set.begin(), sets.big_set.begin() + static_cast<std::ptrdiff_t>(small));
    return sets;
}

std::vector<SearchHit> semantic_filter(std::span<const SearchHit> big_set, const ResolvedBag& query,
                                       const std::function<const ResolvedBag&(AnswerId)>& bag_of,
                                       std::size_t top_asym) {
    std::vector<SearchHit> scored;
    scored.reserve(big_set.size());
    for (const auto& hit : big_set) scored.push_back({hit.answer_id, sem_score(bag_of(hit.answer_id), query)});
    auto keep = std::min(top_asym, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), hit_before);
    scored.resize(keep);
    return scored;
}

std::vector<SearchHit> semantic_filter(std::span<const SearchHit> big_set, std::span<const std::string> query,
                                       const Corpus& corpus, const EmbeddingStore& store, const IdfMap& idf,
                                       std::size_t top_asym) {
    ResolvedBag q(BagOfWords(query), store, idf);
    std::map<AnswerId, ResolvedBag> bags;
    for (const auto& hit : big_set) {
        const auto* doc = corpus.find(hit.answer_id);
        if (!doc) throw ValidationError("candidate " + std::to_string(hit.answer_id) + " not in corpus");
        auto tokens = doc->text_tokens();
        bags.emplace(hit.answer_id, ResolvedBag(BagOfWords(tokens), store, idf));
    }
    return semantic_filter(big_set, q, [&](AnswerId id) -> const ResolvedBag& { return bags.at(id); }, top_asym);
}

std::vector<AnswerId> merge_candidates(std::span<const SearchHit> small_set, std::span<const SearchHit> sem_top) {
    std::vector<AnswerId> ids;
    ids.reserve(small_set.size() + sem_top.size());
    for (const auto& h : small_set) ids.push_back(h.answer_id);
    for (const auto& h : sem_top) ids.push_back(h.answer_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

double tfidf_score(std::span<const std::string> query, std::span<const std::string> answer, const IdfMap& idf) {
    auto q = tfidf_vector(query, idf);
    auto a = tfidf_vector(answer, idf);
    const double nq = norm(q);
    const double na = norm(a);
    if (nq == 0.0 || na == 0.0) return 0.0;
    double dot = 0.0;
    for (const auto& [term, w] : q) {
        if (auto it = a.find(term); it != a.end()) dot += w * it->second;
    }
    return std::clamp(dot / (nq * na), 0.0, 1.0);
}

MethodScores method_score(std::span<const std::vector<std::string>> candidate_methods) {
    std::map<std::string, std::size_t> df;
    for (const auto& methods : candidate_methods) {
        std::set<std::string_view> unique(methods.begin(), methods.end());
        for (auto m : unique) ++df[std::string(m)];
    }
    MethodScores out;
    out.scores.assign(candidate_methods.size(), 0.0);
    for (const auto& [name, freq] : df) {
        if (freq > out.top_frequency) {
            out.top_frequency = freq;
            out.top_method = name;
        }
    }
    if (!out.top_method) return out;
    const double value = std::log2(static_cast<double>(out.top_frequency)) / 10.0;
    for (std::size_t i = 0; i < candidate_methods.size(); ++i) {
        const auto& m = candidate_methods[i];
        if (std::find(m.begin(), m.end(), *out.top_method) != m.end()) out.scores[i] = value;
    }
    return out;
}

void normalize_factors(std::span<ScoredCandidate> candidates) {
    if (candidates.empty()) return;
    auto scale = [&](double FactorScores::*field) {
        double lo = candidates[0].raw.*field;
        double hi = lo;
        for (const auto& c : candidates) {
            lo = std::min(lo, c.raw.*field);
            hi = std::max(hi, c.raw.*field);
        }
        for (auto& c : candidates) c.normalized.*field = hi > lo ? (c.raw.*field - lo) / (hi - lo) : 0.0;
    };
    scale(&FactorScores::sem);
    scale(&FactorScores::api);
    scale(&FactorScores::tfidf);
    scale(&FactorScores::method);
}

std::vector<ScoredCandidate> fuse(std::vector<ScoredCandidate> candidates, const WeightConfig& weights) {
    for (auto& c : candidates) {
        c.factors_score = c.normalized.sem * weights.sem + c.normalized.api * weights.api +
                          c.normalized.tfidf * weights.tfidf + c.normalized.method * weights.method;
    }
    std::sort(candidates.begin(), candidates.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.factors_score != b.factors_score) return a.factors_score > b.factors_score;
        return a.answer_id < b.answer_id;
    });
    return candidates;
}

std::vector<ScoredCandidate> normalize_and_fuse(std::vector<ScoredCandidate> candidates, const WeightConfig& weights) {
    normalize_factors(candidates);
    return fuse(std::move(candidates), weights);
}

Ranker::Ranker(const Corpus& corpus, const IndexBundle& indices, const EmbeddingStore* store, PipelineConfig cfg,
               std::vector<std::unique_ptr<ApiProvider>> providers)
    : corpus_(corpus), indices_(indices), store_(store), cfg_(cfg), providers_(std::move(providers)) {
    cfg_.validate();
    if (indices.corpus_hash != corpus.content_hash()) {
        throw ArtifactError("artifact mismatch: indices were built from a different corpus");
    }
    if (indices.bm25.doc_count() != corpus.size()) {
        throw ArtifactError("artifact mismatch: index covers " + std::to_string(indices.bm25.doc_count()) +
                            " documents, corpus has " + std::to_string(corpus.size()));
    }
    fallback_ = std::make_unique<FallbackProvider>(cfg_.num_api_classes, &indices_.api);

    const auto& docs = corpus.docs();
    classes_.reserve(docs.size());
    methods_.reserve(docs.size());
    if (store_) text_bags_.reserve(docs.size());
    for (const auto& d : docs) {
        auto cls = answer_api_classes(d);
        classes_.emplace_back(cls.begin(), cls.end());
        std::vector<std::string> methods;
        for (const auto& block : d.code_blocks) {
            auto m = extract_methods(block);
            methods.insert(methods.end(), m.begin(), m.end());
        }
        std::sort(methods.begin(), methods.end());
        methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
        methods_.push_back(std::move(methods));
        if (store_) {
            auto tokens = d.text_tokens();
            text_bags_.emplace_back(BagOfWords(tokens), *store_, indices_.idf);
        }
    }
}

std::size_t Ranker::doc_pos(AnswerId id) const {
    const auto& docs = corpus_.docs();
    auto it = std::lower_bound(docs.begin(), docs.end(), id,
                               [](const ThreadDoc& d, AnswerId v) { return d.answer_id < v; });
    if (it == docs.end() || it->answer_id != id) throw ValidationError("unknown answer " + std::to_string(id));
    return static_cast<std::size_t>(it - docs.begin());
}

CandidatePool Ranker::build_pool(std::string_view query_text, std::string_view query_id) const {
    return build_pool_from_tokens(preprocess(query_text, corpus_.stopwords()), query_text, query_id);
}

CandidatePool Ranker::build_pool_from_tokens(std::vector<std::string> tokens, std::string_view query_text,
                                             std::string_view query_id) const {
    CandidatePool pool;
    pool.query_tokens = std::move(tokens);
    if (pool.query_tokens.empty()) {
        pool.diagnostics.record("empty_query", "query has no tokens after preprocessing");
        return pool;
    }

    auto t0 = Clock::now();
    pool.sets = select_candidates(indices_.bm25, pool.query_tokens, cfg_);
    pool.timings.lexical_ms = elapsed_ms(t0);
    if (pool.sets.big_set.empty()) {
        pool.diagnostics.record("no_lexical_match", "no indexed document contains a query term");
        return pool;
    }

    std::map<AnswerId, double> sem;
    t0 = Clock::now();
    if (store_) {
        ResolvedBag query_bag(BagOfWords(pool.query_tokens), *store_, indices_.idf);
        if (query_bag.empty()) pool.diagnostics.record("unembeddable_query", "no query word has a vector");
        std::vector<SearchHit> scored;
        scored.reserve(pool.sets.big_set.size());
        for (const auto& hit : pool.sets.big_set) {
            double s = sem_score(text_bags_[doc_pos(hit.answer_id)], query_bag);
            sem[hit.answer_id] = s;
            scored.push_back({hit.answer_id, s});
        }
        auto keep = std::min(cfg_.top_asym, scored.size());
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                          hit_before);
        scored.resize(keep);
        pool.sem_top = std::move(scored);
    }
    pool.timings.semantic_ms = elapsed_ms(t0);

    auto ids = merge_candidates(pool.sets.small_set, pool.sem_top);
    std::vector<std::size_t> positions;
    positions.reserve(ids.size());
    for (auto id : ids) positions.push_back(doc_pos(id));

    t0 = Clock::now();
    CandidateClassUniverse universe;
    if (cfg_.api_enabled) {
        std::vector<const ThreadDoc*> top;
        for (const auto& h : pool.sets.small_set) top.push_back(&corpus_.docs()[doc_pos(h.answer_id)]);
        ProviderQuery pq{std::string(query_id), std::string(query_text), pool.query_tokens, top};
        std::vector<ApiRanking> rankings;
        if (providers_.empty()) {
            rankings.push_back(fallback_->recommend(pq));
        } else {
            for (const auto& p : providers_) rankings.push_back(p->recommend(pq));
        }
        pool.recommended = combine_rankings(rankings, cfg_.num_api_classes, cfg_.combine);
        for (auto pos : positions) universe.all_apis.insert(classes_[pos].begin(), classes_[pos].end());
    }
    pool.timings.api_ms = elapsed_ms(t0);

    t0 = Clock::now();
    std::vector<std::vector<std::string>> pool_methods;
    pool_methods.reserve(ids.size());
    for (auto pos : positions) pool_methods.push_back(methods_[pos]);
    auto methods = method_score(pool_methods);

    pool.candidates.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& doc = corpus_.docs()[positions[i]];
        ScoredCandidate c;
        c.answer_id = ids[i];
        if (auto it = sem.find(ids[i]); it != sem.end()) c.raw.sem = it->second;
        if (cfg_.api_enabled) {
            c.raw.api = api_score(classes_[positions[i]], pool.recommended, universe, cfg_.api_smoothing, cfg_.position);
        }
        c.raw.tfidf = tfidf_score(pool.query_tokens, doc.text_tokens(), indices_.idf);
        c.raw.method = methods.scores[i];
        pool.candidates.push_back(c);
    }
    normalize_factors(pool.candidates);
    pool.timings.factors_ms = elapsed_ms(t0);
    return pool;
}

std::vector<ScoredCandidate> Ranker::rank(const CandidatePool& pool, const WeightConfig& weights) const {
    return fuse(pool.candidates, weights);
}

std::vector<ScoredCandidate> Ranker::search(std::string_view query_text, std::string_view query_id) const {
    return rank(build_pool(query_text, query_id));
}

}  // namespace crokage
