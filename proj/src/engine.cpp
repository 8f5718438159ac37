#include "crokage/engine.hpp"

#include <chrono>

#include "crokage/apirec.hpp"
#include "crokage/errors.hpp"

namespace crokage {
namespace {

using ojson = nlohmann::ordered_json;

EmbeddingStore load_vectors(const std::filesystem::path& path, Diagnostics* diag) {
    if (!std::filesystem::exists(path)) throw ArtifactError("missing artifact: vectors file " + path.string());
    try {
        return EmbeddingStore::load(path, diag);
    } catch (const ValidationError& e) {
        throw ArtifactError("invalid vectors file " + path.string() + ": " + e.what());
    }
}

}  // namespace

EnginePaths EnginePaths::from_home(const std::filesystem::path& home) {
    EnginePaths p;
    p.corpus = home / "corpus.bin";
    p.indices = home / "indices.bin";
    p.vectors = home / "vectors.txt";
    if (std::filesystem::exists(home / "subwords.txt")) p.subwords = home / "subwords.txt";
    return p;
}

std::unique_ptr<EngineHandle> load_engine(const EnginePaths& paths, const EngineOptions& options) {
    std::unique_ptr<EngineHandle> h(new EngineHandle());
    h->corpus_ = Corpus::load(paths.corpus);
    h->indices_ = IndexBundle::load(paths.indices);

    PipelineConfig cfg = options.pipeline;
    if (options.no_semantic) {
        cfg.weights.sem = 0.0;
    } else {
        if (!paths.vectors) throw ArtifactError("missing artifact: no vectors file given (use --no-semantic to run without)");
        h->store_ = load_vectors(*paths.vectors, &h->load_diag_);
        if (paths.subwords) h->store_->attach_subwords(load_vectors(*paths.subwords, &h->load_diag_));
    }
    if (options.no_api) {
        cfg.api_enabled = false;
        cfg.weights.api = 0.0;
    }

    std::vector<std::unique_ptr<ApiProvider>> providers;
    for (const auto& provider : options.api_providers) providers.push_back(make_file_provider(provider));

    h->composer_.stopwords = h->corpus_.stopwords();
    if (options.important_words) h->composer_.special = SpecialConditionConfig::load(*options.important_words);

    h->ranker_ = std::make_unique<Ranker>(h->corpus_, h->indices_, h->store(), cfg, std::move(providers));
    return h;
}

QueryRequest QueryRequest::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("request must be a JSON object");
    QueryRequest r;
    auto q = j.find("query");
    if (q == j.end() || !q->is_string()) throw ValidationError("request needs a string 'query'");
    r.query = q->get<std::string>();
    if (auto it = j.find("query_id"); it != j.end()) {
        if (it->is_string()) {
            r.query_id = it->get<std::string>();
        } else if (it->is_number_integer()) {
            r.query_id = std::to_string(it->get<long long>());
        } else {
            throw ValidationError("'query_id' must be a string or integer");
        }
    }
    if (auto it = j.find("top_k"); it != j.end()) {
        if (!it->is_number_integer()) throw ValidationError("'top_k' must be an integer");
        r.top_k = it->get<long long>();
    }
    if (auto it = j.find("compose"); it != j.end()) {
        if (!it->is_boolean()) throw ValidationError("'compose' must be a boolean");
        r.compose = it->get<bool>();
    }
    if (auto it = j.find("include_timings"); it != j.end()) {
        if (!it->is_boolean()) throw ValidationError("'include_timings' must be a boolean");
        r.include_timings = it->get<bool>();
    }
    if (auto it = j.find("weights"); it != j.end()) {
        if (!it->is_array() || it->size() != 4) throw ValidationError("'weights' must be an array of 4 numbers");
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!(*it)[i].is_number()) throw ValidationError("'weights' must be an array of 4 numbers");
            v[i] = (*it)[i].get<double>();
        }
        auto w = WeightConfig::from_values(v);
        w.validate();
        r.weights = w;
    }
    return r;
}

QueryResponse handle_query(const EngineHandle& engine, const QueryRequest& request) {
    if (request.top_k < 1) throw ValidationError("top_k must be at least 1");
    const auto& ranker = engine.ranker();
    auto pool = ranker.build_pool(request.query, request.query_id);
    if (pool.query_tokens.empty()) throw ValidationError("empty query");

    auto weights = request.weights.value_or(ranker.config().weights);
    if (!ranker.semantic_enabled()) weights.sem = 0.0;
    if (!ranker.config().api_enabled) weights.api = 0.0;

    QueryResponse resp;
    auto ranked = ranker.rank(pool, weights);
    resp.diagnostics = std::move(pool.diagnostics);
    resp.timings = pool.timings;
    const auto k = static_cast<std::size_t>(request.top_k);
    if (request.compose) {
        auto t0 = std::chrono::steady_clock::now();
        resp.composed = true;
        resp.solutions = compose_solutions(ranked, engine.corpus(), pool.query_tokens, k, engine.composer(),
                                           &resp.diagnostics);
        resp.compose_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    if (ranked.size() > k) ranked.resize(k);
    resp.ranked = std::move(ranked);
    return resp;
}

ojson QueryResponse::results_json() const {
    auto arr = ojson::array();
    if (composed) {
        for (const auto& s : solutions) {
            ojson o;
            o["answer_id"] = s.answer_id;
            o["code_blocks"] = s.code_blocks;
            o["explanation"] = s.explanation;
            o["rank"] = s.rank;
            arr.push_back(std::move(o));
        }
        return arr;
    }
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& c = ranked[i];
        ojson o;
        o["answer_id"] = c.answer_id;
        o["factors_score"] = c.factors_score;
        o["sem"] = c.normalized.sem;
        o["api"] = c.normalized.api;
        o["tfidf"] = c.normalized.tfidf;
        o["method"] = c.normalized.method;
        o["rank"] = i + 1;
        arr.push_back(std::move(o));
    }
    return arr;
}

ojson QueryResponse::timings_json() const {
    ojson t;
    t["lexical"] = timings.lexical_ms;
    t["semantic"] = timings.semantic_ms;
    t["api"] = timings.api_ms;
    t["factors"] = timings.factors_ms;
    if (composed) t["compose"] = compose_ms;
    return t;
}

ojson QueryResponse::to_json(bool include_timings) const {
    ojson j;
    j["results"] = results_json();
    if (!diagnostics.empty()) {
        ojson d = ojson::object();
        for (const auto& [key, n] : diagnostics.counts) d[key] = n;
        j["diagnostics"] = std::move(d);
    }
    if (include_timings) j["timings_ms"] = timings_json();
    return j;
}

}  // namespace crokage
