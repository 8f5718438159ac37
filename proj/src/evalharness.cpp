#include "crokage/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <tuple>

#include "crokage/errors.hpp"

namespace crokage {
namespace {

using json = nlohmann::json;

std::string id_text(const json& v, const char* what, std::size_t line_no) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ValidationError(std::string("gold line ") + std::to_string(line_no) + ": " + what +
                          " must be a string or integer");
}

AnswerId answer_id_of(const json& v, std::size_t line_no) {
    if (v.is_number_integer()) return v.get<AnswerId>();
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        try {
            std::size_t used = 0;
            auto id = std::stoll(s, &used);
            if (used == s.size()) return id;
        } catch (const std::exception&) {
        }
    }
    throw ValidationError("gold line " + std::to_string(line_no) + ": bad answer id " + v.dump());
}

double mean_rating(const json& v, std::size_t line_no) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && !v.empty()) {
        double sum = 0.0;
        for (const auto& r : v) {
            if (!r.is_number()) break;
            sum += r.get<double>();
        }
        return sum / static_cast<double>(v.size());
    }
    throw ValidationError("gold line " + std::to_string(line_no) + ": ratings must be numbers or arrays of numbers");
}

constexpr double kRelevantRating = 4.0;

}  // namespace

GoldSet GoldSet::parse(std::istream& in, Diagnostics* diag) {
    GoldSet gold;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError("gold line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!row.is_object() || !row.contains("query_id") || !row.contains("query") || !row["query"].is_string()) {
            throw ValidationError("gold line " + std::to_string(line_no) + ": needs query_id and query");
        }
        GoldEntry e;
        e.query_id = id_text(row["query_id"], "query_id", line_no);
        e.query = row["query"].get<std::string>();
        if (auto it = row.find("relevant"); it != row.end()) {
            if (!it->is_array()) throw ValidationError("gold line " + std::to_string(line_no) + ": relevant must be a list");
            for (const auto& v : *it) e.relevant.insert(answer_id_of(v, line_no));
        }
        if (auto it = row.find("ratings"); it != row.end()) {
            if (!it->is_object()) throw ValidationError("gold line " + std::to_string(line_no) + ": ratings must be an object");
            for (const auto& [key, value] : it->items()) {
                if (mean_rating(value, line_no) >= kRelevantRating) e.relevant.insert(answer_id_of(json(key), line_no));
            }
        }
        if (seen.count(e.query_id)) throw ValidationError("gold line " + std::to_string(line_no) + ": duplicate query_id " + e.query_id);
        seen[e.query_id] = line_no;
        if (e.relevant.empty()) {
            if (diag) diag->record("gold_without_relevant", "query " + e.query_id + " has no relevant answer");
            continue;
        }
        gold.entries.push_back(std::move(e));
    }
    std::sort(gold.entries.begin(), gold.entries.end(),
              [](const GoldEntry& a, const GoldEntry& b) { return a.query_id < b.query_id; });
    return gold;
}

GoldSet GoldSet::load(const std::filesystem::path& path, Diagnostics* diag) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open gold set " + path.string());
    return parse(in, diag);
}

std::pair<std::vector<GoldEntry>, std::vector<GoldEntry>> split_queries(std::span<const GoldEntry> gold,
                                                                        std::uint64_t seed, double train_frac) {
    if (gold.size() < 2) throw ValidationError("splitting needs at least 2 queries");
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw ValidationError("train fraction must be in (0, 1)");
    std::vector<GoldEntry> all(gold.begin(), gold.end());
    std::sort(all.begin(), all.end(), [](const GoldEntry& a, const GoldEntry& b) { return a.query_id < b.query_id; });
    // Explicit Fisher-Yates: std::shuffle's algorithm is implementation-defined.
    std::mt19937_64 rng(seed);
    for (std::size_t i = all.size() - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(all[i], all[j]);
    }
    auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(all.size()) * train_frac - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, all.size() - 1);
    std::vector<GoldEntry> train(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<GoldEntry> test(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
    return {std::move(train), std::move(test)};
}

PoolCache build_pools(const Ranker& ranker, std::span<const GoldEntry> queries) {
    PoolCache cache;
    cache.queries.assign(queries.begin(), queries.end());
    cache.pools.reserve(queries.size());
    for (const auto& q : queries) cache.pools.push_back(ranker.build_pool(q.query, q.query_id));
    return cache;
}

namespace {

std::vector<AnswerId> ids_of(const std::vector<ScoredCandidate>& ranked) {
    std::vector<AnswerId> ids;
    ids.reserve(ranked.size());
    for (const auto& c : ranked) ids.push_back(c.answer_id);
    return ids;
}

}  // namespace

EvalReport evaluate_weights(const Ranker& ranker, const PoolCache& cache, const WeightConfig& weights, std::size_t k) {
    std::vector<QueryOutcome> outcomes;
    outcomes.reserve(cache.queries.size());
    for (std::size_t i = 0; i < cache.queries.size(); ++i) {
        auto ids = ids_of(ranker.rank(cache.pools[i], weights));
        outcomes.push_back(score_query(cache.queries[i], ids, k));
    }
    return aggregate(std::move(outcomes), k);
}

CalibrationResult calibrate_weights(const Ranker& ranker, const PoolCache& train, std::size_t k, double step) {
    if (train.queries.empty()) throw ValidationError("calibration needs at least one training query");
    if (!(step > 0.0 && step <= 1.0)) throw ValidationError("grid step must be in (0, 1]");
    const auto steps = static_cast<int>(std::lround(1.0 / step));
    if (std::abs(steps * step - 1.0) > 1e-9) throw ValidationError("grid step must divide 1");
    std::vector<double> grid;
    for (int i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) / steps);

    CalibrationResult best;
    bool have = false;
    // Grid order is lexicographic ascending, so the first strict maximum is the tie winner.
    for (double a : grid) {
        for (double b : grid) {
            for (double c : grid) {
                for (double d : grid) {
                    WeightConfig w{a, b, c, d};
                    auto r = evaluate_weights(ranker, train, w, k);
                    ++best.evaluated;
                    if (!have || std::tie(r.hit, r.mrr, r.map) > std::tie(best.hit, best.mrr, best.map)) {
                        best.weights = w;
                        best.hit = r.hit;
                        best.mrr = r.mrr;
                        best.map = r.map;
                        have = true;
                    }
                }
            }
        }
    }
    return best;
}

CalibrationResult calibrate_weights(const Ranker& ranker, std::span<const GoldEntry> train, std::size_t k,
                                    double step) {
    return calibrate_weights(ranker, build_pools(ranker, train), k, step);
}

Baseline parse_baseline(std::string_view name) {
    if (name == "bm25") return Baseline::bm25;
    if (name == "tfidf") return Baseline::tfidf;
    if (name == "semantic") return Baseline::semantic;
    if (name == "api_class") return Baseline::api_class;
    if (name == "api_method") return Baseline::api_method;
    if (name == "fused") return Baseline::fused;
    throw ValidationError("unknown baseline '" + std::string(name) +
                          "' (expected bm25, tfidf, semantic, api_class, api_method or fused)");
}

std::string_view baseline_name(Baseline b) {
    switch (b) {
        case Baseline::bm25: return "bm25";
        case Baseline::tfidf: return "tfidf";
        case Baseline::semantic: return "semantic";
        case Baseline::api_class: return "api_class";
        case Baseline::api_method: return "api_method";
        case Baseline::fused: return "fused";
    }
    return "fused";
}

WeightConfig baseline_weights(Baseline b, const WeightConfig& fused) {
    switch (b) {
        case Baseline::semantic: return {1, 0, 0, 0};
        case Baseline::api_class: return {0, 1, 0, 0};
        case Baseline::tfidf: return {0, 0, 1, 0};
        case Baseline::api_method: return {0, 0, 0, 1};
        case Baseline::bm25:
        case Baseline::fused: return fused;
    }
    return fused;
}

std::vector<AnswerId> baseline_ranking(Baseline b, const Ranker& ranker, const CandidatePool& pool,
                                       const WeightConfig& fused) {
    if (b == Baseline::bm25) {
        std::vector<AnswerId> ids;
        ids.reserve(pool.sets.small_set.size());
        for (const auto& h : pool.sets.small_set) ids.push_back(h.answer_id);
        return ids;
    }
    return ids_of(ranker.rank(pool, baseline_weights(b, fused)));
}

EvalReport run_baseline(Baseline b, const Ranker& ranker, const PoolCache& cache, std::size_t k,
                        const WeightConfig& fused) {
    std::vector<QueryOutcome> outcomes;
    outcomes.reserve(cache.queries.size());
    for (std::size_t i = 0; i < cache.queries.size(); ++i) {
        auto ids = baseline_ranking(b, ranker, cache.pools[i], fused);
        outcomes.push_back(score_query(cache.queries[i], ids, k));
    }
    return aggregate(std::move(outcomes), k);
}

EvalReport run_baseline(Baseline b, const Ranker& ranker, std::span<const GoldEntry> test, std::size_t k,
                        const WeightConfig& fused) {
    return run_baseline(b, ranker, build_pools(ranker, test), k, fused);
}

}  // namespace crokage
