#include <algorithm>

#include "crokage/errors.hpp"
#include "crokage/evalharness.hpp"

namespace crokage {
namespace {

void require_k(std::size_t k) {
    if (k < 1) throw ValidationError("k must be at least 1");
}

std::size_t depth(std::span<const AnswerId> ranked, std::size_t k) { return std::min(ranked.size(), k); }

}  // namespace

std::optional<std::size_t> first_relevant_rank(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant,
                                               std::size_t k) {
    require_k(k);
    for (std::size_t i = 0; i < depth(ranked, k); ++i) {
        if (relevant.count(ranked[i])) return i + 1;
    }
    return std::nullopt;
}

double hit_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k) {
    return first_relevant_rank(ranked, relevant, k) ? 1.0 : 0.0;
}

double mrr_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k) {
    auto r = first_relevant_rank(ranked, relevant, k);
    return r ? 1.0 / static_cast<double>(*r) : 0.0;
}

double map_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k) {
    require_k(k);
    if (relevant.empty()) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth(ranked, k); ++i) {
        if (relevant.count(ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(std::min(relevant.size(), k));
}

double mr_at_k(std::span<const AnswerId> ranked, const std::set<AnswerId>& relevant, std::size_t k) {
    require_k(k);
    if (relevant.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth(ranked, k); ++i) hits += relevant.count(ranked[i]);
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

QueryOutcome score_query(const GoldEntry& entry, std::span<const AnswerId> ranked, std::size_t k) {
    QueryOutcome q;
    q.query_id = entry.query_id;
    q.first_relevant_rank = first_relevant_rank(ranked, entry.relevant, k);
    q.hit = hit_at_k(ranked, entry.relevant, k);
    q.reciprocal_rank = mrr_at_k(ranked, entry.relevant, k);
    q.precision = map_at_k(ranked, entry.relevant, k);
    q.recall = mr_at_k(ranked, entry.relevant, k);
    q.top.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(depth(ranked, k)));
    return q;
}

EvalReport aggregate(std::vector<QueryOutcome> outcomes, std::size_t k) {
    EvalReport r;
    r.k = k;
    for (const auto& q : outcomes) {
        r.hit += q.hit;
        r.mrr += q.reciprocal_rank;
        r.map += q.precision;
        r.mr += q.recall;
    }
    if (!outcomes.empty()) {
        const auto n = static_cast<double>(outcomes.size());
        r.hit /= n;
        r.mrr /= n;
        r.map /= n;
        r.mr /= n;
    }
    r.per_query = std::move(outcomes);
    return r;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["hit"] = hit;
    j["mrr"] = mrr;
    j["map"] = map;
    j["mr"] = mr;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& q : per_query) {
        nlohmann::ordered_json row;
        row["query_id"] = q.query_id;
        row["first_relevant_rank"] =
            q.first_relevant_rank ? nlohmann::ordered_json(*q.first_relevant_rank) : nlohmann::ordered_json();
        row["hit"] = q.hit;
        row["reciprocal_rank"] = q.reciprocal_rank;
        row["precision"] = q.precision;
        row["recall"] = q.recall;
        row["top"] = q.top;
        rows.push_back(std::move(row));
    }
    j["per_query"] = std::move(rows);
    return j;
}

}  // namespace crokage
