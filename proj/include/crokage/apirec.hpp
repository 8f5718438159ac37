#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crokage/corpus.hpp"
#include "crokage/indices.hpp"

namespace crokage {

/// Recommended API classes for one query, best first, no duplicates.
struct ApiRanking {
    std::vector<std::string> classes;
    std::string provider;
};

enum class CombineMode { round_robin, concat };
CombineMode parse_combine_mode(std::string_view name);

/// Merges provider rankings in the given provider order, dropping repeats and
/// truncating to `limit`. Round robin takes one class from each provider per round.
ApiRanking combine_rankings(std::span<const ApiRanking> rankings, std::size_t limit = 20,
                            CombineMode mode = CombineMode::round_robin);

/// Ranks classes by how many of the given answers use them; ties keep first
/// occurrence. When `known` is given, only classes present in it are ranked.
ApiRanking fallback_provider(std::span<const ThreadDoc* const> bm25_top, std::size_t k_classes,
                             const ApiIndex* known = nullptr);

/// Every class extracted from the current candidate pool ("allApis").
struct CandidateClassUniverse {
    std::set<std::string> all_apis;
};

/// Where class positions are counted: in the recommendation list after
/// dropping classes missing from the universe (default), or in the raw list.
enum class PositionMode { filter_before, filter_after };
PositionMode parse_position_mode(std::string_view name);

/// sum over recommended classes c used by the answer (and present in the
/// universe) of 1 / (pos(c) + n), positions zero-based.
double api_score(const std::set<std::string>& answer_classes, const ApiRanking& recommended,
                 const CandidateClassUniverse& universe, int n = 2,
                 PositionMode mode = PositionMode::filter_before);

/// Inputs available to a provider when it is asked for recommendations.
struct ProviderQuery {
    std::string query_id;
    std::string text;
    std::span<const std::string> tokens;
    std::span<const ThreadDoc* const> bm25_top;
};

class ApiProvider {
public:
    virtual ~ApiProvider() = default;
    virtual std::string label() const = 0;
    virtual ApiRanking recommend(const ProviderQuery& query) const = 0;
};

/// Reads rankings produced by an external recommender: one class per line,
/// best first. A directory holds one "<query_id>.txt" file per query; a
/// plain file applies to every query.
class RankedFileProvider final : public ApiProvider {
public:
    RankedFileProvider(std::string label, std::filesystem::path path);
    std::string label() const override { return label_; }
    ApiRanking recommend(const ProviderQuery& query) const override;

private:
    std::string label_;
    std::filesystem::path path_;
};

class FallbackProvider final : public ApiProvider {
public:
    FallbackProvider(std::size_t k_classes, const ApiIndex* known) : k_(k_classes), known_(known) {}
    std::string label() const override { return "fallback"; }
    ApiRanking recommend(const ProviderQuery& query) const override;

private:
    std::size_t k_;
    const ApiIndex* known_;
};

/// Parses "label=path".
std::unique_ptr<ApiProvider> make_file_provider(std::string_view arg);

std::vector<std::string> read_ranked_classes(const std::filesystem::path& path);

}  // namespace crokage
