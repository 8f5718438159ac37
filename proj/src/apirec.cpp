#include "crokage/apirec.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "crokage/errors.hpp"

namespace crokage {

CombineMode parse_combine_mode(std::string_view name) {
    if (name == "roundrobin" || name == "round-robin" || name == "round_robin") return CombineMode::round_robin;
    if (name == "concat") return CombineMode::concat;
    throw ValidationError("unknown combine mode: " + std::string(name));
}

PositionMode parse_position_mode(std::string_view name) {
    if (name == "filter-before" || name == "before") return PositionMode::filter_before;
    if (name == "filter-after" || name == "after") return PositionMode::filter_after;
    throw ValidationError("unknown position mode: " + std::string(name));
}

ApiRanking combine_rankings(std::span<const ApiRanking> rankings, std::size_t limit, CombineMode mode) {
    ApiRanking out;
    for (const auto& r : rankings) {
        if (!out.provider.empty()) out.provider += '+';
        out.provider += r.provider;
    }
    std::unordered_set<std::string> seen;
    auto take = [&](const std::string& c) {
        if (out.classes.size() < limit && seen.insert(c).second) out.classes.push_back(c);
    };
    if (mode == CombineMode::concat) {
        for (const auto& r : rankings) {
            for (const auto& c : r.classes) take(c);
        }
        return out;
    }
    std::size_t longest = 0;
    for (const auto& r : rankings) longest = std::max(longest, r.classes.size());
    for (std::size_t round = 0; round < longest && out.classes.size() < limit; ++round) {
        for (const auto& r : rankings) {
            if (round < r.classes.size()) take(r.classes[round]);
        }
    }
    return out;
}

ApiRanking fallback_provider(std::span<const ThreadDoc* const> bm25_top, std::size_t k_classes,
                             const ApiIndex* known) {
    struct Tally {
        std::size_t count = 0;
        std::size_t first = 0;
    };
    std::unordered_map<std::string, Tally> tally;
    std::size_t order = 0;
    for (const auto* doc : bm25_top) {
        for (auto& cls : answer_api_classes(*doc)) {
            if (known && !known->contains(cls)) continue;
            auto [it, inserted] = tally.try_emplace(std::move(cls));
            if (inserted) it->second.first = order++;
            ++it->second.count;
        }
    }
    std::vector<std::pair<std::string, Tally>> ranked(tally.begin(), tally.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        return a.second.first < b.second.first;
    });
    ApiRanking out;
    out.provider = "fallback";
    for (std::size_t i = 0; i < ranked.size() && i < k_classes; ++i) out.classes.push_back(ranked[i].first);
    return out;
}

double api_score(const std::set<std::string>& answer_classes, const ApiRanking& recommended,
                 const CandidateClassUniverse& universe, int n, PositionMode mode) {
    if (n < 1) throw ValidationError("api score smoothing n must be at least 1");
    double score = 0.0;
    std::size_t filtered_pos = 0;
    for (std::size_t raw_pos = 0; raw_pos < recommended.classes.size(); ++raw_pos) {
        const auto& c = recommended.classes[raw_pos];
        if (!universe.all_apis.count(c)) continue;
        const auto pos = mode == PositionMode::filter_before ? filtered_pos : raw_pos;
        ++filtered_pos;
        if (answer_classes.count(c)) score += 1.0 / (static_cast<double>(pos) + n);
    }
    return score;
}

std::vector<std::string> read_ranked_classes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot read API ranking file: " + path.string());
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty() || line[0] == '#') continue;
        if (seen.insert(line).second) out.push_back(line);
    }
    return out;
}

RankedFileProvider::RankedFileProvider(std::string label, std::filesystem::path path)
    : label_(std::move(label)), path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) throw ArtifactError("API provider path does not exist: " + path_.string());
}

ApiRanking RankedFileProvider::recommend(const ProviderQuery& query) const {
    ApiRanking out;
    out.provider = label_;
    if (std::filesystem::is_directory(path_)) {
        auto file = path_ / (query.query_id + ".txt");
        if (!query.query_id.empty() && std::filesystem::exists(file)) out.classes = read_ranked_classes(file);
    } else {
        out.classes = read_ranked_classes(path_);
    }
    return out;
}

ApiRanking FallbackProvider::recommend(const ProviderQuery& query) const {
    return fallback_provider(query.bm25_top, k_, known_);
}

std::unique_ptr<ApiProvider> make_file_provider(std::string_view arg) {
    auto eq = arg.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == arg.size()) {
        throw ValidationError("API provider must be given as label=path, got: " + std::string(arg));
    }
    return std::make_unique<RankedFileProvider>(std::string(arg.substr(0, eq)), std::string(arg.substr(eq + 1)));
}

}  // namespace crokage
