#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crokage/composer.hpp"
#include "crokage/corpus.hpp"
#include "crokage/diagnostics.hpp"
#include "crokage/embedding.hpp"
#include "crokage/indices.hpp"
#include "crokage/ranker.hpp"

namespace crokage {

struct EnginePaths {
    std::filesystem::path corpus;
    std::filesystem::path indices;
    std::optional<std::filesystem::path> vectors;
    std::optional<std::filesystem::path> subwords;

    /// corpus.bin, indices.bin and vectors.txt (plus subwords.txt when present) under `home`.
    static EnginePaths from_home(const std::filesystem::path& home);
};

struct EngineOptions {
    PipelineConfig pipeline;
    bool no_semantic = false;  // run without vectors, semantic weight forced to 0
    bool no_api = false;       // skip API recommendation, api weight forced to 0
    std::vector<std::string> api_providers;  // "label=path"
    std::optional<std::filesystem::path> important_words;
};

/// Loaded corpus, indices, vectors and ranker. Read-only after load and
/// shared by concurrent queries.
class EngineHandle {
public:
    EngineHandle(const EngineHandle&) = delete;
    EngineHandle& operator=(const EngineHandle&) = delete;

    const Corpus& corpus() const { return corpus_; }
    const IndexBundle& indices() const { return indices_; }
    const EmbeddingStore* store() const { return store_ ? &*store_ : nullptr; }
    const Ranker& ranker() const { return *ranker_; }
    const ComposerConfig& composer() const { return composer_; }
    const Diagnostics& load_diagnostics() const { return load_diag_; }
    std::size_t dim() const { return store_ ? store_->dim() : 0; }

private:
    EngineHandle() = default;
    friend std::unique_ptr<EngineHandle> load_engine(const EnginePaths&, const EngineOptions&);

    Corpus corpus_;
    IndexBundle indices_;
    std::optional<EmbeddingStore> store_;
    std::unique_ptr<Ranker> ranker_;
    ComposerConfig composer_;
    Diagnostics load_diag_;
};

/// Throws ArtifactError naming the file when an artifact is missing, corrupt
/// or built from a different corpus.
std::unique_ptr<EngineHandle> load_engine(const EnginePaths& paths, const EngineOptions& options);

struct QueryRequest {
    std::string query;
    std::string query_id;
    long long top_k = 10;
    bool compose = false;
    std::optional<WeightConfig> weights;
    bool include_timings = false;

    /// {query, top_k?, compose?, weights?: [4], include_timings?}
    static QueryRequest from_json(const nlohmann::json& j);
};

struct QueryResponse {
    std::vector<ScoredCandidate> ranked;   // truncated to top_k
    std::vector<Solution> solutions;       // filled when composing
    bool composed = false;
    Diagnostics diagnostics;
    StageTimings timings;
    double compose_ms = 0.0;

    /// Results array in rank order.
    nlohmann::ordered_json results_json() const;
    /// {"results": [...]} plus "diagnostics" when any were recorded and
    /// "timings_ms" when requested. Identical requests give identical bytes
    /// unless timings are included.
    nlohmann::ordered_json to_json(bool include_timings = false) const;
    nlohmann::ordered_json timings_json() const;
};

/// Throws ValidationError for top_k < 1 or a query with no tokens left after preprocessing.
QueryResponse handle_query(const EngineHandle& engine, const QueryRequest& request);

/// HTTP front end: POST /search and GET /health.
class SearchServer {
public:
    explicit SearchServer(const EngineHandle& engine);
    ~SearchServer();

    /// Binds to the port (0 picks a free one) and returns the bound port.
    /// Throws ValidationError when binding fails.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    void run();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace crokage
