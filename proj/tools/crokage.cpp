#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crokage/corpus.hpp"
#include "crokage/engine.hpp"
#include "crokage/errors.hpp"
#include "crokage/evalharness.hpp"
#include "crokage/indices.hpp"

namespace fs = std::filesystem;
using namespace crokage;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitArtifact = 3;
constexpr int kExitInternal = 4;

fs::path home_dir() {
    if (const char* h = std::getenv("CROKAGE_HOME"); h && *h) return h;
    return ".";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("failed writing " + path.string());
}

struct EngineFlags {
    std::string corpus;
    std::string indices;
    std::string vectors;
    std::string subwords;
    bool no_semantic = false;
    bool no_api = false;
    std::vector<std::string> providers;
    std::size_t api_limit = 20;
    std::string combine = "roundrobin";
    std::string position = "filter-before";
    std::size_t limit1 = 5000;
    std::size_t limit2 = 100;
    std::size_t top_asym = 100;
    std::string weights;
    std::string weights_file;
    std::string important_words;

    void attach(CLI::App* app) {
        app->add_option("--corpus", corpus, "corpus artifact (default $CROKAGE_HOME/corpus.bin)");
        app->add_option("--indices", indices, "index artifact (default $CROKAGE_HOME/indices.bin)");
        app->add_option("--vectors", vectors, "word vectors, text format (default $CROKAGE_HOME/vectors.txt)");
        app->add_option("--subwords", subwords, "character n-gram vectors for unknown words");
        app->add_flag("--no-semantic", no_semantic, "run without word vectors");
        app->add_flag("--no-api", no_api, "skip API class recommendation");
        app->add_option("--api-provider", providers, "label=path of a ranked class list, repeatable");
        app->add_option("--api-limit", api_limit, "recommended classes kept")->check(CLI::PositiveNumber);
        app->add_option("--api-combine", combine, "roundrobin or concat");
        app->add_option("--api-positions", position, "filter-before or filter-after");
        app->add_option("--limit1", limit1, "lexical candidates scored semantically")->check(CLI::PositiveNumber);
        app->add_option("--limit2", limit2, "lexical candidates merged into the pool")->check(CLI::PositiveNumber);
        app->add_option("--top-asym", top_asym, "semantic candidates merged into the pool")->check(CLI::PositiveNumber);
        app->add_option("--weights", weights, "sem,api,tfidf,method");
        app->add_option("--weights-file", weights_file, "weights.json written by calibrate");
        app->add_option("--important-words", important_words, "one word per line");
    }

    WeightConfig resolved_weights() const {
        if (!weights.empty() && !weights_file.empty()) throw ValidationError("use either --weights or --weights-file");
        if (!weights.empty()) return WeightConfig::parse(weights);
        if (!weights_file.empty()) {
            std::ifstream in(weights_file);
            if (!in) throw ValidationError("cannot open weights file " + weights_file);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ValidationError("invalid weights file " + weights_file + ": " + e.what());
            }
            auto w = j.is_object() && j.contains("weights") ? j["weights"] : j;
            if (!w.is_array() || w.size() != 4) throw ValidationError("weights file needs a 4-element 'weights' array");
            std::array<double, 4> v{};
            for (std::size_t i = 0; i < 4; ++i) v[i] = w[i].get<double>();
            auto cfg = WeightConfig::from_values(v);
            cfg.validate();
            return cfg;
        }
        return {};
    }

    std::unique_ptr<EngineHandle> load() const {
        auto paths = EnginePaths::from_home(home_dir());
        if (!corpus.empty()) paths.corpus = corpus;
        if (!indices.empty()) paths.indices = indices;
        if (!vectors.empty()) paths.vectors = fs::path(vectors);
        if (!subwords.empty()) paths.subwords = fs::path(subwords);
        EngineOptions opt;
        opt.pipeline.bm25_limit1 = limit1;
        opt.pipeline.bm25_limit2 = limit2;
        opt.pipeline.top_asym = top_asym;
        opt.pipeline.num_api_classes = api_limit;
        opt.pipeline.combine = parse_combine_mode(combine);
        opt.pipeline.position = parse_position_mode(position);
        opt.pipeline.weights = resolved_weights();
        opt.no_semantic = no_semantic;
        opt.no_api = no_api;
        opt.api_providers = providers;
        if (!important_words.empty()) opt.important_words = fs::path(important_words);
        return load_engine(paths, opt);
    }
};

void print_ranked(const EngineHandle& engine, const QueryResponse& resp) {
    if (resp.ranked.empty()) std::cout << "no results\n";
    for (std::size_t i = 0; i < resp.ranked.size(); ++i) {
        const auto& c = resp.ranked[i];
        const auto* doc = engine.corpus().find(c.answer_id);
        std::cout << std::setw(3) << i + 1 << ". answer " << c.answer_id << "  score " << std::fixed
                  << std::setprecision(4) << c.factors_score << "  [sem " << c.normalized.sem << " api "
                  << c.normalized.api << " tfidf " << c.normalized.tfidf << " method " << c.normalized.method
                  << "]\n";
        if (doc) std::cout << "     " << decode_entities(doc->raw_title) << "\n";
    }
}

void print_solutions(const QueryResponse& resp) {
    if (resp.solutions.empty()) std::cout << "no solution could be composed\n";
    for (const auto& s : resp.solutions) {
        std::cout << "=== Solution " << s.rank << " (answer " << s.answer_id << ") ===\n";
        for (const auto& e : s.explanation) std::cout << e << "\n";
        for (const auto& block : s.code_blocks) std::cout << "\n" << block << "\n";
        std::cout << "\n";
    }
}

int run_ingest(const std::string& input, const std::string& format, const std::string& out,
               const std::string& stopwords) {
    auto cfg = stopwords.empty() ? StopwordConfig::shipped() : StopwordConfig::load(stopwords);
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ValidationError("cannot open input " + input);
    Diagnostics diag;
    auto posts = parse_dump(in, parse_dump_format(format), diag);
    auto docs = build_thread_docs(posts, cfg, diag);
    Corpus corpus(std::move(docs), cfg);
    corpus.save(out);
    std::cerr << "ingested " << posts.size() << " posts into " << corpus.size() << " thread documents\n";
    if (!diag.empty()) std::cerr << diag.report();
    return 0;
}

int run_build(const std::string& corpus_path, const std::string& out, double k, double b, std::size_t min_freq) {
    auto corpus = Corpus::load(corpus_path);
    auto bundle = IndexBundle::build(corpus, Bm25Params{k, b}, min_freq);
    bundle.save(out);
    std::cerr << "indexed " << corpus.size() << " documents, " << bundle.idf.vocabulary_size() << " terms, "
              << bundle.api.classes().size() << " API classes\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crokage: answer search over Q&A dumps"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "parse a posts dump into corpus.bin");
    std::string in_path, in_format = "xml", in_out, in_stop;
    ingest->add_option("--input", in_path, "Posts.xml or posts.jsonl")->required();
    ingest->add_option("--format", in_format, "xml or jsonl");
    ingest->add_option("--out", in_out, "output corpus (default $CROKAGE_HOME/corpus.bin)");
    ingest->add_option("--stopwords", in_stop, "stopword list, one word per line");

    auto* build = app.add_subcommand("build", "build indices.bin from corpus.bin");
    std::string b_corpus, b_out;
    double b_k = 1.2, b_b = 0.75;
    std::size_t b_min = 5;
    build->add_option("--corpus", b_corpus, "corpus artifact (default $CROKAGE_HOME/corpus.bin)");
    build->add_option("--out", b_out, "output indices (default $CROKAGE_HOME/indices.bin)");
    build->add_option("--k", b_k, "BM25 term frequency saturation");
    build->add_option("--b", b_b, "BM25 length normalization");
    build->add_option("--min-class-freq", b_min, "answers an API class needs to be indexed");

    auto* search = app.add_subcommand("search", "rank answers for a query");
    EngineFlags s_flags;
    s_flags.attach(search);
    std::string s_query, s_query_id;
    long long s_top = 10, s_solutions = 3;
    bool s_json = false, s_compose = false, s_timings = false;
    search->add_option("--query", s_query, "natural language query")->required();
    search->add_option("--query-id", s_query_id, "id passed to API providers");
    search->add_option("--top", s_top, "answers returned");
    search->add_flag("--json", s_json, "print JSON");
    search->add_flag("--compose", s_compose, "compose solutions (code plus explanation)");
    search->add_option("--solutions", s_solutions, "solutions composed");
    search->add_flag("--timings", s_timings, "include per-stage timings");

    auto* evaluate = app.add_subcommand("evaluate", "score a baseline against a gold set");
    EngineFlags e_flags;
    e_flags.attach(evaluate);
    std::string e_gold, e_baseline = "fused", e_report;
    std::size_t e_k = 10;
    evaluate->add_option("--gold", e_gold, "gold set, JSON lines")->required();
    evaluate->add_option("--baseline", e_baseline, "bm25, tfidf, semantic, api_class, api_method or fused");
    evaluate->add_option("--k", e_k, "cutoff")->check(CLI::PositiveNumber);
    evaluate->add_option("--report", e_report, "write report JSON here");

    auto* calibrate = app.add_subcommand("calibrate", "grid-search fusion weights on a training split");
    EngineFlags c_flags;
    c_flags.attach(calibrate);
    std::string c_gold, c_out;
    double c_frac = 0.5, c_step = 0.25;
    std::uint64_t c_seed = 42;
    std::size_t c_k = 10;
    calibrate->add_option("--gold", c_gold, "gold set, JSON lines")->required();
    calibrate->add_option("--train-frac", c_frac, "fraction of queries used for training");
    calibrate->add_option("--seed", c_seed, "split seed");
    calibrate->add_option("--k", c_k, "cutoff")->check(CLI::PositiveNumber);
    calibrate->add_option("--step", c_step, "grid step");
    calibrate->add_option("--out", c_out, "write weights JSON here");

    auto* serve = app.add_subcommand("serve", "answer queries over HTTP");
    EngineFlags v_flags;
    v_flags.attach(serve);
    std::string v_host = "127.0.0.1";
    int v_port = 8080;
    serve->add_option("--host", v_host, "bind address");
    serve->add_option("--port", v_port, "port, 0 for any free port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*ingest) {
            return run_ingest(in_path, in_format, in_out.empty() ? (home_dir() / "corpus.bin").string() : in_out,
                              in_stop);
        }
        if (*build) {
            return run_build(b_corpus.empty() ? (home_dir() / "corpus.bin").string() : b_corpus,
                             b_out.empty() ? (home_dir() / "indices.bin").string() : b_out, b_k, b_b, b_min);
        }
        if (*search) {
            auto engine = s_flags.load();
            QueryRequest req;
            req.query = s_query;
            req.query_id = s_query_id;
            req.compose = s_compose;
            req.top_k = s_compose ? s_solutions : s_top;
            req.include_timings = s_timings;
            auto resp = handle_query(*engine, req);
            if (s_json) {
                std::cout << resp.results_json().dump(2) << "\n";
                if (s_timings) std::cerr << "timings_ms " << resp.timings_json().dump() << "\n";
            } else {
                if (s_compose) {
                    print_solutions(resp);
                } else {
                    print_ranked(*engine, resp);
                }
                if (s_timings) std::cerr << "timings_ms " << resp.timings_json().dump() << "\n";
            }
            if (!resp.diagnostics.empty()) std::cerr << resp.diagnostics.report();
            return 0;
        }
        if (*evaluate) {
            auto baseline = parse_baseline(e_baseline);
            auto engine = e_flags.load();
            Diagnostics diag;
            auto gold = GoldSet::load(e_gold, &diag);
            auto report = run_baseline(baseline, engine->ranker(), gold.entries, e_k, engine->ranker().config().weights);
            auto j = report.to_json();
            j["baseline"] = std::string(baseline_name(baseline));
            if (!e_report.empty()) write_text(e_report, j.dump(2) + "\n");
            std::cout << std::fixed << std::setprecision(4) << baseline_name(baseline) << " @" << report.k
                      << "  hit " << report.hit << "  mrr " << report.mrr << "  map " << report.map << "  mr "
                      << report.mr << "  (" << report.per_query.size() << " queries)\n";
            if (!diag.empty()) std::cerr << diag.report();
            return 0;
        }
        if (*calibrate) {
            auto engine = c_flags.load();
            Diagnostics diag;
            auto gold = GoldSet::load(c_gold, &diag);
            auto [train, test] = split_queries(gold.entries, c_seed, c_frac);
            auto result = calibrate_weights(engine->ranker(), train, c_k, c_step);
            auto test_report = run_baseline(Baseline::fused, engine->ranker(), test, c_k, result.weights);
            nlohmann::ordered_json j;
            j["weights"] = result.weights.values();
            j["k"] = c_k;
            j["seed"] = c_seed;
            j["train"] = {{"queries", train.size()}, {"hit", result.hit}, {"mrr", result.mrr}, {"map", result.map}};
            j["test"] = {{"queries", test.size()},   {"hit", test_report.hit}, {"mrr", test_report.mrr},
                         {"map", test_report.map}, {"mr", test_report.mr}};
            j["evaluated"] = result.evaluated;
            if (!c_out.empty()) write_text(c_out, j.dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
            if (!diag.empty()) std::cerr << diag.report();
            return 0;
        }
        if (*serve) {
            auto engine = v_flags.load();
            SearchServer server(*engine);
            int port = server.bind(v_host, v_port);
            std::cerr << "serving " << engine->corpus().size() << " documents on http://" << v_host << ":" << port
                      << "\n";
            server.run();
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArtifact;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
