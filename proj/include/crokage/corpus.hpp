#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crokage/diagnostics.hpp"

namespace crokage {

using AnswerId = std::int64_t;

enum class PostType { question, answer };

struct RawPost {
    std::int64_t id = 0;
    PostType type = PostType::question;
    std::optional<std::int64_t> parent_id;  // answers only
    int score = 0;
    std::optional<std::string> title;       // questions only
    std::string body_html;
    std::vector<std::string> tags;
};

enum class DumpFormat { xml_rows, jsonl };

DumpFormat parse_dump_format(std::string_view name);

struct StopwordConfig {
    std::unordered_set<std::string> stopwords;
    std::size_t min_token_len = 2;

    /// Standard English stopwords plus "code" and "java".
    static StopwordConfig shipped();
    /// One word per line; blank lines and '#' comments ignored; lowercased.
    static StopwordConfig load(const std::filesystem::path& path);

    bool contains(std::string_view word) const;
};

/// The shipped stopword list in its canonical order.
const std::vector<std::string>& shipped_stopwords();

/// One question-answer pair. Raw fields keep the original markup; proc_*
/// fields hold preprocessed tokens.
struct ThreadDoc {
    AnswerId answer_id = 0;
    std::int64_t question_id = 0;
    int answer_score = 0;
    std::string raw_title;
    std::string raw_question_body;
    std::string raw_answer_body;
    std::vector<std::string> code_blocks;

    std::vector<std::string> proc_title;
    std::vector<std::string> proc_question_body;
    std::vector<std::string> proc_answer_body;
    std::vector<std::string> proc_code_tokens;

    /// Title + question prose + answer prose + answer code: the lexical document.
    std::vector<std::string> index_tokens() const;
    /// Title + question prose + answer prose: compared semantically and by TF-IDF.
    std::vector<std::string> text_tokens() const;

    template <class Archive>
    void serialize(Archive& ar) {
        ar(answer_id, question_id, answer_score, raw_title, raw_question_body, raw_answer_body,
           code_blocks, proc_title, proc_question_body, proc_answer_body, proc_code_tokens);
    }
};

struct SplitBody {
    std::string prose;                    // paragraphs joined by single spaces
    std::vector<std::string> paragraphs;  // whitespace-collapsed, block boundaries kept
    std::vector<std::string> code_blocks;
};

/// Reads a Stack Exchange Posts.xml stream or its JSON-lines mirror.
/// Malformed rows and unknown post types are skipped and counted; a stream that
/// ends inside a row throws ParseError.
std::vector<RawPost> parse_dump(std::istream& in, DumpFormat format, Diagnostics& diag);

SplitBody split_text_code(std::string_view body_html);

/// Decodes named and numeric character references.
std::string decode_entities(std::string_view text);

std::vector<std::string> preprocess(std::string_view text, const StopwordConfig& cfg);

/// Optional sign, digits, optional decimal part.
bool is_pure_number(std::string_view token);

std::vector<ThreadDoc> build_thread_docs(const std::vector<RawPost>& posts, const StopwordConfig& cfg,
                                         Diagnostics& diag);

/// Thread documents sorted by answer id, plus the content hash that later
/// artifacts are tied to.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<ThreadDoc> docs, StopwordConfig stopwords = StopwordConfig::shipped());

    const std::vector<ThreadDoc>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    const ThreadDoc* find(AnswerId id) const;
    std::uint64_t content_hash() const { return hash_; }
    /// The preprocessing rules the documents were built with; queries reuse them.
    const StopwordConfig& stopwords() const { return stopwords_; }

    void save(const std::filesystem::path& path) const;
    static Corpus load(const std::filesystem::path& path);

private:
    std::string encode() const;

    std::vector<ThreadDoc> docs_;
    StopwordConfig stopwords_;
    std::uint64_t hash_ = 0;
};

}  // namespace crokage
