#include "crokage/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>

#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <nlohmann/json.hpp>

#include "crokage/artifact.hpp"
#include "crokage/errors.hpp"

namespace crokage {
namespace {

constexpr std::string_view kCorpusMagic = "CRKC";
constexpr std::uint32_t kCorpusVersion = 1;

bool is_token_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::vector<std::string> parse_tags(std::string_view raw) {
    std::vector<std::string> tags;
    std::string cur;
    auto push = [&] {
        if (!cur.empty()) tags.push_back(to_lower(cur));
        cur.clear();
    };
    for (char c : raw) {
        if (c == '<' || c == '>' || c == '|' || c == ' ') {
            push();
        } else {
            cur += c;
        }
    }
    push();
    return tags;
}

// Field values keyed by lowercased attribute name; shared by both formats.
using FieldMap = std::map<std::string, std::string>;

std::optional<RawPost> make_post(const FieldMap& f, Diagnostics& diag) {
    auto get = [&](const char* key) -> const std::string* {
        auto it = f.find(key);
        return it == f.end() ? nullptr : &it->second;
    };
    const auto* id_s = get("id");
    const auto* type_s = get("posttypeid");
    auto id = id_s ? parse_int(*id_s) : std::nullopt;
    auto type = type_s ? parse_int(*type_s) : std::nullopt;
    if (!id || *id <= 0 || !type) {
        diag.record("malformed_row", "missing or invalid Id/PostTypeId");
        return std::nullopt;
    }
    if (*type != 1 && *type != 2) {
        diag.record("skipped_post_type");
        return std::nullopt;
    }
    RawPost post;
    post.id = *id;
    post.type = *type == 1 ? PostType::question : PostType::answer;
    if (const auto* score = get("score")) {
        auto v = parse_int(*score);
        if (!v) {
            diag.record("malformed_row", "post " + std::to_string(post.id) + ": invalid Score");
            return std::nullopt;
        }
        post.score = static_cast<int>(*v);
    }
    if (const auto* body = get("body")) post.body_html = *body;
    if (post.type == PostType::question) {
        const auto* title = get("title");
        if (!title) {
            diag.record("malformed_row", "question " + std::to_string(post.id) + " has no Title");
            return std::nullopt;
        }
        post.title = *title;
        if (const auto* tags = get("tags")) post.tags = parse_tags(*tags);
    } else {
        const auto* parent_s = get("parentid");
        auto parent = parent_s ? parse_int(*parent_s) : std::nullopt;
        if (!parent || *parent <= 0) {
            diag.record("malformed_row", "answer " + std::to_string(post.id) + " has no ParentId");
            return std::nullopt;
        }
        post.parent_id = *parent;
    }
    return post;
}

// Streams markup elements out of a Posts.xml file without loading it whole.
class XmlElementReader {
public:
    explicit XmlElementReader(std::istream& in) : in_(in) {}

    struct Element {
        std::string text;
        std::uint64_t offset = 0;
    };

    std::optional<Element> next() {
        for (;;) {
            auto lt = buf_.find('<', pos_);
            if (lt != std::string::npos) {
                pos_ = lt;
                break;
            }
            pos_ = buf_.size();
            if (!fill()) return std::nullopt;
        }
        const std::uint64_t start = base_ + pos_;
        std::size_t rel = 1;  // offset from the element's '<'
        bool comment = false;
        char quote = 0;
        for (;; ++rel) {
            while (pos_ + rel >= buf_.size()) {
                if (!fill()) throw ParseError("truncated stream: unterminated element", start);
            }
            char c = buf_[pos_ + rel];
            if (rel == 3 && buf_.compare(pos_, 4, "<!--") == 0) comment = true;
            if (comment) {
                if (c == '>' && rel >= 6 && buf_.compare(pos_ + rel - 2, 2, "--") == 0) break;
            } else if (quote) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                break;
            }
        }
        const std::size_t i = pos_ + rel;
        Element el{buf_.substr(pos_, i + 1 - pos_), start};
        pos_ = i + 1;
        return el;
    }

    std::uint64_t consumed() const { return base_ + buf_.size(); }

private:
    bool fill() {
        if (pos_ > 0) {
            buf_.erase(0, pos_);
            base_ += pos_;
            pos_ = 0;
        }
        char chunk[1 << 16];
        in_.read(chunk, sizeof chunk);
        auto got = in_.gcount();
        if (got <= 0) return false;
        buf_.append(chunk, static_cast<std::size_t>(got));
        return true;
    }

    std::istream& in_;
    std::string buf_;
    std::size_t pos_ = 0;
    std::uint64_t base_ = 0;
};

std::string element_name(std::string_view el) {
    std::size_t i = 1;
    std::string name;
    if (i < el.size() && el[i] == '/') name += el[i++];
    while (i < el.size() && (std::isalnum(static_cast<unsigned char>(el[i])) || el[i] == '?' || el[i] == '!'))
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(el[i++])));
    return name;
}

std::optional<FieldMap> parse_attributes(std::string_view el) {
    FieldMap fields;
    std::size_t i = 1;
    while (i < el.size() && std::isalnum(static_cast<unsigned char>(el[i]))) ++i;
    for (;;) {
        while (i < el.size() && std::isspace(static_cast<unsigned char>(el[i]))) ++i;
        if (i >= el.size()) return std::nullopt;
        if (el[i] == '/' || el[i] == '>') return fields;
        auto name_start = i;
        while (i < el.size() && !std::isspace(static_cast<unsigned char>(el[i])) && el[i] != '=' && el[i] != '/' &&
               el[i] != '>')
            ++i;
        auto name = to_lower(el.substr(name_start, i - name_start));
        while (i < el.size() && std::isspace(static_cast<unsigned char>(el[i]))) ++i;
        if (i >= el.size() || el[i] != '=' || name.empty()) return std::nullopt;
        ++i;
        while (i < el.size() && std::isspace(static_cast<unsigned char>(el[i]))) ++i;
        if (i >= el.size() || (el[i] != '"' && el[i] != '\'')) return std::nullopt;
        char quote = el[i++];
        auto close = el.find(quote, i);
        if (close == std::string_view::npos) return std::nullopt;
        fields[name] = decode_entities(el.substr(i, close - i));
        i = close + 1;
    }
}

std::vector<RawPost> parse_xml_rows(std::istream& in, Diagnostics& diag) {
    std::vector<RawPost> posts;
    XmlElementReader reader(in);
    bool opened = false;
    bool closed = false;
    while (auto el = reader.next()) {
        auto name = element_name(el->text);
        if (name == "posts") {
            opened = true;
        } else if (name == "/posts") {
            closed = true;
        } else if (name == "row") {
            auto fields = parse_attributes(el->text);
            if (!fields) {
                diag.record("malformed_row", "unparseable row at byte " + std::to_string(el->offset));
                continue;
            }
            if (auto post = make_post(*fields, diag)) posts.push_back(std::move(*post));
        }
    }
    if (opened && !closed) throw ParseError("truncated stream: missing </posts>", reader.consumed());
    return posts;
}

std::string json_field_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_array()) {
        std::string joined = "|";
        for (const auto& item : v) {
            if (item.is_string()) joined += item.get<std::string>() + "|";
        }
        return joined;
    }
    return v.dump();
}

std::vector<RawPost> parse_jsonl(std::istream& in, Diagnostics& diag) {
    std::vector<RawPost> posts;
    std::string line;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        const bool terminated = !in.eof();
        offset += line.size() + (terminated ? 1 : 0);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            if (!terminated) throw ParseError("truncated stream: incomplete JSON line", line_offset);
            diag.record("malformed_row", "invalid JSON at byte " + std::to_string(line_offset));
            continue;
        }
        FieldMap fields;
        for (const auto& [key, value] : obj.items()) {
            if (!value.is_null()) fields[to_lower(key)] = json_field_text(value);
        }
        if (auto post = make_post(fields, diag)) posts.push_back(std::move(*post));
    }
    return posts;
}

}  // namespace

DumpFormat parse_dump_format(std::string_view name) {
    if (name == "xml" || name == "xml-rows") return DumpFormat::xml_rows;
    if (name == "jsonl") return DumpFormat::jsonl;
    throw ValidationError("unknown dump format: " + std::string(name));
}

const std::vector<std::string>& shipped_stopwords() {
    static const std::vector<std::string> words = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours", "yourself",
        "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
        "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that",
        "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
        "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as",
        "until", "while", "of", "at", "by", "for", "with", "about", "against", "between", "into", "through",
        "during", "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off",
        "over", "under", "again", "further", "then", "once", "here", "there", "when", "where", "why", "how",
        "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not",
        "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don", "should",
        "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
        "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn", "weren", "won",
        "wouldn", "code", "java"};
    return words;
}

StopwordConfig StopwordConfig::shipped() {
    StopwordConfig cfg;
    cfg.stopwords.insert(shipped_stopwords().begin(), shipped_stopwords().end());
    return cfg;
}

StopwordConfig StopwordConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read stopword list: " + path.string());
    StopwordConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto word = to_lower(line);
        word.erase(0, word.find_first_not_of(" \t\r"));
        word.erase(word.find_last_not_of(" \t\r") + 1);
        if (word.empty() || word[0] == '#') continue;
        cfg.stopwords.insert(word);
    }
    if (cfg.stopwords.empty()) throw ValidationError("stopword list is empty: " + path.string());
    return cfg;
}

bool StopwordConfig::contains(std::string_view word) const { return stopwords.count(std::string(word)) > 0; }

std::vector<std::string> ThreadDoc::index_tokens() const {
    auto out = text_tokens();
    out.insert(out.end(), proc_code_tokens.begin(), proc_code_tokens.end());
    return out;
}

std::vector<std::string> ThreadDoc::text_tokens() const {
    std::vector<std::string> out;
    out.reserve(proc_title.size() + proc_question_body.size() + proc_answer_body.size() + proc_code_tokens.size());
    out.insert(out.end(), proc_title.begin(), proc_title.end());
    out.insert(out.end(), proc_question_body.begin(), proc_question_body.end());
    out.insert(out.end(), proc_answer_body.begin(), proc_answer_body.end());
    return out;
}

std::vector<RawPost> parse_dump(std::istream& in, DumpFormat format, Diagnostics& diag) {
    auto posts = format == DumpFormat::xml_rows ? parse_xml_rows(in, diag) : parse_jsonl(in, diag);
    std::unordered_map<std::int64_t, bool> seen;
    std::vector<RawPost> unique;
    unique.reserve(posts.size());
    for (auto& p : posts) {
        if (!seen.emplace(p.id, true).second) {
            diag.record("duplicate_id", "post " + std::to_string(p.id));
            continue;
        }
        unique.push_back(std::move(p));
    }
    return unique;
}

bool is_pure_number(std::string_view token) {
    std::size_t i = 0;
    if (i < token.size() && (token[i] == '+' || token[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0) return false;
    if (i < token.size() && token[i] == '.') {
        ++i;
        std::size_t frac = 0;
        while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
            ++i;
            ++frac;
        }
        if (frac == 0) return false;
    }
    return i == token.size();
}

std::vector<std::string> preprocess(std::string_view text, const StopwordConfig& cfg) {
    std::vector<std::string> tokens;
    std::string cur;
    auto push = [&] {
        if (cur.size() >= cfg.min_token_len && !is_pure_number(cur) && !cfg.contains(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_token_char(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else {
            push();
        }
    }
    push();
    return tokens;
}

std::vector<ThreadDoc> build_thread_docs(const std::vector<RawPost>& posts, const StopwordConfig& cfg,
                                         Diagnostics& diag) {
    struct QuestionText {
        const RawPost* post;
        std::optional<SplitBody> split;
    };
    std::unordered_map<std::int64_t, QuestionText> questions;
    for (const auto& p : posts) {
        if (p.type == PostType::question) questions.emplace(p.id, QuestionText{&p, std::nullopt});
    }

    std::vector<ThreadDoc> docs;
    for (const auto& p : posts) {
        if (p.type != PostType::answer) continue;
        auto q = questions.find(*p.parent_id);
        if (q == questions.end()) {
            diag.record("orphan_answer", "answer " + std::to_string(p.id) + " has no parent " +
                                             std::to_string(*p.parent_id));
            continue;
        }
        auto answer = split_text_code(p.body_html);
        if (answer.code_blocks.empty()) {
            diag.record("answer_without_code");
            continue;
        }
        auto& question = q->second;
        if (!question.split) question.split = split_text_code(question.post->body_html);

        ThreadDoc doc;
        doc.answer_id = p.id;
        doc.question_id = question.post->id;
        doc.answer_score = p.score;
        doc.raw_title = question.post->title.value_or("");
        doc.raw_question_body = question.post->body_html;
        doc.raw_answer_body = p.body_html;
        doc.code_blocks = std::move(answer.code_blocks);
        doc.proc_title = preprocess(decode_entities(doc.raw_title), cfg);
        doc.proc_question_body = preprocess(question.split->prose, cfg);
        doc.proc_answer_body = preprocess(answer.prose, cfg);
        for (const auto& block : doc.code_blocks) {
            auto toks = preprocess(block, cfg);
            doc.proc_code_tokens.insert(doc.proc_code_tokens.end(), toks.begin(), toks.end());
        }
        docs.push_back(std::move(doc));
    }
    std::stable_sort(docs.begin(), docs.end(),
                     [](const ThreadDoc& a, const ThreadDoc& b) { return a.answer_id < b.answer_id; });
    return docs;
}

Corpus::Corpus(std::vector<ThreadDoc> docs, StopwordConfig stopwords)
    : docs_(std::move(docs)), stopwords_(std::move(stopwords)) {
    std::stable_sort(docs_.begin(), docs_.end(),
                     [](const ThreadDoc& a, const ThreadDoc& b) { return a.answer_id < b.answer_id; });
    for (std::size_t i = 1; i < docs_.size(); ++i) {
        if (docs_[i].answer_id == docs_[i - 1].answer_id) {
            throw ValidationError("duplicate answer id " + std::to_string(docs_[i].answer_id));
        }
    }
    hash_ = artifact::fnv1a(encode());
}

std::string Corpus::encode() const {
    std::vector<std::string> words(stopwords_.stopwords.begin(), stopwords_.stopwords.end());
    std::sort(words.begin(), words.end());
    std::uint64_t min_len = stopwords_.min_token_len;
    return artifact::encode_payload([&](auto& ar) { ar(words, min_len, docs_); });
}

const ThreadDoc* Corpus::find(AnswerId id) const {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), id,
                               [](const ThreadDoc& d, AnswerId v) { return d.answer_id < v; });
    return it != docs_.end() && it->answer_id == id ? &*it : nullptr;
}

void Corpus::save(const std::filesystem::path& path) const {
    artifact::write_file(path, kCorpusMagic, kCorpusVersion, encode());
}

Corpus Corpus::load(const std::filesystem::path& path) {
    auto env = artifact::read_file(path, kCorpusMagic, kCorpusVersion);
    Corpus c;
    std::vector<std::string> words;
    std::uint64_t min_len = 0;
    artifact::decode_payload(env.payload, [&](auto& ar) { ar(words, min_len, c.docs_); });
    c.stopwords_.stopwords = {words.begin(), words.end()};
    c.stopwords_.min_token_len = min_len;
    c.hash_ = env.hash;
    return c;
}

}  // namespace crokage
