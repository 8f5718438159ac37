#include "crokage/composer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "crokage/errors.hpp"

namespace crokage {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Lowercased word immediately before position `end` (exclusive), without the dot.
std::string word_before(std::string_view text, std::size_t end) {
    auto b = end;
    while (b > 0 && !is_space(text[b - 1])) --b;
    return lower(text.substr(b, end - b));
}

bool is_abbreviation(std::string_view word_with_dot) {
    static const std::array<std::string_view, 10> abbrevs = {"e.g.", "i.e.", "etc.", "vs.", "cf.",
                                                             "eg.",  "ie.",  "approx.", "resp.", "mr."};
    return std::find(abbrevs.begin(), abbrevs.end(), word_with_dot) != abbrevs.end();
}

bool has_camel_case(std::string_view token) {
    for (std::size_t i = 1; i < token.size(); ++i) {
        if (std::islower(static_cast<unsigned char>(token[i - 1])) &&
            std::isupper(static_cast<unsigned char>(token[i]))) {
            return true;
        }
    }
    return false;
}

bool has_number(std::string_view sentence) {
    return std::any_of(sentence.begin(), sentence.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

const std::vector<std::string>& shipped_important_words() {
    static const std::vector<std::string> words = {"insert", "replace", "update", "convert", "parse", "read",
                                                   "write",  "create",  "delete", "sort",    "format"};
    return words;
}

SpecialConditionConfig SpecialConditionConfig::shipped() {
    SpecialConditionConfig cfg;
    cfg.important_words.insert(shipped_important_words().begin(), shipped_important_words().end());
    return cfg;
}

SpecialConditionConfig SpecialConditionConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open important words file " + path.string());
    SpecialConditionConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto word = lower(trim(line));
        if (word.empty() || word.front() == '#') continue;
        cfg.important_words.insert(word);
    }
    if (cfg.important_words.empty()) throw ValidationError("important words file is empty: " + path.string());
    return cfg;
}

bool special_conditions(std::string_view raw_sentence, std::span<const std::string> query_tokens,
                        const ComposerConfig& cfg) {
    if (has_number(raw_sentence)) return true;
    std::size_t i = 0;
    while (i < raw_sentence.size()) {
        while (i < raw_sentence.size() && is_space(raw_sentence[i])) ++i;
        auto start = i;
        while (i < raw_sentence.size() && !is_space(raw_sentence[i])) ++i;
        if (has_camel_case(raw_sentence.substr(start, i - start))) return true;
    }
    for (const auto& word : tagger_tokens(raw_sentence)) {
        if (cfg.special.important_words.count(lower(word))) return true;
    }
    if (!query_tokens.empty()) {
        for (const auto& tok : preprocess(raw_sentence, cfg.stopwords)) {
            if (std::find(query_tokens.begin(), query_tokens.end(), tok) != query_tokens.end()) return true;
        }
    }
    return false;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto emit = [&](std::size_t b, std::size_t e) {
        auto s = trim(text.substr(b, e - b));
        if (!s.empty()) out.push_back(std::move(s));
    };
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            emit(start, i);
            start = ++i;
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            auto j = i;
            while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            // closing quotes and brackets stay with the sentence
            while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')')) ++j;
            bool boundary = j == text.size() || is_space(text[j]);
            if (boundary && c == '.' && j == i + 1 && is_abbreviation(word_before(text, i + 1))) boundary = false;
            if (boundary) {
                emit(start, j);
                start = i = j;
                continue;
            }
            i = j;
            continue;
        }
        ++i;
    }
    emit(start, text.size());
    return out;
}

std::vector<SentenceJudgment> judge_sentences(std::span<const std::string> query_tokens, std::string_view answer_body,
                                              const ComposerConfig& cfg) {
    static const RuleTagger default_tagger;
    const PosTagger& tagger = cfg.tagger ? *cfg.tagger : default_tagger;
    std::vector<SentenceJudgment> out;
    for (auto& sentence : split_sentences(answer_body)) {
        SentenceJudgment j;
        j.pos_tags = tagger.tag(sentence);
        auto m = matches_patterns(j.pos_tags);
        j.matched_pattern1 = m.p1;
        j.matched_pattern2 = m.p2;
        j.matched_special = special_conditions(sentence, query_tokens, cfg);
        j.kept = j.matched_pattern1 || j.matched_pattern2 || j.matched_special;
        j.sentence = std::move(sentence);
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<std::string> filter_sentences(std::span<const std::string> query_tokens, std::string_view answer_body,
                                          const ComposerConfig& cfg) {
    std::vector<std::string> kept;
    for (auto& j : judge_sentences(query_tokens, answer_body, cfg)) {
        if (j.kept) kept.push_back(std::move(j.sentence));
    }
    return kept;
}

std::vector<Solution> compose_solutions(std::span<const ScoredCandidate> ranked, const Corpus& corpus,
                                        std::span<const std::string> query_tokens, std::size_t k,
                                        const ComposerConfig& cfg, Diagnostics* diag) {
    if (k < 1) throw ValidationError("solutions must be at least 1");
    std::vector<Solution> out;
    for (const auto& cand : ranked) {
        if (out.size() >= k) break;
        const auto* doc = corpus.find(cand.answer_id);
        if (!doc || doc->code_blocks.empty()) continue;
        auto split = split_text_code(doc->raw_answer_body);
        std::string prose;
        for (const auto& p : split.paragraphs) {
            if (!prose.empty()) prose += '\n';
            prose += p;
        }
        auto kept = filter_sentences(query_tokens, prose, cfg);
        if (kept.empty()) {
            if (diag) diag->record("no_explanation", "answer " + std::to_string(cand.answer_id));
            continue;
        }
        out.push_back({cand.answer_id, doc->code_blocks, std::move(kept), out.size() + 1});
    }
    if (out.empty() && diag) diag->record("no_solution");
    return out;
}

}  // namespace crokage
