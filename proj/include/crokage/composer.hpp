#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crokage/corpus.hpp"
#include "crokage/diagnostics.hpp"
#include "crokage/ranker.hpp"

namespace crokage {

struct TaggedToken {
    std::string token;
    std::string tag;  // Penn Treebank tag

    bool operator==(const TaggedToken&) const = default;
};

/// Assigns one part-of-speech tag per word of a sentence.
class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<TaggedToken> tag(std::string_view sentence) const = 0;
};

/// Closed-class lexicon, a programming-prose verb/noun lexicon, suffix
/// rules and a few left-context rules. Unknown words default to NN.
class RuleTagger final : public PosTagger {
public:
    std::vector<TaggedToken> tag(std::string_view sentence) const override;
};

/// Tags with the default RuleTagger.
std::vector<TaggedToken> pos_tag(std::string_view sentence);

/// Words of a sentence as the tagger sees them: outer punctuation stripped,
/// contractions split ("don't" -> "do" "n't").
std::vector<std::string> tagger_tokens(std::string_view sentence);

struct PatternMatch {
    bool p1 = false;  // a verb followed later by a noun
    bool p2 = false;  // a noun not headed by a personal pronoun, plus a verb
    bool any() const { return p1 || p2; }
};

PatternMatch matches_patterns(std::span<const TaggedToken> tags);

struct SpecialConditionConfig {
    std::unordered_set<std::string> important_words;

    /// insert, replace, update plus common imperative programming verbs.
    static SpecialConditionConfig shipped();
    static SpecialConditionConfig load(const std::filesystem::path& path);
};

const std::vector<std::string>& shipped_important_words();

struct ComposerConfig {
    SpecialConditionConfig special = SpecialConditionConfig::shipped();
    StopwordConfig stopwords = StopwordConfig::shipped();
    const PosTagger* tagger = nullptr;  // null means RuleTagger
};

/// True when the sentence has a number, a camelCase word, an important word,
/// or a preprocessed token shared with the query.
bool special_conditions(std::string_view raw_sentence, std::span<const std::string> query_tokens,
                        const ComposerConfig& cfg);

/// Splits on . ! ? followed by whitespace, and on line breaks. Periods inside
/// tokens (f.toURI) and after common abbreviations do not split.
std::vector<std::string> split_sentences(std::string_view text);

struct SentenceJudgment {
    std::string sentence;
    std::vector<TaggedToken> pos_tags;
    bool matched_pattern1 = false;
    bool matched_pattern2 = false;
    bool matched_special = false;
    bool kept = false;
};

std::vector<SentenceJudgment> judge_sentences(std::span<const std::string> query_tokens, std::string_view answer_body,
                                              const ComposerConfig& cfg);

/// Kept sentences, original text, input order.
std::vector<std::string> filter_sentences(std::span<const std::string> query_tokens, std::string_view answer_body,
                                          const ComposerConfig& cfg);

struct Solution {
    AnswerId answer_id = 0;
    std::vector<std::string> code_blocks;
    std::vector<std::string> explanation;
    std::size_t rank = 0;  // 1-based among emitted solutions
};

/// Walks the ranking and emits up to k solutions, skipping answers whose
/// prose has no kept sentence.
std::vector<Solution> compose_solutions(std::span<const ScoredCandidate> ranked, const Corpus& corpus,
                                        std::span<const std::string> query_tokens, std::size_t k,
                                        const ComposerConfig& cfg, Diagnostics* diag = nullptr);

}  // namespace crokage
