#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "crokage/composer.hpp"

namespace crokage {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_map<std::string, std::string>& closed_class() {
    static const std::unordered_map<std::string, std::string> lex = [] {
        std::unordered_map<std::string, std::string> m;
        auto add = [&](std::initializer_list<const char*> words, const char* tag) {
            for (const auto* w : words) m.emplace(w, tag);
        };
        add({"the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no",
             "another", "all", "both", "either", "neither"},
            "DT");
        add({"i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them", "myself", "yourself",
             "itself", "themselves", "ourselves", "himself", "herself", "one"},
            "PRP");
        add({"my", "your", "his", "her", "its", "our", "their"}, "PRP$");
        add({"of", "in", "on", "at", "by", "for", "with", "from", "into", "about", "as", "like", "than",
             "through", "over", "under", "after", "before", "between", "without", "within", "during", "via",
             "per", "since", "because", "if", "while", "until", "whether", "upon", "against", "among", "onto",
             "toward", "towards", "though", "although", "unless", "below", "above", "across", "behind",
             "inside", "outside", "except", "instead"},
            "IN");
        add({"to"}, "TO");
        add({"and", "or", "but", "nor", "yet", "&"}, "CC");
        add({"can", "could", "will", "would", "shall", "should", "may", "might", "must", "'ll", "'d", "wo",
             "ca"},
            "MD");
        add({"which"}, "WDT");
        add({"what", "who", "whom", "whoever"}, "WP");
        add({"how", "when", "where", "why"}, "WRB");
        add({"there"}, "EX");
        add({"yes", "hi", "hello", "thanks", "thank", "ok", "okay", "oh", "hey", "please", "cheers", "wow"}, "UH");
        add({"not", "n't", "also", "just", "very", "really", "only", "then", "now", "here", "still", "even",
             "too", "already", "always", "never", "often", "sometimes", "however", "maybe", "perhaps", "else",
             "quite", "rather", "again", "once", "away", "back", "ever", "anyway", "so", "well", "almost",
             "soon", "later", "together", "otherwise", "thus", "hence", "therefore", "indeed", "first",
             "anymore", "exactly"},
            "RB");
        add({"is", "'s", "has", "does"}, "VBZ");
        add({"are", "am", "'re", "'ve", "have", "do"}, "VBP");
        add({"was", "were", "had", "did", "got", "made", "went", "came", "took", "gave", "found", "thought",
             "said", "told", "wrote", "ran", "began", "knew", "saw", "built", "sent", "left", "kept", "held",
             "meant", "put", "set", "read", "threw", "caught"},
            "VBD");
        add({"be"}, "VB");
        add({"been", "done", "gone", "given", "taken", "written", "known", "seen", "thrown", "shown", "chosen",
             "broken", "hidden", "forgotten"},
            "VBN");
        add({"being"}, "VBG");
        add({"good", "bad", "new", "old", "easy", "simple", "same", "different", "sure", "possible", "available",
             "able", "last", "next", "other", "many", "much", "few", "own", "whole", "full", "empty", "true",
             "false", "static", "final", "public", "private", "protected", "correct", "wrong", "right",
             "following", "previous", "current", "specific", "general", "certain", "fine", "great", "nice",
             "clear", "proper", "valid", "invalid", "large", "small", "big", "long", "short", "high", "low",
             "fast", "slow", "single", "multiple", "several", "various", "similar", "main", "actual", "entire",
             "absolute", "relative", "native", "local", "global", "abstract", "default", "original", "separate",
             "necessary", "important", "useful", "safe", "unique", "common", "complete", "exact", "direct",
             "easier", "simpler", "better", "faster", "best", "easiest", "simplest", "worst", "null"},
            "JJ");
        for (const char* w : {"easier", "simpler", "better", "faster"}) m[w] = "JJR";
        for (const char* w : {"best", "easiest", "simplest", "worst"}) m[w] = "JJS";
        return m;
    }();
    return lex;
}

// Base forms used as verbs in programming prose.
const std::unordered_set<std::string>& verbs() {
    static const std::unordered_set<std::string> v = {
        "use", "call", "create", "convert", "run", "execute", "read", "write", "get", "set", "add", "remove",
        "delete", "return", "make", "try", "see", "check", "need", "want", "work", "change", "put", "take",
        "give", "find", "look", "pass", "open", "close", "load", "save", "parse", "print", "throw", "catch",
        "handle", "implement", "extend", "override", "define", "declare", "initialize", "instantiate", "store",
        "send", "receive", "build", "compile", "install", "import", "export", "insert", "replace", "update",
        "sort", "format", "split", "join", "append", "iterate", "loop", "access", "apply", "avoid", "include",
        "contain", "keep", "let", "help", "show", "start", "stop", "wait", "allow", "provide", "specify",
        "generate", "compare", "copy", "move", "rename", "match", "test", "fix", "debug", "know", "think",
        "seem", "say", "tell", "ask", "go", "come", "become", "happen", "mean", "depend", "require", "consider",
        "note", "notice", "remember", "assume", "ensure", "wrap", "cast", "filter", "reduce", "collect",
        "invoke", "trigger", "register", "configure", "enable", "disable", "refer", "point", "display",
        "render", "draw", "connect", "download", "upload", "encode", "decode", "encrypt", "decrypt",
        "serialize", "deserialize", "validate", "verify", "resolve", "process", "modify", "edit", "select",
        "click", "enter", "press", "follow", "assign", "allocate", "free", "release", "lock", "synchronize",
        "clear", "reset", "flush", "fetch", "query", "search", "count", "calculate", "compute", "determine",
        "detect", "extract", "construct", "produce", "output", "solve", "achieve", "perform", "support",
        "fail", "succeed", "exist", "occur", "appear", "reuse", "share", "leave", "stay", "hold", "break",
        "continue", "skip", "finish", "end", "begin", "exit", "kill", "spawn", "launch", "schedule", "submit",
        "hope", "guess", "suggest", "recommend", "prefer", "like", "love", "hate", "mention", "explain",
        "answer", "post", "edit", "fill", "place", "list", "map", "type", "order", "request", "return",
        "report", "design", "record", "view", "access", "document", "bind", "mock", "inject", "override",
        "close", "declare", "handle", "shutdown", "terminate", "reply", "apply", "supply", "rely", "specify"};
    return v;
}

// Words that are nouns by default but verbs in verb context.
const std::unordered_set<std::string>& noun_verbs() {
    static const std::unordered_set<std::string> v = {
        "use", "call", "set", "run", "test", "work", "change", "need", "list", "map", "type", "return", "loop",
        "match", "copy", "sort", "format", "split", "join", "update", "insert", "replace", "fix", "check",
        "search", "query", "count", "process", "output", "end", "break", "access", "import", "export", "help",
        "start", "stop", "point", "display", "record", "lock", "release", "support", "filter", "design", "load",
        "show", "look", "cast", "order", "request", "answer", "post", "edit", "view", "document", "report",
        "place", "mock", "note", "store", "fill", "hope", "guess", "try", "download", "upload", "exit",
        "reply", "wait"};
    return v;
}

// Never verbs even though a suffix rule would say otherwise.
const std::unordered_set<std::string>& plain_nouns() {
    static const std::unordered_set<std::string> n = {
        "string", "thing", "something", "nothing", "anything", "everything", "spring", "ring", "king",
        "morning", "evening", "ceiling", "building", "variable", "table", "executable", "callable", "runnable",
        "iterable", "cable", "bus", "class", "process", "access", "status", "alias", "canvas", "focus",
        "analysis", "basis", "axis", "news", "series", "species", "approach", "need", "speed", "seed", "feed",
        "embed", "bed", "red", "thread", "method", "field", "id", "bytes", "apply", "family", "assembly",
        "reply", "supply", "only", "early", "daily", "ally", "fly", "poly", "anomaly"};
    return n;
}

bool is_verb_tag(std::string_view t) { return t.size() >= 2 && t.substr(0, 2) == "VB"; }

bool nominal_context(std::string_view prev_tag) {
    return prev_tag == "DT" || prev_tag == "PRP$" || prev_tag == "JJ" || prev_tag == "JJR" ||
           prev_tag == "JJS" || prev_tag == "IN" || prev_tag == "CD" || prev_tag == "POS";
}

std::string verb_form(std::string_view prev_tag) {
    if (prev_tag == "PRP" || prev_tag == "NNS") return "VBP";
    return "VB";
}

std::optional<std::string> verb_stem_of_s_form(const std::string& w) {
    if (w.size() < 3 || w.back() != 's' || ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) {
        return std::nullopt;
    }
    std::vector<std::string> stems;
    if (ends_with(w, "ies")) stems.push_back(w.substr(0, w.size() - 3) + "y");
    if (ends_with(w, "es")) stems.push_back(w.substr(0, w.size() - 2));
    stems.push_back(w.substr(0, w.size() - 1));
    for (const auto& s : stems) {
        if (verbs().count(s)) return s;
    }
    return std::nullopt;
}

bool is_number(std::string_view w) {
    bool digit = false;
    for (char c : w) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = true;
        } else if (c != '.' && c != ',' && c != '-' && c != '+') {
            return false;
        }
    }
    return digit;
}

bool has_inner_upper(std::string_view w) {
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (std::isupper(static_cast<unsigned char>(w[i]))) return true;
    }
    return false;
}

std::string tag_word(const std::string& word, bool sentence_start, const std::string& prev_tag,
                     const std::string& prev_word) {
    const auto w = lower(word);
    if (is_number(word)) return "CD";
    if (word.find_first_of("._()[]<>=/$#") != std::string::npos || (has_inner_upper(word) && !sentence_start)) {
        return "NN";  // code element in prose
    }
    if (auto it = closed_class().find(w); it != closed_class().end()) {
        const auto& tag = it->second;
        // "that"/"this" directly before a verb are subjects; the verb rule handles it
        if (tag == "VBD" && (prev_tag == "VBZ" || prev_tag == "VBP" || prev_tag == "VBD" || prev_tag == "VB")) {
            if (w == "been") return "VBN";
            return verbs().count(w) ? "VBN" : tag;
        }
        if ((w == "set" || w == "put" || w == "read") && (prev_tag == "MD" || prev_tag == "TO" || sentence_start)) {
            return "VB";
        }
        if ((w == "set" || w == "read") && nominal_context(prev_tag)) return "NN";
        return tag;
    }
    const bool subject_pronoun = prev_word == "this" || prev_word == "that" || prev_word == "which";
    const bool verbal_context = sentence_start || prev_tag == "MD" || prev_tag == "TO" || prev_tag == "PRP" ||
                                prev_tag == "RB" || prev_tag == "NNS" || prev_tag == "WDT" || prev_tag == "CC";

    if (noun_verbs().count(w)) {
        if (nominal_context(prev_tag) && !(subject_pronoun && prev_tag == "DT")) return "NN";
        if (verbal_context) return verb_form(prev_tag);
        return "NN";
    }
    if (verbs().count(w)) {
        if (nominal_context(prev_tag) && prev_tag != "IN" && !subject_pronoun) return "NN";
        return verb_form(prev_tag);
    }
    if (plain_nouns().count(w)) return "NN";
    if (auto stem = verb_stem_of_s_form(w)) {
        if (nominal_context(prev_tag) && !(subject_pronoun && prev_tag == "DT")) return "NNS";
        return "VBZ";
    }
    if (w.size() >= 5 && ends_with(w, "ing")) return "VBG";
    if (w.size() >= 4 && ends_with(w, "ed")) {
        return prev_tag == "VBZ" || prev_tag == "VBP" || prev_tag == "VBD" || prev_tag == "VB" ? "VBN" : "VBD";
    }
    if (w.size() >= 4 && ends_with(w, "ly")) return "RB";
    if (w.size() >= 5 && ends_with(w, "iest")) return "JJS";
    if (w.size() >= 6 && (ends_with(w, "ful") || ends_with(w, "ous") || ends_with(w, "ible") ||
                          ends_with(w, "able") || ends_with(w, "less"))) {
        return "JJ";
    }
    if (!sentence_start && std::isupper(static_cast<unsigned char>(word[0]))) return "NNP";
    if (w.size() >= 4 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
        return "NNS";
    }
    return "NN";
}

}  // namespace

std::vector<std::string> tagger_tokens(std::string_view sentence) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto is_edge_punct = [](char c) {
        return !std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '$' &&
               static_cast<unsigned char>(c) < 0x80;
    };
    while (i < sentence.size()) {
        while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
        auto start = i;
        while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
        std::string_view word = sentence.substr(start, i - start);
        while (!word.empty() && is_edge_punct(word.front())) word.remove_prefix(1);
        // keep a trailing ')' only when the word also opened one: getPath()
        while (!word.empty() && is_edge_punct(word.back()) &&
               !(word.back() == ')' && word.find('(') != std::string_view::npos)) {
            word.remove_suffix(1);
        }
        if (word.empty()) continue;
        auto apos = word.find('\'');
        if (apos != std::string_view::npos && apos > 0 && apos + 1 < word.size()) {
            auto head = word.substr(0, apos);
            auto tail = word.substr(apos);
            if (tail == "'t" && !head.empty() && (head.back() == 'n' || head.back() == 'N')) {
                auto stem = head.substr(0, head.size() - 1);
                if (!stem.empty()) out.emplace_back(stem);
                out.emplace_back("n't");
            } else {
                out.emplace_back(head);
                out.emplace_back(lower(tail));
            }
            continue;
        }
        out.emplace_back(word);
    }
    return out;
}

std::vector<TaggedToken> RuleTagger::tag(std::string_view sentence) const {
    std::vector<TaggedToken> out;
    std::string prev_tag;
    std::string prev_word;
    for (auto& tok : tagger_tokens(sentence)) {
        auto t = tag_word(tok, out.empty(), prev_tag, prev_word);
        prev_tag = t;
        prev_word = lower(tok);
        out.push_back({std::move(tok), std::move(t)});
    }
    return out;
}

std::vector<TaggedToken> pos_tag(std::string_view sentence) { return RuleTagger{}.tag(sentence); }

PatternMatch matches_patterns(std::span<const TaggedToken> tags) {
    PatternMatch m;
    bool any_verb = false;
    bool verb_seen = false;
    bool noun_after_verb = false;
    bool free_noun = false;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const auto& t = tags[i].tag;
        if (is_verb_tag(t)) {
            any_verb = true;
            verb_seen = true;
        } else if (t.rfind("NN", 0) == 0) {
            if (verb_seen) noun_after_verb = true;
            if (i == 0 || tags[i - 1].tag != "PRP") free_noun = true;
        }
    }
    m.p1 = any_verb && noun_after_verb;
    m.p2 = any_verb && free_noun;
    return m;
}

}  // namespace crokage
