#include "crokage/code_elements.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace crokage {
namespace {

struct Token {
    enum Kind { ident, punct, other } kind;
    std::string_view text;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// Identifiers and single-character punctuation; literals and comments dropped.
std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            auto nl = s.find('\n', i);
            i = nl == std::string_view::npos ? s.size() : nl + 1;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            auto end = s.find("*/", i + 2);
            i = end == std::string_view::npos ? s.size() : end + 2;
        } else if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < s.size() && s[j] != c && s[j] != '\n') j += s[j] == '\\' ? 2 : 1;
            out.push_back({Token::other, s.substr(i, std::min(j + 1, s.size()) - i)});
            i = j + 1;
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            out.push_back({Token::ident, s.substr(i, j - i)});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && (ident_char(s[j]) || s[j] == '.')) ++j;
            out.push_back({Token::other, s.substr(i, j - i)});
            i = j;
        } else {
            out.push_back({Token::punct, s.substr(i, 1)});
            ++i;
        }
    }
    return out;
}

const std::unordered_set<std::string_view>& keywords() {
    static const std::unordered_set<std::string_view> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
        "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
        "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
        "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
        "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
        "volatile", "while", "var", "true", "false", "null", "yield", "record", "sizeof", "typeof"};
    return kw;
}

bool is_class_name(std::string_view t) {
    if (t.size() < 2 || !std::isupper(static_cast<unsigned char>(t[0]))) return false;
    return std::all_of(t.begin(), t.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

bool is_punct(const std::vector<Token>& toks, std::size_t i, char c) {
    return i < toks.size() && toks[i].kind == Token::punct && toks[i].text[0] == c;
}

bool is_ident(const std::vector<Token>& toks, std::size_t i) { return i < toks.size() && toks[i].kind == Token::ident; }

bool is_word(const std::vector<Token>& toks, std::size_t i, std::string_view w) {
    return is_ident(toks, i) && toks[i].text == w;
}

}  // namespace

std::vector<std::string> extract_api_classes(std::string_view code) {
    auto toks = lex(code);
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    int generic_depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (is_punct(toks, i, '<') && i > 0 && is_ident(toks, i - 1)) ++generic_depth;
        if (is_punct(toks, i, '>') && generic_depth > 0) --generic_depth;
        if (is_punct(toks, i, ';') || is_punct(toks, i, '{') || is_punct(toks, i, ')')) generic_depth = 0;
        if (toks[i].kind != Token::ident || !is_class_name(toks[i].text)) continue;
        if (i > 0 && is_punct(toks, i - 1, '@')) continue;  // annotation

        bool prev_ident = i > 0 && is_ident(toks, i - 1);
        bool after_new = i > 0 && is_word(toks, i - 1, "new");
        bool before_dot = is_punct(toks, i + 1, '.');
        bool before_decl = is_ident(toks, i + 1) && !keywords().count(toks[i + 1].text);
        bool array_decl = is_punct(toks, i + 1, '[') && is_punct(toks, i + 2, ']');
        bool inheritance = i > 0 && (is_word(toks, i - 1, "extends") || is_word(toks, i - 1, "implements"));
        bool in_generic = generic_depth > 0 || is_punct(toks, i + 1, '<');
        bool prefixed_decl = prev_ident && !after_new && !inheritance && !keywords().count(toks[i - 1].text);
        if (prefixed_decl && !before_dot && !in_generic) continue;  // e.g. "The Foo" in prose-like text
        if (after_new || before_dot || before_decl || array_decl || inheritance || in_generic) {
            if (seen.insert(toks[i].text).second) out.emplace_back(toks[i].text);
        }
    }
    return out;
}

std::vector<std::string> extract_methods(std::string_view code) {
    auto toks = lex(code);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != Token::ident || !is_punct(toks, i + 1, '(')) continue;
        auto name = toks[i].text;
        if (!std::islower(static_cast<unsigned char>(name[0])) || keywords().count(name)) continue;
        if (i > 0 && is_word(toks, i - 1, "new")) continue;
        out.emplace_back(name);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace crokage
