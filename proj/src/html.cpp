#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "crokage/corpus.hpp"

namespace crokage {
namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t find_ci(std::string_view s, std::string_view needle, std::size_t from) {
    if (needle.size() > s.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (lower(s[i + j]) != needle[j]) {
                ok = false;
                break;
            }
        }
        if (ok) return i;
    }
    return std::string_view::npos;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0x10FFFF) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

struct Tag {
    std::string name;  // lowercase; "!" for comments and declarations
    bool closing = false;
    std::size_t end = 0;  // one past '>'
};

// Parses the tag starting at s[pos] == '<'. Returns nullopt when the '<' does
// not start markup, which is then kept as literal text.
std::optional<Tag> read_tag(std::string_view s, std::size_t pos) {
    if (pos + 1 >= s.size()) return std::nullopt;
    Tag tag;
    std::size_t i = pos + 1;
    if (s[i] == '!') {
        if (s.substr(i, 3) == "!--") {
            auto close = s.find("-->", i + 3);
            tag.name = "!";
            tag.end = close == std::string_view::npos ? s.size() : close + 3;
            return tag;
        }
        auto close = s.find('>', i);
        if (close == std::string_view::npos) return std::nullopt;
        tag.name = "!";
        tag.end = close + 1;
        return tag;
    }
    if (s[i] == '/') {
        tag.closing = true;
        ++i;
    }
    if (i >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i]))) return std::nullopt;
    while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) tag.name += lower(s[i++]);
    char quote = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.end = i + 1;
            return tag;
        } else if (c == '<') {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

bool is_block_tag(const std::string& name) {
    static constexpr std::array<std::string_view, 20> blocks = {
        "p", "div", "br", "li", "ul", "ol", "h1", "h2", "h3", "h4",
        "h5", "h6", "blockquote", "hr", "table", "tr", "td", "th", "dd", "dt"};
    return std::find(blocks.begin(), blocks.end(), name) != blocks.end();
}

// Drops every tag and decodes entities; text only.
std::string strip_markup(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<') {
            if (auto tag = read_tag(s, i)) {
                i = tag->end;
                continue;
            }
        }
        auto next = s.find('<', i + 1);
        if (next == std::string_view::npos) next = s.size();
        out.append(s.substr(i, next - i));
        i = next;
    }
    return decode_entities(out);
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
        } else {
            if (pending) out += ' ';
            pending = false;
            out += c;
        }
    }
    return out;
}

std::string trim_code(std::string s) {
    while (!s.empty() && is_space(s.back())) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == '\n' || s[start] == '\r')) ++start;
    return s.substr(start);
}

class BodySplitter {
public:
    SplitBody run(std::string_view html) {
        std::size_t i = 0;
        while (i < html.size()) {
            if (html[i] != '<') {
                auto next = html.find('<', i);
                if (next == std::string_view::npos) next = html.size();
                text_ += decode_entities(html.substr(i, next - i));
                i = next;
                continue;
            }
            auto tag = read_tag(html, i);
            if (!tag) {
                text_ += '<';
                ++i;
                continue;
            }
            if (!tag->closing && tag->name == "pre") {
                auto close = find_ci(html, "</pre", tag->end);
                auto inner = html.substr(tag->end, (close == std::string_view::npos ? html.size() : close) - tag->end);
                add_code(strip_markup(inner));
                i = close == std::string_view::npos ? html.size() : skip_tag(html, close);
                continue;
            }
            if (!tag->closing && tag->name == "code") {
                auto close = find_ci(html, "</code", tag->end);
                auto inner = html.substr(tag->end, (close == std::string_view::npos ? html.size() : close) - tag->end);
                auto content = strip_markup(inner);
                auto trimmed = trim_code(content);
                if (trimmed.find('\n') != std::string::npos) {
                    add_code(std::move(trimmed));
                } else {
                    text_ += content;
                }
                i = close == std::string_view::npos ? html.size() : skip_tag(html, close);
                continue;
            }
            if (is_block_tag(tag->name)) flush();
            i = tag->end;
        }
        flush();
        SplitBody out;
        out.paragraphs = std::move(paragraphs_);
        out.code_blocks = std::move(code_);
        for (const auto& p : out.paragraphs) {
            if (!out.prose.empty()) out.prose += ' ';
            out.prose += p;
        }
        return out;
    }

private:
    static std::size_t skip_tag(std::string_view html, std::size_t pos) {
        auto tag = read_tag(html, pos);
        return tag ? tag->end : pos + 1;
    }

    void add_code(std::string code) {
        flush();
        code = trim_code(std::move(code));
        if (!code.empty()) code_.push_back(std::move(code));
    }

    void flush() {
        auto p = collapse_whitespace(text_);
        if (!p.empty()) paragraphs_.push_back(std::move(p));
        text_.clear();
    }

    std::string text_;
    std::vector<std::string> paragraphs_;
    std::vector<std::string> code_;
};

}  // namespace

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out += text[i++];
            continue;
        }
        auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += text[i++];
            continue;
        }
        auto name = text.substr(i + 1, semi - i - 1);
        bool done = true;
        if (name == "amp") out += '&';
        else if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "quot") out += '"';
        else if (name == "apos") out += '\'';
        else if (name == "nbsp") out += ' ';
        else if (name.size() >= 2 && name[0] == '#') {
            std::uint32_t cp = 0;
            bool hex = name[1] == 'x' || name[1] == 'X';
            auto digits = name.substr(hex ? 2 : 1);
            done = !digits.empty();
            for (char c : digits) {
                int v = -1;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                if (v < 0 || cp > 0x10FFFF) {
                    done = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            }
            if (done) append_utf8(out, cp);
        } else {
            done = false;
        }
        if (done) {
            i = semi + 1;
        } else {
            out += text[i++];
        }
    }
    return out;
}

SplitBody split_text_code(std::string_view body_html) { return BodySplitter{}.run(body_html); }

}  // namespace crokage
