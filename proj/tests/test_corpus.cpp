#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "crokage/corpus.hpp"
#include "crokage/errors.hpp"
#include "synthetic.hpp"

using namespace crokage;
using crokage::testing::data_path;

namespace {

std::vector<RawPost> parse_xml(const std::string& xml, Diagnostics& diag) {
    std::istringstream in(xml);
    return parse_dump(in, DumpFormat::xml_rows, diag);
}

StopwordConfig words(std::initializer_list<const char*> list) {
    StopwordConfig cfg;
    for (const auto* w : list) cfg.stopwords.insert(w);
    return cfg;
}

}  // namespace

TEST(ParseDump, QuestionRow) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts><row PostTypeId="1" Id="7" Title="t" Body="b" /></posts>)", diag);
    ASSERT_EQ(posts.size(), 1u);
    EXPECT_EQ(posts[0].id, 7);
    EXPECT_EQ(posts[0].type, PostType::question);
    EXPECT_EQ(posts[0].title, "t");
    EXPECT_EQ(posts[0].body_html, "b");
}

TEST(ParseDump, AnswerRow) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts><row PostTypeId="2" Id="9" ParentId="7" Body="" /></posts>)", diag);
    ASSERT_EQ(posts.size(), 1u);
    EXPECT_EQ(posts[0].type, PostType::answer);
    EXPECT_EQ(posts[0].parent_id, 7);
}

TEST(ParseDump, UnknownPostTypeSkippedAndCounted) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts><row PostTypeId="5" Id="3" Body="x" /></posts>)", diag);
    EXPECT_TRUE(posts.empty());
    EXPECT_EQ(diag.count("skipped_post_type"), 1u);
}

TEST(ParseDump, MalformedRowSkipped) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts><row PostTypeId="1" Body="no id" /><row PostTypeId="1" Id="2" Title="ok" Body="" /></posts>)",
                           diag);
    ASSERT_EQ(posts.size(), 1u);
    EXPECT_EQ(posts[0].id, 2);
    EXPECT_EQ(diag.count("malformed_row"), 1u);
}

TEST(ParseDump, TagsParsedInBothForms) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts><row PostTypeId="1" Id="1" Title="a" Body="" Tags="&lt;java&gt;&lt;io&gt;" /><row PostTypeId="1" Id="2" Title="b" Body="" Tags="|Java|file-io|" /></posts>)",
                           diag);
    ASSERT_EQ(posts.size(), 2u);
    EXPECT_EQ(posts[0].tags, (std::vector<std::string>{"java", "io"}));
    EXPECT_EQ(posts[1].tags, (std::vector<std::string>{"java", "file-io"}));
}

TEST(ParseDump, TruncatedStreamReportsOffset) {
    Diagnostics diag;
    const std::string xml = R"(<posts><row PostTypeId="1" Id="1" Title="a" Body="b" /><row PostTypeId="1" Id="2" Ti)";
    try {
        parse_xml(xml, diag);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), xml.find("<row", 10));
        EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
    }
}

TEST(ParseDump, MissingClosingPostsIsTruncation) {
    Diagnostics diag;
    EXPECT_THROW(parse_xml(R"(<posts><row PostTypeId="1" Id="1" Title="a" Body="b" />)", diag), ParseError);
}

TEST(ParseDump, JsonlMatchesXml) {
    Diagnostics d1, d2;
    std::ifstream xml(data_path("posts.xml"));
    std::ifstream jsonl(data_path("posts.jsonl"));
    auto a = parse_dump(xml, DumpFormat::xml_rows, d1);
    auto b = parse_dump(jsonl, DumpFormat::jsonl, d2);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].id, b[i].id);
        EXPECT_EQ(a[i].body_html, b[i].body_html);
        EXPECT_EQ(a[i].title, b[i].title);
        EXPECT_EQ(a[i].tags, b[i].tags);
    }
    EXPECT_EQ(d1.counts, d2.counts);
}

TEST(ParseDump, JsonlBadLineCountedAndTruncatedLastLineThrows) {
    Diagnostics diag;
    std::istringstream ok("{\"id\":1,\"posttypeid\":1,\"title\":\"t\",\"body\":\"\"}\nnot json\n");
    auto posts = parse_dump(ok, DumpFormat::jsonl, diag);
    EXPECT_EQ(posts.size(), 1u);
    EXPECT_EQ(diag.count("malformed_row"), 1u);
    std::istringstream cut("{\"id\":1,\"posttypeid\":1,\"title\":\"t\",\"body\":\"\"}\n{\"id\":2,\"post");
    EXPECT_THROW(parse_dump(cut, DumpFormat::jsonl, diag), ParseError);
}

TEST(SplitTextCode, PreBlock) {
    auto s = split_text_code("hi <pre><code>int a;</code></pre> bye");
    EXPECT_EQ(s.prose, "hi bye");
    EXPECT_EQ(s.code_blocks, std::vector<std::string>{"int a;"});
}

TEST(SplitTextCode, NoCode) {
    auto s = split_text_code("no code here");
    EXPECT_EQ(s.prose, "no code here");
    EXPECT_TRUE(s.code_blocks.empty());
}

TEST(SplitTextCode, NestedCodeCountedOnce) {
    auto s = split_text_code("<pre><code><code>x();</code></code></pre>");
    EXPECT_EQ(s.code_blocks.size(), 1u);
}

TEST(SplitTextCode, InlineCodeStaysInProseUnlessMultiline) {
    auto s = split_text_code("<p>Call <code>foo()</code> now.</p><code>a();\nb();</code>");
    EXPECT_EQ(s.prose, "Call foo() now.");
    EXPECT_EQ(s.code_blocks, std::vector<std::string>{"a();\nb();"});
}

TEST(SplitTextCode, EntitiesDecodedOnce) {
    auto s = split_text_code("<p>a &amp;lt; b</p><pre>List&lt;String&gt; x;</pre>");
    EXPECT_EQ(s.prose, "a &lt; b");
    EXPECT_EQ(s.code_blocks, std::vector<std::string>{"List<String> x;"});
}

TEST(SplitTextCode, ParagraphsKept) {
    auto s = split_text_code("<p>One.</p><p>Two\n  three.</p>");
    EXPECT_EQ(s.paragraphs, (std::vector<std::string>{"One.", "Two three."}));
}

TEST(SplitTextCode, ToleratesUnbalancedMarkup) {
    auto s = split_text_code("<p>a < b <pre><code>x");
    EXPECT_EQ(s.code_blocks.size(), 1u);
    EXPECT_NE(s.prose.find("a < b"), std::string::npos);
}

TEST(DecodeEntities, NamedAndNumeric) {
    EXPECT_EQ(decode_entities("&lt;&gt;&amp;&quot;&apos;&#65;&#x42;"), "<>&\"'AB");
    EXPECT_EQ(decode_entities("&#233;"), "\xC3\xA9");
    EXPECT_EQ(decode_entities("&bogus; &"), "&bogus; &");
}

TEST(Preprocess, Examples) {
    EXPECT_EQ(preprocess("Convert a File to a URL!", words({"a", "to"})),
              (std::vector<std::string>{"convert", "file", "url"}));
    EXPECT_EQ(preprocess("run .exe from 123 file", words({"from"})),
              (std::vector<std::string>{"run", "exe", "file"}));
    EXPECT_TRUE(preprocess("", StopwordConfig::shipped()).empty());
}

TEST(Preprocess, NoStemmingNoCamelSplit) {
    EXPECT_EQ(preprocess("parsing toURI files", words({})),
              (std::vector<std::string>{"parsing", "touri", "files"}));
}

TEST(Preprocess, DropsShortTokensAndNumbers) {
    EXPECT_EQ(preprocess("a b 3.14 -2 x2 io", words({})), (std::vector<std::string>{"x2", "io"}));
}

TEST(Preprocess, IdempotentOnRandomText) {
    std::mt19937_64 rng(5);
    const std::string alphabet = "abcXYZ019 .,;:!?()-_'\"\t\n";
    const auto cfg = StopwordConfig::shipped();
    for (int iter = 0; iter < 500; ++iter) {
        std::string text;
        for (int i = 0; i < 60; ++i) text += alphabet[rng() % alphabet.size()];
        auto once = preprocess(text, cfg);
        std::string joined;
        for (const auto& t : once) joined += t + " ";
        EXPECT_EQ(preprocess(joined, cfg), once) << text;
        for (const auto& t : once) {
            EXPECT_GE(t.size(), 2u);
            EXPECT_FALSE(cfg.contains(t));
            EXPECT_FALSE(is_pure_number(t));
        }
    }
}

TEST(IsPureNumber, Forms) {
    EXPECT_TRUE(is_pure_number("42"));
    EXPECT_TRUE(is_pure_number("-3.5"));
    EXPECT_TRUE(is_pure_number("+7"));
    EXPECT_FALSE(is_pure_number("3."));
    EXPECT_FALSE(is_pure_number("x2"));
    EXPECT_FALSE(is_pure_number(""));
}

TEST(Stopwords, ShippedListMatchesDataFile) {
    auto file = StopwordConfig::load(std::filesystem::path(CROKAGE_REPO_DATA) / "stopwords.txt");
    auto shipped = StopwordConfig::shipped();
    EXPECT_EQ(file.stopwords, shipped.stopwords);
    EXPECT_TRUE(shipped.contains("code"));
    EXPECT_TRUE(shipped.contains("java"));
    EXPECT_TRUE(shipped.contains("the"));
    for (const auto& w : shipped.stopwords) {
        for (char c : w) EXPECT_FALSE(std::isupper(static_cast<unsigned char>(c)));
    }
}

TEST(BuildThreadDocs, OnlyAnswersWithCode) {
    Diagnostics diag;
    auto posts = parse_xml(R"(<posts>
      <row PostTypeId="1" Id="1" Title="Parse dates" Body="&lt;p&gt;q&lt;/p&gt;" />
      <row PostTypeId="2" Id="2" ParentId="1" Body="&lt;pre&gt;&lt;code&gt;x();&lt;/code&gt;&lt;/pre&gt;" />
      <row PostTypeId="2" Id="3" ParentId="1" Body="&lt;p&gt;words only&lt;/p&gt;" />
    </posts>)", diag);
    auto docs = build_thread_docs(posts, StopwordConfig::shipped(), diag);
    ASSERT_EQ(docs.size(), 1u);
    EXPECT_EQ(docs[0].answer_id, 2);
    EXPECT_EQ(docs[0].question_id, 1);
    EXPECT_EQ(docs[0].proc_title, (std::vector<std::string>{"parse", "dates"}));
    EXPECT_EQ(diag.count("answer_without_code"), 1u);
}

TEST(BuildThreadDocs, OrphanAnswerSkippedWithDiagnostic) {
    Diagnostics diag;
    auto posts = parse_xml(
        R"(<posts><row PostTypeId="2" Id="2" ParentId="40" Body="&lt;pre&gt;x();&lt;/pre&gt;" /></posts>)", diag);
    auto docs = build_thread_docs(posts, StopwordConfig::shipped(), diag);
    EXPECT_TRUE(docs.empty());
    EXPECT_EQ(diag.count("orphan_answer"), 1u);
}

TEST(BuildThreadDocs, SiblingsShareQuestionFields) {
    Diagnostics diag;
    std::string xml = R"(<posts><row PostTypeId="1" Id="1" Title="Sort maps" Body="&lt;p&gt;by value&lt;/p&gt;" />)";
    for (int id : {4, 2, 3}) {
        xml += R"(<row PostTypeId="2" Id=")" + std::to_string(id) +
               R"(" ParentId="1" Body="&lt;pre&gt;&lt;code&gt;sort();&lt;/code&gt;&lt;/pre&gt;" />)";
    }
    xml += "</posts>";
    auto docs = build_thread_docs(parse_xml(xml, diag), StopwordConfig::shipped(), diag);
    ASSERT_EQ(docs.size(), 3u);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        EXPECT_EQ(docs[i].answer_id, static_cast<AnswerId>(i + 2));
        EXPECT_EQ(docs[i].raw_title, "Sort maps");
        EXPECT_EQ(docs[i].proc_question_body, (std::vector<std::string>{"value"}));
    }
}

TEST(BuildThreadDocs, FixtureInvariants) {
    auto corpus = crokage::testing::fixture_corpus();
    EXPECT_EQ(corpus.size(), 13u);
    std::set<AnswerId> ids;
    for (const auto& d : corpus.docs()) {
        EXPECT_FALSE(d.code_blocks.empty());
        EXPECT_TRUE(ids.insert(d.answer_id).second);
    }
}

TEST(SplitTextCode, LosesNoAlphanumericToken) {
    auto corpus = crokage::testing::fixture_corpus();
    StopwordConfig none;
    none.min_token_len = 1;
    for (const auto& d : corpus.docs()) {
        auto split = split_text_code(d.raw_answer_body);
        std::string rebuilt = split.prose;
        for (const auto& c : split.code_blocks) rebuilt += " " + c;
        auto expected = preprocess(decode_entities(decode_entities(d.raw_answer_body)), none);
        auto got = preprocess(rebuilt, none);
        std::multiset<std::string> have(got.begin(), got.end());
        for (const auto& t : expected) {
            // tag names are markup, not content
            if (t == "p" || t == "pre" || t == "code") continue;
            EXPECT_TRUE(have.count(t)) << t << " missing from answer " << d.answer_id;
        }
    }
}

TEST(Corpus, SaveLoadRoundTrip) {
    crokage::testing::TempDir dir;
    auto corpus = crokage::testing::fixture_corpus();
    corpus.save(dir / "corpus.bin");
    auto loaded = Corpus::load(dir / "corpus.bin");
    EXPECT_EQ(loaded.content_hash(), corpus.content_hash());
    ASSERT_EQ(loaded.size(), corpus.size());
    EXPECT_EQ(loaded.docs()[3].proc_answer_body, corpus.docs()[3].proc_answer_body);
    EXPECT_EQ(loaded.stopwords().stopwords, corpus.stopwords().stopwords);
}

TEST(Corpus, CorruptArtifactRejected) {
    crokage::testing::TempDir dir;
    auto corpus = crokage::testing::fixture_corpus();
    corpus.save(dir / "corpus.bin");
    auto bytes = crokage::testing::read_file(dir / "corpus.bin");
    bytes[bytes.size() / 2] ^= 0x5a;
    std::ofstream(dir / "bad.bin", std::ios::binary) << bytes;
    EXPECT_THROW(Corpus::load(dir / "bad.bin"), ArtifactError);
    EXPECT_THROW(Corpus::load(dir / "absent.bin"), ArtifactError);
    bytes = crokage::testing::read_file(dir / "corpus.bin");
    bytes[4] = 9;  // version
    std::ofstream(dir / "v9.bin", std::ios::binary) << bytes;
    EXPECT_THROW(Corpus::load(dir / "v9.bin"), ArtifactError);
    bytes = crokage::testing::read_file(dir / "corpus.bin");
    bytes[23] = 0x7f;  // top byte of the payload size
    std::ofstream(dir / "huge.bin", std::ios::binary) << bytes;
    EXPECT_THROW(Corpus::load(dir / "huge.bin"), ArtifactError);
    bytes = crokage::testing::read_file(dir / "corpus.bin");
    std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 10);
    EXPECT_THROW(Corpus::load(dir / "short.bin"), ArtifactError);
}

TEST(Corpus, FindAndDuplicateIds) {
    auto corpus = crokage::testing::fixture_corpus();
    ASSERT_NE(corpus.find(2), nullptr);
    EXPECT_EQ(corpus.find(2)->question_id, 1);
    EXPECT_EQ(corpus.find(1), nullptr);
    std::vector<ThreadDoc> dup(2);
    dup[0].answer_id = dup[1].answer_id = 5;
    EXPECT_THROW(Corpus{dup}, ValidationError);
}
