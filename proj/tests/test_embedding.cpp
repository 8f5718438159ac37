#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "crokage/embedding.hpp"
#include "crokage/errors.hpp"
#include "synthetic.hpp"

using namespace crokage;

namespace {

EmbeddingStore parse(const std::string& text, Diagnostics* diag = nullptr) {
    std::istringstream in(text);
    return EmbeddingStore::load(in, diag);
}

// idf(w) for a chosen df in a 1000-doc collection: log10(1000 / df).
IdfMap idf_with(std::initializer_list<std::pair<const char*, int>> dfs) {
    std::vector<std::vector<std::string>> docs(1000);
    for (auto [w, df] : dfs) {
        for (int i = 0; i < df; ++i) docs[i].push_back(w);
    }
    return IdfMap::build(docs);
}

std::vector<std::string> ws(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

}  // namespace

TEST(LoadVectors, HeaderAndRows) {
    auto s = parse("2 3\nfoo 1 0 0\nbar 0 1 0\n");
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.dim(), 3u);
    ASSERT_TRUE(s.row("bar"));
    EXPECT_FLOAT_EQ(s.vector(*s.row("bar"))[1], 1.0f);
}

TEST(LoadVectors, HeaderIsOptional) {
    auto s = parse("foo 1 2\nbar 3 4\n");
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.dim(), 2u);
}

TEST(LoadVectors, DimensionMismatchNamesLine) {
    try {
        parse("2 3\nfoo 1 0 0\nbar 0 1\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(LoadVectors, CountMismatchRejected) { EXPECT_THROW(parse("3 2\nfoo 1 0\nbar 0 1\n"), ValidationError); }

TEST(LoadVectors, DuplicateLastWins) {
    Diagnostics diag;
    auto s = parse("foo 1 0\nfoo 0 1\n", &diag);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_FLOAT_EQ(s.vector(*s.row("foo"))[1], 1.0f);
    EXPECT_EQ(diag.count("duplicate_vector"), 1u);
}

TEST(LoadVectors, FixtureFile) {
    auto s = EmbeddingStore::load(crokage::testing::data_path("vectors.txt"));
    EXPECT_EQ(s.size(), 50u);
    EXPECT_EQ(s.dim(), 16u);
}

TEST(Cosine, Identities) {
    std::vector<float> u{1, 2, 3}, neg{-1, -2, -3}, x{1, 0, 0}, y{0, 1, 0}, zero{0, 0, 0};
    EXPECT_DOUBLE_EQ(cosine(u, u), 1.0);
    EXPECT_DOUBLE_EQ(cosine(x, y), 0.0);
    EXPECT_DOUBLE_EQ(cosine(u, neg), -1.0);
    EXPECT_DOUBLE_EQ(cosine(u, zero), 0.0);
}

TEST(Subwords, NgramsOfPaddedWord) {
    auto g = char_ngrams("ab");
    EXPECT_EQ(g, (std::vector<std::string>{"<a", "ab", "b>", "<ab", "ab>", "<ab>"}));
}

TEST(Subwords, OovIsMeanOfNgrams) {
    EmbeddingStore words = parse("known 1 1\n");
    EmbeddingStore grams;
    grams.add("<a", std::vector<float>{2, 0});
    grams.add("b>", std::vector<float>{0, 4});
    words.attach_subwords(std::move(grams));
    auto v = words.lookup("ab");
    ASSERT_TRUE(v);
    EXPECT_FLOAT_EQ((*v)[0], 1.0f);
    EXPECT_FLOAT_EQ((*v)[1], 2.0f);
    EXPECT_FALSE(words.lookup("zz"));
    EXPECT_FALSE(parse("known 1 1\n").lookup("ab"));
}

TEST(Asym, IdenticalSingleton) {
    auto s = parse("w 0.3 0.4\n");
    auto idf = idf_with({{"w", 10}});
    EXPECT_DOUBLE_EQ(asym_relevance(BagOfWords(ws({"w"})), BagOfWords(ws({"w"})), s, idf), 1.0);
}

TEST(Asym, SingleTermAlgebra) {
    // cos = 0.5, idf(w1) = log10(1000/10) = 2
    auto s = parse("w1 1 0\nw2 0.5 0.8660254037844386\n");
    auto idf = idf_with({{"w1", 10}, {"w2", 10}});
    EXPECT_NEAR(asym_relevance(BagOfWords(ws({"w1"})), BagOfWords(ws({"w2"})), s, idf), 0.5, 1e-7);
}

TEST(Asym, WeightedOracle) {
    // cos(a,q) = 0.2, cos(b,q) = 0.8, idf(a) = 1, idf(b) = 3
    const double sa = std::sqrt(1 - 0.2 * 0.2), sb = std::sqrt(1 - 0.8 * 0.8);
    std::ostringstream v;
    v.precision(17);
    v << "q 1 0\na 0.2 " << sa << "\nb 0.8 " << sb << "\n";
    auto s = parse(v.str());
    auto idf = idf_with({{"a", 100}, {"b", 1}, {"q", 100}});
    EXPECT_NEAR(asym_relevance(BagOfWords(ws({"a", "b"})), BagOfWords(ws({"q"})), s, idf), 0.6500000000000001, 1e-6);
}

TEST(Asym, UnembeddableSideGivesZeroWithDiagnostic) {
    auto s = parse("w 1 0\n");
    auto idf = idf_with({{"w", 1}});
    Diagnostics diag;
    EXPECT_EQ(asym_relevance(BagOfWords(ws({"oov"})), BagOfWords(ws({"w"})), s, idf, &diag), 0.0);
    EXPECT_EQ(diag.count("empty_bag"), 1u);
}

TEST(Asym, DuplicatesDoNotMatter) {
    auto s = EmbeddingStore::load(crokage::testing::data_path("vectors.txt"));
    auto idf = idf_with({{"file", 5}, {"path", 50}, {"sort", 500}});
    auto a = asym_relevance(BagOfWords(ws({"file", "path", "file"})), BagOfWords(ws({"sort", "sort"})), s, idf);
    auto b = asym_relevance(BagOfWords(ws({"path", "file"})), BagOfWords(ws({"sort"})), s, idf);
    EXPECT_EQ(a, b);
}

TEST(SemScore, HarmonicMean) {
    EXPECT_DOUBLE_EQ(harmonic_mean(0.5, 0.5), 0.5);
    EXPECT_NEAR(harmonic_mean(0.4, 0.6), 0.48, 1e-15);
    EXPECT_EQ(harmonic_mean(0.0, 0.0), 0.0);
}

TEST(SemScore, PropertiesOnFixtureVectors) {
    auto s = EmbeddingStore::load(crokage::testing::data_path("vectors.txt"));
    std::vector<std::string> vocab;
    {
        std::istringstream in(crokage::testing::read_file(crokage::testing::data_path("vectors.txt")));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) vocab.push_back(line.substr(0, line.find(' ')));
    }
    std::mt19937_64 rng(99);
    std::vector<std::vector<std::string>> docs(40);
    for (auto& d : docs) {
        for (int i = 0; i < 8; ++i) d.push_back(vocab[rng() % vocab.size()]);
    }
    docs.emplace_back();  // no word reaches df = N
    auto idf = IdfMap::build(docs);
    auto bag = [&](std::size_t n) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[rng() % vocab.size()]);
        return BagOfWords(out);
    };
    for (int iter = 0; iter < 300; ++iter) {
        auto a = bag(1 + rng() % 6);
        auto q = bag(1 + rng() % 6);
        const double aq = asym_relevance(a, q, s, idf);
        const double qa = asym_relevance(q, a, s, idf);
        const double sem = sem_score(a, q, s, idf);
        EXPECT_LE(sem, 1.0);
        if (aq >= 0 && qa >= 0) EXPECT_LE(sem, std::max(aq, qa) + 1e-15);
        // adding a word of A to Q never lowers asym(A -> Q)
        auto extended = q.words();
        extended.push_back(a.words().front());
        EXPECT_GE(asym_relevance(a, BagOfWords(extended), s, idf), aq);
    }
}

TEST(SemScore, ResolvedBagMatchesPlainForm) {
    auto s = EmbeddingStore::load(crokage::testing::data_path("vectors.txt"));
    auto idf = idf_with({{"file", 5}, {"date", 50}, {"sort", 500}, {"list", 3}});
    BagOfWords a(ws({"file", "date", "unknownword"}));
    BagOfWords q(ws({"sort", "list"}));
    ResolvedBag ra(a, s, idf), rq(q, s, idf);
    EXPECT_EQ(ra.entries().size(), 2u);
    EXPECT_EQ(sem_score(ra, rq), sem_score(a, q, s, idf));
}
