#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "crokage/engine.hpp"
#include "synthetic.hpp"

using crokage::testing::data_path;
using crokage::testing::read_file;

namespace {

int run(const std::string& args, const std::filesystem::path& out) {
    std::string cmd = std::string(CROKAGE_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        ASSERT_EQ(run("ingest --input " + data_path("posts.xml").string() + " --out " + (dir / "corpus.bin").string(), log()), 0);
        ASSERT_EQ(run("build --corpus " + (dir / "corpus.bin").string() + " --out " + (dir / "indices.bin").string() +
                          " --min-class-freq 1",
                      log()),
                  0);
        std::filesystem::copy_file(data_path("vectors.txt"), dir / "vectors.txt");
    }

    std::filesystem::path log() const { return dir / "log.txt"; }
    std::string artifacts() const {
        return "--corpus " + (dir / "corpus.bin").string() + " --indices " + (dir / "indices.bin").string() + " --vectors " +
               (dir / "vectors.txt").string();
    }

    crokage::testing::TempDir dir;
};

TEST_F(CliTest, JsonlIngestMatchesXml) {
    ASSERT_EQ(run("ingest --format jsonl --input " + data_path("posts.jsonl").string() + " --out " +
                      (dir / "corpus2.bin").string(),
                  log()),
              0);
    EXPECT_EQ(read_file(dir / "corpus.bin"), read_file(dir / "corpus2.bin"));
}

TEST_F(CliTest, SearchJsonMatchesLibrary) {
    ASSERT_EQ(run("search " + artifacts() + " --json --top 4 --query 'convert file path to url'", dir / "a.json"), 0);
    ASSERT_EQ(run("search " + artifacts() + " --json --top 4 --query 'convert file path to url'", dir / "b.json"), 0);
    EXPECT_EQ(read_file(dir / "a.json"), read_file(dir / "b.json"));

    crokage::EngineOptions opt;
    opt.pipeline.api_enabled = true;
    auto h = crokage::load_engine(crokage::EnginePaths::from_home(dir.path()), opt);
    auto resp = crokage::handle_query(*h, {.query = "convert file path to url", .top_k = 4});
    EXPECT_EQ(nlohmann::json::parse(read_file(dir / "a.json")), nlohmann::json::parse(resp.results_json().dump()));
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("search " + artifacts() + " --query 'sort a list'", log()), 0);
    EXPECT_EQ(run("search " + artifacts() + " --query 'sort a list' --top 0", log()), 2);
    EXPECT_EQ(run("search " + artifacts() + " --query 'the of'", log()), 2);
    EXPECT_EQ(run("search --bogus", log()), 2);
    EXPECT_EQ(run("search " + artifacts() + " --query q --weights 1,2", log()), 2);
    EXPECT_EQ(run("search --corpus " + (dir / "missing.bin").string() + " --query 'sort list'", log()), 3);
    // a missing dump is bad input rather than a missing build artifact
    EXPECT_EQ(run("ingest --input " + (dir / "missing.xml").string() + " --out " + (dir / "x.bin").string(), log()), 2);
    EXPECT_EQ(run("build --corpus " + (dir / "missing.bin").string() + " --out " + (dir / "x.bin").string(), log()), 3);
    EXPECT_EQ(run("evaluate " + artifacts() + " --gold " + data_path("gold.jsonl").string() + " --baseline nope", log()), 2);
}

TEST_F(CliTest, EvaluateAndCalibrate) {
    auto gold = data_path("gold.jsonl").string();
    ASSERT_EQ(run("evaluate " + artifacts() + " --gold " + gold + " --report " + (dir / "r1.json").string(), log()), 0);
    ASSERT_EQ(run("evaluate " + artifacts() + " --gold " + gold + " --report " + (dir / "r2.json").string(), log()), 0);
    EXPECT_EQ(read_file(dir / "r1.json"), read_file(dir / "r2.json"));
    auto report = nlohmann::json::parse(read_file(dir / "r1.json"));
    EXPECT_EQ(report["per_query"].size(), 7u);
    EXPECT_EQ(report["baseline"], "fused");

    ASSERT_EQ(run("calibrate " + artifacts() + " --gold " + gold + " --seed 3 --out " + (dir / "w.json").string(), log()), 0);
    auto w = nlohmann::json::parse(read_file(dir / "w.json"));
    EXPECT_EQ(w["evaluated"], 625);
    EXPECT_EQ(w["train"]["queries"].get<int>() + w["test"]["queries"].get<int>(), 7);
    EXPECT_EQ(run("search " + artifacts() + " --query 'sort a list' --weights-file " + (dir / "w.json").string(), log()), 0);
}
