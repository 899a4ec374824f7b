#include <gtest/gtest.h>

#include <sys/wait.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "intimacy/cli.hpp"
#include "intimacy/corpus.hpp"
#include "synthetic.hpp"

namespace intimacy {
namespace {

using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::filesystem::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Writes a synthetic corpus and its mock translation table into `dir`.
void write_corpus(const TempDir& dir, const testing::SyntheticOptions& opts, std::uint64_t seed = 1) {
  const auto corpus = testing::make_synthetic_corpus(seed, opts);
  save_dataset(dir / "data.csv", corpus.data);
  std::string jsonl;
  for (std::size_t i = 0; i < corpus.keys.size(); ++i) {
    jsonl += nlohmann::json{{"lang", corpus.keys[i].language},
                            {"text", corpus.keys[i].text},
                            {"translation", corpus.translated_texts[i]}}
                 .dump() +
             "\n";
  }
  testing::write_text(dir / "mock.jsonl", jsonl);
}

TEST(Cli, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"split", "--ratio", "abc"}).code, 2);
  EXPECT_EQ(run({"split"}).code, 2);  // --data is required
}

TEST(Cli, StatsWritesTable) {
  TempDir dir("cli");
  save_dataset(dir / "data.csv", testing::counts_fixture(testing::training_language_counts()));
  const auto r = run({"stats", "--data", (dir / "data.csv").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "o" / "stats.csv"), 7u);
  EXPECT_TRUE(std::filesystem::exists(dir / "o" / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "o" / "run.conf"));
}

TEST(Cli, SplitIsDeterministic) {
  TempDir dir("cli");
  save_dataset(dir / "data.csv", testing::counts_fixture({{"es", 50}, {"en", 20}}));
  for (const char* out : {"a", "b"}) {
    const auto r = run({"split", "--data", (dir / "data.csv").string(), "--seed", "3", "--out",
                        (dir / out).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(dir / "a" / "train.csv"), slurp(dir / "b" / "train.csv"));
  EXPECT_EQ(slurp(dir / "a" / "validation.csv"), slurp(dir / "b" / "validation.csv"));
  EXPECT_EQ(line_count(dir / "a" / "train.csv"), 1u + 49u);
}

TEST(Cli, RuntimeErrorsExitOneWithCategory) {
  TempDir dir("cli");
  testing::write_text(dir / "bad.csv", "text,label,language\nx,9,en\n");
  const auto r = run({"stats", "--data", (dir / "bad.csv").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.err.starts_with("error[validation]")) << r.err;
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir dir("cli");
  save_dataset(dir / "data.csv", testing::counts_fixture({{"es", 30}}));
  testing::write_text(dir / "run.conf", "seed = 5\nratio = 0.5\n");
  auto r = run({"split", "--config", (dir / "run.conf").string(), "--data",
                (dir / "data.csv").string(), "--out", (dir / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest.at("settings").at("seed"), 5);
  EXPECT_EQ(line_count(dir / "a" / "train.csv"), 16u);

  r = run({"split", "--config", (dir / "run.conf").string(), "--seed", "6", "--data",
           (dir / "data.csv").string(), "--out", (dir / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  manifest = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  EXPECT_EQ(manifest.at("settings").at("seed"), 6);

  // The emitted run.conf replays the run.
  r = run({"split", "--config", (dir / "b" / "run.conf").string(), "--out", (dir / "c").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "b" / "train.csv"), slurp(dir / "c" / "train.csv"));
}

TEST(Cli, TranslateWritesCacheAndTable) {
  TempDir dir("cli");
  testing::SyntheticOptions opts;
  opts.records_per_language = 5;
  opts.include_english = true;
  write_corpus(dir, opts);
  const auto r = run({"translate", "--data", (dir / "data.csv").string(), "--backend",
                      "mock:" + (dir / "mock.jsonl").string(), "--cache",
                      (dir / "cache.jsonl").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "o" / "translations.jsonl"), 30u);
  EXPECT_EQ(line_count(dir / "cache.jsonl"), 25u);  // English is never cached

  // A second run with no backend is served entirely from the cache.
  const auto again = run({"translate", "--data", (dir / "data.csv").string(), "--cache",
                          (dir / "cache.jsonl").string(), "--out", (dir / "p").string()});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(slurp(dir / "o" / "translations.jsonl"), slurp(dir / "p" / "translations.jsonl"));

  const auto fails = run({"translate", "--data", (dir / "data.csv").string(), "--out",
                          (dir / "q").string()});
  EXPECT_EQ(fails.code, 1);
  EXPECT_TRUE(fails.err.starts_with("error[translation-unavailable]")) << fails.err;
}

TEST(Cli, ZeroShotWritesFullGrid) {
  TempDir dir("cli");
  testing::SyntheticOptions opts;
  opts.records_per_language = 24;
  opts.include_english = true;
  write_corpus(dir, opts);
  const auto r = run({"zeroshot", "--data", (dir / "data.csv").string(), "--backend",
                      "mock:" + (dir / "mock.jsonl").string(), "--epochs", "1", "--threads", "2",
                      "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "o" / "grid.csv"), 1u + 5u * 5u);
  const auto grid = nlohmann::json::parse(slurp(dir / "o" / "grid.json"));
  EXPECT_EQ(grid.at("excluded_languages"),
            (nlohmann::json{"es", "it", "pt", "fr", "zh"}));

  const auto en = run({"zeroshot", "--data", (dir / "data.csv").string(), "--backend",
                       "mock:" + (dir / "mock.jsonl").string(), "--exclude", "en", "--out",
                       (dir / "p").string()});
  EXPECT_EQ(en.code, 1);
  EXPECT_TRUE(en.err.starts_with("error[protocol]")) << en.err;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::SyntheticOptions opts;
    opts.languages = {"es", "it"};
    opts.records_per_language = 30;
    opts.include_english = true;
    write_corpus(dir_, opts, 2);
    // Test set: one seen-language record and one unseen one with a mock entry.
    testing::write_text(dir_ / "test.csv",
                        "id,text,label,language\n"
                        "s1,ciao ciao,2.0,it\n"
                        "u1,hallo daar,3.0,nl\n");
    std::ofstream mock(dir_ / "mock.jsonl", std::ios::app);
    mock << R"({"lang":"nl","text":"hallo daar","translation":"hello there"})" << '\n';
  }

  Result train_routed() {
    return run({"train", "--routed", "--data", (dir_ / "data.csv").string(), "--backend",
                "mock:" + (dir_ / "mock.jsonl").string(), "--ensemble-size", "2", "--epochs", "2",
                "--out", (dir_ / "train").string()});
  }

  std::vector<std::string> base_predict(const std::string& out) {
    return {"predict", "--data", (dir_ / "test.csv").string(), "--models",
            (dir_ / "train" / "models").string(), "--backend",
            "mock:" + (dir_ / "mock.jsonl").string(), "--out", (dir_ / out).string()};
  }

  TempDir dir_{"pipeline"};
};

TEST_F(PipelineTest, TrainPredictEvaluateReport) {
  auto r = train_routed();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "train" / "models" / "joint" / "member-1.model"));
  const auto listing = nlohmann::json::parse(slurp(dir_ / "train" / "models" / "original" / "ensemble.json"));
  EXPECT_EQ(listing.at("seeds"), (nlohmann::json{42, 43}));

  r = run(base_predict("pred"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto preds = slurp(dir_ / "pred" / "predictions.csv");
  EXPECT_NE(preds.find("s1,it,"), std::string::npos);
  EXPECT_NE(preds.find(",seen"), std::string::npos);
  EXPECT_NE(preds.find(",unseen"), std::string::npos);

  r = run({"evaluate", "--data", (dir_ / "test.csv").string(), "--predictions",
           (dir_ / "pred" / "predictions.csv").string(), "--out", (dir_ / "eval").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "eval" / "report.json"));
  EXPECT_EQ(report.at("per_language").at("nl").at("n"), 1);
  EXPECT_TRUE(report.at("per_language").at("nl").at("pearson_r").is_null());

  r = run({"report", "--data", (dir_ / "test.csv").string(), "--predictions",
           (dir_ / "pred" / "predictions.csv").string(), "--out", (dir_ / "dist").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir_ / "dist" / "scatter.csv"), 3u);
}

TEST_F(PipelineTest, UnroutableLanguageFailsPredict) {
  ASSERT_EQ(train_routed().code, 0);
  auto args = base_predict("pred");
  args.insert(args.end(), {"--unseen", "hi,ar,ko"});
  const auto r = run(args);
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.err.starts_with("error[routing]")) << r.err;
  EXPECT_NE(r.err.find("nl"), std::string::npos) << r.err;
}

TEST_F(PipelineTest, ExternalAdapterBackbone) {
  ASSERT_EQ(train_routed().code, 0);
  const auto adapter = dir_ / "adapter.sh";
  testing::write_text(adapter,
                      "#!/bin/sh\n"
                      "echo id,score > \"$2\"\n"
                      "cut -f1 \"$1\" | tail -n +2 | while read id; do echo \"$id,4\"; done >> \"$2\"\n");
  std::filesystem::permissions(adapter, std::filesystem::perms::owner_all);
  auto args = base_predict("ext");
  args.insert(args.end(), {"--backbone", "external:" + adapter.string()});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir_ / "ext" / "predictions.csv").find("s1,it,4,seen"), std::string::npos);

  auto train_args = std::vector<std::string>{"train", "--data", (dir_ / "data.csv").string(),
                                             "--backbone", "external:" + adapter.string()};
  EXPECT_EQ(run(train_args).code, 2);
}

TEST(CliBinary, ProcessExitCodes) {
  TempDir dir("bin");
  const std::string cli = INTIMACY_CLI_PATH;
  auto status = [](const std::string& cmd) { return WEXITSTATUS(std::system((cmd + " >/dev/null 2>&1").c_str())); };
  EXPECT_EQ(status(cli + " --help"), 0);
  EXPECT_EQ(status(cli), 2);
  EXPECT_EQ(status(cli + " stats --data " + (dir / "absent.csv").string()), 1);
}

}  // namespace
}  // namespace intimacy
