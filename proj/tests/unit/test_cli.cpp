// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/features.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::data_path;
using stylodet::test::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stylodet");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture_root() { return data_path("fixtures/corpus").string(); }

std::size_t csv_rows(const std::filesystem::path& csv) {
  const std::string text = read_text_file(csv);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

}  // namespace

TEST(CliIngest, ThreeFilesThenIdempotentRerun) {
  TempDir dir;
  for (const char* p : {"human/alice/A.java", "human/bob/B.java", "llm/gpt4/C.java"}) {
    write_text_file_atomic(dir / ("corpus/" + std::string(p)), "class X {}\n");
  }
  const auto first = run({"ingest", (dir / "corpus").string(), "-o", (dir / "m.json").string()});
  ASSERT_EQ(first.code, 0) << first.err;
  const std::string bytes = read_text_file(dir / "m.json");
  EXPECT_EQ(CorpusManifest::load(dir / "m.json").entries.size(), 3u);
  EXPECT_EQ(run({"ingest", (dir / "corpus").string(), "-o", (dir / "m.json").string()}).code, 0);
  EXPECT_EQ(read_text_file(dir / "m.json"), bytes);
}

TEST(CliIngest, MissingRootIsInputError) {
  const auto r = run({"ingest", "/nonexistent/stylodet/root"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("does not exist"), std::string::npos);
}

TEST(CliBuild, RowAndColumnCounts) {
  TempDir dir;
  ASSERT_EQ(run({"ingest", fixture_root(), "-o", (dir / "m.json").string()}).code, 0);
  const auto nb = run({"build", "--manifest", (dir / "m.json").string(), "--family", "NB-F", "--group-size", "10",
                       "-o", (dir / "nb").string()});
  ASSERT_EQ(nb.code, 0) << nb.err;
  std::size_t groups = 0;
  const auto manifest = CorpusManifest::load(dir / "m.json");
  for (const auto& e : manifest.entries) {
    groups += split_into_groups(read_text_file(data_path("fixtures/corpus") / e.path), 10).size();
  }
  EXPECT_EQ(csv_rows(dir / "nb/matrix.csv"), groups);

  const auto ewd = run({"build", "--manifest", (dir / "m.json").string(), "--family", "EWD-NB-F", "--group-size",
                        "10", "--bin-width", "3000", "-o", (dir / "ewd").string()});
  ASSERT_EQ(ewd.code, 0) << ewd.err;
  const auto map = FeatureIndexMap::from_json(nlohmann::json::parse(read_text_file(dir / "ewd/index_map.json")));
  const auto m = load_matrix(dir / "ewd/matrix.csv", dir / "ewd/matrix.json");
  EXPECT_EQ(m.column_count, 10 + (map.vocabulary_size() + 2999) / 3000);
}

TEST(CliBuild, EmptyManifestIsInputError) {
  TempDir dir;
  CorpusManifest empty;
  empty.root = dir.path().string();
  empty.save(dir / "m.json");
  EXPECT_EQ(run({"build", "--manifest", (dir / "m.json").string(), "-o", (dir / "out").string()}).code, 2);
}

TEST(CliBuild, ConfigFileSuppliesDefaults) {
  TempDir dir;
  ASSERT_EQ(run({"ingest", fixture_root(), "-o", (dir / "m.json").string()}).code, 0);
  write_text_file_atomic(dir / "cfg.json", R"({"family": "CNB-F", "group_size": 20})");
  ASSERT_EQ(run({"--config", (dir / "cfg.json").string(), "build", "--manifest", (dir / "m.json").string(), "-o",
                 (dir / "out").string()})
                .code,
            0);
  const auto side = nlohmann::json::parse(read_text_file(dir / "out/matrix.json"));
  EXPECT_EQ(side["provenance"]["feature_config"]["family"], "CNB-F");
  EXPECT_EQ(side["provenance"]["feature_config"]["group_size"], 20);
}

TEST(CliEndToEnd, TrainEvalDetectReport) {
  TempDir dir;
  ASSERT_EQ(run({"synth", (dir / "corpus").string(), "--files", "40"}).code, 0);
  ASSERT_EQ(run({"ingest", (dir / "corpus").string(), "-o", (dir / "m.json").string()}).code, 0);
  ASSERT_EQ(run({"build", "--manifest", (dir / "m.json").string(), "--bin-width", "auto", "-o",
                 (dir / "data").string()})
                .code,
            0);
  const auto trained =
      run({"train", "--data", (dir / "data").string(), "--model", "gbt", "-o", (dir / "b.json").string()});
  ASSERT_EQ(trained.code, 0) << trained.err;
  const auto evaluated = run({"eval", "--data", (dir / "data").string(), "--bundle", (dir / "b.json").string(), "-o",
                              (dir / "report").string()});
  ASSERT_EQ(evaluated.code, 0) << evaluated.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "report/runs.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report/report.json"));

  const auto human = (dir / "corpus/human/author1/Task1.java").string();
  ASSERT_TRUE(std::filesystem::exists(human));
  const auto detected = run({"detect", "--bundle", (dir / "b.json").string(), human});
  ASSERT_EQ(detected.code, 0) << detected.err;
  std::istringstream lines(detected.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "path,start_line,end_line,score,class");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const auto score = std::stod(line.substr(line.rfind(',', line.size() - 3) + 1));
    EXPECT_LT(score, 0.5) << line;
  }
  EXPECT_GT(rows, 0u);

  write_text_file_atomic(dir / "Empty.java", "");
  const auto empty = run({"detect", "--bundle", (dir / "b.json").string(), (dir / "Empty.java").string()});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "path,start_line,end_line,score,class\n");

  const auto report = run({"report", (dir / "report/runs.csv").string(), "--format", "csv"});
  EXPECT_EQ(report.code, 0);
  EXPECT_NE(report.out.find("accuracy"), std::string::npos);
}

TEST(CliDetect, MismatchedBundleExitsThree) {
  TempDir dir;
  ASSERT_EQ(run({"synth", (dir / "corpus").string(), "--files", "20"}).code, 0);
  ASSERT_EQ(run({"ingest", (dir / "corpus").string(), "-o", (dir / "m.json").string()}).code, 0);
  ASSERT_EQ(run({"build", "--manifest", (dir / "m.json").string(), "-o", (dir / "data").string()}).code, 0);
  ASSERT_EQ(run({"train", "--data", (dir / "data").string(), "-o", (dir / "b.json").string()}).code, 0);
  auto doc = nlohmann::json::parse(read_text_file(dir / "b.json"));
  doc["manifest"]["grammar_id"] = "some-other-grammar";
  write_text_file_atomic(dir / "bad.json", doc.dump());
  const auto r = run({"detect", "--bundle", (dir / "bad.json").string(), (dir / "corpus/llm/synth-llm/Task2.java").string()});
  EXPECT_EQ(r.code, 3);
}

TEST(CliParse, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"build"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
