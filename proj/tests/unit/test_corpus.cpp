// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "stylodet/corpus.hpp"
#include "stylodet/error.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::TempDir;

namespace {

std::string numbered_lines(std::size_t n) {
  std::string text;
  for (std::size_t i = 1; i <= n; ++i) text += "line " + std::to_string(i) + "\n";
  return text;
}

void touch(const std::filesystem::path& file, const std::string& text = "class A {}\n") {
  std::filesystem::create_directories(file.parent_path());
  write_text_file_atomic(file, text);
}

}  // namespace

TEST(SplitIntoGroups, TwentyFiveLinesBySize10) {
  const auto groups = split_into_groups(numbered_lines(25), 10);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].lines, (LineRange{1, 10}));
  EXPECT_EQ(groups[1].lines, (LineRange{11, 20}));
  EXPECT_EQ(groups[2].lines, (LineRange{21, 25}));
  EXPECT_FALSE(groups[1].remainder);
  EXPECT_TRUE(groups[2].remainder);
}

TEST(SplitIntoGroups, ExactFit) {
  const auto groups = split_into_groups(numbered_lines(10), 10);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].lines, (LineRange{1, 10}));
  EXPECT_FALSE(groups[0].remainder);
}

TEST(SplitIntoGroups, SeventyLinesCoverageMatchesAcrossSizes) {
  const std::string text = numbered_lines(70);
  const auto big = split_into_groups(text, 70);
  const auto small = split_into_groups(text, 10);
  ASSERT_EQ(big.size(), 1u);
  ASSERT_EQ(small.size(), 7u);
  EXPECT_EQ(big[0].lines, (LineRange{1, 70}));
  EXPECT_EQ(small.front().lines.first, 1u);
  EXPECT_EQ(small.back().lines.last, 70u);
}

TEST(SplitIntoGroups, EmptyTextYieldsNoGroups) {
  EXPECT_TRUE(split_into_groups("", 10).empty());
}

TEST(SplitIntoGroups, ZeroGroupSizeRejected) {
  EXPECT_THROW(split_into_groups("a\n", 0), InputError);
}

TEST(SplitIntoGroups, LastLineWithoutNewline) {
  const auto groups = split_into_groups("a\nb\nc", 2);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].text, "a\nb\n");
  EXPECT_EQ(groups[1].text, "c");
  EXPECT_EQ(groups[1].lines, (LineRange{3, 3}));
}

TEST(SplitIntoGroups, PropertyPartitionAndCharConservation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const std::size_t lines = rng() % 120;
    for (std::size_t i = 0; i < lines; ++i) {
      text += std::string(rng() % 12, 'x');
      if (i + 1 < lines || rng() % 2) text += (rng() % 5 == 0) ? "\r\n" : "\n";
    }
    const std::size_t group_size = 1 + rng() % 70;
    const auto groups = split_into_groups(text, group_size);
    std::size_t next = 1, chars = 0;
    for (const auto& g : groups) {
      ASSERT_EQ(g.lines.first, next);
      ASSERT_LE(g.lines.first, g.lines.last);
      ASSERT_EQ(g.char_count, g.text.size());
      ASSERT_GT(g.char_count, 0u);
      next = g.lines.last + 1;
      chars += g.char_count;
    }
    EXPECT_EQ(next - 1, count_physical_lines(text));
    EXPECT_EQ(chars, text.size());
    std::string joined;
    for (const auto& g : groups) joined += g.text;
    EXPECT_EQ(joined, text);
  }
}

TEST(CountPhysicalLines, Conventions) {
  EXPECT_EQ(count_physical_lines(""), 0u);
  EXPECT_EQ(count_physical_lines("a"), 1u);
  EXPECT_EQ(count_physical_lines("a\n"), 1u);
  EXPECT_EQ(count_physical_lines("a\nb"), 2u);
  EXPECT_EQ(count_physical_lines("\n\n"), 2u);
}

TEST(LabelRules, DefaultsLabelHumanAndLlm) {
  const auto rules = LabelRules::defaults();
  const auto alice = rules.label("human/alice/A.java");
  ASSERT_TRUE(alice);
  EXPECT_EQ(alice->origin, Origin::human);
  EXPECT_EQ(alice->author, "alice");
  EXPECT_FALSE(alice->llm_model);

  const auto gpt = rules.label("llm/gpt4/formatted/B.java");
  ASSERT_TRUE(gpt);
  EXPECT_EQ(gpt->origin, Origin::llm);
  EXPECT_EQ(gpt->llm_model, "gpt4");
  EXPECT_TRUE(gpt->formatted);

  EXPECT_FALSE(rules.label("other/C.java"));
}

TEST(LabelRules, FromJson) {
  const auto rules = LabelRules::from_json(nlohmann::json::parse(R"({"rules": [
      {"prefix": "orig/", "origin": "human", "author": "{1}"},
      {"prefix": "bing/", "origin": "llm", "author": "bing", "llm_model": "bing-chat", "formatted": false}]})"));
  const auto a = rules.label("orig/a17/Main.java");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->author, "a17");
  const auto b = rules.label("bing/Main.java");
  ASSERT_TRUE(b);
  EXPECT_EQ(b->llm_model, "bing-chat");
  EXPECT_FALSE(b->formatted);
}

TEST(PositiveClassRule, OriginAndAuthors) {
  FileEntry human{"h.java", "alice", Origin::human, std::nullopt, false, 1};
  FileEntry llm{"l.java", "gpt", Origin::llm, "gpt4", false, 1};
  EXPECT_FALSE(PositiveClassRule::origin().is_positive(human));
  EXPECT_TRUE(PositiveClassRule::origin().is_positive(llm));
  const auto rule = PositiveClassRule::parse("authors:alice,carol");
  EXPECT_TRUE(rule.is_positive(human));
  EXPECT_FALSE(rule.is_positive(llm));
  EXPECT_EQ(PositiveClassRule::parse(rule.to_string()).to_string(), rule.to_string());
  EXPECT_THROW(PositiveClassRule::parse("bogus"), InputError);
}

TEST(IngestCorpus, ThreeFilesTwoOrigins) {
  TempDir dir;
  touch(dir / "human/alice/A.java");
  touch(dir / "human/alice/B.java");
  touch(dir / "llm/gpt4/A.java");
  const auto manifest = ingest_corpus(dir.path(), LabelRules::defaults());
  ASSERT_EQ(manifest.entries.size(), 3u);
  EXPECT_EQ(manifest.entries[0].origin, Origin::human);
  EXPECT_EQ(manifest.entries[1].origin, Origin::human);
  EXPECT_EQ(manifest.entries[2].origin, Origin::llm);
  EXPECT_EQ(manifest.entries[2].llm_model, "gpt4");
}

TEST(IngestCorpus, DuplicateFileNamesKeepDistinctPaths) {
  TempDir dir;
  touch(dir / "human/alice/Main.java");
  touch(dir / "human/bob/Main.java");
  const auto manifest = ingest_corpus(dir.path(), LabelRules::defaults());
  ASSERT_EQ(manifest.entries.size(), 2u);
  EXPECT_NE(manifest.entries[0].path, manifest.entries[1].path);
}

TEST(IngestCorpus, ZeroByteFile) {
  TempDir dir;
  touch(dir / "human/alice/Empty.java", "");
  const auto manifest = ingest_corpus(dir.path(), LabelRules::defaults());
  ASSERT_EQ(manifest.entries.size(), 1u);
  EXPECT_EQ(manifest.entries[0].line_count, 0u);
  EXPECT_TRUE(split_into_groups(read_text_file(dir / "human/alice/Empty.java"), 10).empty());
}

TEST(IngestCorpus, UnlabeledFilesBecomeWarnings) {
  TempDir dir;
  touch(dir / "human/alice/A.java");
  touch(dir / "misc/B.java");
  touch(dir / "human/alice/notes.txt");
  const auto manifest = ingest_corpus(dir.path(), LabelRules::defaults());
  EXPECT_EQ(manifest.entries.size(), 1u);
  EXPECT_EQ(manifest.warnings.size(), 1u);
}

TEST(IngestCorpus, EmptyAndMissingRoots) {
  TempDir dir;
  EXPECT_THROW(ingest_corpus(dir.path(), LabelRules::defaults()), InputError);
  EXPECT_THROW(ingest_corpus(dir / "missing", LabelRules::defaults()), InputError);
}

TEST(IngestCorpus, IdempotentManifestBytes) {
  TempDir dir;
  touch(dir / "human/alice/A.java", "class A {\n}\n");
  touch(dir / "llm/gpt4/A.java", "class A {}\n");
  ingest_corpus(dir.path(), LabelRules::defaults()).save(dir / "m1.json");
  ingest_corpus(dir.path(), LabelRules::defaults()).save(dir / "m2.json");
  EXPECT_EQ(read_text_file(dir / "m1.json"), read_text_file(dir / "m2.json"));
}

TEST(CorpusManifest, JsonRoundTripAndValidation) {
  const auto manifest = ingest_corpus(stylodet::test::data_path("fixtures/corpus"), LabelRules::defaults());
  const auto doc = manifest.to_json();
  EXPECT_EQ(doc.at("schema"), 1);
  const auto back = CorpusManifest::from_json(doc);
  EXPECT_EQ(back.entries, manifest.entries);
  EXPECT_EQ(back.to_json(), doc);

  auto dup = manifest;
  dup.entries.push_back(dup.entries.front());
  EXPECT_THROW(dup.validate(), InputError);

  auto no_model = manifest;
  no_model.entries.back().origin = Origin::llm;
  no_model.entries.back().llm_model.reset();
  EXPECT_THROW(no_model.validate(), InputError);
}

TEST(CorpusManifest, LineCountsMatchFiles) {
  const auto root = stylodet::test::data_path("fixtures/corpus");
  const auto manifest = ingest_corpus(root, LabelRules::defaults());
  for (const auto& e : manifest.entries) {
    EXPECT_EQ(e.line_count, count_physical_lines(read_text_file(root / e.path))) << e.path;
  }
  EXPECT_TRUE(std::is_sorted(manifest.entries.begin(), manifest.entries.end(),
                             [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; }));
}
