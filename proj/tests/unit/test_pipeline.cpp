// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>

#include "stylodet/bundle.hpp"
#include "stylodet/error.hpp"
#include "stylodet/eval.hpp"
#include "stylodet/pipeline.hpp"
#include "stylodet/synth.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::data_path;

namespace {

CorpusManifest fixture_manifest() { return ingest_corpus(data_path("fixtures/corpus"), LabelRules::defaults()); }

ExtractionResult fixture_extraction(std::size_t group_size, bool compressed) {
  ExtractOptions opts;
  opts.group_size = group_size;
  opts.bigrams.compressed = compressed;
  return extract_corpus(fixture_manifest(), data_path("fixtures/corpus"), opts);
}

FeatureConfig config_for(FeatureFamily family, std::size_t group_size, std::size_t b = 1) {
  FeatureConfig c;
  c.family = family;
  c.group_size = group_size;
  c.bin_width = b;
  return c;
}

ModelBundle synth_bundle(std::size_t files) {
  SynthOptions so;
  so.files = files;
  CorpusManifest manifest;
  std::vector<GroupRecord> groups;
  ExtractionResult ex;
  for (const auto& f : generate_style_corpus(so)) {
    auto records = extract_text(f.text, f.path, 30, {});
    for (auto& r : records) {
      r.label = f.style == SynthStyle::rewritten;
      r.ref.file_index = ex.files;
      ex.groups.push_back(std::move(r));
    }
    ++ex.files;
  }
  const Dataset ds = build_dataset(ex, config_for(FeatureFamily::ewd_nb_f, 30, 40));
  std::vector<std::size_t> rows(ds.matrix.rows.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const FeatureMatrix norm = winsorize(ds.matrix, rows);
  TrainedModel model = train(ModelSpec::defaults(ModelKind::random_forest), norm, rows);
  return ModelBundle::assemble(std::move(model), ds.index_map, *norm.normalization, ds.config, {{"seed", 42}});
}

}  // namespace

TEST(ExtractCorpus, FixtureGroupsAndFailures) {
  const auto ex = fixture_extraction(10, false);
  EXPECT_EQ(ex.files, 9u);
  EXPECT_TRUE(ex.failures.empty());
  std::size_t expected = 0;
  for (const auto& e : fixture_manifest().entries) expected += (e.line_count + 9) / 10;
  EXPECT_EQ(ex.groups.size(), expected);
  for (const auto& g : ex.groups) {
    const bool llm = g.ref.path.rfind("llm/", 0) == 0;
    EXPECT_EQ(g.label, llm ? 1 : 0) << g.ref.path;
  }
}

TEST(ExtractCorpus, MissingFileRecordedAsFailure) {
  auto manifest = fixture_manifest();
  manifest.entries.push_back({"human/zed/Gone.java", "zed", Origin::human, std::nullopt, false, 3});
  ExtractOptions opts;
  const auto ex = extract_corpus(manifest, data_path("fixtures/corpus"), opts);
  ASSERT_EQ(ex.failures.size(), 1u);
  EXPECT_NE(ex.failures[0].find("Gone.java"), std::string::npos);
}

TEST(Additivity, GroupCountsSumToFileCounts) {
  for (const auto& e : std::filesystem::recursive_directory_iterator(data_path("fixtures/corpus"))) {
    if (e.path().extension() != ".java") continue;
    const std::string text = read_text_file(e.path());
    const SyntaxTree tree = parse_java(text);
    const auto whole = extract_nested_bigrams(tree, {1, std::max<std::size_t>(1, count_physical_lines(text))}, {});
    for (std::size_t gs : {1u, 3u, 10u, 40u}) {
      BigramCounts sum;
      for (const auto& g : extract_text(text, e.path().string(), gs, {})) sum.merge(g.counts);
      ASSERT_EQ(sum.total(), whole.total()) << e.path() << " gs=" << gs;
      for (const auto& [k, v] : whole.entries()) ASSERT_EQ(sum.count(k), v) << k;
    }
  }
}

TEST(BuildDataset, ShapesAndIndexOrder) {
  const auto ex = fixture_extraction(10, false);
  const Dataset nb = build_dataset(ex, config_for(FeatureFamily::nb_f, 10));
  EXPECT_EQ(nb.matrix.rows.size(), ex.groups.size());
  EXPECT_EQ(nb.matrix.column_count, 10 + nb.index_map.vocabulary_size());
  const Dataset ewd = build_dataset(ex, config_for(FeatureFamily::ewd_nb_f, 10, 3000));
  EXPECT_EQ(ewd.matrix.column_count, 10 + (ewd.index_map.vocabulary_size() + 2999) / 3000);
  EXPECT_EQ(ewd.index_map.keys(), nb.index_map.keys());
  const Dataset threaded = build_dataset(ex, config_for(FeatureFamily::nb_f, 10), 4);
  for (std::size_t r = 0; r < nb.matrix.rows.size(); ++r) {
    EXPECT_EQ(threaded.matrix.rows[r].values, nb.matrix.rows[r].values);
  }
}

TEST(BuildDataset, CompressedWidthIndependentOfGroupSize) {
  std::set<std::size_t> widths;
  for (std::size_t gs : {10u, 40u, 70u}) {
    widths.insert(build_dataset(fixture_extraction(gs, true), config_for(FeatureFamily::cnb_f, gs)).matrix.column_count);
  }
  EXPECT_EQ(widths.size(), 1u);
}

TEST(AutoBinWidth, FitsBudget) {
  EXPECT_EQ(auto_bin_width(0, 90), 1u);
  EXPECT_EQ(auto_bin_width(90, 90), 1u);
  EXPECT_EQ(auto_bin_width(91, 90), 2u);
  for (std::size_t v = 1; v < 5000; v += 37) EXPECT_LE((v + auto_bin_width(v, 90) - 1) / auto_bin_width(v, 90), 90u);
}

TEST(Bundle, RoundTripAndValidation) {
  const ModelBundle bundle = synth_bundle(20);
  stylodet::test::TempDir dir;
  bundle.save(dir / "b.json");
  const ModelBundle back = ModelBundle::load(dir / "b.json");
  EXPECT_EQ(back.to_json(), bundle.to_json());

  auto doc = bundle.to_json();
  doc["manifest"]["grammar_id"] = "tree-sitter-java-0.1";
  EXPECT_THROW(ModelBundle::from_json(doc), ArtifactMismatch);

  doc = bundle.to_json();
  doc["normalization"]["p5"].erase(0);
  EXPECT_THROW(ModelBundle::from_json(doc), ArtifactMismatch);

  doc = bundle.to_json();
  doc["index_map"]["entries"].erase(0);
  EXPECT_THROW(ModelBundle::from_json(doc), ArtifactMismatch);
}

TEST(Detect, EmptyFileAndTrainingFiles) {
  const ModelBundle bundle = synth_bundle(40);
  EXPECT_TRUE(detect(bundle, "", "Empty.java").groups.empty());
  SynthOptions so;
  so.files = 40;
  for (const auto& f : generate_style_corpus(so)) {
    const DetectResult r = detect(bundle, f.text, f.path);
    EXPECT_FALSE(r.groups.empty());
    for (const auto& g : r.groups) {
      if (f.style == SynthStyle::classic) {
        EXPECT_LT(g.score, 0.5) << f.path;
      } else {
        EXPECT_GT(g.score, 0.5) << f.path;
      }
      EXPECT_EQ(g.positive, g.score > 0.5);
    }
  }
}

TEST(Synth, DeterministicAndParsable) {
  SynthOptions so;
  so.files = 10;
  const auto a = generate_style_corpus(so);
  const auto b = generate_style_corpus(so);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].text, b[i].text);
    EXPECT_FALSE(parse_java(a[i].text).has_errors()) << a[i].path;
  }
  EXPECT_EQ(std::count_if(a.begin(), a.end(), [](const SynthFile& f) { return f.style == SynthStyle::rewritten; }), 5);
}
