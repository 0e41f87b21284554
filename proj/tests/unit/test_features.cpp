// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "stylodet/error.hpp"
#include "stylodet/features.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::TempDir;

namespace {

FeatureConfig ewd(std::size_t b) {
  FeatureConfig c;
  c.family = FeatureFamily::ewd_nb_f;
  c.bin_width = b;
  return c;
}

FeatureIndexMap map_with(std::size_t n) {
  FeatureIndexMap map(FeatureFamily::ewd_nb_f, std::string(kGrammarId));
  for (std::size_t k = 0; k < n; ++k) map.add("k" + std::to_string(k));
  return map;
}

// Straightforward scanner used as an independent oracle for the lexical slots.
struct NaiveLexical {
  double mean_line = 0, spaces = 0, tabs = 0, underscores = 0, empty = 0;
};

NaiveLexical naive_lexical(const std::string& text) {
  NaiveLexical r;
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
    r.spaces += ch == ' ';
    r.tabs += ch == '\t';
    r.underscores += ch == '_';
  }
  if (!cur.empty()) lines.push_back(cur);
  double total = 0;
  for (const auto& l : lines) {
    total += static_cast<double>(l.size());
    r.empty += l.empty();
  }
  r.mean_line = lines.empty() ? 0 : total / static_cast<double>(lines.size());
  return r;
}

}  // namespace

TEST(LexicalFeatures, HandCountedExample) {
  const auto f = lexical_features("a\n\n");
  EXPECT_DOUBLE_EQ(f[kMeanLineLength], 0.5 / 3);
  EXPECT_DOUBLE_EQ(f[kEmptyLines], 1.0 / 3);
  for (std::size_t i : {1, 2, 3, 4, 5, 7, 8, 9}) EXPECT_EQ(f[i], 0.0) << i;
}

TEST(LexicalFeatures, AllSpaces) {
  const auto f = lexical_features(std::string(20, ' '));
  EXPECT_DOUBLE_EQ(f[kSpaces], 1.0);
  EXPECT_EQ(f[kMeanCommentLength], 0.0);
}

TEST(LexicalFeatures, EmptyGroupIsAllZero) {
  for (double v : lexical_features("")) EXPECT_EQ(v, 0.0);
}

TEST(LexicalFeatures, CommentBodies) {
  // bodies: " ab" (3) and "xyz" (3) -> mean 3
  const std::string text = "int a; // ab\n/*xyz*/ int b;\n";
  const LexicalCounts c = count_lexical(text);
  EXPECT_EQ(c.comments, 2u);
  EXPECT_EQ(c.comment_chars, 6u);
  EXPECT_DOUBLE_EQ(lexical_features(text)[kMeanCommentLength], 3.0 / static_cast<double>(text.size()));
}

TEST(LexicalFeatures, CommentMarkersInsideLiteralsIgnored) {
  const LexicalCounts c = count_lexical("String s = \"// not\"; char q = '/'; String t = \"\"\"\n/* no */\n\"\"\";\n");
  EXPECT_EQ(c.comments, 0u);
}

TEST(LexicalFeatures, StatementWordsSlot) {
  const std::string text = "if (a) { return b; }\n";
  EXPECT_DOUBLE_EQ(lexical_features(text)[kStatementWordCount], 2.0 / static_cast<double>(text.size()));
}

TEST(LexicalFeatures, MatchesNaiveScannerOnRandomText) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "ab _\t\n\r;{}x";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const std::size_t n = rng() % 200;
    for (std::size_t i = 0; i < n; ++i) text += alphabet[rng() % alphabet.size()];
    // keep \r only as part of \r\n
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\r' && (i + 1 >= text.size() || text[i + 1] != '\n')) text[i] = 'a';
    }
    const auto f = lexical_features(text);
    const NaiveLexical o = naive_lexical(text);
    const double c = std::max<double>(1, static_cast<double>(text.size()));
    if (text.empty()) continue;
    EXPECT_NEAR(f[kMeanLineLength], o.mean_line / c, 1e-15);
    EXPECT_NEAR(f[kSpaces], o.spaces / c, 1e-15);
    EXPECT_NEAR(f[kTabs], o.tabs / c, 1e-15);
    EXPECT_NEAR(f[kUnderscores], o.underscores / c, 1e-15);
    EXPECT_NEAR(f[kEmptyLines], o.empty / c, 1e-15);
  }
}

TEST(FeatureIndex, FirstEncounterOrder) {
  BigramCounts a, b;
  a.add("k1");
  a.add("k2");
  b.add("k1");
  b.add("k3");
  const std::vector<BigramCounts> corpus{a, b};
  const auto map = build_feature_index(corpus, ewd(1));
  EXPECT_EQ(map.find("k1"), 10u);
  EXPECT_EQ(map.find("k2"), 11u);
  EXPECT_EQ(map.find("k3"), 12u);
  EXPECT_EQ(map.next_index(), 13u);
  EXPECT_FALSE(map.find("k4"));
}

TEST(FeatureIndex, EmptyCorpus) {
  const auto map = build_feature_index(std::span<const BigramCounts>{}, ewd(1));
  EXPECT_EQ(map.next_index(), 10u);
}

TEST(FeatureIndex, FamilyMismatch) {
  BigramCounts compressed;
  compressed.compressed = true;
  compressed.add("a→b@0");
  FeatureIndexMap map(FeatureFamily::nb_f, std::string(kGrammarId));
  FeatureConfig nb;
  nb.family = FeatureFamily::nb_f;
  EXPECT_THROW(extend_feature_index(map, compressed, nb), ArtifactMismatch);
  BigramCounts other_grammar;
  other_grammar.grammar_id = "other";
  EXPECT_THROW(extend_feature_index(map, other_grammar, nb), ArtifactMismatch);
}

TEST(FeatureIndex, JsonRoundTrip) {
  const auto map = map_with(25);
  const auto doc = map.to_json(ewd(4));
  EXPECT_EQ(doc.at("schema"), 1);
  EXPECT_EQ(FeatureIndexMap::from_json(doc), map);
  EXPECT_EQ(FeatureIndexMap::from_json(doc).to_json(ewd(4)), doc);
}

TEST(BinIndex, Examples) {
  EXPECT_EQ(bin_index(10, ewd(5)), 10u);
  EXPECT_EQ(bin_index(17, ewd(5)), 11u);
  for (std::size_t i = 10; i < 200; ++i) EXPECT_EQ(bin_index(i, ewd(1)), i);
  EXPECT_THROW(bin_index(9, ewd(5)), InputError);
}

TEST(BinIndex, MatchesDefinitionOnRandomTuples) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    FeatureConfig c = ewd(1 + rng() % 4000);
    c.s1 = rng() % 50;
    c.s2 = rng() % 50;
    const std::size_t i = c.s1 + rng() % 100000;
    std::size_t expected = c.s2;
    for (std::size_t k = c.s1 + c.bin_width; k <= i; k += c.bin_width) ++expected;
    ASSERT_EQ(bin_index(i, c), expected);
  }
}

TEST(AssembleRow, EquationExamples) {
  FeatureIndexMap map(FeatureFamily::ewd_nb_f, std::string(kGrammarId));
  map.add("k1");
  map.add("k2");
  BigramCounts counts;
  counts.add("k1", 2);
  counts.add("k2", 3);
  const std::string text(100, 'x');
  const auto binned = assemble_row(text, counts, map, ewd(5));
  ASSERT_EQ(binned.size(), 11u);
  EXPECT_DOUBLE_EQ(binned[10], 0.05);
  const auto flat = assemble_row(text, counts, map, ewd(1));
  ASSERT_EQ(flat.size(), 12u);
  EXPECT_DOUBLE_EQ(flat[10], 0.02);
  EXPECT_DOUBLE_EQ(flat[11], 0.03);
}

TEST(AssembleRow, EmptyCountsKeepLexicalSlots) {
  const auto map = map_with(7);
  const std::string text = "  a_b\n\n";
  const auto row = assemble_row(text, BigramCounts{}, map, ewd(2));
  ASSERT_EQ(row.size(), 14u);
  for (std::size_t i = 10; i < row.size(); ++i) EXPECT_EQ(row[i], 0.0);
  const auto lex = lexical_features(text);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(row[i], lex[i]);
}

TEST(AssembleRow, UnknownKeysDroppedWithTelemetry) {
  const auto map = map_with(3);
  BigramCounts counts;
  counts.add("k1", 4);
  counts.add("unseen", 5);
  AssembleStats stats;
  const auto row = assemble_row("xxxx", counts, map, ewd(1), &stats);
  EXPECT_EQ(stats.unknown_keys, 1u);
  EXPECT_EQ(stats.unknown_mass, 5u);
  EXPECT_DOUBLE_EQ(row[11], 1.0);
}

TEST(AssembleRow, BlockSumOracleAndConservation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vocab = 1 + rng() % 300;
    const auto map = map_with(vocab);
    BigramCounts counts;
    for (std::size_t k = 0; k < vocab; ++k) {
      if (rng() % 3 == 0) counts.add("k" + std::to_string(k), 1 + rng() % 50);
    }
    const std::size_t b = 1 + rng() % 400;
    const std::string text(1 + rng() % 2000, 'x');
    const auto flat = assemble_bin_counts(counts, map, ewd(1));
    const auto binned = assemble_bin_counts(counts, map, ewd(b));
    ASSERT_EQ(flat.size(), vocab);
    ASSERT_EQ(binned.size(), (vocab + b - 1) / b);
    std::vector<std::uint64_t> oracle(binned.size(), 0);
    for (std::size_t i = 0; i < flat.size(); ++i) oracle[i / b] += flat[i];
    ASSERT_EQ(binned, oracle);
    const std::uint64_t mass = std::accumulate(binned.begin(), binned.end(), std::uint64_t{0});
    ASSERT_EQ(mass, counts.total());
    const auto row = assemble_row(text, counts, map, ewd(b));
    const double sum = std::accumulate(row.begin() + 10, row.end(), 0.0);
    ASSERT_NEAR(sum, static_cast<double>(counts.total()) / static_cast<double>(text.size()), 1e-12);
  }
}

TEST(Percentile, LinearInterpolation) {
  std::vector<double> v(101);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.05), 5.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.95), 95.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2}, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(percentile({4}, 0.1), 4.0);
  EXPECT_THROW(percentile(v, 5), InputError);
}

TEST(Winsorize, UniformColumn) {
  FeatureMatrix m;
  m.column_count = 2;
  for (int x = 0; x <= 100; ++x) m.rows.push_back({{}, x % 2, {static_cast<double>(x), 7.0}});
  std::vector<std::size_t> all(m.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto out = winsorize(m, all);
  ASSERT_TRUE(out.normalization);
  EXPECT_NEAR(out.rows[50].values[0], 0.5, 1e-12);
  EXPECT_EQ(out.rows[100].values[0], 1.0);
  EXPECT_EQ(out.rows[0].values[0], 0.0);
  for (const auto& r : out.rows) EXPECT_EQ(r.values[1], 0.0);
}

TEST(Winsorize, FitsOnTrainRowsOnly) {
  FeatureMatrix m;
  m.column_count = 1;
  for (int x = 0; x < 10; ++x) m.rows.push_back({{}, 0, {static_cast<double>(x)}});
  m.rows.push_back({{}, 1, {1000.0}});
  const std::vector<std::size_t> fit{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto stats = fit_winsorizer(m, fit);
  EXPECT_DOUBLE_EQ(stats.p5[0], 0.45);
  EXPECT_DOUBLE_EQ(stats.p95[0], 8.55);
  EXPECT_EQ(winsorize(m, fit).rows[10].values[0], 1.0);
}

TEST(Winsorize, OutputsInUnitIntervalAndIdempotent) {
  std::mt19937_64 rng(9);
  std::lognormal_distribution<double> dist(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    FeatureMatrix m;
    m.column_count = 1 + rng() % 8;
    const std::size_t rows = 1 + rng() % 60;
    for (std::size_t r = 0; r < rows; ++r) {
      FeatureMatrix::Row row{{}, 0, {}};
      for (std::size_t c = 0; c < m.column_count; ++c) row.values.push_back(c == 0 ? 3.0 : dist(rng));
      m.rows.push_back(row);
    }
    std::vector<std::size_t> all(rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto once = winsorize(m, all);
    for (const auto& r : once.rows) {
      for (double v : r.values) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
    }
    const auto twice = winsorize(once, all);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < m.column_count; ++c) {
        const double a = once.rows[r].values[c], b = twice.rows[r].values[c];
        // re-fitting stretches the interior only; clamped ends stay clamped
        if (a == 0.0 || a == 1.0) ASSERT_EQ(a, b);
      }
    }
  }
}

TEST(NormalizationStats, ShapeMismatch) {
  NormalizationStats s{{0, 0}, {1, 1}};
  std::vector<double> row(3, 0.5);
  EXPECT_THROW(s.apply(row), ArtifactMismatch);
}

TEST(MatrixIo, RoundTrip) {
  TempDir dir;
  FeatureMatrix m;
  m.column_count = 3;
  m.rows.push_back({{"a/B.java", 0, {1, 10}, false}, 1, {0.1, 1.0 / 3.0, 5e-324}});
  m.rows.push_back({{"a/C.java", 1, {11, 13}, true}, 0, {0.0, 2.5, 1e300}});
  m.normalization = NormalizationStats{{0, 0.1, 0}, {1, 2, 3}};
  save_matrix(m, dir / "m.csv", dir / "m.json", {{"note", "x"}});
  const std::string header = read_text_file(dir / "m.csv").substr(0, 20);
  EXPECT_EQ(header.rfind("col_0,col_1,col_2,", 0), 0u);
  const auto back = load_matrix(dir / "m.csv", dir / "m.json");
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.column_count, 3u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(back.rows[r].values, m.rows[r].values);
    EXPECT_EQ(back.rows[r].label, m.rows[r].label);
    EXPECT_EQ(back.rows[r].group.path, m.rows[r].group.path);
    EXPECT_EQ(back.rows[r].group.lines, m.rows[r].group.lines);
    EXPECT_EQ(back.rows[r].group.remainder, m.rows[r].group.remainder);
  }
  EXPECT_EQ(back.normalization, m.normalization);
}

TEST(FeatureConfig, ValidationAndJson) {
  FeatureConfig c = ewd(0);
  EXPECT_THROW(c.validate(), InputError);
  c.family = FeatureFamily::cnb_f;
  c.bin_width = 4;
  EXPECT_THROW(c.validate(), InputError);
  const FeatureConfig d = ewd(3000);
  EXPECT_EQ(FeatureConfig::from_json(d.to_json()).to_json(), d.to_json());
  EXPECT_EQ(parse_family("ewd-nb-f"), FeatureFamily::ewd_nb_f);
  EXPECT_THROW(parse_family("tfidf"), InputError);
}
