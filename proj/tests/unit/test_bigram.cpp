// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <random>

#include "stylodet/ast.hpp"
#include "stylodet/bigram.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/synth.hpp"
#include "test_support.hpp"

using namespace stylodet;

namespace {

constexpr std::string_view kIfFixture = "class A { void m() { if (x) { y(); } } }";

std::map<std::string, std::uint64_t> as_map(const BigramCounts& counts) {
  std::map<std::string, std::uint64_t> m;
  for (const auto& [k, v] : counts.entries()) m[k] = v;
  return m;
}

std::string strip_attributes(const std::string& label) {
  const auto pos = label.find("«");
  return pos == std::string::npos ? label : label.substr(0, pos);
}

}  // namespace

TEST(BigramKey, SerializeParseRoundTrip) {
  const BigramKey key{"if_statement", "identifier«a→b@c»", 3};
  EXPECT_EQ(key.serialize(), "if_statement→identifier«a→b@c»@3");
  const BigramKey escaped{"method_invocation", "identifier«" + escape_attribute("a→b") + "»", 7};
  EXPECT_EQ(BigramKey::parse(escaped.serialize()), escaped);
}

TEST(NestedBigrams, EmptyInputs) {
  EXPECT_TRUE(extract_nested_bigrams(parse_java(""), LineRange{1, 1}, {}).empty());
  const SyntaxTree tree = parse_java("class A {}\n");
  EXPECT_TRUE(extract_nested_bigrams(tree, LineRange{1, 0}, {}).empty());
}

TEST(NestedBigrams, IfStatementGolden) {
  const SyntaxTree tree = parse_java(kIfFixture);
  const auto counts = extract_nested_bigrams(tree, LineRange{1, 1}, {.compressed = true});
  EXPECT_EQ(counts.count("if_statement→parenthesized_expression@5"), 1u);
  EXPECT_EQ(counts.count("if_statement→block@5"), 1u);
  const std::map<std::string, std::uint64_t> golden{
      {"program→class_declaration@0", 1},
      {"class_declaration→identifier@1", 1},
      {"class_declaration→class_body@1", 1},
      {"class_body→method_declaration@2", 1},
      {"method_declaration→void_type@3", 1},
      {"method_declaration→identifier@3", 1},
      {"method_declaration→formal_parameters@3", 1},
      {"method_declaration→block@3", 1},
      {"block→if_statement@4", 1},
      {"if_statement→parenthesized_expression@5", 1},
      {"if_statement→block@5", 1},
      {"parenthesized_expression→identifier@6", 1},
      {"block→expression_statement@6", 1},
      {"expression_statement→method_invocation@7", 1},
      {"method_invocation→identifier@8", 1},
      {"method_invocation→argument_list@8", 1},
  };
  EXPECT_EQ(as_map(counts), golden);
}

TEST(NestedBigrams, AttributedGolden) {
  const auto counts = extract_nested_bigrams(parse_java(kIfFixture), LineRange{1, 1}, {});
  EXPECT_EQ(counts.count("class_declaration→identifier«A»@1"), 1u);
  EXPECT_EQ(counts.count("parenthesized_expression→identifier«x»@6"), 1u);
  EXPECT_EQ(counts.count("method_invocation→identifier«y»@8"), 1u);
  EXPECT_EQ(counts.total(), 16u);
}

TEST(NestedBigrams, DepthCap) {
  const SyntaxTree tree = parse_java(kIfFixture);
  const auto capped = extract_nested_bigrams(tree, LineRange{1, 1}, {.compressed = true, .depth_cap = 2});
  EXPECT_EQ(capped.count("if_statement→block@2"), 1u);
  EXPECT_EQ(capped.count("program→class_declaration@0"), 1u);
  const auto flat = extract_nested_bigrams(tree, LineRange{1, 1}, {.compressed = true, .depth_cap = 0});
  EXPECT_EQ(flat.count("block→if_statement@0"), 1u);
  EXPECT_EQ(flat.total(), 16u);
}

TEST(NestedBigrams, ChildStartLineAssignment) {
  const SyntaxTree tree = parse_java("class A {\n  int f;\n  int g;\n}\n");
  const auto line2 = extract_nested_bigrams(tree, LineRange{2, 2}, {.compressed = true});
  EXPECT_EQ(line2.count("class_body→field_declaration@2"), 1u);
  EXPECT_EQ(line2.count("program→class_declaration@0"), 0u);
  const auto line1 = extract_nested_bigrams(tree, LineRange{1, 1}, {.compressed = true});
  EXPECT_EQ(line1.count("program→class_declaration@0"), 1u);
  EXPECT_EQ(line1.count("class_declaration→class_body@1"), 1u);
}

TEST(NestedBigrams, CompressionProjectionOnFixtures) {
  for (const auto& e : std::filesystem::recursive_directory_iterator(stylodet::test::data_path("fixtures/corpus"))) {
    if (e.path().extension() != ".java") continue;
    const std::string text = read_text_file(e.path());
    const SyntaxTree tree = parse_java(text);
    const LineRange all{1, std::max<std::size_t>(1, count_physical_lines(text))};
    const auto attributed = extract_nested_bigrams(tree, all, {});
    const auto compressed = extract_nested_bigrams(tree, all, {.compressed = true});
    EXPECT_EQ(attributed.total(), compressed.total());
    std::map<std::string, std::uint64_t> projected;
    for (const auto& [k, v] : attributed.entries()) {
      const BigramKey key = BigramKey::parse(k);
      projected[BigramKey{strip_attributes(key.parent_label), strip_attributes(key.child_label), key.depth_tag}
                    .serialize()] += v;
    }
    EXPECT_EQ(projected, as_map(compressed)) << e.path();
  }
}

TEST(NestedBigrams, MonotoneInBounds) {
  const std::string text = generate_java_class(SynthStyle::classic, "Mono", 3, 6);
  const SyntaxTree tree = parse_java(text);
  const std::size_t lines = count_physical_lines(text);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = 1 + rng() % lines;
    const std::size_t b = a + rng() % (lines - a + 1);
    const std::size_t lo = 1 + rng() % a;
    const std::size_t hi = b + rng() % (lines - b + 1);
    const auto inner = extract_nested_bigrams(tree, LineRange{a, b}, {});
    const auto outer = extract_nested_bigrams(tree, LineRange{lo, hi}, {});
    for (const auto& [k, v] : inner.entries()) ASSERT_GE(outer.count(k), v) << k;
  }
}

TEST(NestedBigrams, GroupExtractionMatchesPerRange) {
  const std::string text = generate_java_class(SynthStyle::rewritten, "Parts", 5, 7);
  const SyntaxTree tree = parse_java(text);
  const auto groups = split_into_groups(text, 13);
  std::vector<LineRange> ranges;
  for (const auto& g : groups) ranges.push_back(g.lines);
  const auto batched = extract_group_bigrams(tree, ranges, {});
  ASSERT_EQ(batched.size(), ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    EXPECT_EQ(as_map(batched[i]), as_map(extract_nested_bigrams(tree, ranges[i], {})));
  }
}

TEST(StatementTokens, Examples) {
  EXPECT_EQ(count_statement_tokens("if (a) { for (;;) {} }"), 2u);
  EXPECT_EQ(count_statement_tokens("iffy = format;"), 0u);
  EXPECT_EQ(count_statement_tokens("return new Foo(); // else"), 3u);
  EXPECT_EQ(count_statement_tokens("$if _for for_ do"), 1u);
  EXPECT_EQ(count_statement_tokens(""), 0u);
}

TEST(StatementTokens, GeneratedFileWithKnownWhileCount) {
  std::mt19937_64 rng(5);
  for (std::size_t k : {0u, 1u, 17u, 250u}) {
    std::vector<bool> has_while(1000, false);
    for (std::size_t placed = 0; placed < k;) {
      const std::size_t line = rng() % 1000;
      if (!has_while[line]) {
        has_while[line] = true;
        ++placed;
      }
    }
    std::string text;
    for (std::size_t i = 0; i < 1000; ++i) {
      text += "  value_" + std::to_string(i) + " = whilex + awhile;";
      if (has_while[i]) text += " while (cond) step();";
      text += "\n";
    }
    EXPECT_EQ(count_statement_tokens(text), k);
  }
}
