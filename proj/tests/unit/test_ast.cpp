// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <regex>

#include "stylodet/ast.hpp"
#include "stylodet/corpus.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::data_path;

namespace {

void expect_golden(const std::string& name) {
  const std::string source = read_text_file(data_path("golden/" + name + ".java"));
  const std::string expected = read_text_file(data_path("golden/" + name + ".tree"));
  EXPECT_EQ(dump_tree(parse_java(source)), expected) << name;
}

std::vector<std::string> fixture_sources() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(data_path("fixtures/corpus"))) {
    if (e.path().extension() == ".java") out.push_back(read_text_file(e.path()));
  }
  return out;
}

}  // namespace

TEST(ParseJava, GoldenTrees) {
  expect_golden("class_a");
  expect_golden("if_statement");
  expect_golden("fragment");
  expect_golden("malformed");
}

TEST(ParseJava, ClassDeclarationUnderCompilationUnit) {
  const SyntaxTree tree = parse_java("class A { }");
  EXPECT_EQ(tree.root().kind, "program");
  ASSERT_EQ(tree.root().children.size(), 1u);
  EXPECT_EQ(tree.node(tree.root().children[0]).kind, "class_declaration");
  EXPECT_FALSE(tree.has_errors());
}

TEST(ParseJava, EmptySource) {
  const SyntaxTree tree = parse_java("");
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_TRUE(tree.root().children.empty());
}

TEST(ParseJava, MalformedInputKeepsErrorNodes) {
  const SyntaxTree tree = parse_java("class { int = ; void m( {\n");
  EXPECT_TRUE(tree.has_errors());
  EXPECT_NO_THROW(parse_java("int x = 1;"));
  EXPECT_NO_THROW(parse_java("}}}} ((( \"unterminated\n/* open comment"));
}

TEST(ParseJava, CommentsAreNotTreeNodes) {
  const SyntaxTree tree = parse_java("// c\nclass A { /* x */ int f; }\n");
  for (const auto& n : tree.nodes()) {
    EXPECT_NE(n.kind, "line_comment");
    EXPECT_NE(n.kind, "block_comment");
  }
}

TEST(ParseJava, OperatorsAndLiteralsCarryAttributes) {
  const SyntaxTree tree = parse_java("class A { int f() { int x = 1 + 2; x++; return x; } }");
  std::vector<std::string> labels;
  for (const auto& n : tree.nodes()) labels.push_back(node_label(n, false));
  auto has = [&](const std::string& l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); };
  EXPECT_TRUE(has("operator«+»"));
  EXPECT_TRUE(has("operator«++»"));
  EXPECT_TRUE(has("decimal_integer_literal«1»"));
  EXPECT_TRUE(has("identifier«x»"));
  EXPECT_TRUE(has("integral_type"));
}

TEST(ParseJava, MultiLineLiteralIsOneLeaf) {
  const SyntaxTree tree = parse_java("class A {\n  String s = \"\"\"\n    a\n    b\n    \"\"\";\n}\n");
  std::size_t literals = 0;
  for (const auto& n : tree.nodes()) {
    if (n.kind == "string_literal") {
      ++literals;
      EXPECT_TRUE(n.children.empty());
      EXPECT_EQ(n.start_line, 2u);
      EXPECT_EQ(n.end_line, 5u);
      ASSERT_TRUE(n.attribute);
    }
  }
  EXPECT_EQ(literals, 1u);
}

TEST(NodeLabel, Definition) {
  TreeNode ident;
  ident.kind = "identifier";
  ident.attribute = "foo";
  EXPECT_EQ(node_label(ident, false), "identifier«foo»");
  EXPECT_EQ(node_label(ident, true), "identifier");
  TreeNode stmt;
  stmt.kind = "if_statement";
  EXPECT_EQ(node_label(stmt, false), "if_statement");
  EXPECT_EQ(node_label(stmt, true), "if_statement");
}

TEST(NodeLabel, EscapingKeepsLabelsSingleLineAndUnambiguous) {
  EXPECT_EQ(escape_attribute("a\nb"), "a\\nb");
  EXPECT_EQ(escape_attribute("x«y»→z"), "x\\u00aby\\u00bb\\u2192z");
  EXPECT_EQ(escape_attribute("\\"), "\\\\");
  EXPECT_EQ(escape_attribute(std::string(1, '\x01')), "\\x01");
}

TEST(SyntaxTreeProperties, SpansNestAndStayInFile) {
  for (const auto& source : fixture_sources()) {
    const SyntaxTree tree = parse_java(source);
    const std::size_t lines = std::max<std::size_t>(1, count_physical_lines(source));
    for (const auto& n : tree.nodes()) {
      EXPECT_FALSE(n.kind.empty());
      EXPECT_GE(n.start_line, 1u);
      EXPECT_LE(n.start_line, n.end_line);
      EXPECT_LE(n.end_line, lines);
      std::uint32_t prev_start = 0;
      for (std::uint32_t c : n.children) {
        const TreeNode& child = tree.node(c);
        EXPECT_EQ(child.parent, static_cast<std::uint32_t>(&n - tree.nodes().data()));
        EXPECT_EQ(child.depth, n.depth + 1);
        EXPECT_GE(child.start_line, n.start_line);
        EXPECT_LE(child.end_line, n.end_line);
        EXPECT_GE(child.start_line, prev_start);
        prev_start = child.start_line;
      }
    }
  }
}

TEST(SyntaxTreeProperties, CompressedLabelsAreProjection) {
  const std::regex attr("«.*»$");
  for (const auto& source : fixture_sources()) {
    const SyntaxTree tree = parse_java(source);
    for (const auto& n : tree.nodes()) {
      EXPECT_EQ(std::regex_replace(node_label(n, false), attr, ""), node_label(n, true));
    }
  }
}

TEST(SyntaxTreeProperties, Deterministic) {
  for (const auto& source : fixture_sources()) {
    JavaParser a, b;
    EXPECT_EQ(dump_tree(a.parse(source)), dump_tree(b.parse(source)));
  }
}
