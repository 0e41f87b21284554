// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylodet {

// Identifies the grammar whose rule names form the node-kind vocabulary.
// Index maps and model bundles record it; artifacts built with a different
// grammar are rejected.
inline constexpr std::string_view kGrammarId = "tree-sitter-java-0.23.5";

inline constexpr std::uint32_t kNoParent = UINT32_MAX;

struct TreeNode {
  std::string_view kind;  // grammar rule name; points at static storage
  std::optional<std::string> attribute;
  std::uint32_t start_line = 1;
  std::uint32_t end_line = 1;
  std::uint32_t parent = kNoParent;
  std::uint32_t depth = 0;  // root = 0
  std::vector<std::uint32_t> children;
};

// Immutable parse tree. Nodes are stored in pre-order, so the root is node 0
// and every parent precedes its children.
class SyntaxTree {
 public:
  SyntaxTree(std::vector<TreeNode> nodes, std::size_t line_count)
      : nodes_(std::move(nodes)), line_count_(line_count) {}

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(std::uint32_t index) const { return nodes_[index]; }
  std::span<const TreeNode> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t line_count() const { return line_count_; }
  bool has_errors() const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t line_count_ = 0;
};

// Error-tolerant Java parser. Not thread-safe; use one per thread.
class JavaParser {
 public:
  JavaParser();
  ~JavaParser();
  JavaParser(const JavaParser&) = delete;
  JavaParser& operator=(const JavaParser&) = delete;

  // Malformed code yields ERROR / MISSING nodes rather than failure. Throws
  // Error("parse failure: <path>") only when no tree can be produced.
  SyntaxTree parse(std::string_view text, std::string_view path = "<memory>");

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper using a thread-local parser.
SyntaxTree parse_java(std::string_view text, std::string_view path = "<memory>");

// `kind` alone when compressed or when the node has no attribute, otherwise
// `kind«attribute»`. Attribute text is escaped so the delimiters « » → and
// control characters never appear raw inside the brackets.
std::string node_label(const TreeNode& node, bool compressed);

std::string escape_attribute(std::string_view text);

// One node per line, two spaces of indent per level:
//   kind [start-end] «attribute»
std::string dump_tree(const SyntaxTree& tree);

}  // namespace stylodet
