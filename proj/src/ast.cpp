// SPDX-License-Identifier: Apache-2.0
#include "stylodet/ast.hpp"

#include <tree_sitter/api.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

#include "stylodet/error.hpp"

extern "C" const TSLanguage* tree_sitter_java(void);

namespace stylodet {

namespace {

constexpr std::string_view kOperatorKind = "operator";

// Literal subtrees (string fragments, escapes) collapse into one attributed leaf.
constexpr std::array<std::string_view, 11> kLiteralKinds = {
    "binary_integer_literal",  "character_literal", "decimal_floating_point_literal",
    "decimal_integer_literal", "false",             "hex_floating_point_literal",
    "hex_integer_literal",     "null_literal",      "octal_integer_literal",
    "string_literal",          "true"};

bool is_literal(std::string_view kind) {
  return std::find(kLiteralKinds.begin(), kLiteralKinds.end(), kind) != kLiteralKinds.end();
}

bool is_identifier(std::string_view kind) { return kind == "identifier" || kind == "type_identifier"; }

bool is_comment(std::string_view kind) { return kind == "line_comment" || kind == "block_comment"; }

// Line numbers of a node: tree-sitter rows are 0-based and a node that ends
// exactly at the start of a row really ends on the previous one.
std::pair<std::uint32_t, std::uint32_t> node_lines(TSNode n) {
  const TSPoint s = ts_node_start_point(n);
  const TSPoint e = ts_node_end_point(n);
  std::uint32_t start = s.row + 1;
  std::uint32_t end = e.row + 1;
  if (e.column == 0 && e.row > s.row) end = e.row;
  return {start, std::max(start, end)};
}

struct TsParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TsTreeDeleter {
  void operator()(TSTree* t) const { ts_tree_delete(t); }
};

}  // namespace

bool SyntaxTree::has_errors() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const TreeNode& n) { return n.kind == "ERROR"; });
}

struct JavaParser::Impl {
  std::unique_ptr<TSParser, TsParserDeleter> parser{ts_parser_new()};
};

JavaParser::JavaParser() : impl_(std::make_unique<Impl>()) {
  if (!impl_->parser || !ts_parser_set_language(impl_->parser.get(), tree_sitter_java())) {
    throw Error("cannot initialise the Java grammar");
  }
}

JavaParser::~JavaParser() = default;

SyntaxTree JavaParser::parse(std::string_view text, std::string_view path) {
  std::unique_ptr<TSTree, TsTreeDeleter> ts_tree(ts_parser_parse_string(
      impl_->parser.get(), nullptr, text.data(), static_cast<std::uint32_t>(text.size())));
  if (!ts_tree) throw Error("parse failure: " + std::string(path));

  std::size_t line_count = 0;
  if (!text.empty()) {
    line_count = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    if (text.back() != '\n') ++line_count;
  }
  const auto max_line = static_cast<std::uint32_t>(std::max<std::size_t>(line_count, 1));

  std::vector<TreeNode> nodes;
  TSTreeCursor cursor = ts_tree_cursor_new(ts_tree_root_node(ts_tree.get()));

  auto make_node = [&](TSNode n, std::string_view kind, std::uint32_t parent) {
    TreeNode node;
    node.kind = kind;
    auto [start, end] = node_lines(n);
    node.start_line = std::min(start, max_line);
    node.end_line = std::min(end, max_line);
    node.parent = parent;
    if (parent != kNoParent) {
      node.depth = nodes[parent].depth + 1;
      nodes[parent].children.push_back(static_cast<std::uint32_t>(nodes.size()));
    }
    nodes.push_back(std::move(node));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  };
  auto slice = [&](TSNode n) {
    const std::uint32_t b = ts_node_start_byte(n);
    const std::uint32_t e = ts_node_end_byte(n);
    return std::string(text.substr(b, e - b));
  };

  // Iterative pre-order walk; `stack` holds our index of the node whose
  // children are currently being visited.
  std::vector<std::uint32_t> stack;
  make_node(ts_tree_cursor_current_node(&cursor), ts_node_type(ts_tree_cursor_current_node(&cursor)),
            kNoParent);
  stack.push_back(0);
  bool descend = ts_tree_cursor_goto_first_child(&cursor);
  while (!stack.empty()) {
    if (descend) {
      TSNode n = ts_tree_cursor_current_node(&cursor);
      const std::string_view kind = ts_node_type(n);
      const std::uint32_t parent = stack.back();
      bool visit_children = false;
      if (ts_node_is_named(n)) {
        if (!is_comment(kind)) {
          const std::uint32_t self = make_node(n, kind, parent);
          if (is_identifier(kind) || is_literal(kind)) {
            if (!ts_node_is_missing(n)) nodes[self].attribute = slice(n);
          } else if (ts_node_child_count(n) > 0) {
            stack.push_back(self);
            visit_children = true;
          }
        }
      } else {
        const char* field = ts_tree_cursor_current_field_name(&cursor);
        const bool is_operator = (field != nullptr && std::strcmp(field, "operator") == 0) ||
                                 (nodes[parent].kind == "update_expression" &&
                                  (kind == "++" || kind == "--"));
        if (is_operator && !ts_node_is_missing(n)) {
          const std::uint32_t self = make_node(n, kOperatorKind, parent);
          nodes[self].attribute = std::string(kind);
        }
      }
      if (visit_children && ts_tree_cursor_goto_first_child(&cursor)) continue;
      if (visit_children) stack.pop_back();
    }
    // Advance to the next sibling, climbing up as needed.
    if (ts_tree_cursor_goto_next_sibling(&cursor)) {
      descend = true;
      continue;
    }
    descend = false;
    stack.pop_back();
    if (!stack.empty()) ts_tree_cursor_goto_parent(&cursor);
  }
  ts_tree_cursor_delete(&cursor);
  return SyntaxTree(std::move(nodes), line_count);
}

SyntaxTree parse_java(std::string_view text, std::string_view path) {
  thread_local JavaParser parser;
  return parser.parse(text, path);
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c < 0x20 || c == 0x7f) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    } else if (text.substr(i, 2) == "\xC2\xAB") {  // «
      out += "\\u00ab";
      ++i;
    } else if (text.substr(i, 2) == "\xC2\xBB") {  // »
      out += "\\u00bb";
      ++i;
    } else if (text.substr(i, 3) == "\xE2\x86\x92") {  // →
      out += "\\u2192";
      i += 2;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string node_label(const TreeNode& node, bool compressed) {
  std::string label(node.kind);
  if (!compressed && node.attribute) {
    label += "\xC2\xAB";
    label += escape_attribute(*node.attribute);
    label += "\xC2\xBB";
  }
  return label;
}

std::string dump_tree(const SyntaxTree& tree) {
  std::string out;
  for (const auto& n : tree.nodes()) {
    out.append(2 * n.depth, ' ');
    out += n.kind;
    out += " [" + std::to_string(n.start_line) + "-" + std::to_string(n.end_line) + "]";
    if (n.attribute) out += " \xC2\xAB" + escape_attribute(*n.attribute) + "\xC2\xBB";
    out += '\n';
  }
  return out;
}

}  // namespace stylodet
