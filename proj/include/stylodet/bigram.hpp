// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylodet/ast.hpp"
#include "stylodet/corpus.hpp"

namespace stylodet {

inline constexpr std::uint32_t kDefaultDepthCap = 8;

// A parent→child edge plus the capped nesting depth of the parent.
struct BigramKey {
  std::string parent_label;
  std::string child_label;
  std::uint32_t depth_tag = 0;

  // parent→child@depth
  std::string serialize() const;
  // Splits on the first "→" and the last "@". Throws InputError on malformed keys.
  static BigramKey parse(std::string_view text);

  friend bool operator==(const BigramKey&, const BigramKey&) = default;
};

// Frequencies keyed by serialized BigramKey. Iteration follows first-insertion
// order, which the feature index relies on for deterministic numbering.
class BigramCounts {
 public:
  using Entry = std::pair<std::string, std::uint64_t>;

  void add(const std::string& key, std::uint64_t n = 1);
  void merge(const BigramCounts& other);

  std::uint64_t count(const std::string& key) const;
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  // Provenance, checked when building feature indices.
  bool compressed = false;
  std::uint32_t depth_cap = kDefaultDepthCap;
  std::string grammar_id{kGrammarId};

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> position_;
  std::uint64_t total_ = 0;
};

struct NestedBigramOptions {
  bool compressed = false;
  std::uint32_t depth_cap = kDefaultDepthCap;  // 0 disables the depth tag
};

// Counts every parent→child edge whose child starts inside `bounds`. Edges
// are visited in tree pre-order.
BigramCounts extract_nested_bigrams(const SyntaxTree& tree, LineRange bounds,
                                    const NestedBigramOptions& options);

// Same as calling extract_nested_bigrams once per range, in a single tree
// pass. Ranges must be disjoint; edges outside every range are dropped.
std::vector<BigramCounts> extract_group_bigrams(const SyntaxTree& tree,
                                                std::span<const LineRange> ranges,
                                                const NestedBigramOptions& options);

inline constexpr std::array<std::string_view, 15> kStatementWords = {
    "if",  "else", "for",   "while", "do",      "switch", "case", "break",
    "continue", "return", "try", "catch", "finally", "throw", "new"};

// Whole-word occurrences of kStatementWords. Word characters are
// [A-Za-z0-9_$].
std::size_t count_statement_tokens(std::string_view text);

}  // namespace stylodet
