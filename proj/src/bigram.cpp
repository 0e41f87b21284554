// SPDX-License-Identifier: Apache-2.0
#include "stylodet/bigram.hpp"

#include <algorithm>
#include <charconv>

#include "stylodet/error.hpp"

namespace stylodet {

namespace {
constexpr std::string_view kArrow = "\xE2\x86\x92";

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '$';
}
}  // namespace

std::string BigramKey::serialize() const {
  std::string out;
  out.reserve(parent_label.size() + child_label.size() + 8);
  out += parent_label;
  out += kArrow;
  out += child_label;
  out += '@';
  out += std::to_string(depth_tag);
  return out;
}

BigramKey BigramKey::parse(std::string_view text) {
  const std::size_t arrow = text.find(kArrow);
  const std::size_t at = text.rfind('@');
  if (arrow == std::string_view::npos || at == std::string_view::npos || at < arrow + kArrow.size()) {
    throw InputError("malformed bigram key: " + std::string(text));
  }
  BigramKey key;
  key.parent_label = std::string(text.substr(0, arrow));
  key.child_label = std::string(text.substr(arrow + kArrow.size(), at - arrow - kArrow.size()));
  const std::string_view digits = text.substr(at + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), key.depth_tag);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || key.parent_label.empty() ||
      key.child_label.empty()) {
    throw InputError("malformed bigram key: " + std::string(text));
  }
  return key;
}

void BigramCounts::add(const std::string& key, std::uint64_t n) {
  if (n == 0) return;
  auto [it, inserted] = position_.try_emplace(key, entries_.size());
  if (inserted) {
    entries_.emplace_back(key, n);
  } else {
    entries_[it->second].second += n;
  }
  total_ += n;
}

void BigramCounts::merge(const BigramCounts& other) {
  for (const auto& [key, n] : other.entries_) add(key, n);
}

std::uint64_t BigramCounts::count(const std::string& key) const {
  auto it = position_.find(key);
  return it == position_.end() ? 0 : entries_[it->second].second;
}

std::vector<BigramCounts> extract_group_bigrams(const SyntaxTree& tree, std::span<const LineRange> ranges,
                                                const NestedBigramOptions& options) {
  std::vector<BigramCounts> out(ranges.size());
  for (auto& counts : out) {
    counts.compressed = options.compressed;
    counts.depth_cap = options.depth_cap;
  }
  if (ranges.empty() || tree.size() < 2) return out;

  // Groups are usually consecutive; sort range indices by first line so each
  // child is routed with a binary search.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (!ranges[i].empty()) order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ranges[a].first < ranges[b].first; });

  std::vector<std::string> labels(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    labels[i] = node_label(tree.node(static_cast<std::uint32_t>(i)), options.compressed);
  }

  for (std::size_t i = 1; i < tree.size(); ++i) {
    const TreeNode& child = tree.node(static_cast<std::uint32_t>(i));
    if (child.parent == kNoParent) continue;
    auto it = std::upper_bound(order.begin(), order.end(), child.start_line,
                               [&](std::size_t line, std::size_t r) { return line < ranges[r].first; });
    if (it == order.begin()) continue;
    const std::size_t r = *std::prev(it);
    if (!ranges[r].contains(child.start_line)) continue;
    const TreeNode& parent = tree.node(child.parent);
    BigramKey key{labels[child.parent], labels[i], std::min(parent.depth, options.depth_cap)};
    out[r].add(key.serialize());
  }
  return out;
}

BigramCounts extract_nested_bigrams(const SyntaxTree& tree, LineRange bounds,
                                    const NestedBigramOptions& options) {
  return std::move(extract_group_bigrams(tree, std::span(&bounds, 1), options).front());
}

std::size_t count_statement_tokens(std::string_view text) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    const std::string_view word = text.substr(i, j - i);
    if (std::find(kStatementWords.begin(), kStatementWords.end(), word) != kStatementWords.end()) ++count;
    i = j;
  }
  return count;
}

}  // namespace stylodet
