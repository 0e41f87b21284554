// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace stylodet {

enum class Origin { human, llm };

std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view text);

struct FileEntry {
  std::string path;  // relative to the corpus root, '/'-separated
  std::string author;
  Origin origin = Origin::human;
  std::optional<std::string> llm_model;
  bool formatted = false;
  std::size_t line_count = 0;

  friend bool operator==(const FileEntry&, const FileEntry&) = default;
};

struct CorpusManifest {
  static constexpr int kSchema = 1;

  std::string root;
  std::vector<FileEntry> entries;  // sorted by path
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static CorpusManifest from_json(const nlohmann::json& doc);

  // Writes the manifest with a fixed layout so unchanged trees produce
  // byte-identical files.
  void save(const std::filesystem::path& file) const;
  static CorpusManifest load(const std::filesystem::path& file);

  // Throws InputError on duplicate paths or llm entries without a model.
  void validate() const;
  const FileEntry* find(std::string_view path) const;
  // Inserts or replaces by path, keeping entries sorted.
  void upsert(FileEntry entry);
};

// Maps a path prefix to labels. `author` and `llm_model` may contain the
// placeholders {1} and {2}, which expand to the first and second path
// components following the prefix. When `formatted` is unset the file counts
// as formatted iff one of its directories is named "formatted".
struct LabelRule {
  std::string prefix;
  Origin origin = Origin::human;
  std::string author = "{1}";
  std::optional<std::string> llm_model;
  std::optional<bool> formatted;
};

struct LabelRules {
  std::vector<LabelRule> rules;

  // human/<author>/... -> human, llm/<model>/... -> llm (author = model).
  static LabelRules defaults();
  static LabelRules from_json(const nlohmann::json& doc);
  static LabelRules load(const std::filesystem::path& file);

  // First matching rule wins; nullopt when nothing matches.
  std::optional<FileEntry> label(std::string_view relative_path) const;
};

// Decides the binary class of a file: either origin based (llm is positive)
// or author-set based (listed authors are positive).
class PositiveClassRule {
 public:
  static PositiveClassRule origin();
  static PositiveClassRule authors(std::set<std::string> positive_authors);
  // "origin" or "authors:a,b,c"
  static PositiveClassRule parse(std::string_view text);

  bool is_positive(const FileEntry& entry) const;
  std::string to_string() const;

 private:
  bool by_origin_ = true;
  std::set<std::string> authors_;
};

std::size_t count_physical_lines(std::string_view text);

// Recursively collects *.java files under root. Unreadable or unlabeled files
// are skipped and reported in `warnings`. Throws InputError when root does
// not exist or no file survives ("empty corpus").
CorpusManifest ingest_corpus(const std::filesystem::path& root, const LabelRules& rules);

std::string read_text_file(const std::filesystem::path& file);
// Writes via a sibling temporary file and rename.
void write_text_file_atomic(const std::filesystem::path& file, std::string_view contents);

// 1-based inclusive line range. Empty when first > last.
struct LineRange {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const { return first > last; }
  bool contains(std::size_t line) const { return line >= first && line <= last; }
  std::size_t size() const { return empty() ? 0 : last - first + 1; }
  friend bool operator==(const LineRange&, const LineRange&) = default;
};

struct CodeGroup {
  std::size_t file_index = 0;  // position of the owning entry in the manifest
  LineRange lines;
  std::string text;
  std::size_t char_count = 0;  // bytes of `text`
  int label = 0;               // 1 = positive
  bool remainder = false;      // shorter trailing group
};

// Slices text into consecutive groups of group_size physical lines. Each
// group keeps the newline of every line it contains, so the concatenated
// group texts reproduce the file. A shorter trailing group is kept and
// flagged. Throws InputError when group_size == 0.
std::vector<CodeGroup> split_into_groups(std::string_view text, std::size_t group_size);

}  // namespace stylodet
