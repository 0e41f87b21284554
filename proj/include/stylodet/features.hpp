// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylodet/bigram.hpp"
#include "stylodet/corpus.hpp"

namespace stylodet {

enum class FeatureFamily { nb_f, cnb_f, ewd_nb_f };

std::string_view to_string(FeatureFamily family);
// Accepts "NB-F", "CNB-F", "EWD-NB-F" (case-insensitive).
FeatureFamily parse_family(std::string_view text);

inline constexpr std::size_t kReservedSlots = 10;

struct FeatureConfig {
  FeatureFamily family = FeatureFamily::ewd_nb_f;
  std::size_t group_size = 30;
  std::size_t bin_width = 1;  // b; only EWD-NB-F may use b > 1
  std::size_t reserved_slots = kReservedSlots;
  std::size_t s1 = kReservedSlots;  // first binned index in the dictionary
  std::size_t s2 = kReservedSlots;  // first binned column in the matrix
  std::uint32_t depth_cap = kDefaultDepthCap;

  bool compressed() const { return family == FeatureFamily::cnb_f; }
  NestedBigramOptions bigram_options() const { return {compressed(), depth_cap}; }
  void validate() const;

  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& doc);
};

// Slot layout of the reserved non-syntactic block; the last three are padding.
enum LexicalSlot : std::size_t {
  kMeanLineLength = 0,
  kMeanCommentLength = 1,
  kSpaces = 2,
  kStatementWordCount = 3,
  kTabs = 4,
  kUnderscores = 5,
  kEmptyLines = 6,
};

// Raw counts behind lexical_features, before division by c.
struct LexicalCounts {
  std::size_t chars = 0;
  std::size_t lines = 0;
  std::size_t line_chars = 0;  // excluding newline characters
  std::size_t comments = 0;
  std::size_t comment_chars = 0;  // bodies, delimiters excluded
  std::size_t spaces = 0;
  std::size_t statement_words = 0;
  std::size_t tabs = 0;
  std::size_t underscores = 0;
  std::size_t empty_lines = 0;
};

LexicalCounts count_lexical(std::string_view text);

// The 10 reserved slots for one code group, each divided by the group's
// character count c. All zeros when c == 0.
std::array<double, kReservedSlots> lexical_features(std::string_view text);

// Dictionary from serialized feature key to dense index >= 10, assigned in
// first-encounter order.
class FeatureIndexMap {
 public:
  static constexpr int kSchema = 1;

  FeatureIndexMap(FeatureFamily family, std::string grammar_id, std::size_t first_index = kReservedSlots,
                  std::uint32_t depth_cap = kDefaultDepthCap);

  // Returns the index for key, assigning the next free one if new.
  std::size_t add(const std::string& key);
  std::optional<std::size_t> find(const std::string& key) const;

  std::size_t first_index() const { return first_index_; }
  std::size_t next_index() const { return first_index_ + keys_.size(); }
  std::size_t vocabulary_size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }  // by index
  FeatureFamily family() const { return family_; }
  const std::string& grammar_id() const { return grammar_id_; }
  std::uint32_t depth_cap() const { return depth_cap_; }

  // Bin parameters are carried into the persisted form for provenance.
  nlohmann::json to_json(const FeatureConfig& config) const;
  static FeatureIndexMap from_json(const nlohmann::json& doc);

  friend bool operator==(const FeatureIndexMap& a, const FeatureIndexMap& b) {
    return a.family_ == b.family_ && a.grammar_id_ == b.grammar_id_ && a.first_index_ == b.first_index_ &&
           a.depth_cap_ == b.depth_cap_ && a.keys_ == b.keys_;
  }

 private:
  FeatureFamily family_;
  std::string grammar_id_;
  std::size_t first_index_;
  std::uint32_t depth_cap_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Folds the counts in the given order (callers traverse by path, then start
// line). Throws ArtifactMismatch("index map family mismatch") when counts
// disagree with the config's family, depth cap, or each other's grammar.
FeatureIndexMap build_feature_index(std::span<const BigramCounts> corpus, const FeatureConfig& config);
// Extends an existing map; same checks as above.
void extend_feature_index(FeatureIndexMap& map, const BigramCounts& counts, const FeatureConfig& config);

// floor((i - s1) / b) + s2. Throws InputError("index below binning start").
std::size_t bin_index(std::size_t i, const FeatureConfig& config);

// s2 + ceil((next_index - s1) / b)
std::size_t row_width(const FeatureIndexMap& map, const FeatureConfig& config);

struct AssembleStats {
  std::size_t unknown_keys = 0;
  std::uint64_t unknown_mass = 0;
};

// Integer frequency mass per syntactic column (length row_width - s2).
// Keys missing from the map are dropped and counted in `stats`.
std::vector<std::uint64_t> assemble_bin_counts(const BigramCounts& counts, const FeatureIndexMap& map,
                                               const FeatureConfig& config, AssembleStats* stats = nullptr);

// Lexical slots followed by each bin's summed frequency divided by c.
std::vector<double> assemble_row(std::string_view group_text, const BigramCounts& counts,
                                 const FeatureIndexMap& map, const FeatureConfig& config,
                                 AssembleStats* stats = nullptr);

// Linear interpolation between order statistics (q in [0, 1]).
double percentile(std::vector<double> values, double q);

struct NormalizationStats {
  std::vector<double> p5;
  std::vector<double> p95;

  double apply(std::size_t column, double x) const;
  void apply(std::span<double> row) const;

  nlohmann::json to_json() const;
  static NormalizationStats from_json(const nlohmann::json& doc);
  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

struct GroupRef {
  std::string path;
  std::size_t file_index = 0;
  LineRange lines;
  bool remainder = false;
};

struct FeatureMatrix {
  struct Row {
    GroupRef group;
    int label = 0;
    std::vector<double> values;
  };

  std::size_t column_count = 0;
  std::vector<Row> rows;
  std::optional<NormalizationStats> normalization;

  std::vector<int> labels() const;
  std::vector<std::size_t> file_ids() const;
};

// Per-column 5th/95th percentiles over fit_rows. Throws InputError when
// fit_rows is empty.
NormalizationStats fit_winsorizer(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows);

// Returns a copy with every cell mapped into [0, 1]: x <= p5 -> 0,
// x >= p95 -> 1, otherwise (x - p5) / (p95 - p5). Columns with p95 == p5 map
// to 0. The fitted stats are attached to the result.
FeatureMatrix winsorize(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows);

// CSV (header col_0..col_{n-1},label; 17 significant digits) plus a JSON
// sidecar with group references, config and provenance.
void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& csv_path,
                 const std::filesystem::path& sidecar_path, const nlohmann::json& provenance);
FeatureMatrix load_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path);

std::string format_double(double value);

}  // namespace stylodet
