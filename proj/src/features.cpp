// SPDX-License-Identifier: Apache-2.0
#include "stylodet/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stylodet/error.hpp"

namespace stylodet {

std::string_view to_string(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::nb_f: return "NB-F";
    case FeatureFamily::cnb_f: return "CNB-F";
    case FeatureFamily::ewd_nb_f: return "EWD-NB-F";
  }
  return "?";
}

FeatureFamily parse_family(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "NB-F") return FeatureFamily::nb_f;
  if (upper == "CNB-F") return FeatureFamily::cnb_f;
  if (upper == "EWD-NB-F") return FeatureFamily::ewd_nb_f;
  throw InputError("unknown feature family '" + std::string(text) + "' (expected NB-F, CNB-F, EWD-NB-F)");
}

void FeatureConfig::validate() const {
  if (group_size == 0) throw InputError("group_size must be >= 1");
  if (bin_width == 0) throw InputError("bin width must be >= 1");
  if (family != FeatureFamily::ewd_nb_f && bin_width != 1) {
    throw InputError(std::string(to_string(family)) + " is not discretized; bin width must be 1");
  }
  if (s1 < reserved_slots || s2 < reserved_slots) {
    throw InputError("binning must start after the reserved lexical slots");
  }
}

nlohmann::json FeatureConfig::to_json() const {
  return {{"family", to_string(family)}, {"group_size", group_size}, {"bin_width", bin_width},
          {"reserved_slots", reserved_slots}, {"s1", s1}, {"s2", s2}, {"depth_cap", depth_cap}};
}

FeatureConfig FeatureConfig::from_json(const nlohmann::json& doc) {
  FeatureConfig c;
  try {
    c.family = parse_family(doc.at("family").get<std::string>());
    c.group_size = doc.at("group_size").get<std::size_t>();
    c.bin_width = doc.at("bin_width").get<std::size_t>();
    c.reserved_slots = doc.value("reserved_slots", kReservedSlots);
    c.s1 = doc.value("s1", kReservedSlots);
    c.s2 = doc.value("s2", kReservedSlots);
    c.depth_cap = doc.value("depth_cap", kDefaultDepthCap);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("feature config: ") + ex.what());
  }
  c.validate();
  return c;
}

// --- lexical features -----------------------------------------------------

LexicalCounts count_lexical(std::string_view text) {
  LexicalCounts k;
  k.chars = text.size();
  k.lines = count_physical_lines(text);

  std::size_t line_len = 0;
  auto end_line = [&] {
    if (line_len == 0) ++k.empty_lines;
    k.line_chars += line_len;
    line_len = 0;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      end_line();
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    ++line_len;
    if (c == ' ') ++k.spaces;
    if (c == '\t') ++k.tabs;
    if (c == '_') ++k.underscores;
  }
  if (!text.empty() && text.back() != '\n') end_line();

  k.statement_words = count_statement_tokens(text);

  // Comment bodies; string, char and text-block literals are skipped so that
  // "//" inside them is not mistaken for a comment.
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (text.compare(i, 3, "\"\"\"") == 0) {
      const std::size_t close = text.find("\"\"\"", i + 3);
      i = close == std::string_view::npos ? n : close + 3;
    } else if (text[i] == '"' || text[i] == '\'') {
      const char quote = text[i++];
      while (i < n && text[i] != quote && text[i] != '\n') i += text[i] == '\\' ? 2 : 1;
      ++i;
    } else if (text.compare(i, 2, "//") == 0) {
      std::size_t end = text.find('\n', i);
      if (end == std::string_view::npos) end = n;
      std::size_t body_end = end;
      if (body_end > i + 2 && text[body_end - 1] == '\r') --body_end;
      ++k.comments;
      k.comment_chars += body_end - (i + 2);
      i = end;
    } else if (text.compare(i, 2, "/*") == 0) {
      const std::size_t close = text.find("*/", i + 2);
      const std::size_t body_end = close == std::string_view::npos ? n : close;
      ++k.comments;
      k.comment_chars += body_end - (i + 2);
      i = close == std::string_view::npos ? n : close + 2;
    } else {
      ++i;
    }
  }
  return k;
}

std::array<double, kReservedSlots> lexical_features(std::string_view text) {
  std::array<double, kReservedSlots> slots{};
  if (text.empty()) return slots;
  const LexicalCounts k = count_lexical(text);
  const auto c = static_cast<double>(k.chars);
  const double mean_line = k.lines ? static_cast<double>(k.line_chars) / static_cast<double>(k.lines) : 0.0;
  const double mean_comment =
      k.comments ? static_cast<double>(k.comment_chars) / static_cast<double>(k.comments) : 0.0;
  slots[kMeanLineLength] = mean_line / c;
  slots[kMeanCommentLength] = mean_comment / c;
  slots[kSpaces] = static_cast<double>(k.spaces) / c;
  slots[kStatementWordCount] = static_cast<double>(k.statement_words) / c;
  slots[kTabs] = static_cast<double>(k.tabs) / c;
  slots[kUnderscores] = static_cast<double>(k.underscores) / c;
  slots[kEmptyLines] = static_cast<double>(k.empty_lines) / c;
  return slots;
}

// --- feature index --------------------------------------------------------

FeatureIndexMap::FeatureIndexMap(FeatureFamily family, std::string grammar_id, std::size_t first_index,
                                 std::uint32_t depth_cap)
    : family_(family), grammar_id_(std::move(grammar_id)), first_index_(first_index), depth_cap_(depth_cap) {}

std::size_t FeatureIndexMap::add(const std::string& key) {
  auto [it, inserted] = index_.try_emplace(key, first_index_ + keys_.size());
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<std::size_t> FeatureIndexMap::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json FeatureIndexMap::to_json(const FeatureConfig& config) const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    entries.push_back({{"key", keys_[k]}, {"index", first_index_ + k}});
  }
  return {{"schema", kSchema},
          {"family", to_string(family_)},
          {"grammar_id", grammar_id_},
          {"depth_cap", depth_cap_},
          {"bin", {{"b", config.bin_width}, {"s1", config.s1}, {"s2", config.s2}}},
          {"first_index", first_index_},
          {"next_index", next_index()},
          {"entries", std::move(entries)}};
}

FeatureIndexMap FeatureIndexMap::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema", 0) != kSchema) {
    throw ArtifactMismatch("index map: unsupported or missing schema version");
  }
  try {
    FeatureIndexMap map(parse_family(doc.at("family").get<std::string>()),
                        doc.at("grammar_id").get<std::string>(), doc.at("first_index").get<std::size_t>(),
                        doc.at("depth_cap").get<std::uint32_t>());
    for (const auto& item : doc.at("entries")) {
      const std::size_t assigned = map.add(item.at("key").get<std::string>());
      if (assigned != item.at("index").get<std::size_t>()) {
        throw ArtifactMismatch("index map: indices are not dense and ordered");
      }
    }
    if (map.next_index() != doc.at("next_index").get<std::size_t>()) {
      throw ArtifactMismatch("index map: next_index disagrees with entries");
    }
    return map;
  } catch (const nlohmann::json::exception& ex) {
    throw ArtifactMismatch(std::string("index map: ") + ex.what());
  }
}

void extend_feature_index(FeatureIndexMap& map, const BigramCounts& counts, const FeatureConfig& config) {
  if (counts.compressed != config.compressed() || map.family() != config.family ||
      counts.depth_cap != map.depth_cap() || counts.grammar_id != map.grammar_id()) {
    throw ArtifactMismatch("index map family mismatch");
  }
  for (const auto& [key, n] : counts.entries()) map.add(key);
}

FeatureIndexMap build_feature_index(std::span<const BigramCounts> corpus, const FeatureConfig& config) {
  config.validate();
  const std::string grammar = corpus.empty() ? std::string(kGrammarId) : corpus.front().grammar_id;
  FeatureIndexMap map(config.family, grammar, config.s1, config.depth_cap);
  for (const auto& counts : corpus) extend_feature_index(map, counts, config);
  return map;
}

std::size_t bin_index(std::size_t i, const FeatureConfig& config) {
  if (i < config.s1) throw InputError("index below binning start");
  return (i - config.s1) / config.bin_width + config.s2;
}

std::size_t row_width(const FeatureIndexMap& map, const FeatureConfig& config) {
  const std::size_t span = map.next_index() - config.s1;
  return config.s2 + (span + config.bin_width - 1) / config.bin_width;
}

std::vector<std::uint64_t> assemble_bin_counts(const BigramCounts& counts, const FeatureIndexMap& map,
                                               const FeatureConfig& config, AssembleStats* stats) {
  if (map.family() != config.family) throw ArtifactMismatch("index map family mismatch");
  std::vector<std::uint64_t> bins(row_width(map, config) - config.s2, 0);
  for (const auto& [key, n] : counts.entries()) {
    const auto index = map.find(key);
    if (!index) {
      if (stats) {
        ++stats->unknown_keys;
        stats->unknown_mass += n;
      }
      continue;
    }
    bins[bin_index(*index, config) - config.s2] += n;
  }
  return bins;
}

std::vector<double> assemble_row(std::string_view group_text, const BigramCounts& counts,
                                 const FeatureIndexMap& map, const FeatureConfig& config, AssembleStats* stats) {
  const auto bins = assemble_bin_counts(counts, map, config, stats);
  std::vector<double> row(config.s2 + bins.size(), 0.0);
  const auto lexical = lexical_features(group_text);
  std::copy(lexical.begin(), lexical.end(), row.begin());
  if (group_text.empty()) return row;
  const auto c = static_cast<double>(group_text.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k] != 0) row[config.s2 + k] = static_cast<double>(bins[k]) / c;
  }
  return row;
}

// --- normalization --------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("percentile rank must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double NormalizationStats::apply(std::size_t column, double x) const {
  const double lo = p5[column];
  const double hi = p95[column];
  if (!(hi > lo)) return 0.0;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

void NormalizationStats::apply(std::span<double> row) const {
  if (row.size() != p5.size()) throw ArtifactMismatch("feature shape mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = apply(j, row[j]);
}

nlohmann::json NormalizationStats::to_json() const { return {{"p5", p5}, {"p95", p95}}; }

NormalizationStats NormalizationStats::from_json(const nlohmann::json& doc) {
  NormalizationStats s;
  try {
    s.p5 = doc.at("p5").get<std::vector<double>>();
    s.p95 = doc.at("p95").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ArtifactMismatch(std::string("normalization stats: ") + ex.what());
  }
  if (s.p5.size() != s.p95.size()) throw ArtifactMismatch("normalization stats: length mismatch");
  return s;
}

std::vector<int> FeatureMatrix::labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::vector<std::size_t> FeatureMatrix::file_ids() const {
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.group.file_index);
  return out;
}

NormalizationStats fit_winsorizer(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows) {
  if (fit_rows.empty()) throw InputError("winsorize: no rows to fit on");
  NormalizationStats stats;
  stats.p5.resize(matrix.column_count);
  stats.p95.resize(matrix.column_count);
  std::vector<double> column(fit_rows.size());
  for (std::size_t j = 0; j < matrix.column_count; ++j) {
    for (std::size_t k = 0; k < fit_rows.size(); ++k) column[k] = matrix.rows.at(fit_rows[k]).values[j];
    std::sort(column.begin(), column.end());
    stats.p5[j] = percentile(column, 0.05);
    stats.p95[j] = percentile(column, 0.95);
  }
  return stats;
}

FeatureMatrix winsorize(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows) {
  FeatureMatrix out = matrix;
  NormalizationStats stats = fit_winsorizer(matrix, fit_rows);
  for (auto& row : out.rows) stats.apply(row.values);
  out.normalization = std::move(stats);
  return out;
}

// --- persistence ----------------------------------------------------------

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& csv_path,
                 const std::filesystem::path& sidecar_path, const nlohmann::json& provenance) {
  std::string csv;
  for (std::size_t j = 0; j < matrix.column_count; ++j) csv += "col_" + std::to_string(j) + ",";
  csv += "label\n";
  for (const auto& row : matrix.rows) {
    if (row.values.size() != matrix.column_count) throw Error("matrix rows have inconsistent widths");
    for (double v : row.values) {
      csv += format_double(v);
      csv += ',';
    }
    csv += std::to_string(row.label);
    csv += '\n';
  }
  write_text_file_atomic(csv_path, csv);

  nlohmann::json groups = nlohmann::json::array();
  for (const auto& row : matrix.rows) {
    groups.push_back({row.group.path, row.group.file_index, row.group.lines.first, row.group.lines.last,
                      row.group.remainder});
  }
  nlohmann::json sidecar{{"schema", 1},
                         {"column_count", matrix.column_count},
                         {"row_count", matrix.rows.size()},
                         {"provenance", provenance},
                         {"groups_columns", {"path", "file_index", "start_line", "end_line", "remainder"}},
                         {"groups", std::move(groups)}};
  if (matrix.normalization) sidecar["normalization"] = matrix.normalization->to_json();
  write_text_file_atomic(sidecar_path, sidecar.dump(1) + "\n");
}

FeatureMatrix load_matrix(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path) {
  nlohmann::json sidecar = nlohmann::json::parse(read_text_file(sidecar_path), nullptr, false);
  if (sidecar.is_discarded() || sidecar.value("schema", 0) != 1) {
    throw ArtifactMismatch("matrix sidecar: invalid or unsupported " + sidecar_path.string());
  }
  FeatureMatrix m;
  m.column_count = sidecar.at("column_count").get<std::size_t>();
  const auto& groups = sidecar.at("groups");
  if (sidecar.contains("normalization")) m.normalization = NormalizationStats::from_json(sidecar["normalization"]);

  const std::string csv = read_text_file(csv_path);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  const std::size_t header_fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (header_fields != m.column_count + 1) throw ArtifactMismatch("matrix CSV header disagrees with sidecar");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    FeatureMatrix::Row row;
    row.values.reserve(m.column_count);
    const char* p = line.c_str();
    for (std::size_t j = 0; j < m.column_count; ++j) {
      char* end = nullptr;
      row.values.push_back(std::strtod(p, &end));
      if (end == p || *end != ',') throw ArtifactMismatch("matrix CSV: malformed row");
      p = end + 1;
    }
    row.label = std::atoi(p);
    const std::size_t r = m.rows.size();
    if (r >= groups.size()) throw ArtifactMismatch("matrix CSV has more rows than the sidecar");
    const auto& g = groups[r];
    row.group.path = g[0].get<std::string>();
    row.group.file_index = g[1].get<std::size_t>();
    row.group.lines = LineRange{g[2].get<std::size_t>(), g[3].get<std::size_t>()};
    row.group.remainder = g[4].get<bool>();
    m.rows.push_back(std::move(row));
  }
  if (m.rows.size() != groups.size()) throw ArtifactMismatch("matrix CSV row count disagrees with sidecar");
  return m;
}

}  // namespace stylodet
