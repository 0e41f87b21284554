// SPDX-License-Identifier: Apache-2.0
#include "stylodet/pipeline.hpp"

#include <algorithm>

#include "stylodet/ast.hpp"
#include "stylodet/error.hpp"
#include "stylodet/parallel.hpp"

namespace stylodet {

std::vector<GroupRecord> extract_text(std::string_view text, std::string_view path, std::size_t group_size,
                                      const NestedBigramOptions& options) {
  auto groups = split_into_groups(text, group_size);
  if (groups.empty()) return {};
  const SyntaxTree tree = parse_java(text, path);
  std::vector<LineRange> ranges;
  ranges.reserve(groups.size());
  for (const auto& g : groups) ranges.push_back(g.lines);
  auto counts = extract_group_bigrams(tree, ranges, options);

  std::vector<GroupRecord> out(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    out[k].ref = GroupRef{std::string(path), 0, groups[k].lines, groups[k].remainder};
    out[k].text = std::move(groups[k].text);
    out[k].counts = std::move(counts[k]);
  }
  return out;
}

ExtractionResult extract_corpus(const CorpusManifest& manifest, const std::filesystem::path& root,
                                const ExtractOptions& options) {
  if (options.group_size == 0) throw InputError("group_size must be >= 1");
  const std::size_t n = manifest.entries.size();
  std::vector<std::vector<GroupRecord>> per_file(n);
  std::vector<std::string> errors(n);

  parallel_for(n, options.threads, [&](std::size_t i) {
    const FileEntry& entry = manifest.entries[i];
    try {
      const std::string text = read_text_file(root / entry.path);
      per_file[i] = extract_text(text, entry.path, options.group_size, options.bigrams);
      const int label = options.positive.is_positive(entry) ? 1 : 0;
      for (auto& g : per_file[i]) {
        g.ref.file_index = i;
        g.label = label;
      }
    } catch (const Error& ex) {
      errors[i] = entry.path + ": " + ex.what();
    }
  });

  ExtractionResult result;
  result.files = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      result.failures.push_back(std::move(errors[i]));
      continue;
    }
    for (auto& g : per_file[i]) result.groups.push_back(std::move(g));
  }
  return result;
}

Dataset build_dataset(const ExtractionResult& extraction, const FeatureConfig& config, std::size_t threads) {
  config.validate();
  FeatureIndexMap map(config.family, std::string(kGrammarId), config.s1, config.depth_cap);
  for (const auto& g : extraction.groups) extend_feature_index(map, g.counts, config);

  Dataset ds{config, std::move(map), FeatureMatrix{}, AssembleStats{}};
  ds.matrix.column_count = row_width(ds.index_map, config);
  ds.matrix.rows.resize(extraction.groups.size());
  std::vector<AssembleStats> stats(extraction.groups.size());
  parallel_for(extraction.groups.size(), threads, [&](std::size_t k) {
    const auto& g = extraction.groups[k];
    auto& row = ds.matrix.rows[k];
    row.group = g.ref;
    row.label = g.label;
    row.values = assemble_row(g.text, g.counts, ds.index_map, config, &stats[k]);
  });
  for (const auto& s : stats) {
    ds.stats.unknown_keys += s.unknown_keys;
    ds.stats.unknown_mass += s.unknown_mass;
  }
  return ds;
}

std::size_t auto_bin_width(std::size_t vocabulary, std::size_t max_columns) {
  if (max_columns == 0) throw InputError("max_columns must be >= 1");
  return std::max<std::size_t>(1, (vocabulary + max_columns - 1) / max_columns);
}

}  // namespace stylodet
