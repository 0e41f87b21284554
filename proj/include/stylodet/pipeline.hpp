// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "stylodet/bigram.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/features.hpp"

namespace stylodet {

// One code group with its syntactic counts, ready for dictionary and row
// assembly.
struct GroupRecord {
  GroupRef ref;
  std::string text;
  int label = 0;
  BigramCounts counts;
};

struct ExtractOptions {
  std::size_t group_size = 30;
  NestedBigramOptions bigrams;
  PositiveClassRule positive = PositiveClassRule::origin();
  std::size_t threads = 1;
};

struct ExtractionResult {
  std::vector<GroupRecord> groups;  // manifest order, then start line
  std::vector<std::string> failures;  // unreadable or unparseable files
  std::size_t files = 0;
};

// Reads, parses and splits every manifest entry (files resolved against
// root). Failing files are skipped and listed in `failures`.
ExtractionResult extract_corpus(const CorpusManifest& manifest, const std::filesystem::path& root,
                                const ExtractOptions& options);

// Groups and counts for one in-memory source text.
std::vector<GroupRecord> extract_text(std::string_view text, std::string_view path, std::size_t group_size,
                                      const NestedBigramOptions& options);

struct Dataset {
  FeatureConfig config;
  FeatureIndexMap index_map;
  FeatureMatrix matrix;
  AssembleStats stats;
};

// Dictionary pass over the groups in order, then one assembled row per group.
Dataset build_dataset(const ExtractionResult& extraction, const FeatureConfig& config, std::size_t threads = 1);

// Smallest bin width that keeps the syntactic block within max_columns.
std::size_t auto_bin_width(std::size_t vocabulary, std::size_t max_columns);

}  // namespace stylodet
