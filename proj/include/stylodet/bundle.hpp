// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylodet/corpus.hpp"
#include "stylodet/features.hpp"
#include "stylodet/models.hpp"

namespace stylodet {

// Everything needed to score new code: the model plus the index map and
// normalization stats it was trained against. Stored as one JSON document
// with a manifest section carrying the schema version and grammar id.
struct ModelBundle {
  static constexpr int kSchema = 1;

  TrainedModel model;
  FeatureIndexMap index_map{FeatureFamily::ewd_nb_f, std::string(kGrammarId)};
  NormalizationStats normalization;
  FeatureConfig config;
  std::string grammar_id{kGrammarId};
  nlohmann::json run_config = nlohmann::json::object();

  // Binds model references to the index map and stats digests.
  static ModelBundle assemble(TrainedModel model, FeatureIndexMap index_map, NormalizationStats normalization,
                              FeatureConfig config, nlohmann::json run_config);

  // Throws ArtifactMismatch when the parts do not belong together or were
  // built with another grammar.
  void validate() const;

  nlohmann::json to_json() const;
  static ModelBundle from_json(const nlohmann::json& doc);
  void save(const std::filesystem::path& file) const;
  static ModelBundle load(const std::filesystem::path& file);
};

// Hex FNV-1a 64 digest of a canonical JSON dump.
std::string json_digest(const nlohmann::json& doc);

struct GroupScore {
  std::string path;
  LineRange lines;
  double score = 0.0;
  bool positive = false;
};

struct DetectResult {
  std::vector<GroupScore> groups;
  AssembleStats stats;  // unseen bigrams dropped at inference
};

// Splits the source with the bundle's group size and scores each group.
DetectResult detect(const ModelBundle& bundle, std::string_view text, std::string_view path);

}  // namespace stylodet
