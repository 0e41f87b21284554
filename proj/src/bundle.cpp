// SPDX-License-Identifier: Apache-2.0
#include "stylodet/bundle.hpp"

#include <cstdio>

#include "stylodet/ast.hpp"
#include "stylodet/error.hpp"
#include "stylodet/pipeline.hpp"

namespace stylodet {

std::string json_digest(const nlohmann::json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelBundle ModelBundle::assemble(TrainedModel model, FeatureIndexMap index_map, NormalizationStats normalization,
                                  FeatureConfig config, nlohmann::json run_config) {
  ModelBundle b;
  b.grammar_id = index_map.grammar_id();
  model.index_map_ref = json_digest(index_map.to_json(config));
  model.normalization_stats_ref = json_digest(normalization.to_json());
  b.model = std::move(model);
  b.index_map = std::move(index_map);
  b.normalization = std::move(normalization);
  b.config = config;
  b.run_config = std::move(run_config);
  b.validate();
  return b;
}

void ModelBundle::validate() const {
  if (grammar_id != kGrammarId || index_map.grammar_id() != grammar_id) {
    throw ArtifactMismatch("bundle grammar '" + grammar_id + "' does not match parser grammar '" +
                           std::string(kGrammarId) + "'");
  }
  if (index_map.family() != config.family) throw ArtifactMismatch("index map family mismatch");
  const std::size_t width = row_width(index_map, config);
  if (model.feature_count != width || normalization.p5.size() != width) {
    throw ArtifactMismatch("feature shape mismatch: model expects " + std::to_string(model.feature_count) +
                           " columns, index map yields " + std::to_string(width));
  }
  if (model.index_map_ref != json_digest(index_map.to_json(config)) ||
      model.normalization_stats_ref != json_digest(normalization.to_json())) {
    throw ArtifactMismatch("model is not bound to this index map and normalization stats");
  }
}

nlohmann::json ModelBundle::to_json() const {
  return {{"manifest", {{"schema", kSchema}, {"grammar_id", grammar_id}, {"kind", "stylodet-model-bundle"}}},
          {"config", config.to_json()},
          {"run_config", run_config},
          {"index_map", index_map.to_json(config)},
          {"normalization", normalization.to_json()},
          {"model", model.to_json()}};
}

ModelBundle ModelBundle::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("manifest")) throw ArtifactMismatch("not a model bundle");
  const auto& manifest = doc["manifest"];
  if (manifest.value("schema", 0) != kSchema) throw ArtifactMismatch("bundle: unsupported schema version");
  ModelBundle b;
  try {
    b.grammar_id = manifest.at("grammar_id").get<std::string>();
    b.config = FeatureConfig::from_json(doc.at("config"));
    b.run_config = doc.value("run_config", nlohmann::json::object());
    b.index_map = FeatureIndexMap::from_json(doc.at("index_map"));
    b.normalization = NormalizationStats::from_json(doc.at("normalization"));
    b.model = TrainedModel::from_json(doc.at("model"));
  } catch (const nlohmann::json::exception& ex) {
    throw ArtifactMismatch(std::string("bundle: ") + ex.what());
  } catch (const InputError& ex) {
    throw ArtifactMismatch(std::string("bundle: ") + ex.what());
  }
  b.validate();
  return b;
}

void ModelBundle::save(const std::filesystem::path& file) const {
  write_text_file_atomic(file, to_json().dump() + "\n");
}

ModelBundle ModelBundle::load(const std::filesystem::path& file) {
  nlohmann::json doc = nlohmann::json::parse(read_text_file(file), nullptr, false);
  if (doc.is_discarded()) throw ArtifactMismatch("bundle: invalid JSON in " + file.string());
  return from_json(doc);
}

DetectResult detect(const ModelBundle& bundle, std::string_view text, std::string_view path) {
  DetectResult result;
  const auto groups = extract_text(text, path, bundle.config.group_size, bundle.config.bigram_options());
  for (const auto& g : groups) {
    auto row = assemble_row(g.text, g.counts, bundle.index_map, bundle.config, &result.stats);
    bundle.normalization.apply(row);
    const double score = bundle.model.predict_score(row);
    result.groups.push_back(GroupScore{std::string(path), g.ref.lines, score, TrainedModel::predict_class(score)});
  }
  return result;
}

}  // namespace stylodet
