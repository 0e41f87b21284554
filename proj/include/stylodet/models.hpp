// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylodet/features.hpp"

namespace stylodet {

enum class ModelKind { random_forest, gradient_boosted_trees };

std::string_view to_string(ModelKind kind);
// Accepts rf / random_forest and gbt / gradient_boosted_trees.
ModelKind parse_model_kind(std::string_view text);

inline constexpr std::uint64_t kDefaultSeed = 42;

struct ModelSpec {
  ModelKind kind = ModelKind::random_forest;
  nlohmann::json hyperparameters;  // key -> value
  std::uint64_t seed = kDefaultSeed;

  // random_forest: 100 trees, gini, min_samples_split 2, min_samples_leaf 1,
  // sqrt(features) per split, bootstrap. gradient_boosted_trees: 100 rounds,
  // learning rate 0.3, max depth 6, uniform row sampling, depthwise growth.
  static ModelSpec defaults(ModelKind kind, std::uint64_t seed = kDefaultSeed);

  double number(const std::string& name) const;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& doc);
};

// Binary decision tree; samples with x[feature] <= threshold go left.
struct DecisionTree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // forest: positive fraction; boosting: leaf weight
  };

  std::vector<Node> nodes;  // nodes[0] is the root

  double evaluate(std::span<const double> row) const;
  std::size_t depth() const;

  // Leaves are [value]; internal nodes are [feature, threshold, left, right].
  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& doc);
};

class TrainedModel {
 public:
  static constexpr int kSchema = 1;

  ModelSpec spec;
  std::size_t feature_count = 0;
  std::vector<DecisionTree> trees;
  std::string index_map_ref;
  std::string normalization_stats_ref;

  // Forest: fraction of trees voting positive (leaf fraction > 0.5).
  // Boosting: logistic of the summed leaf weights. Throws
  // ArtifactMismatch("feature shape mismatch") on width mismatch.
  double predict_score(std::span<const double> row) const;
  static bool predict_class(double score) { return score > 0.5; }

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& doc);
};

// Trains on matrix rows listed in train_rows. Rows are canonicalised by index
// first, so the order of train_rows does not matter. Throws
// InputError("degenerate labels") unless both classes have >= 2 rows.
TrainedModel train(const ModelSpec& spec, const FeatureMatrix& matrix, std::span<const std::size_t> train_rows,
                   std::size_t threads = 1);

}  // namespace stylodet
