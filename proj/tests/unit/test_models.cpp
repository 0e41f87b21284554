// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "stylodet/error.hpp"
#include "stylodet/eval.hpp"
#include "stylodet/models.hpp"
#include "stylodet/rng.hpp"

using namespace stylodet;

namespace {

FeatureMatrix clusters(std::size_t rows, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  FeatureMatrix m;
  m.column_count = features;
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(r % 2);
    FeatureMatrix::Row row{{"f", r, {1, 1}, false}, label, {}};
    for (std::size_t f = 0; f < features; ++f) row.values.push_back(label + noise(rng));
    m.rows.push_back(std::move(row));
  }
  return m;
}

FeatureMatrix random_labels(std::size_t rows, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  FeatureMatrix m;
  m.column_count = features;
  for (std::size_t r = 0; r < rows; ++r) {
    FeatureMatrix::Row row{{"f", r, {1, 1}, false}, static_cast<int>(rng() % 2), {}};
    for (std::size_t f = 0; f < features; ++f) row.values.push_back(u(rng));
    m.rows.push_back(std::move(row));
  }
  return m;
}

std::vector<std::size_t> all_rows(const FeatureMatrix& m) {
  std::vector<std::size_t> idx(m.rows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

class ModelKinds : public ::testing::TestWithParam<ModelKind> {};

}  // namespace

TEST(ModelSpec, DefaultsAndParsing) {
  const auto rf = ModelSpec::defaults(ModelKind::random_forest);
  EXPECT_EQ(rf.seed, 42u);
  EXPECT_EQ(rf.number("n_estimators"), 100);
  EXPECT_EQ(rf.hyperparameters.at("criterion"), "gini");
  EXPECT_EQ(rf.number("min_samples_split"), 2);
  EXPECT_EQ(rf.number("min_samples_leaf"), 1);
  const auto gbt = ModelSpec::defaults(ModelKind::gradient_boosted_trees);
  EXPECT_EQ(gbt.number("n_estimators"), 100);
  EXPECT_DOUBLE_EQ(gbt.number("learning_rate"), 0.3);
  EXPECT_EQ(gbt.number("max_depth"), 6);
  EXPECT_EQ(gbt.hyperparameters.at("grow_policy"), "depthwise");
  EXPECT_EQ(parse_model_kind("rf"), ModelKind::random_forest);
  EXPECT_EQ(parse_model_kind("gradient_boosted_trees"), ModelKind::gradient_boosted_trees);
  EXPECT_THROW(parse_model_kind("svm"), InputError);
  EXPECT_EQ(ModelSpec::from_json(gbt.to_json()).to_json(), gbt.to_json());
}

TEST(Rng, BelowIsInRangeAndReproducible) {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, b.below(7));
  }
  std::vector<int> v(10);
  std::iota(v.begin(), v.end(), 0);
  Rng c(1);
  c.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST_P(ModelKinds, SeparableClustersTrainPerfectly) {
  const FeatureMatrix m = clusters(100, 5, 1);
  const auto rows = all_rows(m);
  const TrainedModel model = train(ModelSpec::defaults(GetParam()), m, rows);
  EXPECT_EQ(model.feature_count, 5u);
  std::size_t correct = 0;
  for (const auto& r : m.rows) correct += TrainedModel::predict_class(model.predict_score(r.values)) == (r.label == 1);
  EXPECT_EQ(correct, m.rows.size());
}

TEST_P(ModelKinds, SeparableHeldOutAucIsOne) {
  const FeatureMatrix m = clusters(200, 5, 2);
  const SplitResult sp = split(m, 0.3, 42);
  const Metrics metrics = evaluate_split(ModelSpec::defaults(GetParam()), m, sp);
  ASSERT_TRUE(metrics.auc);
  EXPECT_EQ(*metrics.auc, 1.0);
  EXPECT_EQ(metrics.accuracy, 1.0);
}

TEST_P(ModelKinds, RandomLabelsNearChance) {
  double total = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const FeatureMatrix m = random_labels(400, 6, 100 + s);
    const SplitResult sp = split(m, 0.3, static_cast<std::uint64_t>(s));
    ModelSpec spec = ModelSpec::defaults(GetParam(), static_cast<std::uint64_t>(s));
    if (GetParam() == ModelKind::random_forest) spec.hyperparameters["n_estimators"] = 30;
    if (GetParam() == ModelKind::gradient_boosted_trees) spec.hyperparameters["n_estimators"] = 30;
    const double acc = evaluate_split(spec, m, sp).accuracy;
    EXPECT_GT(acc, 0.3);
    EXPECT_LT(acc, 0.7);
    total += acc;
  }
  EXPECT_NEAR(total / seeds, 0.5, 0.1);
}

TEST_P(ModelKinds, DeterministicUnderSeed) {
  const FeatureMatrix m = random_labels(150, 8, 7);
  const auto rows = all_rows(m);
  const auto a = train(ModelSpec::defaults(GetParam(), 42), m, rows, 1);
  const auto b = train(ModelSpec::defaults(GetParam(), 42), m, rows, 3);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  for (const auto& r : m.rows) EXPECT_EQ(a.predict_score(r.values), b.predict_score(r.values));
}

TEST_P(ModelKinds, TrainRowOrderDoesNotMatter) {
  const FeatureMatrix m = random_labels(120, 5, 8);
  auto rows = all_rows(m);
  const auto a = train(ModelSpec::defaults(GetParam()), m, rows);
  std::reverse(rows.begin(), rows.end());
  const auto b = train(ModelSpec::defaults(GetParam()), m, rows);
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST_P(ModelKinds, ScoresInUnitIntervalAndJsonRoundTrip) {
  const FeatureMatrix m = random_labels(80, 4, 9);
  const auto model = train(ModelSpec::defaults(GetParam()), m, all_rows(m));
  const auto back = TrainedModel::from_json(nlohmann::json::parse(model.to_json().dump()));
  for (const auto& r : m.rows) {
    const double s = model.predict_score(r.values);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(back.predict_score(r.values), s);
  }
  std::vector<double> wrong(5, 0.0);
  EXPECT_THROW(model.predict_score(wrong), ArtifactMismatch);
}

TEST_P(ModelKinds, DegenerateLabels) {
  FeatureMatrix m = clusters(20, 3, 3);
  for (auto& r : m.rows) r.label = 1;
  EXPECT_THROW(train(ModelSpec::defaults(GetParam()), m, all_rows(m)), InputError);
  m.rows[0].label = 0;
  EXPECT_THROW(train(ModelSpec::defaults(GetParam()), m, all_rows(m)), InputError);
}

INSTANTIATE_TEST_SUITE_P(Kinds, ModelKinds,
                         ::testing::Values(ModelKind::random_forest, ModelKind::gradient_boosted_trees),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(RandomForest, VoteFractionAndStrictThreshold) {
  TrainedModel model;
  model.spec = ModelSpec::defaults(ModelKind::random_forest);
  model.feature_count = 1;
  DecisionTree yes{{{-1, 0, -1, -1, 1.0}}};
  DecisionTree no{{{-1, 0, -1, -1, 0.0}}};
  const std::vector<double> row{0.0};
  for (int i = 0; i < 100; ++i) model.trees.push_back(yes);
  EXPECT_EQ(model.predict_score(row), 1.0);
  EXPECT_TRUE(TrainedModel::predict_class(1.0));
  for (int i = 0; i < 50; ++i) model.trees[i] = no;
  EXPECT_EQ(model.predict_score(row), 0.5);
  EXPECT_FALSE(TrainedModel::predict_class(0.5));
}

TEST(RandomForest, AddingPositiveTreeNeverLowersScore) {
  const FeatureMatrix m = random_labels(100, 4, 4);
  auto model = train(ModelSpec::defaults(ModelKind::random_forest), m, all_rows(m));
  DecisionTree yes{{{-1, 0, -1, -1, 1.0}}};
  for (const auto& r : m.rows) {
    const double before = model.predict_score(r.values);
    auto grown = model;
    grown.trees.push_back(yes);
    EXPECT_GE(grown.predict_score(r.values), before);
  }
}

TEST(DecisionTree, EvaluateAndDepth) {
  // x0 <= 0.5 ? leaf 0.1 : (x1 <= 2 ? 0.7 : 0.9)
  DecisionTree t{{{0, 0.5, 1, 2, 0}, {-1, 0, -1, -1, 0.1}, {1, 2.0, 3, 4, 0}, {-1, 0, -1, -1, 0.7},
                  {-1, 0, -1, -1, 0.9}}};
  EXPECT_EQ(t.evaluate(std::vector<double>{0.5, 9}), 0.1);
  EXPECT_EQ(t.evaluate(std::vector<double>{0.6, 2}), 0.7);
  EXPECT_EQ(t.evaluate(std::vector<double>{0.6, 3}), 0.9);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(DecisionTree::from_json(t.to_json()).to_json(), t.to_json());
}

TEST(BoostedTrees, RespectsMaxDepth) {
  const FeatureMatrix m = random_labels(300, 6, 12);
  const auto model = train(ModelSpec::defaults(ModelKind::gradient_boosted_trees), m, all_rows(m));
  EXPECT_EQ(model.trees.size(), 100u);
  for (const auto& t : model.trees) EXPECT_LE(t.depth(), 6u);
}
