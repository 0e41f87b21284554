// SPDX-License-Identifier: Apache-2.0
#include "stylodet/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stylodet/error.hpp"
#include "stylodet/parallel.hpp"
#include "stylodet/rng.hpp"

namespace stylodet {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::random_forest ? "random_forest" : "gradient_boosted_trees";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "rf" || text == "random_forest") return ModelKind::random_forest;
  if (text == "gbt" || text == "gradient_boosted_trees") return ModelKind::gradient_boosted_trees;
  throw InputError("unknown model kind '" + std::string(text) + "' (expected rf or gbt)");
}

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  if (kind == ModelKind::random_forest) {
    spec.hyperparameters = {{"n_estimators", 100}, {"criterion", "gini"},  {"min_samples_split", 2},
                            {"min_samples_leaf", 1}, {"max_features", "sqrt"}, {"bootstrap", true},
                            {"max_depth", 0}};
  } else {
    spec.hyperparameters = {{"n_estimators", 100},      {"learning_rate", 0.3},   {"max_depth", 6},
                            {"sampling_method", "uniform"}, {"subsample", 1.0},     {"grow_policy", "depthwise"},
                            {"reg_lambda", 1.0},        {"min_child_weight", 1.0}, {"objective", "logistic"}};
  }
  return spec;
}

double ModelSpec::number(const std::string& name) const {
  auto it = hyperparameters.find(name);
  if (it == hyperparameters.end()) {
    const auto fallback = defaults(kind, seed).hyperparameters;
    auto d = fallback.find(name);
    if (d == fallback.end() || !d->is_number()) throw InputError("missing hyperparameter " + name);
    return d->get<double>();
  }
  if (it->is_boolean()) return it->get<bool>() ? 1.0 : 0.0;
  if (!it->is_number()) throw InputError("hyperparameter " + name + " is not numeric");
  return it->get<double>();
}

nlohmann::json ModelSpec::to_json() const {
  return {{"kind", to_string(kind)}, {"hyperparameters", hyperparameters}, {"seed", seed}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& doc) {
  ModelSpec spec;
  spec.kind = parse_model_kind(doc.at("kind").get<std::string>());
  spec.hyperparameters = doc.at("hyperparameters");
  spec.seed = doc.at("seed").get<std::uint64_t>();
  return spec;
}

// --- trees ----------------------------------------------------------------

double DecisionTree::evaluate(std::span<const double> row) const {
  std::int32_t i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

nlohmann::json node_to_json(const DecisionTree& tree, std::int32_t i) {
  const auto& n = tree.nodes[static_cast<std::size_t>(i)];
  if (n.feature < 0) return nlohmann::json::array({n.value});
  return nlohmann::json::array(
      {n.feature, n.threshold, node_to_json(tree, n.left), node_to_json(tree, n.right)});
}

std::int32_t node_from_json(DecisionTree& tree, const nlohmann::json& doc) {
  const auto self = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (doc.size() == 1) {
    tree.nodes.back().value = doc[0].get<double>();
    return self;
  }
  if (doc.size() != 4) throw ArtifactMismatch("model: malformed tree node");
  const auto feature = doc[0].get<std::int32_t>();
  const double threshold = doc[1].get<double>();
  const std::int32_t left = node_from_json(tree, doc[2]);
  const std::int32_t right = node_from_json(tree, doc[3]);
  auto& n = tree.nodes[static_cast<std::size_t>(self)];
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return self;
}

}  // namespace

nlohmann::json DecisionTree::to_json() const { return node_to_json(*this, 0); }

DecisionTree DecisionTree::from_json(const nlohmann::json& doc) {
  DecisionTree tree;
  node_from_json(tree, doc);
  return tree;
}

double TrainedModel::predict_score(std::span<const double> row) const {
  if (row.size() != feature_count) throw ArtifactMismatch("feature shape mismatch");
  if (trees.empty()) return 0.0;
  if (spec.kind == ModelKind::random_forest) {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.evaluate(row) > 0.5 ? 1 : 0;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }
  double margin = 0.0;
  for (const auto& t : trees) margin += t.evaluate(row);
  return 1.0 / (1.0 + std::exp(-margin));
}

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const auto& t : trees) trees_json.push_back(t.to_json());
  return {{"schema", kSchema},
          {"spec", spec.to_json()},
          {"feature_count", feature_count},
          {"index_map_ref", index_map_ref},
          {"normalization_stats_ref", normalization_stats_ref},
          {"trees", std::move(trees_json)}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema", 0) != kSchema) {
    throw ArtifactMismatch("model: unsupported or missing schema version");
  }
  try {
    TrainedModel m;
    m.spec = ModelSpec::from_json(doc.at("spec"));
    m.feature_count = doc.at("feature_count").get<std::size_t>();
    m.index_map_ref = doc.value("index_map_ref", std::string{});
    m.normalization_stats_ref = doc.value("normalization_stats_ref", std::string{});
    for (const auto& t : doc.at("trees")) m.trees.push_back(DecisionTree::from_json(t));
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ArtifactMismatch(std::string("model: ") + ex.what());
  }
}

// --- training -------------------------------------------------------------

namespace {

// Column-major copy of the training rows.
struct TrainingData {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::vector<double> x;  // x[f * rows + r]
  std::vector<int> y;

  double at(std::size_t r, std::size_t f) const { return x[f * rows + r]; }
};

TrainingData gather(const FeatureMatrix& matrix, std::span<const std::size_t> train_rows) {
  std::vector<std::size_t> order(train_rows.begin(), train_rows.end());
  std::sort(order.begin(), order.end());
  TrainingData d;
  d.rows = order.size();
  d.features = matrix.column_count;
  d.x.resize(d.rows * d.features);
  d.y.resize(d.rows);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const auto& row = matrix.rows.at(order[r]);
    if (row.values.size() != d.features) throw ArtifactMismatch("feature shape mismatch");
    d.y[r] = row.label;
    for (std::size_t f = 0; f < d.features; ++f) d.x[f * d.rows + r] = row.values[f];
  }
  return d;
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;

  // Higher score wins; equal scores go to the lower feature, then the lower
  // threshold.
  bool improves_on(const SplitChoice& best) const {
    if (!best.found) return true;
    if (score != best.score) return score > best.score;
    if (feature != best.feature) return feature < best.feature;
    return threshold < best.threshold;
  }
};

// --- random forest --------------------------------------------------------

struct ForestParams {
  std::size_t trees = 100;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 1;
  std::size_t max_depth = 0;  // 0 = unlimited
  bool bootstrap = true;
};

DecisionTree grow_forest_tree(const TrainingData& data, const ForestParams& params, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> samples(data.rows);
  if (params.bootstrap) {
    for (auto& s : samples) s = static_cast<std::uint32_t>(rng.below(data.rows));
  } else {
    std::iota(samples.begin(), samples.end(), 0u);
  }

  DecisionTree tree;
  struct Pending {
    std::int32_t node;
    std::size_t lo, hi, depth;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, samples.size(), 0});

  std::vector<std::size_t> feature_order(data.features);
  std::vector<std::pair<double, int>> column;

  while (!stack.empty()) {
    const Pending job = stack.back();
    stack.pop_back();
    const std::size_t n = job.hi - job.lo;
    std::size_t positives = 0;
    for (std::size_t k = job.lo; k < job.hi; ++k) positives += static_cast<std::size_t>(data.y[samples[k]]);
    tree.nodes[static_cast<std::size_t>(job.node)].value =
        n ? static_cast<double>(positives) / static_cast<double>(n) : 0.0;

    const bool pure = positives == 0 || positives == n;
    if (pure || n < params.min_samples_split || n < 2 * params.min_samples_leaf ||
        (params.max_depth > 0 && job.depth >= params.max_depth)) {
      continue;
    }

    // Draw candidate features in random order; constant features do not
    // count toward max_features.
    std::iota(feature_order.begin(), feature_order.end(), std::size_t{0});
    SplitChoice best;
    std::size_t informative = 0;
    for (std::size_t drawn = 0; drawn < data.features && informative < params.max_features; ++drawn) {
      const std::size_t pick = drawn + static_cast<std::size_t>(rng.below(data.features - drawn));
      std::swap(feature_order[drawn], feature_order[pick]);
      const std::size_t f = feature_order[drawn];

      column.clear();
      for (std::size_t k = job.lo; k < job.hi; ++k) column.emplace_back(data.at(samples[k], f), data.y[samples[k]]);
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++informative;

      std::size_t left_n = 0;
      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        ++left_n;
        left_pos += static_cast<std::size_t>(column[k].second);
        if (column[k].first == column[k + 1].first) continue;
        const std::size_t right_n = n - left_n;
        if (left_n < params.min_samples_leaf || right_n < params.min_samples_leaf) continue;
        const auto ln = static_cast<double>(left_n);
        const auto rn = static_cast<double>(right_n);
        const auto lp = static_cast<double>(left_pos);
        const auto rp = static_cast<double>(positives - left_pos);
        // Maximising sum_child (p^2 + q^2) / n_child minimises weighted Gini.
        const double score = (lp * lp + (ln - lp) * (ln - lp)) / ln + (rp * rp + (rn - rp) * (rn - rp)) / rn;
        double threshold = column[k].first + (column[k + 1].first - column[k].first) / 2.0;
        if (!(threshold < column[k + 1].first)) threshold = column[k].first;
        SplitChoice cand{true, f, threshold, score};
        if (cand.improves_on(best)) best = cand;
      }
    }
    if (!best.found) continue;

    auto mid = std::partition(samples.begin() + static_cast<std::ptrdiff_t>(job.lo),
                              samples.begin() + static_cast<std::ptrdiff_t>(job.hi),
                              [&](std::uint32_t s) { return data.at(s, best.feature) <= best.threshold; });
    const auto split = static_cast<std::size_t>(mid - samples.begin());
    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({left + 1, split, job.hi, job.depth + 1});
    stack.push_back({left, job.lo, split, job.depth + 1});
  }
  return tree;
}

std::vector<DecisionTree> train_forest(const ModelSpec& spec, const TrainingData& data, std::size_t threads) {
  ForestParams p;
  p.trees = static_cast<std::size_t>(spec.number("n_estimators"));
  p.min_samples_split = static_cast<std::size_t>(spec.number("min_samples_split"));
  p.min_samples_leaf = std::max<std::size_t>(1, static_cast<std::size_t>(spec.number("min_samples_leaf")));
  p.max_depth = static_cast<std::size_t>(spec.number("max_depth"));
  p.bootstrap = spec.number("bootstrap") != 0.0;
  const auto mf = spec.hyperparameters.find("max_features");
  if (mf == spec.hyperparameters.end() || (mf->is_string() && mf->get<std::string>() == "sqrt")) {
    p.max_features = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.features))));
  } else if (mf->is_number()) {
    p.max_features = mf->get<std::size_t>();
  } else {
    throw InputError("max_features must be \"sqrt\" or a number");
  }
  p.max_features = std::clamp<std::size_t>(p.max_features, 1, std::max<std::size_t>(1, data.features));

  std::vector<DecisionTree> trees(p.trees);
  parallel_for(p.trees, threads, [&](std::size_t t) { trees[t] = grow_forest_tree(data, p, spec.seed + t); });
  return trees;
}

// --- gradient boosting ----------------------------------------------------

std::vector<DecisionTree> train_boosted(const ModelSpec& spec, const TrainingData& data) {
  const auto rounds = static_cast<std::size_t>(spec.number("n_estimators"));
  const double eta = spec.number("learning_rate");
  const auto max_depth = static_cast<std::size_t>(spec.number("max_depth"));
  const double lambda = spec.number("reg_lambda");
  const double min_child_weight = spec.number("min_child_weight");
  const double subsample = spec.number("subsample");
  const std::size_t n = data.rows;

  // Samples sorted by value once per feature; ties keep row order.
  std::vector<std::vector<std::uint32_t>> sorted(data.features);
  for (std::size_t f = 0; f < data.features; ++f) {
    auto& idx = sorted[f];
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return data.at(a, f) < data.at(b, f); });
  }

  std::vector<double> margin(n, 0.0);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<std::int32_t> node_of(n);
  std::vector<DecisionTree> trees;
  trees.reserve(rounds);

  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-margin[i]));
      grad[i] = p - data.y[i];
      hess[i] = p * (1.0 - p);
    }
    std::fill(node_of.begin(), node_of.end(), 0);
    if (subsample < 1.0) {
      Rng rng(spec.seed + round);
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() >= subsample) node_of[i] = -1;
      }
    }

    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<std::int32_t> level{0};
    for (std::size_t depth = 0; depth <= max_depth && !level.empty(); ++depth) {
      // Per-node gradient totals for this level.
      std::vector<std::int32_t> slot(tree.nodes.size(), -1);
      for (std::size_t k = 0; k < level.size(); ++k) slot[static_cast<std::size_t>(level[k])] = static_cast<std::int32_t>(k);
      std::vector<double> G(level.size(), 0.0);
      std::vector<double> H(level.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] < 0) continue;
        const std::int32_t s = slot[static_cast<std::size_t>(node_of[i])];
        if (s < 0) continue;
        G[static_cast<std::size_t>(s)] += grad[i];
        H[static_cast<std::size_t>(s)] += hess[i];
      }
      for (std::size_t k = 0; k < level.size(); ++k) {
        tree.nodes[static_cast<std::size_t>(level[k])].value = -G[k] / (H[k] + lambda) * eta;
      }
      if (depth == max_depth) break;

      std::vector<SplitChoice> best(level.size());
      std::vector<double> gl(level.size());
      std::vector<double> hl(level.size());
      std::vector<double> last(level.size());
      std::vector<char> seen(level.size());
      for (std::size_t f = 0; f < data.features; ++f) {
        std::fill(gl.begin(), gl.end(), 0.0);
        std::fill(hl.begin(), hl.end(), 0.0);
        std::fill(seen.begin(), seen.end(), 0);
        for (const std::uint32_t i : sorted[f]) {
          if (node_of[i] < 0) continue;
          const std::int32_t si = slot[static_cast<std::size_t>(node_of[i])];
          if (si < 0) continue;
          const auto s = static_cast<std::size_t>(si);
          const double x = data.at(i, f);
          if (seen[s] && x != last[s] && hl[s] >= min_child_weight && H[s] - hl[s] >= min_child_weight) {
            const double gr = G[s] - gl[s];
            const double hr = H[s] - hl[s];
            const double gain = 0.5 * (gl[s] * gl[s] / (hl[s] + lambda) + gr * gr / (hr + lambda) -
                                       G[s] * G[s] / (H[s] + lambda));
            double threshold = last[s] + (x - last[s]) / 2.0;
            if (!(threshold < x)) threshold = last[s];
            SplitChoice cand{true, f, threshold, gain};
            if (gain > 0.0 && cand.improves_on(best[s])) best[s] = cand;
          }
          gl[s] += grad[i];
          hl[s] += hess[i];
          last[s] = x;
          seen[s] = 1;
        }
      }

      std::vector<std::int32_t> next_level;
      for (std::size_t k = 0; k < level.size(); ++k) {
        if (!best[k].found) continue;
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(level[k])];
        node.feature = static_cast<std::int32_t>(best[k].feature);
        node.threshold = best[k].threshold;
        node.left = left;
        node.right = left + 1;
        next_level.push_back(left);
        next_level.push_back(left + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] < 0) continue;
        const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.feature >= 0) {
          node_of[i] = data.at(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
        }
      }
      level = std::move(next_level);
    }

    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t k = 0;
      while (tree.nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(k)];
        k = data.at(i, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left : nd.right;
      }
      margin[i] += tree.nodes[static_cast<std::size_t>(k)].value;
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& matrix, std::span<const std::size_t> train_rows,
                   std::size_t threads) {
  const TrainingData data = gather(matrix, train_rows);
  const auto positives = static_cast<std::size_t>(std::count(data.y.begin(), data.y.end(), 1));
  if (positives < 2 || data.rows - positives < 2) {
    throw InputError("degenerate labels: training needs at least 2 rows of each class");
  }
  if (data.features == 0) throw InputError("training matrix has no columns");

  TrainedModel model;
  model.spec = spec;
  model.feature_count = data.features;
  model.trees = spec.kind == ModelKind::random_forest ? train_forest(spec, data, threads) : train_boosted(spec, data);
  return model;
}

}  // namespace stylodet
