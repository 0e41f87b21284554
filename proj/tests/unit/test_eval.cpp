// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "stylodet/error.hpp"
#include "stylodet/eval.hpp"

using namespace stylodet;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / static_cast<double>(pairs);
}

RunRow make_run(std::string family, std::string model, std::uint64_t seed, double acc) {
  RunRow r;
  r.family = std::move(family);
  r.group_size = 40;
  r.model = std::move(model);
  r.seed = seed;
  r.metrics.accuracy = acc;
  r.metrics.f1 = acc;
  r.metrics.precision = acc;
  r.metrics.recall = acc;
  r.metrics.auc = acc;
  r.columns = 52;
  r.train_rows = 70;
  r.test_rows = 30;
  return r;
}

}  // namespace

TEST(Metrics, PerfectRanking) {
  const Metrics m = compute_metrics(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  EXPECT_EQ(m.auc, 1.0);
  EXPECT_EQ(m.precision, 1.0);
}

TEST(Metrics, HandAucExample) {
  EXPECT_EQ(rank_auc(std::vector<double>{0.8, 0.7, 0.4, 0.2}, std::vector<int>{1, 0, 1, 0}), 0.75);
}

TEST(Metrics, TiesAndStrictThreshold) {
  const Metrics m = compute_metrics(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0});
  EXPECT_EQ(m.auc, 0.5);
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.tp, 0u);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.f1, 0.0);
}

TEST(Metrics, SingleClassAucAbsent) {
  const Metrics m = compute_metrics(std::vector<double>{0.9, 0.2}, std::vector<int>{1, 1});
  EXPECT_FALSE(m.auc);
  EXPECT_EQ(m.accuracy, 0.5);
}

TEST(Metrics, RankAucMatchesPairwiseOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 300;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 20) / 19.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    ASSERT_EQ(*rank_auc(s, y), brute_auc(s, y));
  }
}

TEST(Metrics, AucInvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(200), t(200);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    s[i] = std::round(u(rng) * 50) / 50;
    t[i] = std::exp(3 * s[i]) - 7;
    y[i] = static_cast<int>(rng() % 2);
  }
  EXPECT_EQ(rank_auc(s, y), rank_auc(t, y));
}

TEST(Metrics, ConfusionIdentities) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(50);
    std::vector<int> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      s[i] = u(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    const Metrics m = compute_metrics(s, y);
    EXPECT_EQ(m.tp + m.fp + m.tn + m.fn, 50u);
    const double error = static_cast<double>(m.fp + m.fn) / 50.0;
    EXPECT_DOUBLE_EQ(m.accuracy + error, 1.0);
    EXPECT_GE(m.precision, 0.0);
    EXPECT_LE(m.precision, 1.0);
    if (m.precision + m.recall > 0) {
      EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-15);
    }
  }
}

TEST(Split, BalancedSeventyThirty) {
  std::vector<int> labels(100);
  std::vector<std::size_t> files(100);
  for (std::size_t i = 0; i < 100; ++i) {
    labels[i] = static_cast<int>(i % 2);
    files[i] = i;
  }
  const auto sp = split_rows(labels, files, 0.3, 42, SplitGranularity::group);
  EXPECT_EQ(sp.train.size(), 70u);
  EXPECT_EQ(sp.test.size(), 30u);
  for (const auto* side : {&sp.train, &sp.test}) {
    std::set<int> classes;
    for (auto r : *side) classes.insert(labels[r]);
    EXPECT_EQ(classes.size(), 2u);
    EXPECT_TRUE(std::is_sorted(side->begin(), side->end()));
  }
  const auto again = split_rows(labels, files, 0.3, 42, SplitGranularity::group);
  EXPECT_EQ(again.train, sp.train);
  EXPECT_EQ(again.test, sp.test);
  const auto other = split_rows(labels, files, 0.3, 43, SplitGranularity::group);
  EXPECT_NE(other.test, sp.test);
}

TEST(Split, FileLevelKeepsFilesTogether) {
  std::mt19937_64 rng(10);
  std::vector<int> labels;
  std::vector<std::size_t> files;
  for (std::size_t f = 0; f < 40; ++f) {
    const std::size_t groups = 1 + rng() % 6;
    for (std::size_t g = 0; g < groups; ++g) {
      labels.push_back(static_cast<int>(f % 2));
      files.push_back(f);
    }
  }
  const auto sp = split_rows(labels, files, 0.3, 1, SplitGranularity::file);
  std::set<std::size_t> train_files, test_files;
  for (auto r : sp.train) train_files.insert(files[r]);
  for (auto r : sp.test) test_files.insert(files[r]);
  for (auto f : test_files) EXPECT_FALSE(train_files.count(f)) << f;
  EXPECT_EQ(sp.train.size() + sp.test.size(), labels.size());
}

TEST(Split, Errors) {
  std::vector<int> labels{0, 0, 0, 1};
  std::vector<std::size_t> files{0, 1, 2, 3};
  EXPECT_THROW(split_rows(labels, files, 0.3, 1, SplitGranularity::group), InputError);
  labels = {0, 1, 0, 1};
  EXPECT_THROW(split_rows(labels, files, 0.0, 1, SplitGranularity::group), InputError);
  EXPECT_THROW(split_rows(labels, files, 1.0, 1, SplitGranularity::group), InputError);
}

TEST(RunStatistics, SingleAndMany) {
  const RunStats one = run_statistics(std::vector<double>{0.9});
  EXPECT_EQ(one.std_dev, 0.0);
  EXPECT_EQ(one.mean, 0.9);
  EXPECT_EQ(one.median, 0.9);
  const RunStats many = run_statistics(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  EXPECT_DOUBLE_EQ(many.mean, 6.0);
  EXPECT_DOUBLE_EQ(many.median, 6.0);
  EXPECT_DOUBLE_EQ(many.p10, 2.0);
  EXPECT_DOUBLE_EQ(many.p90, 10.0);
  EXPECT_NEAR(many.std_dev, std::sqrt(11.0), 1e-12);
  EXPECT_LE(many.p10, many.median);
  EXPECT_LE(many.median, many.p90);
}

TEST(WelchTTest, Examples) {
  const std::vector<double> a{0.80, 0.81, 0.79, 0.80, 0.82, 0.78, 0.80, 0.81, 0.79, 0.80};
  std::vector<double> b;
  for (double x : a) b.push_back(x + 0.16);
  EXPECT_LT(welch_t_test(a, b), 1e-3);
  EXPECT_EQ(welch_t_test(a, b), welch_t_test(b, a));
  EXPECT_EQ(welch_t_test(a, a), 1.0);
  const std::vector<double> c{1, 1, 1}, d{2, 2, 2};
  EXPECT_EQ(welch_t_test(c, c), 1.0);
  EXPECT_EQ(welch_t_test(c, d), 0.0);
}

TEST(WelchTTest, MatchesReferenceValue) {
  // scipy.stats.ttest_ind([1,2,3,4,5], [2,4,6,8,10,12], equal_var=False).pvalue
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10, 12};
  EXPECT_NEAR(welch_t_test(a, b), 0.04928433820673049, 1e-9);
}

TEST(FisherCombine, ReferenceValues) {
  // scipy.stats.combine_pvalues([0.01, 0.2, 0.3]).pvalue
  EXPECT_NEAR(fisher_combine(std::vector<double>{0.01, 0.2, 0.3}), 0.021561751324834632, 1e-9);
  EXPECT_NEAR(fisher_combine(std::vector<double>{0.5}), 0.5, 1e-12);
}

TEST(Summaries, RepeatsOfOneAndGridCardinality) {
  std::vector<RunRow> runs;
  for (const char* family : {"CNB-F", "EWD-NB-F"}) {
    for (const char* model : {"random_forest", "gradient_boosted_trees"}) runs.push_back(make_run(family, model, 42, 0.9));
  }
  const EvalReport report = summarize(runs);
  std::size_t per_model = 0;
  for (const auto& c : report.cells) {
    if (c.model != "all") {
      ++per_model;
      EXPECT_EQ(c.accuracy_stats.std_dev, 0.0);
      EXPECT_EQ(c.accuracy_stats.mean, c.accuracy_stats.median);
    }
  }
  EXPECT_EQ(per_model, 4u);
  EXPECT_EQ(report.runs.size(), 4u);
}

TEST(Summaries, RecomputableFromPersistedRuns) {
  std::vector<RunRow> runs;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.8, 1.0);
  for (std::uint64_t seed = 42; seed < 52; ++seed) {
    runs.push_back(make_run("CNB-F", "random_forest", seed, u(rng)));
    runs.push_back(make_run("EWD-NB-F", "random_forest", seed, u(rng)));
  }
  const EvalReport report = summarize(runs);
  const EvalReport again = summarize(parse_runs_csv(report.runs_csv()));
  EXPECT_EQ(again.table1_csv(), report.table1_csv());
  EXPECT_EQ(again.table2_csv(), report.table2_csv());
  ASSERT_EQ(report.tests.size(), 1u);
  EXPECT_EQ(again.tests[0].p_value, report.tests[0].p_value);
  EXPECT_TRUE(report.combined_p);
  EXPECT_NE(report.text().find("Std Dev"), std::string::npos);
}
