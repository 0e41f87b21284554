// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylodet/corpus.hpp"
#include "stylodet/features.hpp"
#include "stylodet/models.hpp"

namespace stylodet {

enum class SplitGranularity { group, file };

std::string_view to_string(SplitGranularity granularity);
SplitGranularity parse_granularity(std::string_view text);

inline constexpr double kDefaultTestFraction = 0.3;

struct SplitResult {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// Seeded, label-stratified split. In file mode every file's rows land on the
// same side. Throws InputError when a class would be missing on either side.
SplitResult split_rows(std::span<const int> labels, std::span<const std::size_t> file_ids, double test_fraction,
                       std::uint64_t seed, SplitGranularity granularity);
SplitResult split(const FeatureMatrix& matrix, double test_fraction, std::uint64_t seed,
                  SplitGranularity granularity = SplitGranularity::group);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;  // absent when only one class is present
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Rank-statistic AUC (Mann-Whitney U); ties count one half.
std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels);

// Class = score > threshold.
Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct RunStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double std_dev = 0.0;  // sample standard deviation; 0 for a single run
  double p10 = 0.0;
  double p90 = 0.0;
};

RunStats run_statistics(std::span<const double> values);

// Two-sided Welch t-test. Both variances zero: 1 if the means are equal,
// otherwise 0.
double welch_t_test(std::span<const double> a, std::span<const double> b);
// Fisher's method: -2 sum ln p ~ chi-squared with 2k degrees of freedom.
double fisher_combine(std::span<const double> p_values);

struct SweepConfig {
  std::vector<FeatureFamily> families{FeatureFamily::ewd_nb_f};
  std::vector<std::size_t> group_sizes{30};
  std::vector<ModelKind> models{ModelKind::random_forest};
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  std::size_t bin_width = 0;  // EWD-NB-F only; 0 = choose from max_columns
  std::size_t max_columns = 100;
  std::uint32_t depth_cap = kDefaultDepthCap;
  double test_fraction = kDefaultTestFraction;
  SplitGranularity granularity = SplitGranularity::group;
  PositiveClassRule positive = PositiveClassRule::origin();
  std::size_t threads = 1;

  nlohmann::json to_json() const;
};

struct RunRow {
  std::string family;
  std::size_t group_size = 0;
  std::string model;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::size_t columns = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

struct CellSummary {
  std::string family;
  std::size_t group_size = 0;
  std::string model;  // "all" averages every model kind of the cell
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;
  double precision = 0.0;
  std::size_t columns = 0;
  RunStats accuracy_stats;
};

struct PairwiseTest {
  std::size_t group_size = 0;
  std::string model;
  std::string family_a;
  std::string family_b;
  double p_value = 1.0;
};

struct EvalReport {
  std::vector<RunRow> runs;
  std::vector<CellSummary> cells;
  std::vector<PairwiseTest> tests;
  std::optional<double> combined_p;
  std::vector<std::string> skipped;
  std::string split_note;

  std::string runs_csv() const;
  std::string table1_csv() const;
  std::string table2_csv() const;
  std::string text() const;  // aligned tables
  nlohmann::json to_json() const;
  // runs.csv, table1.csv, table2.csv, report.txt, report.json
  void save(const std::filesystem::path& dir, const nlohmann::json& config) const;
};

// Cells, statistics and tests recomputed from per-run rows.
EvalReport summarize(std::vector<RunRow> runs);
std::vector<RunRow> parse_runs_csv(std::string_view csv);

// Metrics for one trained model on the test rows of an already split
// matrix; normalization is fitted on the train rows.
Metrics evaluate_split(const ModelSpec& spec, const FeatureMatrix& raw, const SplitResult& split,
                       std::size_t threads = 1);

// Every (family, group size, model, seed) combination: build, split by
// seed, winsorize on train, train with the same seed, score the test rows.
// Cells that cannot be built are reported in `skipped`.
EvalReport run_sweep(const CorpusManifest& manifest, const std::filesystem::path& root, const SweepConfig& config);

}  // namespace stylodet
