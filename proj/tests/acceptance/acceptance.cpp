// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL/SKIP line per criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "stylodet/bigram.hpp"
#include "stylodet/eval.hpp"
#include "stylodet/features.hpp"
#include "stylodet/parallel.hpp"
#include "stylodet/pipeline.hpp"
#include "stylodet/synth.hpp"
#include "../unit/test_support.hpp"

using namespace stylodet;
namespace fs = std::filesystem;

namespace {

// Frozen column counts of the fixture corpus under tree-sitter-java 0.23.5.
constexpr std::size_t kGoldenCnbWidth = 274;
constexpr std::size_t kGoldenNbWidth = 462;
constexpr std::size_t kGoldenEwdWidth = 39;  // b = 16
constexpr std::size_t kGoldenBinWidth = 16;

struct Outcome {
  enum Status { pass, fail, skip } status = pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> check;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

FeatureIndexMap dense_map(std::size_t n) {
  FeatureIndexMap map(FeatureFamily::ewd_nb_f, std::string(kGrammarId));
  for (std::size_t k = 0; k < n; ++k) map.add("k" + std::to_string(k));
  return map;
}

// --- 1 ----------------------------------------------------------------------

Outcome formula_oracles() {
  std::mt19937_64 rng(20240601);
  std::size_t bin_mismatch = 0;
  for (int t = 0; t < 100000; ++t) {
    FeatureConfig c;
    c.bin_width = 1 + rng() % 5000;
    c.s1 = rng() % 64;
    c.s2 = rng() % 64;
    const std::size_t i = c.s1 + rng() % 1000000;
    const auto oracle = static_cast<std::size_t>(std::floor(static_cast<double>(i - c.s1) / c.bin_width)) + c.s2;
    bin_mismatch += bin_index(i, c) != oracle;
  }

  std::size_t row_mismatch = 0, mass_mismatch = 0;
  double worst_value_gap = 0.0, worst_sum_gap = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t vocab = 1 + rng() % 2000;
    const auto map = dense_map(vocab);
    BigramCounts counts;
    for (std::size_t k = 0; k < vocab; ++k) {
      if (rng() % 4 == 0) counts.add("k" + std::to_string(k), 1 + rng() % 100);
    }
    FeatureConfig flat_cfg, bin_cfg;
    bin_cfg.bin_width = 1 + rng() % 600;
    const std::string text(1 + rng() % 3000, 'x');
    const double c = static_cast<double>(text.size());

    const auto flat = assemble_row(text, counts, map, flat_cfg);
    const auto binned = assemble_row(text, counts, map, bin_cfg);
    std::vector<double> oracle(binned.size(), 0.0);
    std::copy(flat.begin(), flat.begin() + 10, oracle.begin());
    for (std::size_t i = 10; i < flat.size(); ++i) oracle[10 + (i - 10) / bin_cfg.bin_width] += flat[i];
    if (binned.size() != 10 + (vocab + bin_cfg.bin_width - 1) / bin_cfg.bin_width) ++row_mismatch;
    for (std::size_t i = 0; i < binned.size(); ++i) {
      worst_value_gap = std::max(worst_value_gap, std::abs(binned[i] - oracle[i]));
    }

    const auto flat_counts = assemble_bin_counts(counts, map, flat_cfg);
    const auto bin_counts = assemble_bin_counts(counts, map, bin_cfg);
    std::vector<std::uint64_t> count_oracle(bin_counts.size(), 0);
    for (std::size_t i = 0; i < flat_counts.size(); ++i) count_oracle[i / bin_cfg.bin_width] += flat_counts[i];
    if (count_oracle != bin_counts) ++row_mismatch;
    if (std::accumulate(bin_counts.begin(), bin_counts.end(), std::uint64_t{0}) != counts.total()) ++mass_mismatch;
    const double syntactic = std::accumulate(binned.begin() + 10, binned.end(), 0.0);
    worst_sum_gap = std::max(worst_sum_gap, std::abs(syntactic - static_cast<double>(counts.total()) / c));
  }
  const bool ok = bin_mismatch == 0 && row_mismatch == 0 && mass_mismatch == 0 && worst_value_gap <= 1e-12 &&
                  worst_sum_gap <= 1e-12;
  return verdict(ok, "bin_index mismatches " + std::to_string(bin_mismatch) + "/100000, row mismatches " +
                         std::to_string(row_mismatch) + "/1000, count-mass mismatches " +
                         std::to_string(mass_mismatch) + ", max |value gap| " + sci(worst_value_gap) +
                         ", max |ΣF/c gap| " + sci(worst_sum_gap));
}

// --- 2 ----------------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(7);
  std::size_t mismatches = 0, instances = 0;
  for (std::size_t n = 2; n <= 1000; n += (n < 50 ? 1 : 37)) {
    for (int rep = 0; rep < 3; ++rep, ++instances) {
      std::vector<double> s(n);
      std::vector<int> y(n);
      const std::size_t levels = 1 + rng() % 40;
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng() % levels) / static_cast<double>(levels);
        y[i] = static_cast<int>(rng() % 2);
      }
      y[0] = 1;
      y[1] = 0;
      double wins = 0;
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (y[j] != 0) continue;
          ++pairs;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
      }
      mismatches += *rank_auc(s, y) != wins / static_cast<double>(pairs);
    }
  }
  const auto hand = rank_auc(std::vector<double>{0.8, 0.7, 0.4, 0.2}, std::vector<int>{1, 0, 1, 0});
  return verdict(mismatches == 0 && hand == 0.75,
                 "rank vs pairwise mismatches " + std::to_string(mismatches) + "/" + std::to_string(instances) +
                     ", hand example AUC " + fmt(hand.value_or(-1), 4));
}

// --- 3 ----------------------------------------------------------------------

Outcome winsorization() {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> heavy(0.0, 3.0);
  std::size_t out_of_range = 0;
  for (int t = 0; t < 200; ++t) {
    FeatureMatrix m;
    m.column_count = 1 + rng() % 12;
    const std::size_t rows = 1 + rng() % 80;
    for (std::size_t r = 0; r < rows; ++r) {
      FeatureMatrix::Row row;
      for (std::size_t c = 0; c < m.column_count; ++c) row.values.push_back(rng() % 5 == 0 ? 0.0 : heavy(rng));
      m.rows.push_back(std::move(row));
    }
    std::vector<std::size_t> fit;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == 0 || rng() % 3) fit.push_back(r);
    }
    for (const auto& row : winsorize(m, fit).rows) {
      for (double v : row.values) out_of_range += !(v >= 0.0 && v <= 1.0);
    }
  }
  FeatureMatrix uniform;
  uniform.column_count = 2;
  for (int x = 0; x <= 100; ++x) uniform.rows.push_back({{}, 0, {static_cast<double>(x), 4.25}});
  std::vector<std::size_t> all(uniform.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto norm = winsorize(uniform, all);
  const double mid = norm.rows[50].values[0];
  bool constant_zero = true;
  for (const auto& r : norm.rows) constant_zero &= r.values[1] == 0.0;
  return verdict(out_of_range == 0 && std::abs(mid - 0.5) <= 1e-12 && constant_zero,
                 "cells outside [0,1]: " + std::to_string(out_of_range) + ", 50 -> " + fmt(mid, 15) +
                     ", constant column all zero: " + (constant_zero ? "yes" : "no"));
}

// --- 4 ----------------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv{"stylodet"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(argv, out, err);
  if (code != 0) std::cerr << "  stylodet";
  if (code != 0) {
    for (const auto& a : args) std::cerr << ' ' << a;
    std::cerr << " -> " << code << "\n" << err.str();
  }
  return code;
}

Outcome determinism(const fs::path& scratch) {
  const std::string corpus = test::data_path("fixtures/corpus").string();
  const std::vector<std::string> artifacts{"m.json",           "data/matrix.csv",     "data/matrix.json",
                                           "data/index_map.json", "bundle.json",      "report/runs.csv",
                                           "report/table1.csv", "report/table2.csv", "report/report.txt",
                                           "report/report.json"};
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* threads : {"1", "3"}) {
    const fs::path dir = scratch / ("run" + std::string(threads));
    const auto p = [&](const std::string& rel) { return (dir / rel).string(); };
    fs::create_directories(dir);
    if (cli({"--threads", threads, "ingest", corpus, "-o", p("m.json")}) != 0 ||
        cli({"--threads", threads, "build", "--manifest", p("m.json"), "--group-size", "10", "--bin-width", "8", "-o",
             p("data")}) != 0 ||
        cli({"--threads", threads, "train", "--data", p("data"), "--seed", "42", "-o", p("bundle.json")}) != 0 ||
        cli({"--threads", threads, "eval", "--data", p("data"), "--bundle", p("bundle.json"), "-o", p("report")}) != 0) {
      return {Outcome::fail, "pipeline command failed"};
    }
    std::map<std::string, std::string> bytes;
    for (const auto& a : artifacts) bytes[a] = read_text_file(dir / a);
    runs.push_back(std::move(bytes));
  }
  std::vector<std::string> differing;
  for (const auto& a : artifacts) {
    if (runs[0][a] != runs[1][a]) differing.push_back(a);
  }
  std::string detail = std::to_string(artifacts.size() - differing.size()) + "/" + std::to_string(artifacts.size()) +
                       " artifacts byte-identical across runs (threads 1 vs 3)";
  for (const auto& d : differing) detail += "; differs: " + d;
  return verdict(differing.empty(), detail);
}

// --- 5 ----------------------------------------------------------------------

Outcome synthetic_end_to_end(const fs::path& scratch) {
  SynthOptions so;
  so.files = 200;
  write_style_corpus(scratch / "synth", so);
  const CorpusManifest manifest = ingest_corpus(scratch / "synth", LabelRules::defaults());
  SweepConfig cfg;
  cfg.families = {FeatureFamily::ewd_nb_f};
  cfg.group_sizes = {30};
  cfg.models = {ModelKind::random_forest};
  cfg.seeds.clear();
  for (std::uint64_t s = 42; s < 52; ++s) cfg.seeds.push_back(s);
  cfg.bin_width = 0;
  cfg.max_columns = 100;
  cfg.threads = default_thread_count();
  const EvalReport report = run_sweep(manifest, scratch / "synth", cfg);
  if (report.runs.size() != 10) return {Outcome::fail, "expected 10 runs, got " + std::to_string(report.runs.size())};
  std::vector<double> acc, auc;
  std::size_t columns = 0;
  for (const auto& r : report.runs) {
    acc.push_back(r.metrics.accuracy);
    auc.push_back(r.metrics.auc.value_or(0.0));
    columns = r.columns;
  }
  const RunStats a = run_statistics(acc), u = run_statistics(auc);
  return verdict(manifest.entries.size() == 200 && a.mean >= 0.90 && u.mean >= 0.95 && a.std_dev <= 0.02 &&
                     columns <= 100,
                 "200 files, " + std::to_string(columns) + " columns, mean accuracy " + fmt(a.mean) +
                     " (>= 0.90), mean AUC " + fmt(u.mean) + " (>= 0.95), accuracy std dev " + fmt(a.std_dev) +
                     " (<= 0.02) over 10 seeds");
}

// --- 6 ----------------------------------------------------------------------

Outcome dimensionality() {
  const fs::path root = test::data_path("fixtures/corpus");
  const CorpusManifest manifest = ingest_corpus(root, LabelRules::defaults());
  const auto width = [&](FeatureFamily family, std::size_t group_size, std::size_t b, std::size_t* vocab) {
    FeatureConfig cfg;
    cfg.family = family;
    cfg.group_size = group_size;
    cfg.bin_width = b;
    ExtractOptions opts;
    opts.group_size = group_size;
    opts.bigrams = cfg.bigram_options();
    const Dataset ds = build_dataset(extract_corpus(manifest, root, opts), cfg);
    if (vocab) *vocab = ds.index_map.vocabulary_size();
    return ds.matrix.column_count;
  };
  std::vector<std::size_t> cnb;
  for (std::size_t gs : {10u, 40u, 70u}) cnb.push_back(width(FeatureFamily::cnb_f, gs, 1, nullptr));
  std::size_t vocab = 0;
  const std::size_t nb = width(FeatureFamily::nb_f, 40, 1, nullptr);
  const std::size_t ewd = width(FeatureFamily::ewd_nb_f, 40, kGoldenBinWidth, &vocab);
  const bool same_cnb = cnb[0] == cnb[1] && cnb[1] == cnb[2];
  const bool ok = same_cnb && nb > cnb[0] && ewd == 10 + (vocab + kGoldenBinWidth - 1) / kGoldenBinWidth &&
                  cnb[0] == kGoldenCnbWidth && nb == kGoldenNbWidth && ewd == kGoldenEwdWidth;
  return verdict(ok, "CNB-F widths " + std::to_string(cnb[0]) + "/" + std::to_string(cnb[1]) + "/" +
                         std::to_string(cnb[2]) + " (golden " + std::to_string(kGoldenCnbWidth) + "), NB-F " +
                         std::to_string(nb) + " (golden " + std::to_string(kGoldenNbWidth) + "), EWD-NB-F " +
                         std::to_string(ewd) + " = 10 + ceil(" + std::to_string(vocab) + "/" +
                         std::to_string(kGoldenBinWidth) + ") (golden " + std::to_string(kGoldenEwdWidth) + ")");
}

// --- 7 ----------------------------------------------------------------------

Outcome gpt_dataset_reproduction() {
  const char* root_env = std::getenv("STYLODET_GPT_DATASET");
  if (!root_env || !*root_env) return {Outcome::skip, "STYLODET_GPT_DATASET not set; dataset unavailable"};
  const fs::path root = root_env;
  const char* rules_env = std::getenv("STYLODET_GPT_LABELS");
  const LabelRules rules = rules_env && *rules_env ? LabelRules::load(rules_env) : LabelRules::defaults();
  const CorpusManifest manifest = ingest_corpus(root, rules);
  SweepConfig cfg;
  cfg.families = {FeatureFamily::ewd_nb_f};
  cfg.group_sizes = {40};
  cfg.models = {ModelKind::random_forest, ModelKind::gradient_boosted_trees};
  cfg.bin_width = 0;
  cfg.threads = default_thread_count();
  const EvalReport report = run_sweep(manifest, root, cfg);
  if (report.runs.size() != 2) return {Outcome::fail, "sweep produced " + std::to_string(report.runs.size()) + " runs"};
  double acc = 0.0, auc = 0.0;
  for (const auto& r : report.runs) {
    acc += r.metrics.accuracy / 2;
    auc += r.metrics.auc.value_or(0.0) / 2;
  }
  return verdict(acc >= 0.93 && auc >= 0.94, std::to_string(manifest.entries.size()) + " files, accuracy " +
                                                 fmt(acc) + " (>= 0.93), AUC " + fmt(auc) + " (>= 0.94)");
}

// --- 8 ----------------------------------------------------------------------

Outcome additivity() {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(test::data_path("fixtures/corpus"))) {
    if (e.path().extension() == ".java") files.emplace_back(e.path().string(), read_text_file(e.path()));
  }
  std::sort(files.begin(), files.end());
  SynthOptions so;
  so.files = 50 - files.size();
  so.seed = 7;
  for (auto& f : generate_style_corpus(so)) files.emplace_back(f.path, std::move(f.text));

  std::size_t violations = 0, checks = 0;
  for (const auto& [path, text] : files) {
    const SyntaxTree tree = parse_java(text, path);
    for (bool compressed : {false, true}) {
      const NestedBigramOptions opts{compressed, kDefaultDepthCap};
      const auto whole = extract_nested_bigrams(tree, {1, std::max<std::size_t>(1, count_physical_lines(text))}, opts);
      for (std::size_t gs : {10u, 30u, 70u}) {
        BigramCounts sum;
        for (const auto& g : extract_text(text, path, gs, opts)) sum.merge(g.counts);
        ++checks;
        bool same = sum.size() == whole.size() && sum.total() == whole.total();
        for (const auto& [k, v] : whole.entries()) same &= sum.count(k) == v;
        violations += !same;
      }
    }
  }
  return verdict(files.size() == 50 && violations == 0,
                 std::to_string(files.size()) + " files, " + std::to_string(checks - violations) + "/" +
                     std::to_string(checks) + " (file, family, group size) checks exact");
}

}  // namespace

int main() {
  test::TempDir scratch;
  const std::vector<Criterion> criteria{
      {1, "formula oracles", 30, formula_oracles},
      {2, "metric oracles", 10, metric_oracles},
      {3, "winsorization", 0, winsorization},
      {4, "determinism", 0, [&] { return determinism(scratch.path()); }},
      {5, "synthetic end-to-end", 180, [&] { return synthetic_end_to_end(scratch.path()); }},
      {6, "dimensionality", 0, dimensionality},
      {7, "GPT Dataset reproduction", 900, gpt_dataset_reproduction},
      {8, "additivity", 0, additivity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Outcome::pass && c.budget_s > 0 && secs > c.budget_s) {
      o = {Outcome::fail, o.detail + "; exceeded " + fmt(c.budget_s, 0) + " s budget"};
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::fail;
    std::cout << tag << "  criterion " << c.id << " (" << c.name << "): " << o.detail << " [" << fmt(secs, 2)
              << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "acceptance: all required criteria passed" : "acceptance: failures present")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
