// SPDX-License-Identifier: Apache-2.0
#include "stylodet/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "stylodet/error.hpp"
#include "stylodet/pipeline.hpp"
#include "stylodet/rng.hpp"

namespace stylodet {

std::string_view to_string(SplitGranularity granularity) {
  return granularity == SplitGranularity::file ? "file" : "group";
}

SplitGranularity parse_granularity(std::string_view text) {
  if (text == "group") return SplitGranularity::group;
  if (text == "file") return SplitGranularity::file;
  throw InputError("unknown split granularity '" + std::string(text) + "' (expected group or file)");
}

// --- splitting ------------------------------------------------------------

SplitResult split_rows(std::span<const int> labels, std::span<const std::size_t> file_ids, double test_fraction,
                       std::uint64_t seed, SplitGranularity granularity) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InputError("test fraction must be in (0, 1)");
  if (granularity == SplitGranularity::file && file_ids.size() != labels.size()) {
    throw InputError("file-level split needs one file id per row");
  }

  // Units are rows or files; each unit carries the majority label of its rows.
  std::vector<std::size_t> unit_of(labels.size());
  std::vector<std::array<std::size_t, 2>> unit_votes;
  if (granularity == SplitGranularity::group) {
    std::iota(unit_of.begin(), unit_of.end(), std::size_t{0});
    unit_votes.resize(labels.size());
  } else {
    std::map<std::size_t, std::size_t> ids;
    for (std::size_t r = 0; r < labels.size(); ++r) ids.emplace(file_ids[r], 0);
    std::size_t next = 0;
    for (auto& [id, unit] : ids) unit = next++;
    for (std::size_t r = 0; r < labels.size(); ++r) unit_of[r] = ids[file_ids[r]];
    unit_votes.resize(ids.size());
  }
  for (std::size_t r = 0; r < labels.size(); ++r) ++unit_votes[unit_of[r]][labels[r] != 0 ? 1 : 0];

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t u = 0; u < unit_votes.size(); ++u) {
    by_class[unit_votes[u][1] > unit_votes[u][0] ? 1 : 0].push_back(u);
  }

  Rng rng(seed);
  std::vector<char> in_test(unit_votes.size(), 0);
  for (int c = 0; c < 2; ++c) {
    auto& units = by_class[static_cast<std::size_t>(c)];
    if (units.size() < 2) {
      throw InputError("class " + std::to_string(c) +
                       " cannot appear on both sides of the split; adjust the test fraction or add data");
    }
    rng.shuffle(std::span(units));
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(units.size()) * test_fraction));
    take = std::clamp<std::size_t>(take, 1, units.size() - 1);
    for (std::size_t k = 0; k < take; ++k) in_test[units[k]] = 1;
  }

  SplitResult out;
  for (std::size_t r = 0; r < labels.size(); ++r) (in_test[unit_of[r]] ? out.test : out.train).push_back(r);
  return out;
}

SplitResult split(const FeatureMatrix& matrix, double test_fraction, std::uint64_t seed,
                  SplitGranularity granularity) {
  const auto labels = matrix.labels();
  const auto files = matrix.file_ids();
  return split_rows(labels, files, test_fraction, seed, granularity);
}

// --- metrics --------------------------------------------------------------

std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("scores and labels differ in length");
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const auto np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw InputError("metrics need equal-length, non-empty scores and labels");
  }
  Metrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++m.tp;
    if (predicted && !actual) ++m.fp;
    if (!predicted && !actual) ++m.tn;
    if (!predicted && actual) ++m.fn;
  }
  const auto total = static_cast<double>(scores.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.auc = rank_auc(scores, labels);
  return m;
}

RunStats run_statistics(std::span<const double> values) {
  RunStats s;
  s.n = values.size();
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  s.median = percentile(v, 0.5);
  s.p10 = percentile(v, 0.10);
  s.p90 = percentile(v, 0.90);
  return s;
}

double welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("Welch t-test needs at least 2 values per sample");
  const RunStats sa = run_statistics(a);
  const RunStats sb = run_statistics(b);
  const double va = sa.std_dev * sa.std_dev / static_cast<double>(sa.n);
  const double vb = sb.std_dev * sb.std_dev / static_cast<double>(sb.n);
  if (va + vb == 0.0) return sa.mean == sb.mean ? 1.0 : 0.0;
  const double t = (sa.mean - sb.mean) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(sa.n - 1) + vb * vb / static_cast<double>(sb.n - 1));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double fisher_combine(std::span<const double> p_values) {
  if (p_values.empty()) throw InputError("Fisher combination needs at least one p-value");
  double statistic = 0.0;
  for (double p : p_values) {
    if (p <= 0.0) return 0.0;
    statistic += -2.0 * std::log(std::min(p, 1.0));
  }
  const boost::math::chi_squared dist(2.0 * static_cast<double>(p_values.size()));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

// --- sweep ----------------------------------------------------------------

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json fam = nlohmann::json::array();
  for (auto f : families) fam.push_back(to_string(f));
  nlohmann::json mod = nlohmann::json::array();
  for (auto m : models) mod.push_back(to_string(m));
  return {{"families", fam},           {"group_sizes", group_sizes},
          {"models", mod},             {"seeds", seeds},
          {"bin_width", bin_width},    {"max_columns", max_columns},
          {"depth_cap", depth_cap},    {"test_fraction", test_fraction},
          {"granularity", to_string(granularity)}, {"label_rule", positive.to_string()}};
}

Metrics evaluate_split(const ModelSpec& spec, const FeatureMatrix& raw, const SplitResult& split,
                       std::size_t threads) {
  const FeatureMatrix normalized = winsorize(raw, split.train);
  const TrainedModel model = train(spec, normalized, split.train, threads);
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t r : split.test) {
    scores.push_back(model.predict_score(normalized.rows[r].values));
    labels.push_back(normalized.rows[r].label);
  }
  return compute_metrics(scores, labels);
}

EvalReport run_sweep(const CorpusManifest& manifest, const std::filesystem::path& root, const SweepConfig& config) {
  std::vector<RunRow> runs;
  std::vector<std::string> skipped;
  for (const std::size_t group_size : config.group_sizes) {
    for (const bool compressed : {false, true}) {
      std::vector<FeatureFamily> families;
      for (auto f : config.families) {
        if ((f == FeatureFamily::cnb_f) == compressed) families.push_back(f);
      }
      if (families.empty()) continue;

      ExtractOptions opts;
      opts.group_size = group_size;
      opts.bigrams = NestedBigramOptions{compressed, config.depth_cap};
      opts.positive = config.positive;
      opts.threads = config.threads;
      ExtractionResult extraction;
      try {
        extraction = extract_corpus(manifest, root, opts);
      } catch (const Error& ex) {
        for (auto f : families) {
          skipped.push_back(std::string(to_string(f)) + "/" + std::to_string(group_size) + ": " + ex.what());
        }
        continue;
      }

      for (const FeatureFamily family : families) {
        const std::string cell = std::string(to_string(family)) + "/" + std::to_string(group_size);
        try {
          FeatureConfig fc;
          fc.family = family;
          fc.group_size = group_size;
          fc.depth_cap = config.depth_cap;
          if (family == FeatureFamily::ewd_nb_f) {
            std::size_t vocabulary = 0;
            {
              FeatureIndexMap probe(family, std::string(kGrammarId), fc.s1, fc.depth_cap);
              for (const auto& g : extraction.groups) extend_feature_index(probe, g.counts, fc);
              vocabulary = probe.vocabulary_size();
            }
            fc.bin_width = config.bin_width > 0 ? config.bin_width
                                                : auto_bin_width(vocabulary, config.max_columns - fc.s2);
          }
          const Dataset ds = build_dataset(extraction, fc, config.threads);
          for (const ModelKind kind : config.models) {
            for (const std::uint64_t seed : config.seeds) {
              const SplitResult sp = split(ds.matrix, config.test_fraction, seed, config.granularity);
              RunRow row;
              row.family = std::string(to_string(family));
              row.group_size = group_size;
              row.model = std::string(to_string(kind));
              row.seed = seed;
              row.metrics = evaluate_split(ModelSpec::defaults(kind, seed), ds.matrix, sp, config.threads);
              row.columns = ds.matrix.column_count;
              row.train_rows = sp.train.size();
              row.test_rows = sp.test.size();
              runs.push_back(std::move(row));
            }
          }
        } catch (const Error& ex) {
          skipped.push_back(cell + ": " + ex.what());
        }
      }
    }
  }
  EvalReport report = summarize(std::move(runs));
  report.skipped = std::move(skipped);
  if (config.granularity == SplitGranularity::group) {
    report.split_note =
        "group-level split: groups of one file may fall on both sides, which can inflate held-out scores";
  }
  return report;
}

EvalReport summarize(std::vector<RunRow> runs) {
  EvalReport report;
  std::stable_sort(runs.begin(), runs.end(), [](const RunRow& a, const RunRow& b) {
    return std::tie(a.group_size, a.family, a.model, a.seed) < std::tie(b.group_size, b.family, b.model, b.seed);
  });

  auto summarize_cell = [](const std::vector<const RunRow*>& members, const std::string& model) {
    CellSummary c;
    c.family = members.front()->family;
    c.group_size = members.front()->group_size;
    c.model = model;
    c.columns = members.front()->columns;
    std::vector<double> acc, f1, prec, auc;
    for (const RunRow* r : members) {
      acc.push_back(r->metrics.accuracy);
      f1.push_back(r->metrics.f1);
      prec.push_back(r->metrics.precision);
      if (r->metrics.auc) auc.push_back(*r->metrics.auc);
    }
    c.accuracy_stats = run_statistics(acc);
    c.accuracy = c.accuracy_stats.mean;
    c.f1 = run_statistics(f1).mean;
    c.precision = run_statistics(prec).mean;
    if (!auc.empty()) c.auc = run_statistics(auc).mean;
    return c;
  };

  // (group_size, family) -> model -> runs
  std::map<std::pair<std::size_t, std::string>, std::map<std::string, std::vector<const RunRow*>>> cells;
  for (const auto& r : runs) cells[{r.group_size, r.family}][r.model].push_back(&r);
  for (const auto& [key, by_model] : cells) {
    std::vector<const RunRow*> all;
    for (const auto& [model, members] : by_model) {
      report.cells.push_back(summarize_cell(members, model));
      all.insert(all.end(), members.begin(), members.end());
    }
    if (by_model.size() > 1) report.cells.push_back(summarize_cell(all, "all"));
  }

  // Pairwise accuracy tests between families sharing group size and model.
  std::map<std::pair<std::size_t, std::string>, std::map<std::string, std::vector<double>>> acc;
  for (const auto& r : runs) acc[{r.group_size, r.model}][r.family].push_back(r.metrics.accuracy);
  std::vector<double> ps;
  for (const auto& [key, by_family] : acc) {
    for (auto a = by_family.begin(); a != by_family.end(); ++a) {
      for (auto b = std::next(a); b != by_family.end(); ++b) {
        if (a->second.size() < 2 || b->second.size() < 2) continue;
        PairwiseTest t{key.first, key.second, a->first, b->first, welch_t_test(a->second, b->second)};
        ps.push_back(t.p_value);
        report.tests.push_back(std::move(t));
      }
    }
  }
  if (!ps.empty()) report.combined_p = fisher_combine(ps);
  report.runs = std::move(runs);
  return report;
}

// --- rendering ------------------------------------------------------------

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
  }
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out += " | ";
      out += cells[j];
      out.append(width[j] - cells[j].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out.append(total + 3 * (width.size() - 1), '-');
  out += '\n';
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace

std::string EvalReport::runs_csv() const {
  std::string out =
      "family,group_size,model,seed,accuracy,f1,auc,precision,recall,tp,fp,tn,fn,columns,train_rows,test_rows\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    out += r.family + "," + std::to_string(r.group_size) + "," + r.model + "," + std::to_string(r.seed) + "," +
           format_double(m.accuracy) + "," + format_double(m.f1) + "," + opt(m.auc) + "," +
           format_double(m.precision) + "," + format_double(m.recall) + "," + std::to_string(m.tp) + "," +
           std::to_string(m.fp) + "," + std::to_string(m.tn) + "," + std::to_string(m.fn) + "," +
           std::to_string(r.columns) + "," + std::to_string(r.train_rows) + "," + std::to_string(r.test_rows) + "\n";
  }
  return out;
}

std::vector<RunRow> parse_runs_csv(std::string_view csv) {
  std::vector<RunRow> runs;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("family,group_size,model,seed,")) {
    throw InputError("runs CSV: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 16) throw InputError("runs CSV: expected 16 fields, got " + std::to_string(f.size()));
    try {
      RunRow r;
      r.family = f[0];
      r.group_size = std::stoull(f[1]);
      r.model = f[2];
      r.seed = std::stoull(f[3]);
      r.metrics.accuracy = std::stod(f[4]);
      r.metrics.f1 = std::stod(f[5]);
      if (!f[6].empty()) r.metrics.auc = std::stod(f[6]);
      r.metrics.precision = std::stod(f[7]);
      r.metrics.recall = std::stod(f[8]);
      r.metrics.tp = std::stoull(f[9]);
      r.metrics.fp = std::stoull(f[10]);
      r.metrics.tn = std::stoull(f[11]);
      r.metrics.fn = std::stoull(f[12]);
      r.columns = std::stoull(f[13]);
      r.train_rows = std::stoull(f[14]);
      r.test_rows = std::stoull(f[15]);
      runs.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InputError("runs CSV: malformed number in line: " + line);
    }
  }
  return runs;
}

std::string EvalReport::table1_csv() const {
  std::string out = "family,group_size,model,accuracy,f1,auc,precision,columns\n";
  for (const auto& c : cells) {
    out += c.family + "," + std::to_string(c.group_size) + "," + c.model + "," + format_double(c.accuracy) + "," +
           format_double(c.f1) + "," + opt(c.auc) + "," + format_double(c.precision) + "," +
           std::to_string(c.columns) + "\n";
  }
  return out;
}

std::string EvalReport::table2_csv() const {
  std::string out = "family,group_size,model,runs,mean,median,std_dev,p10,p90\n";
  for (const auto& c : cells) {
    const auto& s = c.accuracy_stats;
    out += c.family + "," + std::to_string(c.group_size) + "," + c.model + "," + std::to_string(s.n) + "," +
           format_double(s.mean) + "," + format_double(s.median) + "," + format_double(s.std_dev) + "," +
           format_double(s.p10) + "," + format_double(s.p90) + "\n";
  }
  return out;
}

std::string EvalReport::text() const {
  std::vector<std::vector<std::string>> t1, t2, t3;
  for (const auto& c : cells) {
    t1.push_back({c.family, std::to_string(c.group_size), c.model, fixed(c.accuracy), fixed(c.f1),
                  c.auc ? fixed(*c.auc) : "n/a", fixed(c.precision), std::to_string(c.columns)});
    const auto& s = c.accuracy_stats;
    t2.push_back({c.family, std::to_string(c.group_size), c.model, std::to_string(s.n), fixed(s.mean),
                  fixed(s.median), fixed(s.std_dev), fixed(s.p10), fixed(s.p90)});
  }
  for (const auto& t : tests) {
    std::ostringstream p;
    p << t.p_value;
    t3.push_back({std::to_string(t.group_size), t.model, t.family_a, t.family_b, p.str()});
  }
  std::string out = "Detection results (mean over runs)\n";
  out += render_table({"Features", "Group Size", "Model", "Accuracy", "F1", "AUC", "Precision", "Columns"}, t1);
  out += "\nAccuracy over repeated runs\n";
  out += render_table({"Features", "Group Size", "Model", "Runs", "Mean", "Median", "Std Dev", "10th Pctl", "90th Pctl"},
                      t2);
  if (!t3.empty()) {
    out += "\nPairwise Welch t-tests on accuracy\n";
    out += render_table({"Group Size", "Model", "A", "B", "p-value"}, t3);
    std::ostringstream p;
    p << *combined_p;
    out += "Fisher combined p-value: " + p.str() + "\n";
  }
  if (!split_note.empty()) out += "\nNote: " + split_note + "\n";
  for (const auto& s : skipped) out += "Skipped: " + s + "\n";
  return out;
}

nlohmann::json EvalReport::to_json() const {
  auto metrics_json = [](const Metrics& m) {
    nlohmann::json j{{"accuracy", m.accuracy}, {"f1", m.f1},   {"precision", m.precision}, {"recall", m.recall},
                     {"tp", m.tp},             {"fp", m.fp},   {"tn", m.tn},               {"fn", m.fn}};
    j["auc"] = m.auc ? nlohmann::json(*m.auc) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs) {
    runs_json.push_back({{"family", r.family}, {"group_size", r.group_size}, {"model", r.model},
                         {"seed", r.seed}, {"metrics", metrics_json(r.metrics)}, {"columns", r.columns},
                         {"train_rows", r.train_rows}, {"test_rows", r.test_rows}});
  }
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    const auto& s = c.accuracy_stats;
    cells_json.push_back({{"family", c.family},
                          {"group_size", c.group_size},
                          {"model", c.model},
                          {"accuracy", c.accuracy},
                          {"f1", c.f1},
                          {"auc", c.auc ? nlohmann::json(*c.auc) : nlohmann::json(nullptr)},
                          {"precision", c.precision},
                          {"columns", c.columns},
                          {"accuracy_stats",
                           {{"runs", s.n}, {"mean", s.mean}, {"median", s.median}, {"std_dev", s.std_dev},
                            {"p10", s.p10}, {"p90", s.p90}}}});
  }
  nlohmann::json tests_json = nlohmann::json::array();
  for (const auto& t : tests) {
    tests_json.push_back({{"group_size", t.group_size}, {"model", t.model}, {"a", t.family_a},
                          {"b", t.family_b}, {"p_value", t.p_value}});
  }
  return {{"runs", runs_json},
          {"cells", cells_json},
          {"tests", tests_json},
          {"combined_p", combined_p ? nlohmann::json(*combined_p) : nlohmann::json(nullptr)},
          {"skipped", skipped},
          {"split_note", split_note}};
}

void EvalReport::save(const std::filesystem::path& dir, const nlohmann::json& config) const {
  std::filesystem::create_directories(dir);
  write_text_file_atomic(dir / "runs.csv", runs_csv());
  write_text_file_atomic(dir / "table1.csv", table1_csv());
  write_text_file_atomic(dir / "table2.csv", table2_csv());
  write_text_file_atomic(dir / "report.txt", text());
  nlohmann::json doc = to_json();
  doc["config"] = config;
  write_text_file_atomic(dir / "report.json", doc.dump(2) + "\n");
}

}  // namespace stylodet
