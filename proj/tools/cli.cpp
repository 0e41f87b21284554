// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "stylodet/ast.hpp"
#include "stylodet/bundle.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/error.hpp"
#include "stylodet/eval.hpp"
#include "stylodet/features.hpp"
#include "stylodet/models.hpp"
#include "stylodet/parallel.hpp"
#include "stylodet/pipeline.hpp"
#include "stylodet/rewrite.hpp"
#include "stylodet/synth.hpp"

namespace stylodet::cli {

namespace fs = std::filesystem;

namespace {

// Values from --config fill in any option the command line left unset.
class ConfigFile {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    doc_ = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (doc_.is_discarded() || !doc_.is_object()) throw InputError("config: " + path + " is not a JSON object");
  }

  template <typename T>
  void fill(const CLI::Option* opt, const char* key, T& value) const {
    if (opt->count() > 0 || !doc_.contains(key)) return;
    try {
      value = doc_[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      throw InputError(std::string("config: bad value for '") + key + "'");
    }
  }

  const nlohmann::json& doc() const { return doc_; }

 private:
  nlohmann::json doc_ = nlohmann::json::object();
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct BuildArgs {
  std::string manifest;
  std::string root;
  std::string family = "EWD-NB-F";
  std::size_t group_size = 30;
  std::string bin_width = "3000";
  std::size_t max_columns = 100;
  std::string label_rule = "origin";
  std::uint32_t depth_cap = kDefaultDepthCap;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string model = "rf";
  std::uint64_t seed = kDefaultSeed;
  double test_fraction = kDefaultTestFraction;
  std::string split = "group";
  bool all_rows = false;
  std::string out;
};

struct MatrixFiles {
  fs::path csv, sidecar, index_map;
};

MatrixFiles matrix_files(const fs::path& dir) {
  return {dir / "matrix.csv", dir / "matrix.json", dir / "index_map.json"};
}

nlohmann::json load_json(const fs::path& file) {
  auto doc = nlohmann::json::parse(read_text_file(file), nullptr, false);
  if (doc.is_discarded()) throw InputError("invalid JSON in " + file.string());
  return doc;
}

// --- commands -------------------------------------------------------------

int cmd_ingest(const std::string& root, const std::string& rules_path, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const LabelRules rules = rules_path.empty() ? LabelRules::defaults() : LabelRules::load(rules_path);
  const CorpusManifest manifest = ingest_corpus(root, rules);
  for (const auto& w : manifest.warnings) err << "warning: " << w << "\n";
  if (out_path.empty()) {
    out << manifest.to_json().dump(2) << "\n";
  } else {
    manifest.save(out_path);
    out << "ingested " << manifest.entries.size() << " files -> " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_build(const BuildArgs& a, std::size_t threads, std::ostream& out, std::ostream& err) {
  const CorpusManifest manifest = CorpusManifest::load(a.manifest);
  if (manifest.entries.empty()) throw InputError("empty corpus: manifest has no entries");
  const fs::path root = a.root.empty() ? fs::path(manifest.root) : fs::path(a.root);

  FeatureConfig config;
  config.family = parse_family(a.family);
  config.group_size = a.group_size;
  config.depth_cap = a.depth_cap;

  ExtractOptions opts;
  opts.group_size = a.group_size;
  opts.bigrams = config.bigram_options();
  opts.positive = PositiveClassRule::parse(a.label_rule);
  opts.threads = threads;
  const ExtractionResult extraction = extract_corpus(manifest, root, opts);
  for (const auto& f : extraction.failures) err << "skipped: " << f << "\n";
  if (extraction.failures.size() == extraction.files) throw InputError("no file could be read and parsed");

  if (config.family == FeatureFamily::ewd_nb_f) {
    if (a.bin_width == "auto") {
      FeatureIndexMap probe(config.family, std::string(kGrammarId), config.s1, config.depth_cap);
      for (const auto& g : extraction.groups) extend_feature_index(probe, g.counts, config);
      config.bin_width = auto_bin_width(probe.vocabulary_size(), a.max_columns - config.s2);
    } else {
      config.bin_width = std::stoul(a.bin_width);
    }
  }
  config.validate();
  const Dataset ds = build_dataset(extraction, config, threads);

  const nlohmann::json provenance{{"corpus_root", manifest.root},
                                  {"label_rule", opts.positive.to_string()},
                                  {"feature_config", config.to_json()},
                                  {"grammar_id", kGrammarId},
                                  {"vocabulary", ds.index_map.vocabulary_size()},
                                  {"parse_failures", extraction.failures.size()}};
  const auto files = matrix_files(a.out);
  fs::create_directories(a.out);
  save_matrix(ds.matrix, files.csv, files.sidecar, provenance);
  write_text_file_atomic(files.index_map, ds.index_map.to_json(config).dump(1) + "\n");
  out << "built " << ds.matrix.rows.size() << " rows x " << ds.matrix.column_count << " columns (vocabulary "
      << ds.index_map.vocabulary_size() << ", b=" << config.bin_width << ", " << extraction.failures.size()
      << " files skipped) -> " << a.out << "\n";
  return kExitOk;
}

struct LoadedData {
  FeatureMatrix matrix;
  FeatureIndexMap index_map;
  FeatureConfig config;
  nlohmann::json provenance;
};

LoadedData load_data(const fs::path& dir) {
  const auto files = matrix_files(dir);
  const nlohmann::json sidecar = load_json(files.sidecar);
  LoadedData d{load_matrix(files.csv, files.sidecar), FeatureIndexMap::from_json(load_json(files.index_map)),
               FeatureConfig::from_json(sidecar.at("provenance").at("feature_config")), sidecar.at("provenance")};
  if (d.index_map.family() != d.config.family || row_width(d.index_map, d.config) != d.matrix.column_count) {
    throw ArtifactMismatch("index map does not match matrix in " + dir.string());
  }
  return d;
}

int cmd_train(const TrainArgs& a, std::size_t threads, std::ostream& out) {
  const LoadedData d = load_data(a.data);
  const ModelSpec spec = ModelSpec::defaults(parse_model_kind(a.model), a.seed);
  const SplitGranularity granularity = parse_granularity(a.split);

  SplitResult sp;
  if (a.all_rows) {
    sp.train.resize(d.matrix.rows.size());
    std::iota(sp.train.begin(), sp.train.end(), std::size_t{0});
  } else {
    sp = split(d.matrix, a.test_fraction, a.seed, granularity);
  }
  const FeatureMatrix normalized = winsorize(d.matrix, sp.train);
  TrainedModel model = train(spec, normalized, sp.train, threads);

  nlohmann::json run_config = d.provenance;
  run_config["model"] = to_string(spec.kind);
  run_config["seed"] = a.seed;
  run_config["split"] = {{"all_rows", a.all_rows},
                         {"test_fraction", a.test_fraction},
                         {"granularity", to_string(granularity)},
                         {"seed", a.seed}};
  const ModelBundle bundle =
      ModelBundle::assemble(std::move(model), d.index_map, *normalized.normalization, d.config, run_config);
  bundle.save(a.out);
  out << "trained " << to_string(spec.kind) << " on " << sp.train.size() << " rows -> " << a.out << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& data_dir, const std::string& bundle_path, const std::string& out_dir,
             std::ostream& out) {
  const LoadedData d = load_data(data_dir);
  const ModelBundle bundle = ModelBundle::load(bundle_path);
  if (!(bundle.index_map == d.index_map)) throw ArtifactMismatch("bundle was trained on a different dataset");

  const auto& split_cfg = bundle.run_config.at("split");
  if (split_cfg.value("all_rows", false)) throw InputError("bundle was trained on all rows; nothing held out");
  const SplitResult sp = split(d.matrix, split_cfg.at("test_fraction").get<double>(),
                               split_cfg.at("seed").get<std::uint64_t>(),
                               parse_granularity(split_cfg.at("granularity").get<std::string>()));
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t r : sp.test) {
    auto row = d.matrix.rows[r].values;
    bundle.normalization.apply(row);
    scores.push_back(bundle.model.predict_score(row));
    labels.push_back(d.matrix.rows[r].label);
  }
  RunRow run;
  run.family = std::string(to_string(d.config.family));
  run.group_size = d.config.group_size;
  run.model = std::string(to_string(bundle.model.spec.kind));
  run.seed = bundle.model.spec.seed;
  run.metrics = compute_metrics(scores, labels);
  run.columns = d.matrix.column_count;
  run.train_rows = sp.train.size();
  run.test_rows = sp.test.size();
  EvalReport report = summarize({run});
  if (split_cfg.at("granularity") == "group") {
    report.split_note = "group-level split: groups of one file may fall on both sides";
  }
  if (!out_dir.empty()) report.save(out_dir, bundle.run_config);
  out << report.text();
  return kExitOk;
}

int cmd_sweep(const CorpusManifest& manifest, const fs::path& root, const SweepConfig& config,
              const std::string& out_dir, std::ostream& out) {
  const EvalReport report = run_sweep(manifest, root, config);
  nlohmann::json echo = config.to_json();
  echo["corpus_root"] = manifest.root;
  if (!out_dir.empty()) report.save(out_dir, echo);
  out << report.text();
  return report.runs.empty() ? kExitInput : kExitOk;
}

int cmd_detect(const std::string& bundle_path, const std::vector<std::string>& inputs, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const ModelBundle bundle = ModelBundle::load(bundle_path);
  std::string csv = "path,start_line,end_line,score,class\n";
  AssembleStats stats;
  for (const auto& input : inputs) {
    const std::string text = read_text_file(input);
    const DetectResult r = detect(bundle, text, input);
    stats.unknown_keys += r.stats.unknown_keys;
    stats.unknown_mass += r.stats.unknown_mass;
    for (const auto& g : r.groups) {
      csv += g.path + "," + std::to_string(g.lines.first) + "," + std::to_string(g.lines.last) + "," +
             format_double(g.score) + "," + (g.positive ? "1" : "0") + "\n";
    }
  }
  if (stats.unknown_keys > 0) {
    err << "note: dropped " << stats.unknown_keys << " unseen bigram keys (" << stats.unknown_mass
        << " occurrences)\n";
  }
  if (out_path.empty()) {
    out << csv;
  } else {
    write_text_file_atomic(out_path, csv);
  }
  return kExitOk;
}

int cmd_report(const std::string& runs_path, const std::string& format, const std::string& out_dir,
               std::ostream& out) {
  const EvalReport report = summarize(parse_runs_csv(read_text_file(runs_path)));
  if (!out_dir.empty()) report.save(out_dir, nlohmann::json{{"source", runs_path}});
  if (format == "text") {
    out << report.text();
  } else if (format == "csv") {
    out << report.table1_csv() << "\n" << report.table2_csv();
  } else if (format == "json") {
    out << report.to_json().dump(2) << "\n";
  } else {
    throw InputError("unknown report format '" + format + "' (expected text, csv, json)");
  }
  return kExitOk;
}

int cmd_rewrite(const RewriteSettings& settings, const std::vector<std::string>& inputs, const std::string& out_dir,
                const BatchOptions& batch, const std::string& manifest_path, const std::string& author,
                std::ostream& out, std::ostream& err) {
  settings.validate();
  std::vector<RewriteJob> jobs;
  for (const auto& input : inputs) {
    jobs.push_back(RewriteJob{input, fs::path(out_dir) / fs::path(input).filename(), settings});
  }
  const auto errors = rewrite_files(jobs, batch);

  std::optional<CorpusManifest> manifest;
  if (!manifest_path.empty()) manifest = CorpusManifest::load(manifest_path);
  std::size_t failed = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      err << "error: " << *errors[i] << "\n";
      ++failed;
      continue;
    }
    out << jobs[i].source_path.string() << " -> " << jobs[i].output_path.string() << "\n";
    if (manifest) {
      const fs::path rel = fs::relative(jobs[i].output_path, manifest->root);
      register_rewrite(*manifest, rel.generic_string(), settings.model_name, author,
                       read_text_file(jobs[i].output_path));
    }
  }
  if (manifest) manifest->save(manifest_path);
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detect LLM-rewritten fragments in Java code with discretized nested-bigram features"};
  app.name("stylodet");
  app.require_subcommand(1);

  std::string config_path;
  std::size_t threads = default_thread_count();
  app.add_option("--config", config_path, "JSON file with default option values");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: logical cores)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Scan a corpus directory into a labeled manifest");
  std::string ingest_root, ingest_rules, ingest_out;
  ingest->add_option("root", ingest_root, "Corpus root")->required();
  auto* ingest_rules_opt = ingest->add_option("--label-rule", ingest_rules, "JSON path-prefix labeling rules");
  ingest->add_option("-o,--output", ingest_out, "Manifest file (default: stdout)");

  // rewrite
  auto* rewrite = app.add_subcommand("rewrite", "Rewrite Java files through a chat-completions endpoint");
  std::vector<std::string> rewrite_inputs;
  std::string rewrite_out, rewrite_endpoint, rewrite_model, rewrite_prompt, rewrite_manifest, rewrite_author = "llm";
  std::size_t rewrite_max_chars = 4000, rewrite_parallel = 2;
  long rewrite_interval_ms = 0;
  int rewrite_attempts = 5;
  rewrite->add_option("files", rewrite_inputs, "Java files to rewrite")->required();
  rewrite->add_option("--out-dir", rewrite_out, "Directory for rewritten files")->required();
  auto* endpoint_opt = rewrite->add_option("--endpoint", rewrite_endpoint, "Chat-completions URL");
  auto* model_opt = rewrite->add_option("--model", rewrite_model, "Model name sent to the endpoint");
  auto* max_chars_opt = rewrite->add_option("--max-chars", rewrite_max_chars, "Characters per request");
  auto* prompt_opt = rewrite->add_option("--prompt", rewrite_prompt, "Prompt text, or 'gpt' / 'gcj' presets");
  rewrite->add_option("--parallelism", rewrite_parallel, "Concurrent files");
  rewrite->add_option("--interval-ms", rewrite_interval_ms, "Minimum gap between requests");
  rewrite->add_option("--max-attempts", rewrite_attempts, "Attempts per request before giving up");
  rewrite->add_option("--manifest", rewrite_manifest, "Manifest to register rewritten files in");
  rewrite->add_option("--author", rewrite_author, "Author label for registered files");

  // build
  auto* build = app.add_subcommand("build", "Build the feature matrix and index map from a manifest");
  BuildArgs b;
  build->add_option("--manifest", b.manifest, "Manifest file")->required();
  auto* root_opt = build->add_option("--root", b.root, "Corpus root (default: from manifest)");
  auto* family_opt = build->add_option("--family", b.family, "NB-F, CNB-F or EWD-NB-F");
  auto* group_opt = build->add_option("--group-size", b.group_size, "Lines per code group");
  auto* bin_opt = build->add_option("--bin-width", b.bin_width, "EWD bin width, or 'auto'");
  auto* maxcol_opt = build->add_option("--max-columns", b.max_columns, "Column budget for --bin-width auto");
  auto* label_opt = build->add_option("--label-rule", b.label_rule, "origin | authors:a,b,...");
  auto* depth_opt = build->add_option("--depth-cap", b.depth_cap, "Nesting depth cap (0 disables)");
  build->add_option("-o,--output", b.out, "Output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model bundle on a built matrix");
  TrainArgs t;
  train_cmd->add_option("--data", t.data, "Directory written by build")->required();
  auto* kind_opt = train_cmd->add_option("--model", t.model, "rf or gbt");
  auto* seed_opt = train_cmd->add_option("--seed", t.seed, "Seed for split and model");
  auto* frac_opt = train_cmd->add_option("--test-fraction", t.test_fraction, "Held-out fraction");
  auto* split_opt = train_cmd->add_option("--split", t.split, "group or file");
  train_cmd->add_flag("--all", t.all_rows, "Train on every row (no held-out split)");
  train_cmd->add_option("-o,--output", t.out, "Bundle file")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a bundle on its held-out split");
  std::string eval_data, eval_bundle, eval_out;
  eval_cmd->add_option("--data", eval_data, "Directory written by build")->required();
  eval_cmd->add_option("--bundle", eval_bundle, "Bundle written by train")->required();
  eval_cmd->add_option("-o,--output", eval_out, "Report directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate a grid of families x group sizes x models x seeds");
  std::string sweep_manifest, sweep_root, sweep_families = "NB-F,CNB-F,EWD-NB-F", sweep_sizes = "10,40,70",
                                          sweep_models = "rf,gbt", sweep_seeds, sweep_out,
                                          sweep_label = "origin", sweep_split = "group";
  std::size_t sweep_repeats = 1, sweep_bin = 0, sweep_maxcol = 100;
  double sweep_fraction = kDefaultTestFraction;
  sweep->add_option("--manifest", sweep_manifest, "Manifest file")->required();
  sweep->add_option("--root", sweep_root, "Corpus root (default: from manifest)");
  sweep->add_option("--families", sweep_families, "Comma-separated feature families");
  sweep->add_option("--group-sizes", sweep_sizes, "Comma-separated group sizes");
  sweep->add_option("--models", sweep_models, "Comma-separated model kinds");
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds (overrides --repeats)");
  sweep->add_option("--repeats", sweep_repeats, "Seeds 42, 43, ... one per repeat");
  sweep->add_option("--bin-width", sweep_bin, "EWD bin width (0 = fit --max-columns)");
  sweep->add_option("--max-columns", sweep_maxcol, "Column budget when --bin-width is 0");
  sweep->add_option("--test-fraction", sweep_fraction, "Held-out fraction");
  sweep->add_option("--split", sweep_split, "group or file");
  sweep->add_option("--label-rule", sweep_label, "origin | authors:a,b,...");
  sweep->add_option("-o,--output", sweep_out, "Report directory");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Score code groups of Java files");
  std::string detect_bundle, detect_out;
  std::vector<std::string> detect_inputs;
  detect_cmd->add_option("--bundle", detect_bundle, "Model bundle")->required();
  detect_cmd->add_option("files", detect_inputs, "Java files")->required();
  detect_cmd->add_option("-o,--output", detect_out, "CSV output (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "Rebuild summary tables from a runs.csv");
  std::string report_runs, report_format = "text", report_out;
  report->add_option("runs", report_runs, "runs.csv from sweep or eval")->required();
  report->add_option("--format", report_format, "text, csv or json");
  report->add_option("-o,--output", report_out, "Also write report files here");

  // debugging helpers
  auto* dump = app.add_subcommand("dump-tree", "Print the syntax tree of a Java file");
  std::string dump_file;
  dump->add_option("file", dump_file, "Java file")->required();

  auto* synth = app.add_subcommand("synth", "Write a two-style synthetic Java corpus");
  std::string synth_root;
  SynthOptions synth_opts;
  synth->add_option("root", synth_root, "Output directory")->required();
  synth->add_option("--files", synth_opts.files, "Number of files");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    ConfigFile cfg;
    cfg.load(config_path);
    cfg.fill(threads_opt, "threads", threads);
    threads = std::max<std::size_t>(1, threads);

    if (*ingest) {
      cfg.fill(ingest_rules_opt, "label_rules_file", ingest_rules);
      return cmd_ingest(ingest_root, ingest_rules, ingest_out, out, err);
    }
    if (*rewrite) {
      RewriteSettings s = cfg.doc().contains("rewrite") ? RewriteSettings::from_json(cfg.doc()["rewrite"])
                                                       : RewriteSettings{};
      s.apply_environment();
      if (endpoint_opt->count()) s.endpoint_url = rewrite_endpoint;
      if (model_opt->count()) s.model_name = rewrite_model;
      if (max_chars_opt->count()) s.max_chars_per_request = rewrite_max_chars;
      if (prompt_opt->count()) {
        s.prompt = rewrite_prompt == "gpt"   ? std::string(kGptDatasetPrompt)
                   : rewrite_prompt == "gcj" ? std::string(kGptGcjPrompt)
                                             : rewrite_prompt;
      }
      s.retry.max_attempts = rewrite_attempts;
      BatchOptions batch{rewrite_parallel, std::chrono::milliseconds(rewrite_interval_ms)};
      return cmd_rewrite(s, rewrite_inputs, rewrite_out, batch, rewrite_manifest, rewrite_author, out, err);
    }
    if (*build) {
      cfg.fill(root_opt, "corpus_root", b.root);
      cfg.fill(family_opt, "family", b.family);
      cfg.fill(group_opt, "group_size", b.group_size);
      if (bin_opt->count() == 0 && cfg.doc().contains("bin_width")) {
        const auto& v = cfg.doc()["bin_width"];
        b.bin_width = v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::size_t>());
      }
      cfg.fill(maxcol_opt, "max_columns", b.max_columns);
      cfg.fill(label_opt, "label_rule", b.label_rule);
      cfg.fill(depth_opt, "depth_cap", b.depth_cap);
      if (parse_family(b.family) != FeatureFamily::ewd_nb_f && bin_opt->count() == 0) b.bin_width = "1";
      return cmd_build(b, threads, out, err);
    }
    if (*train_cmd) {
      cfg.fill(kind_opt, "model", t.model);
      cfg.fill(seed_opt, "seed", t.seed);
      cfg.fill(frac_opt, "test_fraction", t.test_fraction);
      cfg.fill(split_opt, "split", t.split);
      return cmd_train(t, threads, out);
    }
    if (*eval_cmd) return cmd_eval(eval_data, eval_bundle, eval_out, out);
    if (*sweep) {
      const CorpusManifest manifest = CorpusManifest::load(sweep_manifest);
      SweepConfig sc;
      sc.families.clear();
      for (const auto& f : split_list(sweep_families)) sc.families.push_back(parse_family(f));
      sc.group_sizes.clear();
      for (const auto& g : split_list(sweep_sizes)) sc.group_sizes.push_back(std::stoul(g));
      sc.models.clear();
      for (const auto& m : split_list(sweep_models)) sc.models.push_back(parse_model_kind(m));
      sc.seeds.clear();
      if (!sweep_seeds.empty()) {
        for (const auto& s : split_list(sweep_seeds)) sc.seeds.push_back(std::stoull(s));
      } else {
        for (std::size_t k = 0; k < std::max<std::size_t>(1, sweep_repeats); ++k) sc.seeds.push_back(kDefaultSeed + k);
      }
      sc.bin_width = sweep_bin;
      sc.max_columns = sweep_maxcol;
      sc.test_fraction = sweep_fraction;
      sc.granularity = parse_granularity(sweep_split);
      sc.positive = PositiveClassRule::parse(sweep_label);
      sc.threads = threads;
      const fs::path root = sweep_root.empty() ? fs::path(manifest.root) : fs::path(sweep_root);
      return cmd_sweep(manifest, root, sc, sweep_out, out);
    }
    if (*detect_cmd) return cmd_detect(detect_bundle, detect_inputs, detect_out, out, err);
    if (*report) return cmd_report(report_runs, report_format, report_out, out);
    if (*dump) {
      out << dump_tree(parse_java(read_text_file(dump_file), dump_file));
      return kExitOk;
    }
    if (*synth) {
      write_style_corpus(synth_root, synth_opts);
      out << "wrote " << synth_opts.files << " files under " << synth_root << "\n";
      return kExitOk;
    }
  } catch (const ArtifactMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid number: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace stylodet::cli
