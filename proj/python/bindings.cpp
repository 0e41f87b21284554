// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "stylodet/ast.hpp"
#include "stylodet/bigram.hpp"
#include "stylodet/bundle.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/error.hpp"
#include "stylodet/eval.hpp"
#include "stylodet/features.hpp"
#include "stylodet/models.hpp"

namespace py = pybind11;
using namespace stylodet;

namespace {

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["auc"] = m.auc ? py::cast(*m.auc) : py::none();
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["tn"] = m.tn;
  d["fn"] = m.fn;
  return d;
}

FeatureMatrix to_matrix(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  if (rows.size() != labels.size()) throw InputError("rows and labels differ in length");
  FeatureMatrix m;
  m.column_count = rows.empty() ? 0 : rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.column_count) throw InputError("ragged feature rows");
    m.rows.push_back({{"", r, {1, 1}, false}, labels[r], rows[r]});
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nested-bigram features and tree ensembles for spotting LLM-rewritten Java code";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ArtifactMismatch>(m, "ArtifactMismatch", base.ptr());

  m.attr("GRAMMAR_ID") = std::string(kGrammarId);

  m.def("dump_tree", [](const std::string& text) { return dump_tree(parse_java(text)); }, py::arg("text"));
  m.def(
      "has_parse_errors", [](const std::string& text) { return parse_java(text).has_errors(); }, py::arg("text"));

  m.def(
      "nested_bigrams",
      [](const std::string& text, std::size_t first, std::size_t last, bool compressed, std::uint32_t depth_cap) {
        const SyntaxTree tree = parse_java(text);
        const auto counts = extract_nested_bigrams(tree, {first, last}, {compressed, depth_cap});
        std::map<std::string, std::uint64_t> out(counts.entries().begin(), counts.entries().end());
        return out;
      },
      py::arg("text"), py::arg("first"), py::arg("last"), py::arg("compressed") = false,
      py::arg("depth_cap") = kDefaultDepthCap);

  m.def(
      "split_into_groups",
      [](const std::string& text, std::size_t group_size) {
        py::list out;
        for (const auto& g : split_into_groups(text, group_size)) {
          out.append(py::make_tuple(g.lines.first, g.lines.last, g.text, g.remainder));
        }
        return out;
      },
      py::arg("text"), py::arg("group_size"));

  m.def("count_statement_tokens", &count_statement_tokens, py::arg("text"));
  m.def(
      "lexical_features",
      [](const std::string& text) {
        const auto f = lexical_features(text);
        return std::vector<double>(f.begin(), f.end());
      },
      py::arg("text"));
  m.def(
      "bin_index",
      [](std::size_t i, std::size_t b, std::size_t s1, std::size_t s2) {
        FeatureConfig c;
        c.bin_width = b;
        c.s1 = s1;
        c.s2 = s2;
        return bin_index(i, c);
      },
      py::arg("i"), py::arg("bin_width"), py::arg("s1") = kReservedSlots, py::arg("s2") = kReservedSlots);
  m.def("percentile", &percentile, py::arg("values"), py::arg("q"));

  m.def(
      "rank_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return rank_auc(s, y); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "metrics",
      [](const std::vector<double>& s, const std::vector<int>& y, double t) {
        return metrics_dict(compute_metrics(s, y, t));
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
  m.def(
      "welch_t_test", [](const std::vector<double>& a, const std::vector<double>& b) { return welch_t_test(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "fisher_combine", [](const std::vector<double>& p) { return fisher_combine(p); }, py::arg("p_values"));

  m.def(
      "ingest",
      [](const std::string& root) { return ingest_corpus(root, LabelRules::defaults()).to_json().dump(); },
      py::arg("root"), "Scan a corpus with the default human/ and llm/ rules; returns the manifest as JSON text.");

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("kind", [](const TrainedModel& t) { return std::string(to_string(t.spec.kind)); })
      .def_readonly("feature_count", &TrainedModel::feature_count)
      .def_property_readonly("tree_count", [](const TrainedModel& t) { return t.trees.size(); })
      .def(
          "predict_score", [](const TrainedModel& t, const std::vector<double>& row) { return t.predict_score(row); },
          py::arg("row"))
      .def("to_json", [](const TrainedModel& t) { return t.to_json().dump(); });

  m.def(
      "train",
      [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels, const std::string& kind,
         std::uint64_t seed) {
        const FeatureMatrix matrix = to_matrix(rows, labels);
        std::vector<std::size_t> all(matrix.rows.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        py::gil_scoped_release release;
        return train(ModelSpec::defaults(parse_model_kind(kind), seed), matrix, all);
      },
      py::arg("rows"), py::arg("labels"), py::arg("kind") = "rf", py::arg("seed") = kDefaultSeed);

  py::class_<ModelBundle>(m, "Bundle")
      .def_static("load", [](const std::string& path) { return ModelBundle::load(path); }, py::arg("path"))
      .def_property_readonly("family", [](const ModelBundle& b) { return std::string(to_string(b.config.family)); })
      .def_property_readonly("group_size", [](const ModelBundle& b) { return b.config.group_size; })
      .def(
          "detect",
          [](const ModelBundle& b, const std::string& text, const std::string& path) {
            py::list out;
            for (const auto& g : detect(b, text, path).groups) {
              py::dict d;
              d["path"] = g.path;
              d["start_line"] = g.lines.first;
              d["end_line"] = g.lines.last;
              d["score"] = g.score;
              d["positive"] = g.positive;
              out.append(d);
            }
            return out;
          },
          py::arg("text"), py::arg("path") = "<memory>");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "stylodet");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a stylodet command in-process; returns (exit_code, stdout, stderr).");
}
