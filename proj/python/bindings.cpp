#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "fraudlab/pipeline.hpp"

namespace py = pybind11;
using namespace fraudlab;

namespace {

PipelineStage stage_from_name(const std::string& name) {
  static const std::map<std::string, PipelineStage> stages{
      {"ingest", PipelineStage::Ingest}, {"features", PipelineStage::Features},
      {"train", PipelineStage::Train},   {"cluster", PipelineStage::Cluster},
      {"risk", PipelineStage::Risk},     {"eval", PipelineStage::Eval},
      {"report", PipelineStage::Report}};
  const auto it = stages.find(name);
  if (it == stages.end()) throw std::invalid_argument("unknown stage: " + name);
  return it->second;
}

double fraction(const std::vector<bool>& v) {
  std::size_t c = 0;
  for (bool b : v) c += b ? 1 : 0;
  return v.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(v.size());
}

py::dict run(const std::string& config_ini, std::optional<std::uint64_t> seed,
             std::optional<std::string> out_dir, bool write_artifacts,
             const std::string& until) {
  PipelineConfig cfg = config_ini.empty() ? PipelineConfig{} : parse_config(config_ini);
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.out_dir = *out_dir;
  const PipelineStage stop = stage_from_name(until);
  const PipelineResult res = run_pipeline(cfg, write_artifacts, stop);

  py::dict out;
  out["out_dir"] = res.out_dir;
  out["n_transactions"] = res.txns.size();
  out["flag_fraction"] =
      py::dict(py::arg("iforest") = fraction(res.if_flags),
               py::arg("ocsvm") = fraction(res.ocsvm_flags),
               py::arg("autoencoder") = fraction(res.ae_flags));
  out["queue_fraction"] = fraction(res.queue.members);
  out["silhouette"] = res.silhouette_score;
  out["elbow"] = res.elbow;

  py::list eval_rows;
  for (const auto& row : res.eval.rows) {
    py::dict d;
    d["detector"] = row.detector;
    d["tp"] = row.tp;
    d["fp"] = row.fp;
    d["tn"] = row.tn;
    d["fn"] = row.fn;
    d["detection_rate"] = row.detection_rate;
    d["false_positive_rate"] = row.false_positive_rate;
    d["precision"] = row.precision;
    d["auc_roc"] = row.auc_roc;
    eval_rows.append(std::move(d));
  }
  out["eval"] = std::move(eval_rows);
  out["eval_csv"] = res.eval_csv;
  return out;
}

void generate_corpus(const std::string& out_dir, std::size_t n_transactions,
                     std::uint64_t seed, double anomaly_rate) {
  GenConfig cfg;
  cfg.n_transactions = n_transactions;
  cfg.seed = seed;
  cfg.anomaly_rate = anomaly_rate;
  validate_config(cfg);
  const auto rows = inject_anomalies(generate(cfg), cfg);
  write_corpus(out_dir, rows, make_dimension_tables(cfg));
}

double auc(const std::vector<bool>& labels, const std::vector<double>& scores) {
  return eval_metrics("auc", labels, labels, scores).auc_roc;
}

double py_weighted_score(bool unusual_spend, bool suspicious_sequence, bool rapid_use,
                         double amount_norm) {
  IndicatorFlags f;
  f.unusual_spend = unusual_spend;
  f.suspicious_sequence = suspicious_sequence;
  f.rapid_use = rapid_use;
  return weighted_score(f, amount_norm);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fraud detection lab: synthetic corpus generation, anomaly "
            "detectors, risk scoring and evaluation";

  m.def("run", &run, py::arg("config_ini") = std::string(),
        py::arg("seed") = py::none(), py::arg("out_dir") = py::none(),
        py::arg("write_artifacts") = false, py::arg("until") = "report",
        "Run the pipeline and return a summary dict. `until` is one of "
        "ingest/features/train/cluster/risk/eval/report.");

  m.def("generate_corpus", &generate_corpus, py::arg("out_dir"),
        py::arg("n_transactions") = 50'000, py::arg("seed") = 42,
        py::arg("anomaly_rate") = 0.015,
        "Write a labeled synthetic corpus (CSV tables) into out_dir.");

  m.def("auc", &auc, py::arg("labels"), py::arg("scores"),
        "ROC AUC with midrank tie handling.");

  m.def("nearest_rank_quantile",
        [](std::vector<double> v, double q) {
          return nearest_rank_quantile(std::move(v), q);
        },
        py::arg("values"), py::arg("q"), "Nearest-rank quantile of a sample.");

  m.def("weighted_score", &py_weighted_score, py::arg("unusual_spend"),
        py::arg("suspicious_sequence"), py::arg("rapid_use"),
        py::arg("amount_norm"), "Weighted risk score for one transaction.");
}
