// Command-line front end for the pipeline library.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraudlab/arf.hpp"
#include "fraudlab/persist.hpp"
#include "fraudlab/pipeline.hpp"
#include "fraudlab/time_util.hpp"

namespace {

using namespace fraudlab;
namespace fs = std::filesystem;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::string data_dir;
  std::int64_t seed = -1;
};

PipelineConfig build_config(const GlobalOpts& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
  return cfg;
}

int cmd_gen(const PipelineConfig& cfg) {
  const GenConfig g = cfg.gen_config();
  const auto corpus = inject_anomalies(generate(g), g);
  const DimensionTables tables = make_dimension_tables(g);
  const std::string dir = resolve_out_dir(cfg.out_dir) + "/corpus";
  fs::create_directories(dir);
  write_corpus(dir, corpus, tables);
  std::size_t planted = 0;
  for (const auto& lt : corpus) planted += lt.is_fraud ? 1 : 0;
  std::cout << "wrote " << corpus.size() << " transactions (" << planted
            << " planted anomalies) to " << dir << "\n";
  return 0;
}

int cmd_stage(const PipelineConfig& cfg, PipelineStage until, bool print_eval = false) {
  const PipelineResult res = run_pipeline(cfg, /*write_artifacts=*/true, until);
  if (print_eval) {
    if (res.eval_csv.empty()) {
      std::cerr << "no labels available; eval report not produced\n";
      return 1;
    }
    std::cout << res.eval_csv;
  } else {
    std::cout << "artifacts written to " << res.out_dir << "\n";
  }
  return 0;
}

int cmd_score(const PipelineConfig& cfg, const std::string& models_dir) {
  PipelineResult res = run_pipeline(cfg, /*write_artifacts=*/false, PipelineStage::Features);
  const std::string mdir =
      models_dir.empty() ? resolve_out_dir(cfg.out_dir) + "/models" : models_dir;
  const auto iforest = load_iforest(read_file(mdir + "/iforest.json"));
  const auto ocsvm = load_ocsvm(read_file(mdir + "/ocsvm.json"));
  const auto ae = load_autoencoder(read_file(mdir + "/autoencoder.json"));
  const auto params = load_standardization(read_file(mdir + "/standardization.json"));

  // re-standardize with the training-time parameters
  Dataset data = res.matrix.data;
  for (std::size_t r = 0; r < data.rows; ++r) {
    for (std::size_t c = 0; c < data.cols; ++c) {
      data.at(r, c) = params.transform(c, res.matrix.params.inverse(c, data.at(r, c)));
    }
  }

  const auto if_scores = iforest_score_all(iforest, data);
  const auto if_flags = iforest_flag(iforest, if_scores);
  const auto dec = ocsvm_decision_all(ocsvm, data);
  const auto ae_err = reconstruction_error_all(ae, data);
  const auto ae_flags = autoencoder_flag(ae, ae_err);

  const std::string out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  std::ofstream f(out + "/scores.csv", std::ios::binary);
  f << "txn_id,if_score,if_flag,ocsvm_decision,ocsvm_flag,ae_error,ae_flag\n";
  for (std::size_t i = 0; i < res.txns.size(); ++i) {
    f << res.txns[i].txn_id << ',' << if_scores[i] << ',' << (if_flags[i] ? 1 : 0) << ','
      << dec[i] << ',' << (ocsvm_flag(dec[i]) ? 1 : 0) << ',' << ae_err[i] << ','
      << (ae_flags[i] ? 1 : 0) << '\n';
  }
  std::cout << "scored " << res.txns.size() << " rows with models from " << mdir << "\n";
  return 0;
}

// streaming risk scorer: JSON-lines transactions in, JSON-lines scores out
int cmd_arf_stream(const PipelineConfig& cfg) {
  using nlohmann::json;
  const ArfConfig arf_cfg = cfg.arf_config();
  ArfWeights weights = arf_init_weights(cfg.arf_context(), arf_cfg.w_max);
  ArfPercentileTracker tracker(arf_cfg.tau_window);

  struct CardState {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;  // Welford
    TimestampMs last = 0;
    bool has_last = false;
  };
  std::unordered_map<std::string, CardState> cards;
  std::vector<ArfExample> batch;

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      std::cerr << "skipping malformed line: " << e.what() << "\n";
      continue;
    }
    const std::string txn_id = j.value("txn_id", std::string{});
    const std::string card_id = j.value("card_id", std::string{});
    const double amount = j.value("amount", 0.0);
    TimestampMs ts = 0;
    if (j.contains("timestamp")) {
      ts = j["timestamp"].is_string() ? parse_iso8601(j["timestamp"].get<std::string>())
                                      : j["timestamp"].get<TimestampMs>();
    }

    CardState& st = cards[card_id];
    const double sigma = st.n > 0 ? std::sqrt(st.m2 / static_cast<double>(st.n)) : 0.0;
    const double gap = st.has_last
                           ? static_cast<double>(ts - st.last) / 1000.0
                           : kFirstUseSentinelSeconds;
    const ArfFeatures feats =
        make_arf_features(j.value("f_if", 0) != 0, j.value("f_ocsvm", 0) != 0,
                          j.value("f_ae", 0) != 0, amount, st.mean, sigma, gap);
    const double r = arf_score(weights, feats);
    const bool high = arf_high_risk_rule(r, feats, gap, tracker);
    tracker.push(r);

    json out{{"txn_id", txn_id}, {"R", r}, {"high_risk", high}, {"weights", weights.w}};
    std::cout << out.dump() << "\n";

    ArfExample ex;
    ex.feats = feats;
    if (j.contains("label")) {
      ex.is_true_label = true;
      ex.label = j["label"].get<double>();
      batch.push_back(ex);
    } else {
      const PseudoLabel pl = arf_pseudo_label(feats);
      if (pl != PseudoLabel::Abstain) {
        ex.label = pl == PseudoLabel::Positive ? 1.0 : -1.0;
        batch.push_back(ex);
      }
    }
    if (batch.size() >= arf_cfg.batch_size) {
      const double tau = tracker.warm() ? tracker.percentile95() : 0.0;
      arf_update(weights, batch, tau, arf_cfg);
      batch.clear();
    }

    // Welford update after scoring: the row's own amount must not damp its
    // deviation signal
    ++st.n;
    const double d = amount - st.mean;
    st.mean += d / static_cast<double>(st.n);
    st.m2 += d * (amount - st.mean);
    st.last = ts;
    st.has_last = true;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transaction anomaly detection pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "configuration file (INI-style)");
  app.add_option("--seed", g.seed, "override the configured seed");
  app.add_option("--out", g.out_dir, "output directory (FRAUDLAB_OUT overrides)");
  app.add_option("--data", g.data_dir, "input corpus directory (default: generate)");

  auto* gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
  auto* ingest = app.add_subcommand("ingest", "load, join and clean the corpus");
  auto* features = app.add_subcommand("features", "derive the feature matrix");
  auto* train = app.add_subcommand("train", "fit all detectors and save models");
  auto* score = app.add_subcommand("score", "score a corpus with saved models");
  std::string models_dir;
  score->add_option("--models", models_dir, "models directory (default: <out>/models)");
  auto* cluster = app.add_subcommand("cluster", "k-means / DBSCAN / PCA analysis");
  auto* risk = app.add_subcommand("risk", "behavioral flags and risk scores");
  auto* arf_stream =
      app.add_subcommand("arf-stream", "streaming risk scoring over JSON lines on stdin");
  auto* eval = app.add_subcommand("eval", "full pipeline, print the evaluation report");
  auto* report = app.add_subcommand("report", "full pipeline including plots");
  auto* sweep = app.add_subcommand("sweep", "contamination sweep evaluation");
  std::string sweep_list;
  sweep->add_option("--contamination", sweep_list, "comma-separated contamination values");
  for (auto* sub : {gen, ingest, features, train, score, cluster, risk, arf_stream, eval,
                    report, sweep}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = build_config(g);
    if (gen->parsed()) return cmd_gen(cfg);
    if (ingest->parsed()) return cmd_stage(cfg, PipelineStage::Ingest);
    if (features->parsed()) return cmd_stage(cfg, PipelineStage::Features);
    if (train->parsed()) return cmd_stage(cfg, PipelineStage::Train);
    if (score->parsed()) return cmd_score(cfg, models_dir);
    if (cluster->parsed()) return cmd_stage(cfg, PipelineStage::Cluster);
    if (risk->parsed()) return cmd_stage(cfg, PipelineStage::Risk);
    if (arf_stream->parsed()) return cmd_arf_stream(cfg);
    if (eval->parsed()) return cmd_stage(cfg, PipelineStage::Eval, /*print_eval=*/true);
    if (report->parsed()) return cmd_stage(cfg, PipelineStage::Report);
    if (sweep->parsed()) {
      if (!sweep_list.empty()) {
        cfg.sweep_contamination.clear();
        std::stringstream ss(sweep_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) cfg.sweep_contamination.push_back(std::stod(item));
        }
      }
      if (cfg.sweep_contamination.empty()) {
        std::cerr << "sweep: no contamination values configured\n";
        return 1;
      }
      return cmd_stage(cfg, PipelineStage::Eval);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
