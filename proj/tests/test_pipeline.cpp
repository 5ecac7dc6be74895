#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "fraudlab/persist.hpp"
#include "fraudlab/pipeline.hpp"

using namespace fraudlab;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.seed = seed;
  cfg.gen_n_transactions = 8000;
  cfg.ae_max_epochs = 20;
  cfg.elbow_k_max = 6;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("fraudlab_pipe_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("a full run produces every artifact and a complete eval report") {
  TempDir dir("full");
  PipelineConfig cfg = small_config(42);
  cfg.out_dir = dir.path.string();
  cfg.sweep_contamination = {0.005, 0.01};
  const auto res = run_pipeline(cfg, /*write_artifacts=*/true);

  for (const char* name :
       {"config_echo.ini", "ingest_report.json", "features.csv", "scores.csv",
        "ae_history.csv", "clusters.csv", "elbow.csv", "k_distance.csv", "risk.csv",
        "entities_cardholders.csv", "entities_merchants.csv", "window_risk.csv",
        "correlations.csv", "eval_report.csv", "sweep_report.csv",
        "models/standardization.json", "models/iforest.json", "models/ocsvm.json",
        "models/autoencoder.json", "models/kmeans.json"}) {
    CHECK_MESSAGE(fs::exists(dir.path / name), name);
  }

  std::set<std::string> detectors;
  for (const auto& row : res.eval.rows) detectors.insert(row.detector);
  CHECK(detectors.count("iforest") == 1);
  CHECK(detectors.count("ocsvm") == 1);
  CHECK(detectors.count("autoencoder") == 1);
  CHECK(detectors.count("combined_queue") == 1);
  CHECK(detectors.count("combined_queue_threshold") == 1);
  for (const auto& row : res.eval.rows) {
    CHECK(row.tp + row.fp + row.tn + row.fn >= 1);
    CHECK(row.auc_roc >= 0.0);
    CHECK(row.auc_roc <= 1.0);
  }
  CHECK(res.eval_csv == slurp(dir.path / "eval_report.csv"));

  // every saved model loads back and the score columns line up with memory
  const auto forest = load_iforest(slurp(dir.path / "models/iforest.json"));
  const auto if_scores = iforest_score_all(forest, res.matrix.data);
  REQUIRE(if_scores.size() == res.if_scores.size());
  for (std::size_t i = 0; i < if_scores.size(); i += 97) {
    CHECK(if_scores[i] == res.if_scores[i]);
  }
  CHECK_NOTHROW(load_ocsvm(slurp(dir.path / "models/ocsvm.json")));
  CHECK_NOTHROW(load_autoencoder(slurp(dir.path / "models/autoencoder.json")));
  CHECK_NOTHROW(load_kmeans(slurp(dir.path / "models/kmeans.json")));
  const auto std_params = load_standardization(slurp(dir.path / "models/standardization.json"));
  CHECK(std_params.mean == res.matrix.params.mean);
  CHECK(std_params.std == res.matrix.params.std);
}

TEST_CASE("two runs with the same config are byte-identical") {
  TempDir a("rerun_a"), b("rerun_b");
  PipelineConfig cfg = small_config(7);
  cfg.out_dir = a.path.string();
  run_pipeline(cfg, true);
  cfg.out_dir = b.path.string();
  run_pipeline(cfg, true);

  for (const char* name :
       {"eval_report.csv", "features.csv", "scores.csv", "risk.csv",
        "models/standardization.json", "models/iforest.json", "models/ocsvm.json",
        "models/autoencoder.json", "models/kmeans.json"}) {
    CHECK_MESSAGE(slurp(a.path / name) == slurp(b.path / name), name);
  }
}

TEST_CASE("changing the seed changes the corpus and the report") {
  const auto r1 = run_pipeline(small_config(1), false);
  const auto r2 = run_pipeline(small_config(2), false);
  CHECK(r1.eval_csv != r2.eval_csv);
}

TEST_CASE("stopping early runs exactly the requested stages") {
  PipelineConfig cfg = small_config(11);

  const auto feats = run_pipeline(cfg, false, PipelineStage::Features);
  CHECK(!feats.features.empty());
  CHECK(feats.matrix.data.rows == feats.txns.size());
  CHECK(feats.if_scores.empty());
  CHECK(feats.eval.rows.empty());

  const auto trained = run_pipeline(cfg, false, PipelineStage::Train);
  CHECK(!trained.if_scores.empty());
  CHECK(trained.cluster_labels.empty());
  CHECK(trained.eval.rows.empty());

  const auto risk = run_pipeline(cfg, false, PipelineStage::Risk);
  CHECK(!risk.weighted.empty());
  CHECK(risk.queue.members.size() == risk.txns.size());
  CHECK(risk.eval.rows.empty());
}

TEST_CASE("stage results are identical whether or not later stages run") {
  PipelineConfig cfg = small_config(13);
  const auto part = run_pipeline(cfg, false, PipelineStage::Train);
  const auto full = run_pipeline(cfg, false, PipelineStage::Eval);
  CHECK(part.if_scores == full.if_scores);
  CHECK(part.ae_errors == full.ae_errors);
  CHECK(part.ocsvm_decisions == full.ocsvm_decisions);
}

TEST_CASE("a missing data directory fails in the ingest stage by name") {
  PipelineConfig cfg = small_config(3);
  cfg.data_dir = "/nonexistent/fraudlab_data";
  try {
    run_pipeline(cfg, false);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage == "ingest");
  }
}

TEST_CASE("an ingested corpus on disk reproduces the in-memory run") {
  TempDir gen_dir("gen"), out_a("mem"), out_b("disk");
  PipelineConfig cfg = small_config(17);

  // first run generates and writes the corpus alongside the artifacts
  cfg.out_dir = out_a.path.string();
  const auto mem = run_pipeline(cfg, true);
  REQUIRE(fs::exists(out_a.path / "corpus/transactions.csv"));

  // second run ingests those files instead of generating
  PipelineConfig from_disk = cfg;
  from_disk.data_dir = (out_a.path / "corpus").string();
  from_disk.out_dir = out_b.path.string();
  const auto disk = run_pipeline(from_disk, true);

  CHECK(disk.txns.size() == mem.txns.size());
  CHECK(disk.if_scores == mem.if_scores);
  CHECK(disk.eval_csv == mem.eval_csv);
}

TEST_CASE("the queue lands inside the configured review budget") {
  const auto res = run_pipeline(small_config(19), false, PipelineStage::Risk);
  std::size_t flagged = 0;
  for (bool b : res.queue.members) flagged += b ? 1 : 0;
  const double frac = static_cast<double>(flagged) / static_cast<double>(res.txns.size());
  CHECK(frac >= 0.01);
  CHECK(frac <= 0.06);
}
