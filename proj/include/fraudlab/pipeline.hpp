#pragma once

#include <map>
#include <string>
#include <vector>

#include "fraudlab/autoencoder.hpp"
#include "fraudlab/cluster.hpp"
#include "fraudlab/config.hpp"
#include "fraudlab/features.hpp"
#include "fraudlab/iforest.hpp"
#include "fraudlab/ingest.hpp"
#include "fraudlab/metrics.hpp"
#include "fraudlab/ocsvm.hpp"
#include "fraudlab/risk.hpp"
#include "fraudlab/synthgen.hpp"

namespace fraudlab {

// thrown by run_pipeline with the failing stage's name
struct StageError : std::runtime_error {
  std::string stage;
  StageError(std::string stage_name, const std::string& what)
      : std::runtime_error("stage " + stage_name + ": " + what), stage(std::move(stage_name)) {}
};

struct PipelineResult {
  std::vector<LabeledTransaction> labeled;  // empty typology data when ingesting real files
  std::vector<CleanTransaction> txns;
  IngestReport ingest_report;

  std::map<std::string, CardholderStats> stats;
  std::vector<FeatureVector> features;
  FeatureMatrix matrix;

  IsolationForestModel iforest;
  OcsvmModel ocsvm;
  AutoencoderModel autoencoder;
  TrainHistory ae_history;
  std::vector<double> if_scores, ocsvm_decisions, ae_errors;
  std::vector<bool> if_flags, ocsvm_flags, ae_flags;

  KMeansModel kmeans;
  std::vector<std::size_t> cluster_labels;
  double silhouette_score = 0.0;
  std::vector<double> elbow;
  DbscanResult dbscan_result;
  PcaModel pca;
  Dataset pca_coords;

  std::vector<IndicatorFlags> flags;
  std::vector<int> composite;
  std::vector<double> weighted;
  ReviewQueue queue;

  EvalReport eval;
  std::string eval_csv;
  std::string out_dir;
};

enum class PipelineStage { Ingest, Features, Train, Cluster, Risk, Eval, Report };

// gen (or load) -> ingest -> features -> train -> cluster -> risk -> eval ->
// report. Deterministic under (config, seed); artifacts carry a config echo.
// `until` stops after the named stage (CLI subcommands map onto it).
PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_artifacts = true,
                            PipelineStage until = PipelineStage::Report);

}  // namespace fraudlab
