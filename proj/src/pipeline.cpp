#include "fraudlab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include "fraudlab/csv.hpp"

#include "fraudlab/persist.hpp"
#include "fraudlab/report.hpp"
#include "fraudlab/time_util.hpp"

namespace fraudlab {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

struct LabelInfo {
  std::vector<bool> is_fraud;
  std::vector<Typology> typology;
  bool present = false;
};

LabelInfo align_labels(const std::vector<CleanTransaction>& txns,
                       const std::vector<LabeledTransaction>& labeled) {
  LabelInfo info;
  if (labeled.empty()) return info;
  std::unordered_map<std::string, std::pair<bool, Typology>> by_id;
  for (const auto& lt : labeled) by_id[lt.txn.txn_id] = {lt.is_fraud, lt.typology};
  info.is_fraud.resize(txns.size(), false);
  info.typology.resize(txns.size(), Typology::None);
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto it = by_id.find(txns[i].txn_id);
    if (it != by_id.end()) {
      info.is_fraud[i] = it->second.first;
      info.typology[i] = it->second.second;
    }
  }
  info.present = true;
  return info;
}

RawTables to_raw_tables(const std::vector<LabeledTransaction>& labeled,
                        const DimensionTables& tables) {
  RawTables raw;
  raw.cardholders = tables.cardholders;
  raw.merchants = tables.merchants;
  raw.categories = tables.categories;
  raw.transactions.reserve(labeled.size());
  for (const auto& lt : labeled) {
    raw.transactions.push_back(
        {lt.txn.txn_id, lt.txn.card_id, lt.txn.merchant_id, lt.txn.timestamp, lt.txn.amount});
  }
  return raw;
}

Dataset subsample_rows(const Dataset& d, std::size_t cap, std::uint64_t seed) {
  if (d.rows <= cap) return d;
  std::vector<std::size_t> idx(d.rows);
  for (std::size_t i = 0; i < d.rows; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.rows = cap;
  out.cols = d.cols;
  out.values.reserve(cap * d.cols);
  for (std::size_t r : idx) {
    const auto row = d.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_artifacts,
                            PipelineStage until) {
  PipelineResult res;
  res.out_dir = resolve_out_dir(cfg.out_dir);
  const std::string& out = res.out_dir;
  if (write_artifacts) {
    fs::create_directories(out + "/models");
    fs::create_directories(out + "/report");
    write_file(out + "/config_echo.ini", cfg.to_ini());
  }

  // ---- gen / load --------------------------------------------------------
  RawTables raw;
  if (cfg.data_dir.empty()) {
    stage("gen", [&] {
      const GenConfig g = cfg.gen_config();
      res.labeled = inject_anomalies(generate(g), g);
      const DimensionTables tables = make_dimension_tables(g);
      if (write_artifacts) {
        fs::create_directories(out + "/corpus");
        write_corpus(out + "/corpus", res.labeled, tables);
      }
      raw = to_raw_tables(res.labeled, tables);
      return 0;
    });
  } else {
    stage("ingest", [&] {
      IngestPaths paths;
      paths.transactions = cfg.data_dir + "/transactions.csv";
      paths.cardholders = cfg.data_dir + "/cardholders.csv";
      paths.merchants = cfg.data_dir + "/merchants.csv";
      paths.categories = cfg.data_dir + "/categories.csv";
      raw = load_tables(paths);
      const std::string labels_path = cfg.data_dir + "/labels.csv";
      if (fs::exists(labels_path)) {
        CsvFile f = read_csv(labels_path);
        std::unordered_map<std::string, const RawTransaction*> by_id;
        for (const auto& t : raw.transactions) by_id[t.txn_id] = &t;
        for (const auto& row : f.rows) {
          if (row.size() != 3) continue;
          const auto it = by_id.find(row[0]);
          if (it == by_id.end()) continue;
          LabeledTransaction lt;
          lt.txn.txn_id = row[0];
          lt.is_fraud = row[1] == "true" || row[1] == "1";
          lt.typology = typology_from_name(row[2]);
          res.labeled.push_back(std::move(lt));
        }
      }
      return 0;
    });
  }

  // ---- ingest ------------------------------------------------------------
  stage("ingest", [&] {
    auto [joined, join_report] = join_unified(raw);
    auto [cleaned, clean_report] = clean_values(std::move(joined), cfg.cap_quantile,
                                                cfg.cap_enabled);
    res.txns = std::move(cleaned);
    res.ingest_report = clean_report;
    res.ingest_report.rows_in = join_report.rows_in;
    res.ingest_report.dropped_missing_id = join_report.dropped_missing_id;
    if (write_artifacts) {
      write_file(out + "/ingest_report.json", res.ingest_report.to_json() + "\n");
    }
    return 0;
  });

  const LabelInfo labels = align_labels(res.txns, res.labeled);
  if (until == PipelineStage::Ingest) return res;

  // ---- features ----------------------------------------------------------
  stage("features", [&] {
    res.stats = cardholder_stats(res.txns);
    const auto cat_freq = category_frequency(res.txns);
    res.features = derive_features(res.txns, res.stats, cat_freq);
    res.matrix = build_matrix(res.features);
    if (write_artifacts) {
      write_feature_csv(out + "/features.csv", res.txns, res.features, res.matrix);
      write_file(out + "/models/standardization.json", save_model(res.matrix.params));
    }
    return 0;
  });

  if (until == PipelineStage::Features) return res;

  // ---- train -------------------------------------------------------------
  stage("train", [&] {
    res.iforest = iforest_fit(res.matrix.data, cfg.iforest_config());
    res.if_scores = iforest_score_all(res.iforest, res.matrix.data);
    res.if_flags = iforest_flag(res.iforest, res.if_scores);

    res.ocsvm = ocsvm_fit(res.matrix.data, cfg.ocsvm_config());
    res.ocsvm_decisions = ocsvm_decision_all(res.ocsvm, res.matrix.data);
    res.ocsvm_flags.resize(res.ocsvm_decisions.size());
    for (std::size_t i = 0; i < res.ocsvm_decisions.size(); ++i) {
      res.ocsvm_flags[i] = ocsvm_flag(res.ocsvm_decisions[i]);
    }

    auto [model, history] = autoencoder_train(res.matrix.data, cfg.autoencoder_config());
    res.autoencoder = std::move(model);
    res.ae_history = std::move(history);
    res.ae_errors = reconstruction_error_all(res.autoencoder, res.matrix.data);
    res.ae_flags = autoencoder_flag(res.autoencoder, res.ae_errors);

    if (write_artifacts) {
      write_file(out + "/models/iforest.json", save_model(res.iforest));
      write_file(out + "/models/ocsvm.json", save_model(res.ocsvm));
      write_file(out + "/models/autoencoder.json", save_model(res.autoencoder));
      write_history_csv(out + "/ae_history.csv", res.ae_history);
      auto f = open_out(out + "/scores.csv");
      f << "txn_id,if_score,if_flag,ocsvm_decision,ocsvm_flag,ae_error,ae_flag\n";
      for (std::size_t i = 0; i < res.txns.size(); ++i) {
        f << res.txns[i].txn_id << ',' << fmt(res.if_scores[i]) << ','
          << (res.if_flags[i] ? 1 : 0) << ',' << fmt(res.ocsvm_decisions[i]) << ','
          << (res.ocsvm_flags[i] ? 1 : 0) << ',' << fmt(res.ae_errors[i]) << ','
          << (res.ae_flags[i] ? 1 : 0) << '\n';
      }
    }
    return 0;
  });

  if (until == PipelineStage::Train) return res;

  // ---- cluster -----------------------------------------------------------
  stage("cluster", [&] {
    res.kmeans = kmeans_fit(res.matrix.data, cfg.kmeans_k, cfg.kmeans_n_init, 300, cfg.seed);
    res.cluster_labels = kmeans_assign(res.kmeans, res.matrix.data);
    res.silhouette_score = silhouette(res.matrix.data, res.cluster_labels, 2000, cfg.seed);

    const Dataset elbow_sample = subsample_rows(res.matrix.data, 8000, cfg.seed ^ 0xE1B0);
    res.elbow = elbow_curve(elbow_sample, cfg.elbow_k_max, 3, 100, cfg.seed);

    res.dbscan_result = dbscan(res.matrix.data, cfg.dbscan_eps, cfg.dbscan_min_samples);

    auto [pca_model, coords] = pca_project(res.matrix.data);
    res.pca = pca_model;
    res.pca_coords = std::move(coords);

    if (write_artifacts) {
      write_file(out + "/models/kmeans.json", save_model(res.kmeans));
      {
        auto f = open_out(out + "/clusters.csv");
        f << "txn_id,kmeans,dbscan,pca_x,pca_y\n";
        for (std::size_t i = 0; i < res.txns.size(); ++i) {
          f << res.txns[i].txn_id << ',' << res.cluster_labels[i] << ','
            << res.dbscan_result.labels[i] << ',' << fmt(res.pca_coords.at(i, 0)) << ','
            << fmt(res.pca_coords.at(i, 1)) << '\n';
        }
      }
      {
        auto f = open_out(out + "/elbow.csv");
        f << "k,inertia\n";
        for (std::size_t k = 0; k < res.elbow.size(); ++k) {
          f << (k + 1) << ',' << fmt(res.elbow[k]) << '\n';
        }
      }
      {
        const Dataset kd_sample = subsample_rows(res.matrix.data, 4000, cfg.seed ^ 0x4D15);
        const auto kd = k_distance(kd_sample, cfg.dbscan_min_samples);
        auto f = open_out(out + "/k_distance.csv");
        f << "rank,distance\n";
        for (std::size_t i = 0; i < kd.size(); ++i) f << i << ',' << fmt(kd[i]) << '\n';
      }
    }
    return 0;
  });

  if (until == PipelineStage::Cluster) return res;

  // ---- risk --------------------------------------------------------------
  stage("risk", [&] {
    const double p99 = high_amount_threshold(res.txns);
    res.flags = behavioral_flags(res.txns, res.features, res.stats, p99);
    RiskWeights weights;
    weights.amount = cfg.weight_amount;
    weights.unusual_spend = cfg.weight_unusual;
    weights.suspicious_sequence = cfg.weight_sequence;
    weights.rapid_use = cfg.weight_rapid;

    res.composite.resize(res.txns.size());
    res.weighted.resize(res.txns.size());
    for (std::size_t i = 0; i < res.txns.size(); ++i) {
      res.flags[i].if_flag = res.if_flags[i];
      res.flags[i].ocsvm_flag = res.ocsvm_flags[i];
      res.flags[i].ae_flag = res.ae_flags[i];
      res.composite[i] = composite_score(res.flags[i]);
      const double norm =
          std::clamp(cents_to_dollars(res.txns[i].amount) / p99, 0.0, 1.0);
      res.weighted[i] = weighted_score(res.flags[i], norm, weights);
    }
    res.queue = review_queue(res.flags, res.weighted);

    if (write_artifacts) {
      const auto marks = high_risk_mark(res.weighted);
      {
        auto f = open_out(out + "/risk.csv");
        f << "txn_id,composite,weighted,high_risk,queued\n";
        for (std::size_t i = 0; i < res.txns.size(); ++i) {
          f << res.txns[i].txn_id << ',' << res.composite[i] << ',' << fmt(res.weighted[i])
            << ',' << (marks[i] ? 1 : 0) << ',' << (res.queue.members[i] ? 1 : 0) << '\n';
        }
      }
      for (const auto group : {EntityGroup::Cardholder, EntityGroup::Merchant}) {
        const auto entities = entity_fraud_ratio(res.txns, res.flags, group);
        auto f = open_out(out + (group == EntityGroup::Cardholder
                                     ? "/entities_cardholders.csv"
                                     : "/entities_merchants.csv"));
        f << "entity_id,txn_count,flagged_count,fraud_ratio,high_risk\n";
        for (const auto& e : entities) {
          f << e.entity_id << ',' << e.txn_count << ',' << e.flagged_count << ','
            << fmt(e.fraud_ratio) << ',' << (e.high_risk ? 1 : 0) << '\n';
        }
      }
      {
        const auto windows = time_window_risk(res.features, res.weighted);
        static const char* names[] = {"night", "morning", "afternoon", "evening"};
        auto f = open_out(out + "/window_risk.csv");
        f << "window,txn_count,mean_risk\n";
        for (const auto& w : windows) {
          f << names[static_cast<int>(w.window)] << ',' << w.txn_count << ','
            << fmt(w.mean_risk) << '\n';
        }
      }
      {
        std::vector<std::vector<bool>> cols(8, std::vector<bool>(res.txns.size()));
        for (std::size_t i = 0; i < res.txns.size(); ++i) {
          const auto& fl = res.flags[i];
          cols[0][i] = fl.if_flag;
          cols[1][i] = fl.ocsvm_flag;
          cols[2][i] = fl.ae_flag;
          cols[3][i] = fl.unusual_spend;
          cols[4][i] = fl.rapid_use;
          cols[5][i] = fl.spending_spree;
          cols[6][i] = fl.suspicious_sequence;
          cols[7][i] = fl.high_amount;
        }
        const auto corr = indicator_correlations(cols);
        static const char* names[] = {"iforest", "ocsvm",  "autoenc", "unusual",
                                      "rapid",   "spree",  "sequence", "high_amt"};
        auto f = open_out(out + "/correlations.csv");
        f << "indicator";
        for (const auto* n : names) f << ',' << n;
        f << '\n';
        for (std::size_t r = 0; r < corr.size(); ++r) {
          f << names[r];
          for (double v : corr[r]) f << ',' << (std::isfinite(v) ? fmt(v) : "nan");
          f << '\n';
        }
      }
    }
    return 0;
  });

  if (until == PipelineStage::Risk) return res;

  // ---- eval --------------------------------------------------------------
  stage("eval", [&] {
    if (!labels.present) return 0;
    const auto& y = labels.is_fraud;
    std::vector<double> ocsvm_scores(res.ocsvm_decisions.size());
    for (std::size_t i = 0; i < ocsvm_scores.size(); ++i) {
      ocsvm_scores[i] = -res.ocsvm_decisions[i];
    }
    res.eval.rows.push_back(eval_metrics("iforest", y, res.if_flags, res.if_scores));
    res.eval.rows.push_back(eval_metrics("ocsvm", y, res.ocsvm_flags, ocsvm_scores));
    res.eval.rows.push_back(eval_metrics("autoencoder", y, res.ae_flags, res.ae_errors));
    res.eval.rows.push_back(eval_metrics("combined_queue", y, res.queue.members, res.weighted));

    // restrict positives to the behavior-threshold typologies; other planted
    // rows are excluded from both sides of this comparison
    std::vector<bool> sub_y, sub_flags;
    std::vector<double> sub_scores;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const Typology t = labels.typology[i];
      if (y[i] && t != Typology::HighAmountBurst && t != Typology::RapidUseRun &&
          t != Typology::Spree) {
        continue;
      }
      sub_y.push_back(y[i]);
      sub_flags.push_back(res.queue.members[i]);
      sub_scores.push_back(res.weighted[i]);
    }
    res.eval.rows.push_back(
        eval_metrics("combined_queue_threshold", sub_y, sub_flags, sub_scores));

    res.eval_csv = res.eval.to_csv();
    if (write_artifacts) write_file(out + "/eval_report.csv", res.eval_csv);

    if (!cfg.sweep_contamination.empty() && write_artifacts) {
      auto f = open_out(out + "/sweep_report.csv");
      f << "contamination,flagged_fraction,detection_rate,false_positive_rate,precision,"
           "auc_roc\n";
      for (double c : cfg.sweep_contamination) {
        IsolationForestConfig ic = cfg.iforest_config();
        ic.contamination = c;
        const auto model = iforest_fit(res.matrix.data, ic);
        const auto scores = iforest_score_all(model, res.matrix.data);
        const auto flags = iforest_flag(model, scores);
        std::size_t flagged = 0;
        for (bool b : flags) flagged += b ? 1 : 0;
        const auto row = eval_metrics("iforest", y, flags, scores);
        f << fmt(c) << ','
          << fmt(static_cast<double>(flagged) / static_cast<double>(flags.size())) << ','
          << fmt(row.detection_rate) << ',' << fmt(row.false_positive_rate) << ','
          << fmt(row.precision) << ',' << fmt(row.auc_roc) << '\n';
      }
    }
    return 0;
  });

  if (until == PipelineStage::Eval) return res;

  // ---- report ------------------------------------------------------------
  if (write_artifacts) {
    stage("report", [&] {
      const std::string rep = out + "/report";
      std::vector<double> amounts;
      amounts.reserve(res.txns.size());
      for (const auto& t : res.txns) amounts.push_back(cents_to_dollars(t.amount));
      const double amax = amounts.empty() ? 1.0
                                          : *std::max_element(amounts.begin(), amounts.end());
      write_histogram_svg(rep + "/amount_hist.svg", "Transaction amounts", amounts,
                          {0.0, amax, 40});

      {
        std::map<std::string, double> counts;
        for (const auto& t : res.txns) counts[t.category_label] += 1.0;
        std::vector<std::string> names;
        std::vector<double> vals;
        for (const auto& [k, v] : counts) {
          names.push_back(k);
          vals.push_back(v);
        }
        write_bar_svg(rep + "/category_counts.svg", "Transactions per category", names, vals);
      }
      {
        std::vector<double> hours(24, 0.0), dows(7, 0.0), months(12, 0.0);
        for (const auto& fv : res.features) {
          hours[static_cast<std::size_t>(fv.hour)] += 1.0;
          dows[static_cast<std::size_t>(fv.day_of_week)] += 1.0;
          months[static_cast<std::size_t>(fv.month - 1)] += 1.0;
        }
        auto seq_labels = [](std::size_t n, int base) {
          std::vector<std::string> out_labels;
          for (std::size_t i = 0; i < n; ++i) {
            out_labels.push_back(std::to_string(base + static_cast<int>(i)));
          }
          return out_labels;
        };
        write_bar_svg(rep + "/hour_counts.svg", "Transactions per hour", seq_labels(24, 0),
                      hours);
        write_bar_svg(rep + "/dow_counts.svg", "Transactions per weekday (Mon=0)",
                      seq_labels(7, 0), dows);
        write_bar_svg(rep + "/month_counts.svg", "Transactions per month", seq_labels(12, 1),
                      months);
      }

      auto score_span = [](const std::vector<double>& v) {
        HistogramSpec s;
        if (!v.empty()) {
          s.lo = *std::min_element(v.begin(), v.end());
          s.hi = *std::max_element(v.begin(), v.end());
          if (s.hi == s.lo) s.hi = s.lo + 1.0;
        }
        s.bins = 40;
        return s;
      };
      write_histogram_svg(rep + "/if_scores.svg", "Isolation forest scores", res.if_scores,
                          score_span(res.if_scores));
      write_histogram_svg(rep + "/ocsvm_decisions.svg", "OCSVM decision values",
                          res.ocsvm_decisions, score_span(res.ocsvm_decisions));
      write_histogram_svg(rep + "/ae_errors.svg", "Autoencoder reconstruction errors",
                          res.ae_errors, score_span(res.ae_errors));

      {
        std::vector<double> xs(res.pca_coords.rows), ys(res.pca_coords.rows);
        for (std::size_t i = 0; i < res.pca_coords.rows; ++i) {
          xs[i] = res.pca_coords.at(i, 0);
          ys[i] = res.pca_coords.at(i, 1);
        }
        write_scatter_svg(rep + "/pca_iforest.svg", "PCA projection, isolation forest flags",
                          xs, ys, res.if_flags);
        write_scatter_svg(rep + "/pca_ocsvm.svg", "PCA projection, OCSVM flags", xs, ys,
                          res.ocsvm_flags);
      }

      write_line_svg(rep + "/elbow.svg", "K-means elbow", {"inertia"}, {res.elbow});
      {
        const Dataset kd_sample = subsample_rows(res.matrix.data, 4000, cfg.seed ^ 0x4D15);
        write_line_svg(rep + "/k_distance.svg", "k-distance curve", {"distance"},
                       {k_distance(kd_sample, cfg.dbscan_min_samples)});
      }
      {
        const auto entities = entity_fraud_ratio(res.txns, res.flags, EntityGroup::Cardholder);
        std::vector<std::string> names;
        std::vector<double> vals;
        for (std::size_t i = 0; i < std::min<std::size_t>(10, entities.size()); ++i) {
          names.push_back(entities[i].entity_id);
          vals.push_back(entities[i].fraud_ratio);
        }
        write_bar_svg(rep + "/entities_top10.svg", "Top cardholders by flagged ratio", names,
                      vals);
      }
      {
        const auto windows = time_window_risk(res.features, res.weighted);
        std::vector<double> vals;
        for (const auto& w : windows) vals.push_back(w.mean_risk);
        write_bar_svg(rep + "/window_risk.svg", "Mean risk by time window",
                      {"night", "morning", "afternoon", "evening"}, vals);
      }
      {
        std::vector<std::vector<bool>> cols(8, std::vector<bool>(res.txns.size()));
        for (std::size_t i = 0; i < res.txns.size(); ++i) {
          const auto& fl = res.flags[i];
          cols[0][i] = fl.if_flag;
          cols[1][i] = fl.ocsvm_flag;
          cols[2][i] = fl.ae_flag;
          cols[3][i] = fl.unusual_spend;
          cols[4][i] = fl.rapid_use;
          cols[5][i] = fl.spending_spree;
          cols[6][i] = fl.suspicious_sequence;
          cols[7][i] = fl.high_amount;
        }
        write_heat_table_svg(rep + "/correlations.svg", "Indicator correlations",
                             {"iforest", "ocsvm", "autoenc", "unusual", "rapid", "spree",
                              "sequence", "high_amt"},
                             indicator_correlations(cols));
      }
      write_line_svg(rep + "/ae_loss.svg", "Autoencoder loss", {"train", "validation"},
                     {res.ae_history.train_loss, res.ae_history.val_loss});
      return 0;
    });
  }

  return res;
}

}  // namespace fraudlab
