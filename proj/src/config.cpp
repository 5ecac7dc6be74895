#include "fraudlab/config.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fraudlab/persist.hpp"

namespace fraudlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

std::size_t parse_size(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) fail(line, "trailing characters in integer '" + v + "'");
    return static_cast<std::size_t>(x);
  } catch (const std::logic_error&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, line));
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;

  using Setter = std::function<void(PipelineConfig&, const std::string&, std::size_t)>;
  const std::map<std::string, std::map<std::string, Setter>> schema = {
      {"pipeline",
       {
           {"seed", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.seed = parse_size(v, l); }},
           {"out_dir", [](PipelineConfig& c, const std::string& v, std::size_t) { c.out_dir = v; }},
           {"data_dir", [](PipelineConfig& c, const std::string& v, std::size_t) { c.data_dir = v; }},
       }},
      {"gen",
       {
           {"n_transactions", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.gen_n_transactions = parse_size(v, l); }},
           {"n_cards", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.gen_n_cards = parse_size(v, l); }},
           {"n_merchants", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.gen_n_merchants = parse_size(v, l); }},
           {"anomaly_rate", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.gen_anomaly_rate = parse_double(v, l); }},
       }},
      {"ingest",
       {
           {"cap_quantile", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.cap_quantile = parse_double(v, l); }},
           {"cap_enabled", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.cap_enabled = parse_bool(v, l); }},
       }},
      {"iforest",
       {
           {"n_trees", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.if_n_trees = parse_size(v, l); }},
           {"contamination", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.if_contamination = parse_double(v, l); }},
           {"subsample", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.if_subsample = parse_size(v, l); }},
       }},
      {"ocsvm",
       {
           {"nu", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ocsvm_nu = parse_double(v, l); }},
           {"gamma", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ocsvm_gamma = parse_double(v, l); }},
           {"tol", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ocsvm_tol = parse_double(v, l); }},
           {"subsample_cap", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ocsvm_subsample_cap = parse_size(v, l); }},
       }},
      {"autoencoder",
       {
           {"max_epochs", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ae_max_epochs = parse_size(v, l); }},
           {"batch_size", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ae_batch_size = parse_size(v, l); }},
           {"learning_rate", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ae_learning_rate = parse_double(v, l); }},
           {"patience", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ae_patience = parse_size(v, l); }},
           {"bottleneck", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.ae_bottleneck = parse_size(v, l); }},
       }},
      {"cluster",
       {
           {"kmeans_k", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.kmeans_k = parse_size(v, l); }},
           {"kmeans_n_init", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.kmeans_n_init = parse_size(v, l); }},
           {"elbow_k_max", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.elbow_k_max = parse_size(v, l); }},
           {"dbscan_eps", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.dbscan_eps = parse_double(v, l); }},
           {"dbscan_min_samples", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.dbscan_min_samples = parse_size(v, l); }},
       }},
      {"risk",
       {
           {"weight_amount", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.weight_amount = parse_double(v, l); }},
           {"weight_unusual", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.weight_unusual = parse_double(v, l); }},
           {"weight_sequence", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.weight_sequence = parse_double(v, l); }},
           {"weight_rapid", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.weight_rapid = parse_double(v, l); }},
       }},
      {"arf",
       {
           {"learning_rate", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_learning_rate = parse_double(v, l); }},
           {"margin", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_margin = parse_double(v, l); }},
           {"batch_size", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_batch_size = parse_size(v, l); }},
           {"w_max", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_w_max = parse_double(v, l); }},
           {"tau_window", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_tau_window = parse_size(v, l); }},
           {"prior", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_prior = parse_double(v, l); }},
           {"volatility", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_volatility = parse_double(v, l); }},
           {"legal_weight", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.arf_legal_weight = parse_double(v, l); }},
       }},
      {"sweep",
       {
           {"contamination", [](PipelineConfig& c, const std::string& v, std::size_t l) { c.sweep_contamination = parse_double_list(v, l); }},
       }},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (schema.find(section) == schema.end()) fail(lineno, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail(lineno, "key '" + key + "' outside any section");
    const auto& keys = schema.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) fail(lineno, "unknown key '" + key + "' in section [" + section + "]");
    it->second(cfg, value, lineno);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

std::string resolve_out_dir(const std::string& configured) {
  if (const char* env = std::getenv("FRAUDLAB_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return configured;
}

GenConfig PipelineConfig::gen_config() const {
  GenConfig g;
  g.n_transactions = gen_n_transactions;
  g.n_cards = gen_n_cards;
  g.n_merchants = gen_n_merchants;
  g.anomaly_rate = gen_anomaly_rate;
  g.seed = seed;
  return g;
}

IsolationForestConfig PipelineConfig::iforest_config() const {
  IsolationForestConfig c;
  c.n_trees = if_n_trees;
  c.contamination = if_contamination;
  c.subsample = if_subsample;
  c.seed = seed;
  return c;
}

OcsvmConfig PipelineConfig::ocsvm_config() const {
  OcsvmConfig c;
  c.nu = ocsvm_nu;
  c.gamma = ocsvm_gamma;
  c.tol = ocsvm_tol;
  c.subsample_cap = ocsvm_subsample_cap;
  c.seed = seed;
  return c;
}

TrainConfig PipelineConfig::autoencoder_config() const {
  TrainConfig c;
  c.max_epochs = ae_max_epochs;
  c.batch_size = ae_batch_size;
  c.learning_rate = ae_learning_rate;
  c.patience = ae_patience;
  c.bottleneck = ae_bottleneck;
  c.seed = seed;
  return c;
}

ArfConfig PipelineConfig::arf_config() const {
  ArfConfig c;
  c.learning_rate = arf_learning_rate;
  c.margin = arf_margin;
  c.batch_size = arf_batch_size;
  c.w_max = arf_w_max;
  c.tau_window = arf_tau_window;
  return c;
}

ArfContext PipelineConfig::arf_context() const {
  ArfContext c;
  c.prior = arf_prior;
  c.volatility = arf_volatility;
  c.legal_weight = arf_legal_weight;
  return c;
}

namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

std::string PipelineConfig::to_ini() const {
  std::ostringstream s;
  s << "[pipeline]\n"
    << "seed = " << seed << "\n"
    << "out_dir = " << out_dir << "\n";
  if (!data_dir.empty()) s << "data_dir = " << data_dir << "\n";
  s << "\n[gen]\n"
    << "n_transactions = " << gen_n_transactions << "\n"
    << "n_cards = " << gen_n_cards << "\n"
    << "n_merchants = " << gen_n_merchants << "\n"
    << "anomaly_rate = " << num(gen_anomaly_rate) << "\n"
    << "\n[ingest]\n"
    << "cap_quantile = " << num(cap_quantile) << "\n"
    << "cap_enabled = " << (cap_enabled ? "true" : "false") << "\n"
    << "\n[iforest]\n"
    << "n_trees = " << if_n_trees << "\n"
    << "contamination = " << num(if_contamination) << "\n"
    << "subsample = " << if_subsample << "\n"
    << "\n[ocsvm]\n"
    << "nu = " << num(ocsvm_nu) << "\n"
    << "gamma = " << num(ocsvm_gamma) << "\n"
    << "tol = " << num(ocsvm_tol) << "\n"
    << "subsample_cap = " << ocsvm_subsample_cap << "\n"
    << "\n[autoencoder]\n"
    << "max_epochs = " << ae_max_epochs << "\n"
    << "batch_size = " << ae_batch_size << "\n"
    << "learning_rate = " << num(ae_learning_rate) << "\n"
    << "patience = " << ae_patience << "\n"
    << "bottleneck = " << ae_bottleneck << "\n"
    << "\n[cluster]\n"
    << "kmeans_k = " << kmeans_k << "\n"
    << "kmeans_n_init = " << kmeans_n_init << "\n"
    << "elbow_k_max = " << elbow_k_max << "\n"
    << "dbscan_eps = " << num(dbscan_eps) << "\n"
    << "dbscan_min_samples = " << dbscan_min_samples << "\n"
    << "\n[risk]\n"
    << "weight_amount = " << num(weight_amount) << "\n"
    << "weight_unusual = " << num(weight_unusual) << "\n"
    << "weight_sequence = " << num(weight_sequence) << "\n"
    << "weight_rapid = " << num(weight_rapid) << "\n"
    << "\n[arf]\n"
    << "learning_rate = " << num(arf_learning_rate) << "\n"
    << "margin = " << num(arf_margin) << "\n"
    << "batch_size = " << arf_batch_size << "\n"
    << "w_max = " << num(arf_w_max) << "\n"
    << "tau_window = " << arf_tau_window << "\n"
    << "prior = " << num(arf_prior) << "\n"
    << "volatility = " << num(arf_volatility) << "\n"
    << "legal_weight = " << num(arf_legal_weight) << "\n";
  if (!sweep_contamination.empty()) {
    s << "\n[sweep]\ncontamination = ";
    for (std::size_t i = 0; i < sweep_contamination.size(); ++i) {
      if (i) s << ", ";
      s << num(sweep_contamination[i]);
    }
    s << "\n";
  }
  return s.str();
}

}  // namespace fraudlab
