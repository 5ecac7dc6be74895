#include "fraudlab/persist.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fraudlab {

namespace {

using nlohmann::json;

std::string checksum_hex(const std::string& payload) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  return buf;
}

std::string envelope(const std::string& kind, json payload) {
  const std::string body = payload.dump();
  json env{{"schema_version", kSchemaVersion},
           {"kind", kind},
           {"payload", std::move(payload)},
           {"checksum", checksum_hex(body)}};
  return env.dump(2);
}

json open_envelope(const std::string& text, const std::string& kind) {
  json env;
  try {
    env = json::parse(text);
  } catch (const json::exception& e) {
    throw PersistError(std::string("malformed model file: ") + e.what());
  }
  if (!env.contains("schema_version") || !env["schema_version"].is_number_integer()) {
    throw PersistError("model file missing schema_version");
  }
  const int version = env["schema_version"].get<int>();
  if (version != kSchemaVersion) {
    throw VersionError("unsupported schema_version " + std::to_string(version) +
                       " (supported: " + std::to_string(kSchemaVersion) + ")");
  }
  if (env.value("kind", std::string{}) != kind) {
    throw PersistError("model file kind mismatch: expected " + kind);
  }
  if (!env.contains("payload") || !env.contains("checksum")) {
    throw PersistError("model file missing payload or checksum");
  }
  if (checksum_hex(env["payload"].dump()) != env["checksum"].get<std::string>()) {
    throw ChecksumError("model file checksum mismatch");
  }
  return env["payload"];
}

json dataset_to_json(const Dataset& d) {
  return json{{"rows", d.rows}, {"cols", d.cols}, {"values", d.values}};
}

Dataset dataset_from_json(const json& j) {
  Dataset d;
  d.rows = j.at("rows").get<std::size_t>();
  d.cols = j.at("cols").get<std::size_t>();
  d.values = j.at("values").get<std::vector<double>>();
  if (d.values.size() != d.rows * d.cols) {
    throw PersistError("dataset shape does not match value count");
  }
  return d;
}

}  // namespace

std::string save_model(const IsolationForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      nodes.push_back({n.split_feature, n.split_value, n.left, n.right, n.size, n.depth});
    }
    trees.push_back(std::move(nodes));
  }
  return envelope("isolation_forest", json{{"trees", std::move(trees)},
                                           {"subsample", m.subsample},
                                           {"contamination", m.contamination},
                                           {"score_threshold", m.score_threshold},
                                           {"seed", m.seed}});
}

IsolationForestModel load_iforest(const std::string& text) {
  const json p = open_envelope(text, "isolation_forest");
  IsolationForestModel m;
  m.subsample = p.at("subsample").get<std::size_t>();
  m.contamination = p.at("contamination").get<double>();
  m.score_threshold = p.at("score_threshold").get<double>();
  m.seed = p.at("seed").get<std::uint64_t>();
  for (const auto& jt : p.at("trees")) {
    IsolationTree t;
    for (const auto& jn : jt) {
      IsolationNode n;
      n.split_feature = jn.at(0).get<int>();
      n.split_value = jn.at(1).get<double>();
      n.left = jn.at(2).get<std::int32_t>();
      n.right = jn.at(3).get<std::int32_t>();
      n.size = jn.at(4).get<std::uint32_t>();
      n.depth = jn.at(5).get<std::uint32_t>();
      t.nodes.push_back(n);
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

std::string save_model(const OcsvmModel& m) {
  return envelope("ocsvm", json{{"support_vectors", dataset_to_json(m.support_vectors)},
                                {"alphas", m.alphas},
                                {"rho", m.rho},
                                {"gamma", m.gamma}});
}

OcsvmModel load_ocsvm(const std::string& text) {
  const json p = open_envelope(text, "ocsvm");
  OcsvmModel m;
  m.support_vectors = dataset_from_json(p.at("support_vectors"));
  m.alphas = p.at("alphas").get<std::vector<double>>();
  m.rho = p.at("rho").get<double>();
  m.gamma = p.at("gamma").get<double>();
  if (m.alphas.size() != m.support_vectors.rows) {
    throw PersistError("ocsvm alpha count does not match support vectors");
  }
  return m;
}

std::string save_model(const AutoencoderModel& m) {
  return envelope("autoencoder",
                  json{{"dims", m.params.dims},
                       {"flat", m.params.flat},
                       {"activation", m.params.activation == Activation::Tanh ? "tanh" : "relu"},
                       {"threshold", m.threshold},
                       {"standardization_ref", m.standardization_ref}});
}

AutoencoderModel load_autoencoder(const std::string& text) {
  const json p = open_envelope(text, "autoencoder");
  AutoencoderModel m;
  m.params.dims = p.at("dims").get<std::vector<std::size_t>>();
  m.params.flat = p.at("flat").get<std::vector<double>>();
  const std::string act = p.at("activation").get<std::string>();
  m.params.activation = act == "relu" ? Activation::Relu : Activation::Tanh;
  m.threshold = p.at("threshold").get<double>();
  m.standardization_ref = p.value("standardization_ref", std::string{});
  if (m.params.flat.size() != m.params.param_count()) {
    throw PersistError("autoencoder parameter count does not match dims");
  }
  return m;
}

std::string save_model(const KMeansModel& m) {
  return envelope("kmeans", json{{"centroids", dataset_to_json(m.centroids)},
                                 {"inertia", m.inertia},
                                 {"n_init", m.n_init},
                                 {"max_iter", m.max_iter},
                                 {"seed", m.seed}});
}

KMeansModel load_kmeans(const std::string& text) {
  const json p = open_envelope(text, "kmeans");
  KMeansModel m;
  m.centroids = dataset_from_json(p.at("centroids"));
  m.inertia = p.at("inertia").get<double>();
  m.n_init = p.at("n_init").get<std::size_t>();
  m.max_iter = p.at("max_iter").get<std::size_t>();
  m.seed = p.at("seed").get<std::uint64_t>();
  return m;
}

std::string save_model(const ArfWeights& m) {
  return envelope("arf_weights", json{{"w", m.w},
                                      {"update_count", m.update_count},
                                      {"context_group", m.context_group}});
}

ArfWeights load_arf_weights(const std::string& text) {
  const json p = open_envelope(text, "arf_weights");
  ArfWeights m;
  const auto w = p.at("w").get<std::vector<double>>();
  if (w.size() != m.w.size()) throw PersistError("arf weight vector must have 5 entries");
  std::copy(w.begin(), w.end(), m.w.begin());
  m.update_count = p.at("update_count").get<std::size_t>();
  m.context_group = p.at("context_group").get<std::string>();
  return m;
}

std::string save_model(const StandardizationParams& m) {
  return envelope("standardization",
                  json{{"mean", m.mean}, {"std", m.std}});
}

StandardizationParams load_standardization(const std::string& text) {
  const json p = open_envelope(text, "standardization");
  StandardizationParams m;
  const auto mean = p.at("mean").get<std::vector<double>>();
  const auto stdv = p.at("std").get<std::vector<double>>();
  if (mean.size() != 4 || stdv.size() != 4) {
    throw PersistError("standardization params must have 4 columns");
  }
  std::copy(mean.begin(), mean.end(), m.mean.begin());
  std::copy(stdv.begin(), stdv.end(), m.std.begin());
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace fraudlab
