#pragma once

#include <stdexcept>
#include <string>

#include "fraudlab/arf.hpp"
#include "fraudlab/autoencoder.hpp"
#include "fraudlab/cluster.hpp"
#include "fraudlab/features.hpp"
#include "fraudlab/iforest.hpp"
#include "fraudlab/ocsvm.hpp"

namespace fraudlab {

// Versioned JSON envelope: {schema_version, kind, payload, checksum}.
// The checksum covers the serialized payload; doubles round-trip bit-exactly
// (shortest-representation formatting on both ends).
constexpr int kSchemaVersion = 1;

struct PersistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionError : PersistError {
  using PersistError::PersistError;
};
struct ChecksumError : PersistError {
  using PersistError::PersistError;
};

std::string save_model(const IsolationForestModel& m);
std::string save_model(const OcsvmModel& m);
std::string save_model(const AutoencoderModel& m);
std::string save_model(const KMeansModel& m);
std::string save_model(const ArfWeights& m);
std::string save_model(const StandardizationParams& m);

IsolationForestModel load_iforest(const std::string& text);
OcsvmModel load_ocsvm(const std::string& text);
AutoencoderModel load_autoencoder(const std::string& text);
KMeansModel load_kmeans(const std::string& text);
ArfWeights load_arf_weights(const std::string& text);
StandardizationParams load_standardization(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace fraudlab
