#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fraudlab/common.hpp"

namespace fraudlab {

struct KMeansModel {
  Dataset centroids;  // k x cols
  double inertia = 0.0;
  std::size_t n_init = 10;
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint, best of
// n_init by inertia. Empty clusters are repaired by stealing the farthest
// point from the largest cluster.
KMeansModel kmeans_fit(const Dataset& matrix, std::size_t k = 3, std::size_t n_init = 10,
                       std::size_t max_iter = 300, std::uint64_t seed = 0);

std::vector<std::size_t> kmeans_assign(const KMeansModel& model, const Dataset& matrix);

// one kmeans_fit per k with a shared seed policy; monotone non-increasing
std::vector<double> elbow_curve(const Dataset& matrix, std::size_t k_max = 10,
                                std::size_t n_init = 10, std::size_t max_iter = 300,
                                std::uint64_t seed = 0);

// mean (b-a)/max(a,b); singleton-cluster points score 0; seeded subsample
// above `subsample` points
double silhouette(const Dataset& matrix, const std::vector<std::size_t>& labels,
                  std::size_t subsample = 2000, std::uint64_t seed = 0);

constexpr std::int32_t kDbscanNoise = -1;

struct DbscanResult {
  std::vector<std::int32_t> labels;  // cluster id >= 0, or kDbscanNoise
  std::vector<bool> core_flags;
  double eps = 0.25;
  std::size_t min_samples = 5;
};

// Classic core/border/noise labeling, Euclidean distance <= eps (inclusive),
// neighborhood counts include the point itself. Cluster ids are assigned by
// lowest member row index; border points attach to the cluster of their
// nearest core neighbor (coordinate-lexicographic tie-break), which makes the
// partition permutation-invariant. A uniform-grid index takes over above
// `grid_threshold` rows with identical results.
DbscanResult dbscan(const Dataset& matrix, double eps = 0.25,
                    std::size_t min_samples = 5, std::size_t grid_threshold = 20'000);

// ascending k-th-nearest-neighbor distances (self excluded)
std::vector<double> k_distance(const Dataset& matrix, std::size_t k = 5);

struct PcaModel {
  std::array<double, 4> means{};
  std::array<std::array<double, 4>, 2> components{};  // orthonormal rows
  std::array<double, 2> explained_variance{};         // descending
};

// Top-2 eigendirections of the covariance (cyclic Jacobi on the 4x4), sign
// fixed so each component's largest-magnitude coordinate is positive.
std::pair<PcaModel, Dataset> pca_project(const Dataset& matrix);

}  // namespace fraudlab
