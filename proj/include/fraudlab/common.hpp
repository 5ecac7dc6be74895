#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraudlab {

// Deterministic PRNG. mt19937_64 output is bit-exact across platforms; the
// std distributions are not, so the draw helpers below are hand-rolled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // splitmix64 scramble so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) next_raw();
  }

  std::uint64_t next_raw() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_raw() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do { x = next_raw(); } while (x >= limit);
    return x % n;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

  // derive an independent stream, e.g. per tree / per card
  Rng fork(std::uint64_t stream) const {
    Rng r(0);
    r.state_ = state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (int i = 0; i < 4; ++i) r.next_raw();
    return r;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Nearest-rank quantile: the sorted value at 1-based index ceil(q*n).
// The epsilon compensates for products like 0.95*100 landing just above
// the integer in IEEE arithmetic.
inline std::size_t nearest_rank_index(std::size_t n, double q) {
  if (n == 0) throw std::invalid_argument("nearest_rank_index: empty");
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("quantile outside (0,1]");
  const double r = std::ceil(q * static_cast<double>(n) - 1e-9);
  auto idx = static_cast<std::size_t>(std::max(1.0, r));
  return std::min(idx, n) - 1;
}

// q-quantile of unsorted data by the nearest-rank rule.
template <typename T>
T nearest_rank_quantile(std::vector<T> values, double q) {
  const std::size_t idx = nearest_rank_index(values.size(), q);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx),
                   values.end());
  return values[idx];
}

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// population standard deviation
inline double stddev_pop(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Row-major numeric table shared by the model modules.
struct Dataset {
  std::vector<double> values;  // rows*cols, row-major
  std::size_t rows = 0;
  std::size_t cols = 0;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// FNV-1a, used for artifact checksums.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace fraudlab
