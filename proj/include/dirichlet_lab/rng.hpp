#ifndef DIRICHLET_LAB_RNG_HPP
#define DIRICHLET_LAB_RNG_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace dlab {

/// Counter-based generator: output k of stream `key` is SplitMix64's finalizer
/// applied to key + k * golden. Substreams derive new keys, so sample i of a
/// run can be regenerated without replaying samples 0..i-1.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  /// Independent stream keyed by (this stream's key, index).
  CounterRng substream(std::uint64_t index) const {
    CounterRng out(0);
    out.key_ = mix(key_ ^ mix(index + 0x632BE59BD9B4E019ULL));
    return out;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>((*this)() % span);
  }
  double normal() { return std::normal_distribution<double>{}(*this); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Gaussian matrix rescaled to determinant 1.
inline Lattice random_unimodular(int d, CounterRng& rng) {
  for (;;) {
    Matrix b(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) b(r, c) = rng.normal();
    if (std::abs(b.determinant()) > 1e-3) return Lattice::normalized(std::move(b));
  }
}

/// Weights with entries drawn from [0.1, 1] and normalized per side.
inline WeightVector random_weights(int m, int n, CounterRng& rng) {
  auto side = [&](int k) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (auto& x : w) sum += (x = rng.uniform(0.1, 1.0));
    for (auto& x : w) x /= sum;
    // Put the rounding residue on the largest entry so the sum is 1 to 1e-16.
    double rest = 1.0;
    std::size_t big = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > w[big]) big = i;
    }
    for (std::size_t i = 0; i < w.size(); ++i)
      if (i != big) rest -= w[i];
    w[big] = rest;
    return w;
  };
  auto alpha = side(m);
  auto beta = side(n);
  return WeightVector(std::move(alpha), std::move(beta));
}

/// m x n matrix with entries uniform in [lo, hi).
inline Matrix random_matrix(int m, int n, CounterRng& rng, double lo = 0.0, double hi = 1.0) {
  Matrix a(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = rng.uniform(lo, hi);
  return a;
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_RNG_HPP
