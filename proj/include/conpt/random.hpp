#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace conpt {

/// Mixes two 64-bit values into a new seed (splitmix64 finalizer).
/// Used to derive independent per-run / per-block seeds deterministically.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Deterministic random source. All helpers avoid std::*_distribution so
/// that streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Maximum worker count: CONPT_THREADS if set (>=1), else hardware
/// concurrency.
unsigned max_threads();

/// Runs fn(0..n-1) over a small thread pool. Results must be written to
/// per-index slots by the caller; the schedule carries no information.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace conpt
