#pragma once

#include <cstdint>

#include "conpt/network.hpp"

namespace conpt {

struct CrossingSample {
  long trials = 0;
  long hits = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Exact classical sponge-crossing probability between the two boundary
/// sets: sums prod p_i * prod (1-p_j) over all link subsets that contain
/// an A-to-B path. Requires link_count <= 24.
double brute_force_sc(const Network& net);

/// Monte Carlo estimate of the same quantity: every trial opens each link
/// independently with its probability p and tests A-to-B connectivity by
/// union-find. Deterministic per (net, trials, seed); trials are split
/// into blocks with derived seeds so parallel execution cannot change the
/// result.
CrossingSample monte_carlo_sc(const Network& net, long trials, std::uint64_t seed);

}  // namespace conpt
