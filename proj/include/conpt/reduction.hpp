#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "conpt/network.hpp"
#include "conpt/star_mesh.hpp"

namespace conpt {

struct ReductionTrace {
  std::vector<int> order;               // nodes in the order they were degraded
  LinkWeight final_weight;              // two-terminal equivalent (theta 0 if disconnected)
  std::vector<int> per_step_max_degree; // max degree in the network before each step
};

struct SpongeCrossingEstimate {
  double mean = 0.0;
  double std_dev = 0.0;
  int runs_requested = 0;
  int runs_succeeded = 0;
  RuleSystem rules = RuleSystem::Classical;
};

/// Per-run diagnostics, optionally collected by sponge_crossing. The wall
/// time is informational and excluded from determinism guarantees.
struct RunRecord {
  int run = 0;
  std::uint64_t order_hash = 0;
  double final_theta = 0.0;
  double wall_seconds = 0.0;
  bool ok = false;
};

/// Thrown when a reduction aborts; carries the partial trace.
class ReduceError : public std::runtime_error {
 public:
  ReduceError(const std::string& message, ReductionTrace partial)
      : std::runtime_error(message), partial_(std::move(partial)) {}
  const ReductionTrace& partial_trace() const { return partial_; }

 private:
  ReductionTrace partial_;
};

/// Removes one non-terminal node: degree <= 1 nodes are deleted, degree-2
/// nodes are contracted in series, larger stars are replaced by a solved
/// mesh. Parallel links produced by the replacement are merged with the
/// parallel rule.
Network degrade_node(const Network& net, int v, RuleSystem rules, std::uint64_t seed,
                     const SolveOptions& opts = {});

/// Contracts the network onto the two terminals. `order` is the priority
/// permutation of the non-terminal nodes; at every step the earliest
/// remaining node of current degree <= 2 is degraded first (those steps
/// are exact), otherwise the earliest remaining node. Nodes disconnected
/// from both terminals are dropped when their turn comes.
ReductionTrace reduce_to_pair(const Network& net, std::pair<int, int> terminals,
                              RuleSystem rules, const std::vector<int>& order,
                              std::uint64_t seed, const SolveOptions& opts = {});

/// Sponge-crossing estimate between the two boundary sets: contracts each
/// boundary into a meta node (pi/4 clique), picks the lowest id on each
/// side as terminal, and averages the final measure over `runs`
/// independent uniformly random degradation orders (per-run seed =
/// seed + run). Runs execute as a parallel map; the estimate is identical
/// under any schedule.
SpongeCrossingEstimate sponge_crossing(const Network& net, RuleSystem rules, int runs,
                                       std::uint64_t seed, const SolveOptions& opts = {},
                                       std::vector<RunRecord>* records = nullptr);

}  // namespace conpt
