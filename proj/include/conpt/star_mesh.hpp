#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "conpt/weights.hpp"

namespace conpt {

/// An n-leaf star with an implicit root; leg i joins the root to leaf i.
struct StarGraph {
  std::vector<LinkWeight> legs;

  int size() const { return static_cast<int>(legs.size()); }
};

/// Complete graph on n leaves holding one weight per unordered pair.
class MeshGraph {
 public:
  MeshGraph() = default;
  explicit MeshGraph(int n);

  int size() const { return n_; }
  int edge_count() const { return n_ * (n_ - 1) / 2; }
  LinkWeight weight(int i, int j) const { return edges_[edge_index(i, j)]; }
  void set_weight(int i, int j, LinkWeight w) { edges_[edge_index(i, j)] = w; }

 private:
  int edge_index(int i, int j) const;

  int n_ = 0;
  std::vector<LinkWeight> edges_;
};

struct SolveOptions {
  double tolerance = 1e-9;       // residual infinity-norm target
  double step_tolerance = 1e-12; // step infinity-norm stall threshold
  int max_iterations = 200;
  int max_restarts = 5;
  double fd_step = 1e-6;         // forward-difference step in theta
  int max_star_size = 11;
  std::uint64_t elimination_budget = 1'000'000'000ULL;
};

/// Thrown when the quasi-Newton solve does not reach the residual target
/// within its restart budget, a star exceeds max_star_size, or the
/// recursion budget is exhausted. Carries the best residual norm seen and
/// the seed of the failed solve.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& message, double best_residual, std::uint64_t seed)
      : std::runtime_error(message), best_residual_(best_residual), seed_(seed) {}

  double best_residual() const { return best_residual_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double best_residual_;
  std::uint64_t seed_;
};

/// Net connectivity between leaves i and j of a mesh, in the rule
/// system's measure. Defined by recursion: the highest-indexed vertex
/// other than i and j is degraded by a star-mesh transform of its edges,
/// the transformed mesh is merged edgewise (parallel rule) with the
/// untransformed remainder, and the procedure recurses; a 2-vertex mesh
/// returns its single edge.
double pairwise_connectivity(const MeshGraph& mesh, RuleSystem rules, int i, int j,
                             const SolveOptions& opts = {}, std::uint64_t seed = 0);

/// Residuals of the star-mesh equations at `candidate`, ordered by pair
/// (i, j) with i < j lexicographic:
///   r(i,j) = series(leg_i, leg_j) - pairwise_connectivity(candidate, i, j)
/// in the rule system's measure.
Eigen::VectorXd star_mesh_residual(const StarGraph& star, const MeshGraph& candidate,
                                   RuleSystem rules, const SolveOptions& opts = {},
                                   std::uint64_t seed = 0);

/// Solves the star-mesh transform: returns the mesh whose pairwise net
/// connectivities reproduce the star's, with max |residual| <= tolerance.
/// Deterministic per (star, rules, seed). Permuting star legs permutes
/// the returned mesh identically.
MeshGraph solve_star_mesh(const StarGraph& star, RuleSystem rules, std::uint64_t seed,
                          const SolveOptions& opts = {});

}  // namespace conpt
