#pragma once

#include <optional>
#include <vector>

#include "conpt/weights.hpp"

namespace conpt {

struct BetheSpec {
  int k = 3;                              // node degree, >= 3
  double f = 1.0;                         // retained link fraction, (0, 1]
  RuleSystem rules = RuleSystem::Classical;
};

struct BetheThresholds {
  double threshold = 0.0;                 // p_th or c_th in the rule system's measure
  std::optional<double> saturation;       // c_sat (ConPT, undiluted only)
  bool valid = true;                      // false when f < 1/(k-1): lattice structure breaks down
};

struct FixedPointOptions {
  double damping = 0.5;
  double step_tolerance = 1e-15;
  long max_iterations = 50'000'000;
  double zero_floor = 1e-14;
};

/// Sponge-crossing value of the infinite lattice at per-link measure w:
/// the stable nontrivial root of the branch recursion
///   P' = parallel(series(P', w) x (k-1))
/// found by damped fixed-point iteration from P0 = w (0 when subcritical),
/// composed at the root as parallel(P', series(P', w)).
double bethe_fixed_point(const BetheSpec& spec, double w, const FixedPointOptions& fp = {});

/// Closed-form thresholds. Classical: p_th = 1/(f(k-1)); ConPT:
/// c_th = 1/sqrt(f(k-1)) plus the saturation point c_sat for f = 1.
BetheThresholds bethe_thresholds(const BetheSpec& spec);

/// Exact sponge-crossing value of the finite lattice with `layers` layers
/// (root has k branches, every deeper node k-1). Undiluted only.
double bethe_finite(const BetheSpec& spec, long layers, double w);

/// Root values for every layer count 1..layers in one pass.
std::vector<double> bethe_finite_profile(const BetheSpec& spec, long layers, double w);

/// Piecewise analytic k=3 ConPT curve: 0 below c_th, the closed form on
/// [c_th, c_sat], exactly 1 above c_sat.
double bethe_closed_form_k3(double c);

/// Diluted branch recursion, binomially averaged over surviving branches.
/// Exact for the classical rules; for ConPT the value is a near-threshold
/// proxy only.
double bethe_diluted_recursion(const BetheSpec& spec, double w, const FixedPointOptions& fp = {});

}  // namespace conpt
