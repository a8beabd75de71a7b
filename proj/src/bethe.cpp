#include "conpt/bethe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace conpt {

namespace {

void check_spec(const BetheSpec& spec) {
  if (spec.k < 3) throw std::invalid_argument("bethe degree must be >= 3");
  if (!(spec.f > 0.0 && spec.f <= 1.0)) {
    throw std::invalid_argument("retained fraction must be in (0,1]");
  }
}

double check_unit(double w) {
  w = snap_unit(w);
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("measure value out of [0,1]");
  return w;
}

// One branch step: parallel over m copies of series(P, w).
double branch_step(RuleSystem rules, double prior, double w, long m) {
  return compose_parallel_repeat(rules, snap_unit(prior * w), m);
}

// Diluted branch step: binomial average over the number of surviving
// branches.
double diluted_branch_step(const BetheSpec& spec, double prior, double w) {
  const double y = snap_unit(prior * w);
  const long n = spec.k - 1;
  double sum = 0.0;
  double binom = 1.0;
  for (long m = 0; m <= n; ++m) {
    if (m > 0) binom *= static_cast<double>(n - m + 1) / static_cast<double>(m);
    const double weight = binom * std::pow(spec.f, static_cast<double>(m)) *
                          std::pow(1.0 - spec.f, static_cast<double>(n - m));
    sum += weight * compose_parallel_repeat(spec.rules, y, m);
  }
  return sum;
}

double damped_fixed_point(const BetheSpec& spec, double w,
                          const FixedPointOptions& fp, bool diluted) {
  // At the threshold itself the iteration decays algebraically, so the
  // trivial root is also declared once a decreasing trajectory falls
  // below 1e-7: any nontrivial root would have to sit below that height,
  // leaving an output error under 2e-7.
  constexpr double kSubcriticalCut = 1e-7;
  double p = w;  // starting at w selects the physical stable branch
  for (long it = 0; it < fp.max_iterations; ++it) {
    const double next = diluted ? diluted_branch_step(spec, p, w)
                                : branch_step(spec.rules, p, w, spec.k - 1);
    const double updated = (1.0 - fp.damping) * p + fp.damping * next;
    const double delta = std::abs(updated - p);
    const bool decreasing = updated <= p;
    p = updated;
    if (p < fp.zero_floor) return 0.0;  // trivial subcritical root
    if (decreasing && p < kSubcriticalCut) return 0.0;
    if (delta <= fp.step_tolerance * std::max(1.0, p)) return snap_unit(p);
  }
  throw std::runtime_error("bethe fixed point did not converge at w = " + std::to_string(w));
}

}  // namespace

double bethe_fixed_point(const BetheSpec& spec, double w, const FixedPointOptions& fp) {
  check_spec(spec);
  w = check_unit(w);
  if (spec.f != 1.0) return bethe_diluted_recursion(spec, w, fp);
  const double p = damped_fixed_point(spec, w, fp, false);
  if (p == 0.0) return 0.0;
  const double y = snap_unit(p * w);
  return compose_parallel(spec.rules, {p, y});
}

BetheThresholds bethe_thresholds(const BetheSpec& spec) {
  check_spec(spec);
  BetheThresholds out;
  const double branches = spec.f * static_cast<double>(spec.k - 1);
  out.valid = spec.f >= 1.0 / static_cast<double>(spec.k - 1);
  out.threshold = spec.rules == RuleSystem::Classical ? 1.0 / branches : 1.0 / std::sqrt(branches);
  if (spec.rules == RuleSystem::ConPT && spec.f == 1.0) {
    const double k = static_cast<double>(spec.k);
    const double num = std::pow(0.5, 1.0 / k) - std::pow(0.25, 1.0 / k);
    const double den = std::pow(0.5, (k - 1.0) / k) - std::pow(0.25, (k - 1.0) / k);
    out.saturation = std::sqrt(num / den);
  }
  return out;
}

std::vector<double> bethe_finite_profile(const BetheSpec& spec, long layers, double w) {
  check_spec(spec);
  if (spec.f != 1.0) throw std::invalid_argument("finite recursion is defined for f = 1");
  if (layers < 1) throw std::invalid_argument("layer count must be >= 1");
  w = check_unit(w);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(layers));
  double sub = 1.0;  // boundary itself
  for (long l = 1; l <= layers; ++l) {
    // A root l layers up combines k branches of series(sub, w).
    out.push_back(branch_step(spec.rules, sub, w, spec.k));
    sub = branch_step(spec.rules, sub, w, spec.k - 1);
  }
  return out;
}

double bethe_finite(const BetheSpec& spec, long layers, double w) {
  return bethe_finite_profile(spec, layers, w).back();
}

double bethe_closed_form_k3(double c) {
  c = check_unit(c);
  const double c_th = 1.0 / std::sqrt(2.0);
  const BetheThresholds th = bethe_thresholds({3, 1.0, RuleSystem::ConPT});
  if (c <= c_th) return 0.0;
  if (c >= *th.saturation) return 1.0;
  const double inner = std::pow(std::sqrt(0.25 + 1.0 / (c * c)) - 0.5, 1.5);
  return snap_unit(std::sin(2.0 * std::acos(std::min(1.0, inner))));
}

double bethe_diluted_recursion(const BetheSpec& spec, double w, const FixedPointOptions& fp) {
  check_spec(spec);
  w = check_unit(w);
  if (spec.f == 1.0) return bethe_fixed_point(spec, w, fp);
  const double p = damped_fixed_point(spec, w, fp, true);
  if (p == 0.0) return 0.0;
  const double y = snap_unit(p * w);
  return compose_parallel(spec.rules, {p, y});
}

}  // namespace conpt
