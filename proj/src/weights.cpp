#include "conpt/weights.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace conpt {

std::string_view to_string(RuleSystem rules) {
  return rules == RuleSystem::Classical ? "classical" : "conpt";
}

RuleSystem rule_system_from_string(std::string_view name) {
  if (name == "classical") return RuleSystem::Classical;
  if (name == "conpt") return RuleSystem::ConPT;
  throw std::invalid_argument("unknown rule system: " + std::string(name));
}

double snap_unit(double x) {
  if (std::abs(x) <= kSnapTol) return 0.0;
  if (std::abs(1.0 - x) <= kSnapTol) return 1.0;
  return x;
}

namespace {

double snap_theta(double theta) {
  if (std::abs(theta) <= kSnapTol) return 0.0;
  if (std::abs(theta - kThetaMax) <= kSnapTol) return kThetaMax;
  return theta;
}

double checked_unit(double x, const char* what) {
  x = snap_unit(x);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " out of range [0,1]: " + std::to_string(x));
  }
  return x;
}

// Half of the ConPT parallel factor map: c -> (1 + sqrt(1 - c^2)) / 2.
double conpt_parallel_factor(double c) {
  return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
}

}  // namespace

LinkWeight::LinkWeight(double theta) : theta_(snap_theta(theta)) {
  if (!(theta_ >= 0.0 && theta_ <= kThetaMax)) {
    throw std::invalid_argument("link angle out of range [0, pi/4]: " + std::to_string(theta));
  }
}

double LinkWeight::p() const {
  const double s = std::sin(theta_);
  return snap_unit(2.0 * s * s);
}

double LinkWeight::c() const { return snap_unit(std::sin(2.0 * theta_)); }

double LinkWeight::measure(RuleSystem rules) const {
  return rules == RuleSystem::Classical ? p() : c();
}

LinkWeight weight_from_p(double p) {
  p = checked_unit(p, "probability");
  return LinkWeight(std::asin(std::sqrt(0.5 * p)));
}

LinkWeight weight_from_c(double c) {
  c = checked_unit(c, "concurrence");
  return LinkWeight(0.5 * std::asin(c));
}

LinkWeight weight_from_measure(RuleSystem rules, double value) {
  return rules == RuleSystem::Classical ? weight_from_p(value) : weight_from_c(value);
}

double compose_series(RuleSystem, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("compose_series: empty list");
  double out = 1.0;
  for (double v : values) out *= checked_unit(v, "series operand");
  return snap_unit(out);
}

double compose_parallel(RuleSystem rules, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("compose_parallel: empty list");
  if (rules == RuleSystem::Classical) {
    double miss = 1.0;
    for (double v : values) miss *= 1.0 - checked_unit(v, "parallel operand");
    return snap_unit(1.0 - miss);
  }
  double factor = 1.0;
  for (double v : values) factor *= conpt_parallel_factor(checked_unit(v, "parallel operand"));
  if (factor <= 0.5) return 1.0;  // saturation: a maximal link is obtained exactly
  return snap_unit(2.0 * std::sqrt(factor * (1.0 - factor)));
}

double compose_series(RuleSystem rules, std::initializer_list<double> values) {
  return compose_series(rules, std::span<const double>(values.begin(), values.size()));
}

double compose_parallel(RuleSystem rules, std::initializer_list<double> values) {
  return compose_parallel(rules, std::span<const double>(values.begin(), values.size()));
}

double compose_parallel_repeat(RuleSystem rules, double value, long m) {
  if (m < 0) throw std::invalid_argument("compose_parallel_repeat: negative count");
  if (m == 0) return 0.0;
  value = checked_unit(value, "parallel operand");
  if (rules == RuleSystem::Classical) {
    return snap_unit(1.0 - std::pow(1.0 - value, static_cast<double>(m)));
  }
  const double factor = std::pow(conpt_parallel_factor(value), static_cast<double>(m));
  if (factor <= 0.5) return 1.0;
  return snap_unit(2.0 * std::sqrt(factor * (1.0 - factor)));
}

LinkWeight series_weight(RuleSystem rules, LinkWeight a, LinkWeight b) {
  const double m = compose_series(rules, {a.measure(rules), b.measure(rules)});
  return weight_from_measure(rules, m);
}

LinkWeight parallel_weight(RuleSystem rules, LinkWeight a, LinkWeight b) {
  const double m = compose_parallel(rules, {a.measure(rules), b.measure(rules)});
  return weight_from_measure(rules, m);
}

}  // namespace conpt
