#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace conpt {

/// Largest admissible link angle (pi/4, the maximally entangled link).
inline constexpr double kThetaMax = 0.78539816339744830961;

/// Values this close to 0 or 1 are snapped to the endpoint before any
/// composition, so that the endpoints are exact fixed points.
inline constexpr double kSnapTol = 1e-12;

/// Selects which pair of composition laws applies: classical bond
/// percolation (probability measure p) or concurrence percolation
/// (concurrence measure c).
enum class RuleSystem { Classical, ConPT };

std::string_view to_string(RuleSystem rules);
RuleSystem rule_system_from_string(std::string_view name);

/// A single link's weight. The canonical representation is the angle
/// theta in [0, pi/4]; the probability p = 2 sin^2(theta) and the
/// concurrence c = sin(2 theta) are derived views.
class LinkWeight {
 public:
  LinkWeight() = default;
  explicit LinkWeight(double theta);

  double theta() const { return theta_; }
  double p() const;
  double c() const;
  double measure(RuleSystem rules) const;

  friend bool operator==(LinkWeight a, LinkWeight b) { return a.theta_ == b.theta_; }
  friend auto operator<=>(LinkWeight a, LinkWeight b) { return a.theta_ <=> b.theta_; }

 private:
  double theta_ = 0.0;
};

LinkWeight weight_from_p(double p);
LinkWeight weight_from_c(double c);
LinkWeight weight_from_measure(RuleSystem rules, double value);

/// Snaps a unit-interval value to 0 or 1 when within kSnapTol.
double snap_unit(double x);

/// Series composition of measure values in [0,1]: the product, for both
/// rule systems. Throws std::invalid_argument on an empty list or an
/// out-of-range value.
double compose_series(RuleSystem rules, std::span<const double> values);

/// Parallel composition of measure values in [0,1].
///
/// Classical: 1 - p = (1 - p_1)(1 - p_2)...
/// ConPT:     (1 + sqrt(1 - c^2))/2 = max{1/2, prod_i (1 + sqrt(1 - c_i^2))/2},
/// with the saturation branch returning exactly 1 once the product falls
/// to 1/2 or below.
double compose_parallel(RuleSystem rules, std::span<const double> values);

double compose_series(RuleSystem rules, std::initializer_list<double> values);
double compose_parallel(RuleSystem rules, std::initializer_list<double> values);

/// Parallel composition of m copies of the same value (m >= 0; the empty
/// composition is 0, i.e. no connection).
double compose_parallel_repeat(RuleSystem rules, double value, long m);

/// Theta-space conveniences used by the reduction engine.
LinkWeight series_weight(RuleSystem rules, LinkWeight a, LinkWeight b);
LinkWeight parallel_weight(RuleSystem rules, LinkWeight a, LinkWeight b);

}  // namespace conpt
