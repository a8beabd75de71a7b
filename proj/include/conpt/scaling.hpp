#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace conpt {

/// A sponge-crossing curve: y values over a strictly increasing grid of
/// control values (p or c), tagged with a free-form label and a numeric
/// size (lattice L or layer count l).
struct Curve {
  std::string label;
  double size = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  std::pair<double, double> window{0.0, 0.0};
};

struct ThresholdEstimate {
  double value = 0.0;
  double uncertainty = 0.0;  // half-spread across adjacent-size pairs
  int pairs = 0;
};

enum class Regime { Subcritical, Supercritical };

/// Finite-size crossing estimate: for every adjacent pair of sizes the
/// intersection of the linearly interpolated curves is located by
/// bisection; the estimate is the mean and half-spread across pairs.
/// Throws when no adjacent pair crosses.
ThresholdEstimate estimate_threshold_crossing(std::vector<Curve> curves);

/// Control value where the curve's second derivative (central
/// differences on the grid) changes sign. Needs >= 7 points.
double turning_point(const Curve& curve);

/// Least-squares line through (log x, log y) restricted to the window;
/// exponent = slope, stderr from the residual variance. Throws on
/// nonpositive data inside the window or fewer than 2 points.
ScalingFit fit_power_law(std::span<const double> xs, std::span<const double> ys,
                         std::pair<double, double> window);

/// Correlation length from exponential decay across sizes at fixed
/// control value: xi = -1/slope of ln(y) (subcritical) or ln(1-y)
/// (supercritical) against L. Throws on non-monotone decay.
double correlation_length(const std::vector<std::pair<double, double>>& value_by_size,
                          Regime regime);

struct NuFit {
  double nu = 0.0;
  double stderr_ = 0.0;
  int points = 0;
};

/// Thermal exponent from joint sub/supercritical Kesten scaling: pools
/// ln(xi) against ln|x - x_th| over every grid point within the distance
/// window and fits one line; nu = -slope.
NuFit kesten_nu(const std::vector<Curve>& curves, double x_th, double dist_min,
                double dist_max);

/// One Bethe-lattice row of entanglement-transmission thresholds, in
/// theta units of (pi/4)^-1.
struct ThresholdRow {
  double cep = 0.0;
  double qep = 0.0;
  double qep_ghz = 0.0;
  double conpt = 0.0;
};

ThresholdRow literature_thresholds(int k);

/// Literature 2D thresholds (same theta units), reported verbatim.
struct Lattice2DThresholds {
  std::string lattice;
  double cep, qep, qep_ghz, conpt;
};

std::vector<Lattice2DThresholds> literature_thresholds_2d();

}  // namespace conpt
