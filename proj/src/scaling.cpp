#include "conpt/scaling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace conpt {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = xs[static_cast<std::size_t>(i)];
    design(i, 1) = 1.0;
    rhs(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  LineFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  if (n > 2) {
    const double ssr = (design * coef - rhs).squaredNorm();
    const double mean_x = design.col(0).mean();
    const double sxx = (design.col(0).array() - mean_x).square().sum();
    fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

double interpolate(const Curve& curve, double x) {
  const auto& xs = curve.xs;
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return curve.ys.front();
  if (it == xs.end()) return curve.ys.back();
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return curve.ys[lo] + t * (curve.ys[hi] - curve.ys[lo]);
}

void check_curve(const Curve& curve) {
  if (curve.xs.size() != curve.ys.size() || curve.xs.size() < 2) {
    throw std::invalid_argument("curve needs matching xs/ys with >= 2 points");
  }
  for (std::size_t i = 1; i < curve.xs.size(); ++i) {
    if (!(curve.xs[i] > curve.xs[i - 1])) {
      throw std::invalid_argument("curve grid must be strictly increasing");
    }
  }
}

// Crossing of two interpolated curves, preferring the sign change whose
// height is nearest 1/2 (the transition region).
double pair_crossing(const Curve& small, const Curve& large) {
  const double lo = std::max(small.xs.front(), large.xs.front());
  const double hi = std::min(small.xs.back(), large.xs.back());
  if (!(lo < hi)) throw std::invalid_argument("curves do not overlap");
  std::set<double> grid;
  for (double x : small.xs) {
    if (x >= lo && x <= hi) grid.insert(x);
  }
  for (double x : large.xs) {
    if (x >= lo && x <= hi) grid.insert(x);
  }
  const std::vector<double> xs(grid.begin(), grid.end());
  auto diff = [&](double x) { return interpolate(small, x) - interpolate(large, x); };

  double best_x = 0.0, best_score = -1.0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double da = diff(xs[i]);
    const double db = diff(xs[i + 1]);
    if (da == 0.0 || da * db < 0.0) {
      double a = xs[i], b = xs[i + 1];
      if (da == 0.0) {
        b = a;
      } else {
        for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
          const double mid = 0.5 * (a + b);
          (diff(mid) * da >= 0.0 ? a : b) = mid;
        }
      }
      const double x = 0.5 * (a + b);
      const double height = 0.5 * (interpolate(small, x) + interpolate(large, x));
      const double score = 0.5 - std::abs(height - 0.5);
      if (!found || score > best_score) {
        best_x = x;
        best_score = score;
        found = true;
      }
    }
  }
  if (!found) throw std::runtime_error("no crossing between sizes");
  return best_x;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::runtime_error("root not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm * flo < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Scans (0,1) on a 1000-point grid and bisects the first bracketed root.
double first_root_01(const std::function<double(double)>& f) {
  constexpr int kScan = 1000;
  double prev_x = 1.0 / kScan;
  double prev_f = f(prev_x);
  for (int i = 2; i < kScan; ++i) {
    const double x = static_cast<double>(i) / kScan;
    const double fx = f(x);
    if (prev_f == 0.0) return prev_x;
    if (prev_f * fx <= 0.0) return bisect_root(f, prev_x, x);
    prev_x = x;
    prev_f = fx;
  }
  throw std::runtime_error("root not bracketed in (0,1)");
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

ThresholdEstimate estimate_threshold_crossing(std::vector<Curve> curves) {
  if (curves.size() < 2) throw std::invalid_argument("need at least two curves");
  for (const Curve& c : curves) check_curve(c);
  std::sort(curves.begin(), curves.end(),
            [](const Curve& a, const Curve& b) { return a.size < b.size; });
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < curves.size(); ++i) {
    crossings.push_back(pair_crossing(curves[i], curves[i + 1]));
  }
  ThresholdEstimate est;
  est.pairs = static_cast<int>(crossings.size());
  const auto [lo, hi] = std::minmax_element(crossings.begin(), crossings.end());
  for (double c : crossings) est.value += c;
  est.value /= static_cast<double>(crossings.size());
  est.uncertainty = 0.5 * (*hi - *lo);
  return est;
}

double turning_point(const Curve& curve) {
  check_curve(curve);
  if (curve.xs.size() < 7) throw std::invalid_argument("turning_point needs >= 7 points");
  const auto& y = curve.ys;
  const std::size_t n = y.size();
  std::vector<double> dd(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) dd[i - 1] = y[i + 1] - 2.0 * y[i] + y[i - 1];
  double best_x = 0.0, best_mag = -1.0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < dd.size(); ++i) {
    if (dd[i] == 0.0 || dd[i] * dd[i + 1] < 0.0) {
      const double xa = curve.xs[i + 1], xb = curve.xs[i + 2];
      const double x = dd[i] == dd[i + 1] ? xa : xa + (xb - xa) * dd[i] / (dd[i] - dd[i + 1]);
      const double mag = std::abs(dd[i]) + std::abs(dd[i + 1]);
      if (!found || mag > best_mag) {
        best_x = x;
        best_mag = mag;
        found = true;
      }
    }
  }
  if (!found) throw std::runtime_error("no sign change in the second derivative");
  return best_x;
}

ScalingFit fit_power_law(std::span<const double> xs, std::span<const double> ys,
                         std::pair<double, double> window) {
  if (xs.size() != ys.size()) throw std::invalid_argument("size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < window.first || xs[i] > window.second) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("nonpositive data inside fit window");
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  if (lx.size() < 2) throw std::invalid_argument("fewer than 2 points in fit window");
  const LineFit line = fit_line(lx, ly);
  ScalingFit fit;
  fit.exponent = line.slope;
  fit.intercept = line.intercept;
  fit.stderr_ = line.slope_stderr;
  fit.window = window;
  return fit;
}

double correlation_length(const std::vector<std::pair<double, double>>& value_by_size,
                          Regime regime) {
  if (value_by_size.size() < 3) throw std::invalid_argument("need >= 3 sizes");
  std::vector<double> sizes, logs;
  auto sorted = value_by_size;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [size, value] : sorted) {
    const double decay = regime == Regime::Subcritical ? value : 1.0 - value;
    if (!(decay > 0.0)) throw std::invalid_argument("value outside the decaying regime");
    sizes.push_back(size);
    logs.push_back(std::log(decay));
  }
  for (std::size_t i = 1; i < logs.size(); ++i) {
    if (!(logs[i] < logs[i - 1])) throw std::runtime_error("non-monotone decay");
  }
  const LineFit line = fit_line(sizes, logs);
  return -1.0 / line.slope;
}

NuFit kesten_nu(const std::vector<Curve>& curves, double x_th, double dist_min,
                double dist_max) {
  if (curves.size() < 3) throw std::invalid_argument("need >= 3 sizes for Kesten scaling");
  std::vector<double> log_dist, log_xi;
  const Curve& base = curves.front();
  for (std::size_t ix = 0; ix < base.xs.size(); ++ix) {
    const double x = base.xs[ix];
    const double dist = std::abs(x - x_th);
    if (dist < dist_min || dist > dist_max) continue;
    std::vector<std::pair<double, double>> by_size;
    for (const Curve& c : curves) {
      const auto it = std::lower_bound(c.xs.begin(), c.xs.end(), x - 1e-12);
      if (it == c.xs.end() || std::abs(*it - x) > 1e-9) break;
      by_size.emplace_back(c.size, c.ys[static_cast<std::size_t>(it - c.xs.begin())]);
    }
    if (by_size.size() != curves.size()) continue;
    try {
      const double xi = correlation_length(
          by_size, x < x_th ? Regime::Subcritical : Regime::Supercritical);
      if (xi > 0.0 && std::isfinite(xi)) {
        log_dist.push_back(std::log(dist));
        log_xi.push_back(std::log(xi));
      }
    } catch (const std::exception&) {
      // grid point outside the clean decay regime; skip
    }
  }
  if (log_dist.size() < 3) throw std::runtime_error("too few usable points for Kesten fit");
  const LineFit line = fit_line(log_dist, log_xi);
  NuFit fit;
  fit.nu = -line.slope;
  fit.stderr_ = line.slope_stderr;
  fit.points = static_cast<int>(log_dist.size());
  return fit;
}

ThresholdRow literature_thresholds(int k) {
  if (k < 3) throw std::invalid_argument("degree must be >= 3");
  const double kd = static_cast<double>(k);
  ThresholdRow row;
  row.cep = (4.0 / kPi) * std::asin(1.0 / std::sqrt(2.0 * (kd - 1.0)));
  row.conpt = (2.0 / kPi) * std::asin(1.0 / std::sqrt(kd - 1.0));

  const double x_swap = first_root_01([kd, k](double x) {
    return 2.0 * x + std::pow(x, kd) * (x * kd - x - kd - 1.0) - (1.0 - x) / (kd - 1.0);
  });
  const double p_swap = 2.0 * x_swap - x_swap * x_swap;
  row.qep = (4.0 / kPi) * std::asin(std::sqrt(0.5 * p_swap));

  const double x_ghz = first_root_01([kd, k](double x) {
    double sum = 0.0;
    double binom = 1.0;  // C(2i, i)
    double pow_term = 1.0;
    const double q = 2.0 * x - x * x;
    const int imax = k / 2 - 1;
    for (int i = 0; i <= imax; ++i) {
      if (i > 0) {
        binom *= static_cast<double>((2 * i - 1) * 2 * i) / static_cast<double>(i * i);
        pow_term *= q / 4.0;
      }
      sum += binom * pow_term;
    }
    return 1.0 - (1.0 - x) * sum - 1.0 / (kd - 1.0);
  });
  row.qep_ghz = (4.0 / kPi) * std::asin(std::sqrt(0.5 * x_ghz));
  return row;
}

std::vector<Lattice2DThresholds> literature_thresholds_2d() {
  return {
      {"square", 0.670, 0.670, 0.584, 0.42},
      {"honeycomb", 0.777, 0.761, 0.745, 0.51},
      {"triangular", 0.545, 0.545, 0.481, 0.32},
  };
}

}  // namespace conpt
