#include "conpt/star_mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "conpt/random.hpp"

namespace conpt {

MeshGraph::MeshGraph(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("mesh needs at least 2 vertices");
  edges_.resize(static_cast<std::size_t>(edge_count()));
}

int MeshGraph::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_ || i == j) throw std::out_of_range("mesh edge index");
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

namespace {

double theta_to_measure(RuleSystem rules, double theta) {
  if (rules == RuleSystem::Classical) {
    const double s = std::sin(theta);
    return snap_unit(2.0 * s * s);
  }
  return snap_unit(std::sin(2.0 * theta));
}

double measure_to_theta(RuleSystem rules, double m) {
  m = snap_unit(m);
  const double theta =
      rules == RuleSystem::Classical ? std::asin(std::sqrt(0.5 * m)) : 0.5 * std::asin(m);
  if (theta <= kSnapTol) return 0.0;
  if (theta >= kThetaMax - kSnapTol) return kThetaMax;
  return theta;
}

double series2(RuleSystem, double a, double b) { return snap_unit(a * b); }

double parallel2(RuleSystem rules, double a, double b) {
  if (rules == RuleSystem::Classical) return snap_unit(1.0 - (1.0 - a) * (1.0 - b));
  const double fa = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - a * a)));
  const double fb = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - b * b)));
  const double f = fa * fb;
  if (f <= 0.5) return 1.0;
  return snap_unit(2.0 * std::sqrt(f * (1.0 - f)));
}

std::string short_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Mesh in measure space with persistent vertex labels (ascending).
struct Mesh {
  int n = 0;
  std::vector<int> labels;
  std::vector<double> m;  // upper triangle, lexicographic by position pair

  int index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }
  double at(int i, int j) const { return m[static_cast<std::size_t>(index(i, j))]; }
  void set(int i, int j, double v) { m[static_cast<std::size_t>(index(i, j))] = v; }
};

using Key = std::vector<std::uint64_t>;

struct KeyHash {
  std::uint64_t operator()(const Key& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : k) {
      h ^= w;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

double tolerance_for_depth(double top, int depth) {
  return std::max(2e-12, top * std::pow(0.1, depth));
}

// Solutions are pure functions of (rules, tolerance, sorted legs, seed
// source), so one process-wide cache is sound under any thread schedule.
struct SolveCache {
  std::mutex mutex;
  std::unordered_map<Key, std::vector<double>, KeyHash> entries;
};

SolveCache& solve_cache() {
  static SolveCache cache;
  return cache;
}

struct Context {
  RuleSystem rules;
  SolveOptions opts;
  std::uint64_t seed = 0;  // restart seed for the outermost solve only
  std::uint64_t eliminations = 0;

  std::unordered_map<Key, Mesh, KeyHash> elimination_memo;
  std::unordered_map<Key, std::vector<double>, KeyHash> solve_memo;

  void charge_elimination() {
    if (++eliminations > opts.elimination_budget) {
      throw SolveError("star-mesh recursion budget exceeded", -1.0, seed);
    }
    if (elimination_memo.size() > 400'000) elimination_memo.clear();
    if (solve_memo.size() > 400'000) solve_memo.clear();
  }
};

std::vector<double> solve_in_context(Context& ctx, const std::vector<double>& legs_theta,
                                     int depth);

// Replaces the pivot vertex's star by a solved mesh and merges it into the
// untransformed remainder.
Mesh eliminate(Context& ctx, const Mesh& mesh, int pivot, int depth) {
  ctx.charge_elimination();

  Key key;
  key.reserve(mesh.m.size() + mesh.labels.size() + 2);
  key.push_back(static_cast<std::uint64_t>(mesh.n) << 32 |
                static_cast<std::uint64_t>(mesh.labels[static_cast<std::size_t>(pivot)]));
  key.push_back(std::bit_cast<std::uint64_t>(tolerance_for_depth(ctx.opts.tolerance, depth + 1)));
  for (int l : mesh.labels) key.push_back(static_cast<std::uint64_t>(l));
  for (double v : mesh.m) key.push_back(std::bit_cast<std::uint64_t>(v));
  if (const auto it = ctx.elimination_memo.find(key); it != ctx.elimination_memo.end()) {
    return it->second;
  }

  // Remainder: the mesh without the pivot.
  Mesh out;
  out.n = mesh.n - 1;
  std::vector<int> kept;  // positions in `mesh`
  for (int p = 0; p < mesh.n; ++p) {
    if (p != pivot) {
      kept.push_back(p);
      out.labels.push_back(mesh.labels[static_cast<std::size_t>(p)]);
    }
  }
  out.m.resize(static_cast<std::size_t>(out.n * (out.n - 1) / 2));
  for (int i = 0; i < out.n; ++i)
    for (int j = i + 1; j < out.n; ++j) out.set(i, j, mesh.at(kept[i], kept[j]));

  // The pivot's star, keeping only the legs that carry weight.
  std::vector<int> leaf_pos;  // positions in `out`
  std::vector<double> legs_theta;
  for (int i = 0; i < out.n; ++i) {
    const double w = mesh.at(pivot, kept[i]);
    if (w > 0.0) {
      leaf_pos.push_back(i);
      legs_theta.push_back(measure_to_theta(ctx.rules, w));
    }
  }

  const int star_size = static_cast<int>(leaf_pos.size());
  if (star_size == 2) {
    const double s = series2(ctx.rules, mesh.at(pivot, kept[leaf_pos[0]]),
                             mesh.at(pivot, kept[leaf_pos[1]]));
    const int i = leaf_pos[0], j = leaf_pos[1];
    out.set(i, j, parallel2(ctx.rules, out.at(i, j), s));
  } else if (star_size > 2) {
    const std::vector<double> mesh_theta = solve_in_context(ctx, legs_theta, depth + 1);
    int e = 0;
    for (int a = 0; a < star_size; ++a) {
      for (int b = a + 1; b < star_size; ++b, ++e) {
        const double v = theta_to_measure(ctx.rules, mesh_theta[static_cast<std::size_t>(e)]);
        if (v > 0.0) {
          const int i = leaf_pos[static_cast<std::size_t>(a)];
          const int j = leaf_pos[static_cast<std::size_t>(b)];
          out.set(i, j, parallel2(ctx.rules, out.at(i, j), v));
        }
      }
    }
  }
  // star_size <= 1: the pivot dangles; dropping it is exact.

  ctx.elimination_memo.emplace(std::move(key), out);
  return out;
}

double net_measure(Context& ctx, Mesh mesh, int i, int j, int depth) {
  while (mesh.n > 2) {
    int pivot = mesh.n - 1;  // labels ascend with position
    if (pivot == i || pivot == j) --pivot;
    if (pivot == i || pivot == j) --pivot;
    mesh = eliminate(ctx, mesh, pivot, depth);
    if (i > pivot) --i;
    if (j > pivot) --j;
  }
  return mesh.at(0, 1);
}

// Residuals of the canonical system: legs sorted ascending, mesh variables
// in theta.
Eigen::VectorXd residual_vector(Context& ctx, const std::vector<double>& targets, int n,
                                const Eigen::VectorXd& x, int depth) {
  Mesh mesh;
  mesh.n = n;
  mesh.labels.resize(static_cast<std::size_t>(n));
  std::iota(mesh.labels.begin(), mesh.labels.end(), 0);
  mesh.m.resize(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int e = 0; e < x.size(); ++e) {
    mesh.m[static_cast<std::size_t>(e)] = theta_to_measure(ctx.rules, x[e]);
  }
  Eigen::VectorXd r(x.size());
  int e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) {
      r[e] = targets[static_cast<std::size_t>(e)] - net_measure(ctx, mesh, i, j, depth);
    }
  }
  return r;
}

struct BroydenResult {
  Eigen::VectorXd x;
  bool converged = false;
  double best_norm = std::numeric_limits<double>::infinity();
};

Eigen::VectorXd clamp_theta(Eigen::VectorXd x) {
  for (int k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], 0.0, kThetaMax);
  return x;
}

// Quasi-Newton iteration: forward-difference Jacobian once, secant-style
// rank-one updates afterwards, variables projected to [0, pi/4].
template <class Fn>
BroydenResult broyden(Fn&& f, Eigen::VectorXd x0, double tol, const SolveOptions& opts) {
  const auto dim = x0.size();
  BroydenResult result;
  result.x = clamp_theta(std::move(x0));

  Eigen::VectorXd fx = f(result.x);
  result.best_norm = fx.lpNorm<Eigen::Infinity>();
  if (result.best_norm <= tol) {
    result.converged = true;
    return result;
  }

  auto fd_jacobian = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& fx0) {
    Eigen::MatrixXd j(dim, dim);
    Eigen::VectorXd xs = x;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double h = xs[k] + opts.fd_step <= kThetaMax ? opts.fd_step : -opts.fd_step;
      const double saved = xs[k];
      xs[k] = saved + h;
      j.col(k) = (f(xs) - fx0) / h;
      xs[k] = saved;
    }
    return j;
  };

  Eigen::MatrixXd jac = fd_jacobian(result.x, fx);
  Eigen::VectorXd x = result.x;
  Eigen::VectorXd best_x = x;
  int rebuilds = 0;
  int growth_streak = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd step = jac.partialPivLu().solve(-fx);
    if (!step.allFinite()) {
      if (rebuilds++ >= 2) break;
      jac = fd_jacobian(x, fx);
      continue;
    }
    const double scale = step.lpNorm<Eigen::Infinity>();
    if (scale > 0.25) step *= 0.25 / scale;

    const Eigen::VectorXd x_new = clamp_theta(x + step);
    const Eigen::VectorXd dx = x_new - x;
    if (dx.lpNorm<Eigen::Infinity>() <= opts.step_tolerance) {
      if (rebuilds++ >= 2) break;  // stalled; caller restarts from elsewhere
      jac = fd_jacobian(x, fx);
      continue;
    }

    const Eigen::VectorXd fx_new = f(x_new);
    const double norm_new = fx_new.lpNorm<Eigen::Infinity>();
    if (!fx_new.allFinite()) break;
    if (norm_new < result.best_norm) {
      result.best_norm = norm_new;
      best_x = x_new;
      growth_streak = 0;
    } else if (++growth_streak > 8) {
      if (rebuilds++ >= 2) break;
      jac = fd_jacobian(x_new, fx_new);
      growth_streak = 0;
    }

    const Eigen::VectorXd df = fx_new - fx;
    jac += (df - jac * dx) * dx.transpose() / dx.squaredNorm();
    x = x_new;
    fx = fx_new;
    if (norm_new <= tol) {
      result.converged = true;
      break;
    }
  }
  result.x = result.converged ? x : best_x;
  return result;
}

// Sorts the legs so that equal stars share one cache entry, solves or
// reuses the sorted system, and maps the mesh back to the caller's leg
// order. Every solve starts from the series-composition initial mesh, so
// the result is a pure function of the key; restarts of nested solves are
// seeded from the key itself.
std::vector<double> solve_in_context(Context& ctx, const std::vector<double>& legs_theta,
                                     int depth) {
  const int n = static_cast<int>(legs_theta.size());
  if (n == 2) {
    const double s = series2(ctx.rules, theta_to_measure(ctx.rules, legs_theta[0]),
                             theta_to_measure(ctx.rules, legs_theta[1]));
    return {measure_to_theta(ctx.rules, s)};
  }
  if (n > ctx.opts.max_star_size) {
    throw SolveError("star of size " + std::to_string(n) + " exceeds limit " +
                         std::to_string(ctx.opts.max_star_size),
                     -1.0, ctx.seed);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return legs_theta[static_cast<std::size_t>(a)] < legs_theta[static_cast<std::size_t>(b)];
  });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) {
    sorted[static_cast<std::size_t>(pos)] = legs_theta[static_cast<std::size_t>(order[pos])];
  }
  const double tol = tolerance_for_depth(ctx.opts.tolerance, depth);
  const bool outermost = depth == 0;

  Key key;
  key.reserve(sorted.size() + 3);
  key.push_back(static_cast<std::uint64_t>(ctx.rules == RuleSystem::Classical ? 1 : 2));
  key.push_back(std::bit_cast<std::uint64_t>(tol));
  key.push_back(outermost ? ctx.seed : 0);
  for (double t : sorted) key.push_back(std::bit_cast<std::uint64_t>(t));

  std::vector<double> sorted_mesh;
  if (const auto it = ctx.solve_memo.find(key); it != ctx.solve_memo.end()) {
    sorted_mesh = it->second;
  }
  if (sorted_mesh.empty()) {
    std::lock_guard<std::mutex> lock(solve_cache().mutex);
    if (const auto it = solve_cache().entries.find(key); it != solve_cache().entries.end()) {
      sorted_mesh = it->second;
    }
  }
  if (sorted_mesh.empty()) {
    const int dim = n * (n - 1) / 2;
    std::vector<double> targets(static_cast<std::size_t>(dim));
    std::vector<double> measures(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      measures[static_cast<std::size_t>(i)] =
          theta_to_measure(ctx.rules, sorted[static_cast<std::size_t>(i)]);
    }
    {
      int e = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++e)
          targets[static_cast<std::size_t>(e)] = series2(
              ctx.rules, measures[static_cast<std::size_t>(i)], measures[static_cast<std::size_t>(j)]);
    }
    auto f = [&](const Eigen::VectorXd& x) {
      return residual_vector(ctx, targets, n, x, depth);
    };

    Eigen::VectorXd init(dim);
    {
      int e = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++e)
          init[e] = measure_to_theta(ctx.rules, targets[static_cast<std::size_t>(e)]);
    }

    const std::uint64_t restart_seed = outermost ? ctx.seed : KeyHash{}(key);
    BroydenResult run;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= ctx.opts.max_restarts; ++attempt) {
      Eigen::VectorXd x0;
      if (attempt == 0) {
        x0 = init;
      } else {
        Rng rng(mix_seed(restart_seed, static_cast<std::uint64_t>(attempt)));
        x0.resize(dim);
        for (int k = 0; k < dim; ++k) x0[k] = rng.uniform(0.1, kThetaMax - 0.1);
      }
      run = broyden(f, std::move(x0), tol, ctx.opts);
      best_norm = std::min(best_norm, run.best_norm);
      if (run.converged) break;
    }
    if (!run.converged) {
      throw SolveError("star-mesh solve of " + std::to_string(n) +
                           " legs did not converge (best residual " + short_float(best_norm) +
                           ")",
                       best_norm, ctx.seed);
    }
    sorted_mesh.assign(run.x.data(), run.x.data() + run.x.size());
    {
      std::lock_guard<std::mutex> lock(solve_cache().mutex);
      if (solve_cache().entries.size() > 300'000) solve_cache().entries.clear();
      solve_cache().entries.emplace(key, sorted_mesh);
    }
  }
  ctx.solve_memo.emplace(std::move(key), sorted_mesh);

  // Undo the sort: edge(original a, original b) = edge(pos(a), pos(b)).
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) pos[static_cast<std::size_t>(order[p])] = p;
  Mesh canon;
  canon.n = n;
  canon.m = sorted_mesh;
  std::vector<double> out(static_cast<std::size_t>(n * (n - 1) / 2));
  int e = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++e)
      out[static_cast<std::size_t>(e)] =
          canon.m[static_cast<std::size_t>(canon.index(pos[static_cast<std::size_t>(a)],
                                                       pos[static_cast<std::size_t>(b)]))];
  return out;
}

Mesh mesh_from_graph(const MeshGraph& g, RuleSystem rules) {
  Mesh mesh;
  mesh.n = g.size();
  mesh.labels.resize(static_cast<std::size_t>(mesh.n));
  std::iota(mesh.labels.begin(), mesh.labels.end(), 0);
  mesh.m.resize(static_cast<std::size_t>(mesh.n * (mesh.n - 1) / 2));
  for (int i = 0; i < mesh.n; ++i)
    for (int j = i + 1; j < mesh.n; ++j)
      mesh.set(i, j, g.weight(i, j).measure(rules));
  return mesh;
}

}  // namespace

double pairwise_connectivity(const MeshGraph& mesh, RuleSystem rules, int i, int j,
                             const SolveOptions& opts, std::uint64_t seed) {
  if (i == j || i < 0 || j < 0 || i >= mesh.size() || j >= mesh.size()) {
    throw std::invalid_argument("pairwise_connectivity: invalid vertex pair");
  }
  Context ctx{.rules = rules, .opts = opts, .seed = seed};
  return net_measure(ctx, mesh_from_graph(mesh, rules), std::min(i, j), std::max(i, j), 0);
}

Eigen::VectorXd star_mesh_residual(const StarGraph& star, const MeshGraph& candidate,
                                   RuleSystem rules, const SolveOptions& opts,
                                   std::uint64_t seed) {
  const int n = star.size();
  if (candidate.size() != n) {
    throw std::invalid_argument("star_mesh_residual: dimension mismatch");
  }
  Context ctx{.rules = rules, .opts = opts, .seed = seed};
  const Mesh mesh = mesh_from_graph(candidate, rules);
  Eigen::VectorXd r(candidate.edge_count());
  int e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) {
      const double target =
          series2(rules, star.legs[static_cast<std::size_t>(i)].measure(rules),
                  star.legs[static_cast<std::size_t>(j)].measure(rules));
      r[e] = target - net_measure(ctx, mesh, i, j, 0);
    }
  }
  return r;
}

MeshGraph solve_star_mesh(const StarGraph& star, RuleSystem rules, std::uint64_t seed,
                          const SolveOptions& opts) {
  const int n = star.size();
  if (n < 2) throw std::invalid_argument("solve_star_mesh: star needs at least 2 legs");
  if (n > opts.max_star_size) {
    throw SolveError("star of size " + std::to_string(n) + " exceeds limit " +
                         std::to_string(opts.max_star_size),
                     -1.0, seed);
  }

  // Zero legs decouple: every mesh edge at such a leaf is zero and the
  // remaining legs form a smaller star.
  std::vector<int> live;
  std::vector<double> legs_theta;
  for (int i = 0; i < n; ++i) {
    const double theta = star.legs[static_cast<std::size_t>(i)].theta();
    if (theta > 0.0) {
      live.push_back(i);
      legs_theta.push_back(theta);
    }
  }
  MeshGraph out(n);
  if (live.size() < 2) return out;

  Context ctx{.rules = rules, .opts = opts, .seed = seed};
  const std::vector<double> mesh_theta = solve_in_context(ctx, legs_theta, 0);

  const int live_n = static_cast<int>(live.size());
  int e = 0;
  for (int a = 0; a < live_n; ++a) {
    for (int b = a + 1; b < live_n; ++b, ++e) {
      out.set_weight(live[static_cast<std::size_t>(a)], live[static_cast<std::size_t>(b)],
                     LinkWeight(mesh_theta[static_cast<std::size_t>(e)]));
    }
  }

  // Every returned solve is verified against the defining equations.
  const Eigen::VectorXd check = star_mesh_residual(star, out, rules, opts, seed);
  const double norm = check.lpNorm<Eigen::Infinity>();
  if (norm > opts.tolerance * (1.0 + 1e-3)) {
    throw SolveError("solution verification failed (residual " + short_float(norm) + ")", norm,
                     seed);
  }
  return out;
}

}  // namespace conpt
