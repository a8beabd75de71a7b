#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conpt/random.hpp"
#include "conpt/star_mesh.hpp"

using namespace conpt;

namespace {

// Scalar oracle for the symmetric classical 3-star: the uniform mesh
// weight q satisfies  1 - (1-q)(1-q^2) = p^2,  solved by bisection.
double classical_symmetric_triangle(double p) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double q = 0.5 * (lo + hi);
    const double crossing = 1.0 - (1.0 - q) * (1.0 - q * q);
    (crossing < p * p ? lo : hi) = q;
  }
  return 0.5 * (lo + hi);
}

// Scalar oracle for the symmetric ConPT 3-star, same shape in c.
double conpt_symmetric_triangle(double c) {
  auto crossing = [](double q) {
    return compose_parallel(RuleSystem::ConPT, {q, q * q});
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double q = 0.5 * (lo + hi);
    (crossing(q) < c * c ? lo : hi) = q;
  }
  return 0.5 * (lo + hi);
}

StarGraph uniform_star(RuleSystem rules, int n, double measure) {
  StarGraph star;
  for (int i = 0; i < n; ++i) star.legs.push_back(weight_from_measure(rules, measure));
  return star;
}

}  // namespace

TEST_CASE("pairwise connectivity base cases") {
  MeshGraph pair(2);
  pair.set_weight(0, 1, weight_from_p(0.37));
  CHECK(pairwise_connectivity(pair, RuleSystem::Classical, 0, 1) == doctest::Approx(0.37));

  MeshGraph triangle(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) triangle.set_weight(i, j, weight_from_p(0.5));
  // One-pivot recursion by hand: para(p, seri(p, p)).
  CHECK(pairwise_connectivity(triangle, RuleSystem::Classical, 0, 1) ==
        doctest::Approx(0.625).epsilon(1e-12));

  MeshGraph ctriangle(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) ctriangle.set_weight(i, j, weight_from_c(0.8));
  const double expected = compose_parallel(RuleSystem::ConPT, {0.8, 0.64});
  CHECK(expected == doctest::Approx(0.90996).epsilon(1e-4));
  CHECK(pairwise_connectivity(ctriangle, RuleSystem::ConPT, 0, 1) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(static_cast<void>(pairwise_connectivity(pair, RuleSystem::Classical, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("classical symmetric 3-star solves to the scalar root") {
  const double q_expected = classical_symmetric_triangle(0.5);
  CHECK(q_expected == doctest::Approx(0.21400).epsilon(2e-4));

  const MeshGraph mesh =
      solve_star_mesh(uniform_star(RuleSystem::Classical, 3, 0.5), RuleSystem::Classical, 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      CHECK(mesh.weight(i, j).p() == doctest::Approx(q_expected).epsilon(1e-7));
    }
  }
}

TEST_CASE("conpt symmetric 3-star solves to the scalar root") {
  const double q_expected = conpt_symmetric_triangle(0.8);
  const MeshGraph mesh =
      solve_star_mesh(uniform_star(RuleSystem::ConPT, 3, 0.8), RuleSystem::ConPT, 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      CHECK(mesh.weight(i, j).c() == doctest::Approx(q_expected).epsilon(1e-7));
    }
  }
}

TEST_CASE("n=2 star contracts to the series edge") {
  StarGraph star;
  star.legs = {weight_from_p(0.5), weight_from_p(0.3)};
  const MeshGraph mesh = solve_star_mesh(star, RuleSystem::Classical, 0);
  CHECK(mesh.weight(0, 1).p() == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("residuals vanish at a solution and at the maximal fixed point") {
  StarGraph star = uniform_star(RuleSystem::ConPT, 4, 0.75);
  const MeshGraph mesh = solve_star_mesh(star, RuleSystem::ConPT, 3);
  const Eigen::VectorXd r = star_mesh_residual(star, mesh, RuleSystem::ConPT);
  CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-9);

  StarGraph maximal = uniform_star(RuleSystem::ConPT, 5, 1.0);
  MeshGraph all_one(5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) all_one.set_weight(i, j, LinkWeight(kThetaMax));
  CHECK(star_mesh_residual(maximal, all_one, RuleSystem::ConPT).lpNorm<Eigen::Infinity>() ==
        0.0);
}

TEST_CASE("a zero leg decouples its leaf") {
  StarGraph star;
  star.legs = {weight_from_p(0.5), weight_from_p(0.4), weight_from_p(0.6), LinkWeight(0.0)};
  const MeshGraph mesh = solve_star_mesh(star, RuleSystem::Classical, 5);
  for (int i = 0; i < 3; ++i) CHECK(mesh.weight(i, 3).theta() == 0.0);

  StarGraph reduced;
  reduced.legs = {star.legs[0], star.legs[1], star.legs[2]};
  const MeshGraph small = solve_star_mesh(reduced, RuleSystem::Classical, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(mesh.weight(i, j).theta() == doctest::Approx(small.weight(i, j).theta()).epsilon(1e-12));
}

TEST_CASE("permuting the legs permutes the solution exactly") {
  Rng rng(17);
  StarGraph star;
  for (int i = 0; i < 5; ++i) star.legs.push_back(LinkWeight(rng.uniform(0.2, 0.7)));
  const MeshGraph base = solve_star_mesh(star, RuleSystem::ConPT, 9);

  std::vector<int> perm{3, 0, 4, 1, 2};
  StarGraph shuffled;
  shuffled.legs.resize(5);
  for (int i = 0; i < 5; ++i) shuffled.legs[static_cast<std::size_t>(perm[i])] = star.legs[static_cast<std::size_t>(i)];
  const MeshGraph moved = solve_star_mesh(shuffled, RuleSystem::ConPT, 9);
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      CHECK(moved.weight(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]).theta() ==
            base.weight(i, j).theta());
    }
  }
}

TEST_CASE("solves are deterministic per star and seed") {
  Rng rng(23);
  StarGraph star;
  for (int i = 0; i < 6; ++i) star.legs.push_back(LinkWeight(rng.uniform(0.15, 0.75)));
  const MeshGraph a = solve_star_mesh(star, RuleSystem::ConPT, 42);
  const MeshGraph b = solve_star_mesh(star, RuleSystem::ConPT, 42);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) CHECK(a.weight(i, j).theta() == b.weight(i, j).theta());
}

TEST_CASE("random stars solve to tolerance in both rule systems") {
  Rng rng(99);
  for (const RuleSystem rules : {RuleSystem::Classical, RuleSystem::ConPT}) {
    for (int n = 3; n <= 6; ++n) {
      StarGraph star;
      for (int i = 0; i < n; ++i) star.legs.push_back(LinkWeight(rng.uniform(0.1, kThetaMax)));
      const MeshGraph mesh = solve_star_mesh(star, rules, 1000 + static_cast<std::uint64_t>(n));
      const Eigen::VectorXd r = star_mesh_residual(star, mesh, rules);
      CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("growing a leg never shrinks the mesh") {
  const double base_c = 0.55;
  const MeshGraph before =
      solve_star_mesh(uniform_star(RuleSystem::ConPT, 4, base_c), RuleSystem::ConPT, 7);
  StarGraph bumped = uniform_star(RuleSystem::ConPT, 4, base_c);
  bumped.legs[2] = weight_from_c(0.7);
  const MeshGraph after = solve_star_mesh(bumped, RuleSystem::ConPT, 7);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      CHECK(after.weight(i, j).theta() >= before.weight(i, j).theta() - 1e-9);
    }
  }
}

TEST_CASE("stars past the configured limit are rejected") {
  SolveOptions opts;
  opts.max_star_size = 4;
  CHECK_THROWS_AS(
      static_cast<void>(solve_star_mesh(uniform_star(RuleSystem::Classical, 5, 0.5),
                                        RuleSystem::Classical, 0, opts)),
      SolveError);
}
