#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "conpt/network.hpp"
#include "conpt/random.hpp"

using namespace conpt;

TEST_CASE("load parses the documented record forms") {
  const Network net = load_network("node 0\nnode 1\nlink 0 1 0.7853981633974483\n");
  CHECK(net.node_count() == 2);
  CHECK(net.link_count() == 1);
  CHECK(net.links().front().w.theta() == kThetaMax);
}

TEST_CASE("load reports unknown nodes, bad angles and duplicate boundaries") {
  CHECK_THROWS_WITH_AS(static_cast<void>(load_network("node 0\nlink 0 9 0.3\n")),
                       doctest::Contains("node 9"), ParseError);
  CHECK_THROWS_AS(static_cast<void>(load_network("node 0\nnode 1\nlink 0 1 2.2\n")), ParseError);
  CHECK_THROWS_AS(static_cast<void>(load_network("node 0\nboundary A 0\nboundary A 0\n")),
                  ParseError);
  CHECK_THROWS_AS(static_cast<void>(load_network("node 0\nboundary A 0\nboundary B 0\n")),
                  ParseError);
  CHECK_THROWS_AS(static_cast<void>(load_network("frobnicate 1 2\n")), ParseError);
}

TEST_CASE("save emits the canonical form and round-trips") {
  const char* text =
      "# heterogeneous 6-node example\n"
      "node 5\nnode 0\nnode 1\nnode 2\nnode 3\nnode 4\n"
      "link 3 0 0.21\n"
      "link 0 1 0.6\n"
      "link 1 2 0.45\n"
      "link 2 5 0.3\n"
      "link 4 1 0.52\n"
      "link 3 4 0.33\n"
      "link 4 5 0.61\n"
      "boundary A 0\n"
      "boundary B 5\n";
  const Network net = load_network(text);
  CHECK(net.node_count() == 6);
  CHECK(net.link_count() == 7);
  const std::string canonical = save_network(net);
  CHECK(save_network(load_network(canonical)) == canonical);
  // Canonical order sorts by min id first.
  CHECK(canonical.find("link 0 1") < canonical.find("link 0 3"));
  CHECK(canonical.find("link 0 3") < canonical.find("link 1 2"));
}

TEST_CASE("square lattice counts and boundaries") {
  const Network small = build_lattice({LatticeKind::Square, 2}, LinkWeight(0.3));
  CHECK(small.node_count() == 4);
  CHECK(small.link_count() == 4);
  CHECK(small.boundary_a().size() == 2);
  CHECK(small.boundary_b().size() == 2);

  const Network big = build_lattice({LatticeKind::Square, 5}, LinkWeight(0.3));
  CHECK(big.node_count() == 25);
  CHECK(big.link_count() == 40);  // 2 L (L-1) bonds
}

TEST_CASE("triangular lattice adds one diagonal per cell") {
  const Network net = build_lattice({LatticeKind::Triangular, 2}, LinkWeight(0.3));
  CHECK(net.node_count() == 4);
  CHECK(net.link_count() == 5);
  const Network l4 = build_lattice({LatticeKind::Triangular, 4}, LinkWeight(0.3));
  CHECK(l4.link_count() == 2 * 4 * 3 + 9);  // square bonds plus (L-1)^2 diagonals
}

TEST_CASE("honeycomb brick wall keeps degree at most three and stays connected") {
  for (int L : {2, 3, 4, 5}) {
    const Network net = build_lattice({LatticeKind::Honeycomb, L}, LinkWeight(0.3));
    CHECK(net.node_count() == static_cast<std::size_t>(L * L));
    std::map<int, int> degree;
    for (const Link& l : net.links()) {
      ++degree[l.a];
      ++degree[l.b];
    }
    for (const auto& [node, d] : degree) CHECK(d <= 3);
    CHECK(reachable_from(net, {0}).size() == net.node_count());
  }
}

TEST_CASE("generators are deterministic") {
  const Network a = build_lattice({LatticeKind::Triangular, 4}, LinkWeight(0.41));
  const Network b = build_lattice({LatticeKind::Triangular, 4}, LinkWeight(0.41));
  CHECK(save_network(a) == save_network(b));
}

TEST_CASE("bethe tree sizes") {
  const Network a = build_bethe(3, 1, LinkWeight(0.4));
  CHECK(a.node_count() == 4);
  CHECK(a.link_count() == 3);
  CHECK(a.boundary_a() == std::vector<int>{0});
  CHECK(a.boundary_b().size() == 3);

  const Network b = build_bethe(3, 2, LinkWeight(0.4));
  CHECK(b.node_count() == 10);
  CHECK(b.link_count() == 9);
  CHECK(b.boundary_b().size() == 6);

  const Network c = build_bethe(4, 2, LinkWeight(0.4));
  CHECK(c.node_count() == 17);
  CHECK(c.link_count() == 16);
}

TEST_CASE("boundary contraction adds a pi/4 clique inside each side") {
  const Network one = build_bethe(3, 1, LinkWeight(0.4));
  // Size-1 side contributes nothing; size-3 side gains C(3,2) links.
  const Network contracted = contract_boundaries(one);
  CHECK(contracted.node_count() == one.node_count());
  CHECK(contracted.link_count() == one.link_count() + 3);

  const Network square3 = build_lattice({LatticeKind::Square, 3}, LinkWeight(0.3));
  CHECK(contract_boundaries(square3).link_count() == square3.link_count() + 6);

  Network singles;
  singles.add_node(0);
  singles.add_node(1);
  singles.add_link(0, 1, LinkWeight(0.2));
  singles.set_boundary_a({0});
  singles.set_boundary_b({1});
  CHECK(contract_boundaries(singles).link_count() == 1);

  Network missing;
  missing.add_node(0);
  CHECK_THROWS_AS(static_cast<void>(contract_boundaries(missing)), std::invalid_argument);
}

TEST_CASE("dilute keeps every link at f=1 and almost none as f -> 0") {
  const Network net = build_bethe(3, 4, LinkWeight(0.4));
  CHECK(save_network(dilute(net, 1.0, 5)) == save_network(net));
  const Network sparse = dilute(net, 1e-9, 5);
  CHECK(sparse.link_count() <= 1);
  CHECK(sparse.node_count() == net.node_count());
  CHECK_THROWS_AS(static_cast<void>(dilute(net, 0.0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(dilute(net, 1.5, 1)), std::invalid_argument);
}

TEST_CASE("dilution retention concentrates at f") {
  const Network net = build_bethe(3, 6, LinkWeight(0.4));
  const double total = static_cast<double>(net.link_count());
  double kept = 0.0;
  const int seeds = 10000;
  for (int seed = 0; seed < seeds; ++seed) {
    kept += static_cast<double>(dilute(net, 0.8, static_cast<std::uint64_t>(seed)).link_count());
  }
  const double mean_fraction = kept / (total * seeds);
  CHECK(mean_fraction == doctest::Approx(0.8).epsilon(0.0125));
}

TEST_CASE("dilution retention is Bernoulli per link (chi-square)") {
  const Network net = build_bethe(3, 3, LinkWeight(0.4));  // 21 links
  const double f = 0.65;
  const int seeds = 2000;
  // Count retained links per trial; compare the histogram against the
  // binomial expectation with a chi-square statistic.
  const int n = static_cast<int>(net.link_count());
  std::vector<int> histogram(static_cast<std::size_t>(n + 1), 0);
  for (int seed = 0; seed < seeds; ++seed) {
    ++histogram[dilute(net, f, 90000 + static_cast<std::uint64_t>(seed)).link_count()];
  }
  std::vector<double> expected(static_cast<std::size_t>(n + 1));
  double binom = std::pow(1.0 - f, n);
  for (int m = 0; m <= n; ++m) {
    if (m > 0) binom *= static_cast<double>(n - m + 1) / m * f / (1.0 - f);
    expected[static_cast<std::size_t>(m)] = binom * seeds;
  }
  double chi2 = 0.0;
  int dof = 0;
  for (int m = 0; m <= n; ++m) {
    if (expected[static_cast<std::size_t>(m)] < 5.0) continue;  // sparse bins skew chi-square
    const double d = histogram[static_cast<std::size_t>(m)] - expected[static_cast<std::size_t>(m)];
    chi2 += d * d / expected[static_cast<std::size_t>(m)];
    ++dof;
  }
  CHECK(dof >= 8);
  CHECK(chi2 < 2.5 * dof);  // loose: catches structural bias, not noise
}
