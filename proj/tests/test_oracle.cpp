#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "conpt/classical_oracle.hpp"
#include "conpt/network.hpp"
#include "conpt/random.hpp"
#include "conpt/weights.hpp"

using namespace conpt;

namespace {

Network two_terminal(std::initializer_list<std::tuple<int, int, double>> links_p, int nodes,
                     int s, int t) {
  Network net;
  for (int i = 0; i < nodes; ++i) net.add_node(i);
  for (const auto& [a, b, p] : links_p) net.add_link(a, b, weight_from_p(p));
  net.set_boundary_a({s});
  net.set_boundary_b({t});
  return net;
}

Network wheatstone(double p) {
  // s=0, t=1, bridge nodes 2,3.
  return two_terminal({{0, 2, p}, {0, 3, p}, {2, 3, p}, {2, 1, p}, {3, 1, p}}, 4, 0, 1);
}

// Independent slow connectivity check used against the union-find path.
bool bfs_connected(const Network& net, const std::vector<bool>& open) {
  std::map<int, std::vector<int>> adj;
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    if (!open[i]) continue;
    adj[net.links()[i].a].push_back(net.links()[i].b);
    adj[net.links()[i].b].push_back(net.links()[i].a);
  }
  std::set<int> seen(net.boundary_a().begin(), net.boundary_a().end());
  std::queue<int> q;
  for (int id : net.boundary_a()) q.push(id);
  while (!q.empty()) {
    int at = q.front();
    q.pop();
    for (int nb : adj[at]) {
      if (seen.insert(nb).second) q.push(nb);
    }
  }
  for (int id : net.boundary_b()) {
    if (seen.count(id)) return true;
  }
  return false;
}

// Exhaustive reference without union-find: enumerate subsets, test with BFS.
double brute_force_bfs(const Network& net) {
  const std::size_t e = net.link_count();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
    double w = 1.0;
    std::vector<bool> open(e, false);
    for (std::size_t i = 0; i < e; ++i) {
      const double p = net.links()[i].w.p();
      if (mask & (std::uint64_t{1} << i)) {
        w *= p;
        open[i] = true;
      } else {
        w *= 1.0 - p;
      }
    }
    if (w > 0.0 && bfs_connected(net, open)) total += w;
  }
  return total;
}

}  // namespace

TEST_CASE("brute force on elementary networks") {
  CHECK(brute_force_sc(two_terminal({{0, 1, 0.37}}, 2, 0, 1)) == doctest::Approx(0.37));
  CHECK(brute_force_sc(two_terminal({{0, 1, 0.4}, {0, 1, 0.4}}, 2, 0, 1)) ==
        doctest::Approx(1.0 - 0.6 * 0.6));
  // The self-dual bridge at p = 1/2 crosses with probability exactly 1/2.
  CHECK(brute_force_sc(wheatstone(0.5)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("brute force agrees with an independent BFS enumeration") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int nodes = 4 + static_cast<int>(rng.below(3));
    Network net;
    for (int i = 0; i < nodes; ++i) net.add_node(i);
    for (int i = 1; i < nodes; ++i) {
      net.add_link(static_cast<int>(rng.below(static_cast<std::uint64_t>(i))), i,
                   LinkWeight(rng.uniform(0.05, kThetaMax)));
    }
    for (int extra = 0; extra < 4; ++extra) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
      const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
      if (a != b) net.add_link(a, b, LinkWeight(rng.uniform(0.05, kThetaMax)));
    }
    net.set_boundary_a({0});
    net.set_boundary_b({nodes - 1});
    CHECK(brute_force_sc(net) == doctest::Approx(brute_force_bfs(net)).epsilon(1e-12));
  }
}

TEST_CASE("brute force rejects oversized networks") {
  Network net;
  for (int i = 0; i < 30; ++i) net.add_node(i);
  for (int i = 1; i < 27; ++i) net.add_link(i - 1, i, LinkWeight(0.3));
  net.set_boundary_a({0});
  net.set_boundary_b({26});
  CHECK_THROWS_AS(static_cast<void>(brute_force_sc(net)), std::invalid_argument);
}

TEST_CASE("monte carlo hits the deterministic endpoints") {
  CHECK(monte_carlo_sc(two_terminal({{0, 1, 1.0}, {1, 2, 1.0}}, 3, 0, 2), 500, 9).estimate ==
        1.0);
  CHECK(monte_carlo_sc(two_terminal({{0, 1, 0.0}}, 2, 0, 1), 500, 9).estimate == 0.0);
}

TEST_CASE("monte carlo matches brute force within three standard errors") {
  const Network bridge = wheatstone(0.42);
  const double exact = brute_force_sc(bridge);
  const CrossingSample sample = monte_carlo_sc(bridge, 50000, 1234);
  CHECK(std::abs(sample.estimate - exact) <= 3.0 * sample.stderr_ + 1e-9);
}

TEST_CASE("monte carlo is deterministic and block-schedule independent") {
  const Network bridge = wheatstone(0.42);
  const CrossingSample a = monte_carlo_sc(bridge, 20000, 77);
  const CrossingSample b = monte_carlo_sc(bridge, 20000, 77);
  CHECK(a.hits == b.hits);
}

TEST_CASE("standard error shrinks like one over sqrt trials") {
  const Network bridge = wheatstone(0.5);
  const double s3 = monte_carlo_sc(bridge, 1000, 5).stderr_;
  const double s4 = monte_carlo_sc(bridge, 10000, 5).stderr_;
  const double s5 = monte_carlo_sc(bridge, 100000, 5).stderr_;
  CHECK(s3 / s4 == doctest::Approx(std::sqrt(10.0)).epsilon(0.05));
  CHECK(s4 / s5 == doctest::Approx(std::sqrt(10.0)).epsilon(0.05));
}
