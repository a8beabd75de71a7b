#include "conpt/reduction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "conpt/random.hpp"

namespace conpt {

namespace {

// Working graph: adjacency with parallel links pre-merged, weights in theta.
struct Graph {
  RuleSystem rules;
  std::map<int, std::map<int, double>> adj;

  void merge_link(int a, int b, double theta) {
    if (a == b || theta <= 0.0) return;
    auto [it, fresh] = adj[a].try_emplace(b, theta);
    if (!fresh) {
      const double merged =
          parallel_weight(rules, LinkWeight(it->second), LinkWeight(theta)).theta();
      it->second = merged;
      adj[b][a] = merged;
    } else {
      adj[b][a] = theta;
    }
  }

  void remove_node(int v) {
    const auto it = adj.find(v);
    if (it == adj.end()) return;
    for (const auto& [u, w] : it->second) adj[u].erase(v);
    adj.erase(it);
  }

  int degree(int v) const {
    const auto it = adj.find(v);
    return it == adj.end() ? 0 : static_cast<int>(it->second.size());
  }

  int max_degree() const {
    int best = 0;
    for (const auto& [v, nbrs] : adj) best = std::max(best, static_cast<int>(nbrs.size()));
    return best;
  }

  bool reaches_any(int from, int t1, int t2) const {
    if (from == t1 || from == t2) return true;
    std::set<int> seen{from};
    std::queue<int> queue;
    queue.push(from);
    while (!queue.empty()) {
      const int at = queue.front();
      queue.pop();
      const auto it = adj.find(at);
      if (it == adj.end()) continue;
      for (const auto& [u, w] : it->second) {
        if (u == t1 || u == t2) return true;
        if (seen.insert(u).second) queue.push(u);
      }
    }
    return false;
  }
};

Graph graph_from_network(const Network& net, RuleSystem rules) {
  Graph g{rules, {}};
  for (int id : net.nodes()) g.adj[id];
  for (const Link& l : net.links()) g.merge_link(l.a, l.b, l.w.theta());
  return g;
}

// Removes v from g, replacing its star by the solved mesh.
void degrade_in_graph(Graph& g, int v, std::uint64_t seed, const SolveOptions& opts) {
  const auto it = g.adj.find(v);
  if (it == g.adj.end()) return;
  const int degree = static_cast<int>(it->second.size());
  if (degree <= 1) {
    g.remove_node(v);
    return;
  }
  std::vector<int> leaves;
  StarGraph star;
  for (const auto& [u, theta] : it->second) {
    leaves.push_back(u);
    star.legs.emplace_back(theta);
  }
  g.remove_node(v);
  if (degree == 2) {
    g.merge_link(leaves[0], leaves[1],
                 series_weight(g.rules, star.legs[0], star.legs[1]).theta());
    return;
  }
  const MeshGraph mesh = solve_star_mesh(star, g.rules, seed, opts);
  for (int a = 0; a < degree; ++a) {
    for (int b = a + 1; b < degree; ++b) {
      const double theta = mesh.weight(a, b).theta();
      if (theta > 0.0) {
        g.merge_link(leaves[static_cast<std::size_t>(a)], leaves[static_cast<std::size_t>(b)],
                     theta);
      }
    }
  }
}

Network graph_to_network(const Graph& g, const Network& origin) {
  Network out;
  for (const auto& [v, nbrs] : g.adj) out.add_node(v);
  for (const auto& [v, nbrs] : g.adj) {
    for (const auto& [u, theta] : nbrs) {
      if (v < u) out.add_link(v, u, LinkWeight(theta));
    }
  }
  std::vector<int> ba, bb;
  for (int id : origin.boundary_a()) {
    if (out.has_node(id)) ba.push_back(id);
  }
  for (int id : origin.boundary_b()) {
    if (out.has_node(id)) bb.push_back(id);
  }
  out.set_boundary_a(std::move(ba));
  out.set_boundary_b(std::move(bb));
  return out;
}

}  // namespace

Network degrade_node(const Network& net, int v, RuleSystem rules, std::uint64_t seed,
                     const SolveOptions& opts) {
  if (!net.has_node(v)) throw std::invalid_argument("degrade_node: unknown node");
  Graph g = graph_from_network(net, rules);
  degrade_in_graph(g, v, seed, opts);
  return graph_to_network(g, net);
}

ReductionTrace reduce_to_pair(const Network& net, std::pair<int, int> terminals,
                              RuleSystem rules, const std::vector<int>& order,
                              std::uint64_t seed, const SolveOptions& opts) {
  const auto [s, t] = terminals;
  if (!net.has_node(s) || !net.has_node(t) || s == t) {
    throw std::invalid_argument("reduce_to_pair: bad terminals");
  }
  {
    std::set<int> expected(net.nodes().begin(), net.nodes().end());
    expected.erase(s);
    expected.erase(t);
    std::set<int> given(order.begin(), order.end());
    if (given != expected || given.size() != order.size()) {
      throw std::invalid_argument("reduce_to_pair: order must be a permutation of the interior");
    }
  }

  Graph g = graph_from_network(net, rules);
  ReductionTrace trace;
  std::vector<int> pending = order;
  int step = 0;
  while (!pending.empty()) {
    // Degree <= 2 nodes are exact and shrink stars; take the earliest such
    // node in priority order, else the earliest remaining.
    std::size_t chosen = 0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (g.degree(pending[i]) <= 2) {
        chosen = i;
        break;
      }
    }
    const int v = pending[static_cast<std::size_t>(chosen)];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(chosen));
    trace.per_step_max_degree.push_back(g.max_degree());
    trace.order.push_back(v);

    if (!g.reaches_any(v, s, t)) {
      g.remove_node(v);  // stranded by dilution or earlier drops
      ++step;
      continue;
    }
    try {
      degrade_in_graph(g, v, mix_seed(seed, static_cast<std::uint64_t>(step)), opts);
    } catch (const SolveError& err) {
      throw ReduceError(std::string("degrade of node ") + std::to_string(v) +
                            " failed: " + err.what(),
                        std::move(trace));
    }
    ++step;
  }

  const auto it = g.adj.find(s);
  double final_theta = 0.0;
  if (it != g.adj.end()) {
    const auto jt = it->second.find(t);
    if (jt != it->second.end()) final_theta = jt->second;
  }
  trace.final_weight = LinkWeight(final_theta);
  return trace;
}

SpongeCrossingEstimate sponge_crossing(const Network& net, RuleSystem rules, int runs,
                                       std::uint64_t seed, const SolveOptions& opts,
                                       std::vector<RunRecord>* records) {
  if (runs < 1) throw std::invalid_argument("sponge_crossing: runs must be >= 1");
  const Network contracted = contract_boundaries(net);
  const int s = contracted.boundary_a().front();
  const int t = contracted.boundary_b().front();

  std::vector<int> interior;
  for (int id : contracted.nodes()) {
    if (id != s && id != t) interior.push_back(id);
  }

  std::vector<RunRecord> out(static_cast<std::size_t>(runs));
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t run) {
    const std::uint64_t run_seed = seed + run;
    std::vector<int> order = interior;
    Rng rng(run_seed);
    rng.shuffle(order);
    std::uint64_t order_hash = 0xcbf29ce484222325ULL;
    for (int v : order) order_hash = mix_seed(order_hash, static_cast<std::uint64_t>(v));

    RunRecord rec;
    rec.run = static_cast<int>(run);
    rec.order_hash = order_hash;
    const auto started = std::chrono::steady_clock::now();
    try {
      const ReductionTrace trace = reduce_to_pair(contracted, {s, t}, rules, order, run_seed, opts);
      rec.final_theta = trace.final_weight.theta();
      rec.ok = true;
    } catch (const ReduceError&) {
      rec.ok = false;
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out[run] = rec;
  });

  std::vector<double> values;
  for (const RunRecord& rec : out) {
    if (rec.ok) values.push_back(LinkWeight(rec.final_theta).measure(rules));
  }
  std::sort(values.begin(), values.end());  // schedule-independent aggregation

  SpongeCrossingEstimate est;
  est.rules = rules;
  est.runs_requested = runs;
  est.runs_succeeded = static_cast<int>(values.size());
  if (!values.empty()) {
    const double n = static_cast<double>(values.size());
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.front() == values.back()) {
      est.mean = values.front();  // identical runs: no rounding dust
      est.std_dev = 0.0;
    } else {
      double ss = 0.0;
      for (double v : values) ss += (v - est.mean) * (v - est.mean);
      est.std_dev = std::sqrt(ss / n);
    }
  }
  if (records) *records = std::move(out);
  return est;
}

}  // namespace conpt
