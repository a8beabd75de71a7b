#include "conpt/classical_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "conpt/random.hpp"

namespace conpt {

namespace {

struct DenseNet {
  int n = 0;                                  // node count
  std::vector<std::pair<int, int>> ends;      // link endpoints, dense indices
  std::vector<double> p;                      // open probabilities
  std::vector<int> side_a, side_b;            // dense boundary indices
};

DenseNet densify(const Network& net) {
  if (net.boundary_a().empty() || net.boundary_b().empty()) {
    throw std::invalid_argument("sponge-crossing oracle needs both boundaries");
  }
  DenseNet d;
  std::map<int, int> index;
  for (int id : net.nodes()) index.emplace(id, d.n++);
  for (const Link& l : net.links()) {
    d.ends.emplace_back(index.at(l.a), index.at(l.b));
    d.p.push_back(l.w.p());
  }
  for (int id : net.boundary_a()) d.side_a.push_back(index.at(id));
  for (int id : net.boundary_b()) d.side_b.push_back(index.at(id));
  return d;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { reset(); }
  void reset() {
    for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = static_cast<int>(i);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

bool sides_connected(UnionFind& uf, const DenseNet& d) {
  for (int a : d.side_a)
    for (int b : d.side_b)
      if (uf.find(a) == uf.find(b)) return true;
  return false;
}

}  // namespace

double brute_force_sc(const Network& net) {
  const DenseNet d = densify(net);
  // Links with p exactly 0 or 1 have only one possible state; keep them out
  // of the enumeration mask.
  std::vector<int> open_always, variable;
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    if (d.p[i] >= 1.0) {
      open_always.push_back(static_cast<int>(i));
    } else if (d.p[i] > 0.0) {
      variable.push_back(static_cast<int>(i));
    }
  }
  if (net.link_count() > 24) {
    throw std::invalid_argument("brute_force_sc: more than 24 links");
  }
  const int e = static_cast<int>(variable.size());
  double total = 0.0;
  UnionFind uf(d.n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
    double weight = 1.0;
    uf.reset();
    for (int fixed : open_always) uf.unite(d.ends[fixed].first, d.ends[fixed].second);
    for (int bit = 0; bit < e; ++bit) {
      const int link = variable[bit];
      if (mask & (std::uint64_t{1} << bit)) {
        weight *= d.p[link];
        uf.unite(d.ends[link].first, d.ends[link].second);
      } else {
        weight *= 1.0 - d.p[link];
      }
    }
    if (weight > 0.0 && sides_connected(uf, d)) total += weight;
  }
  return total;
}

CrossingSample monte_carlo_sc(const Network& net, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_sc: trials must be >= 1");
  const DenseNet d = densify(net);
  constexpr long kBlock = 4096;
  const std::size_t blocks = static_cast<std::size_t>((trials + kBlock - 1) / kBlock);
  std::vector<long> hits_per_block(blocks, 0);
  parallel_for(blocks, [&](std::size_t block) {
    const long begin = static_cast<long>(block) * kBlock;
    const long count = std::min(kBlock, trials - begin);
    Rng rng(mix_seed(seed, 0x6d63ULL + block));
    UnionFind uf(d.n);
    long hits = 0;
    for (long t = 0; t < count; ++t) {
      uf.reset();
      for (std::size_t i = 0; i < d.p.size(); ++i) {
        if (rng.uniform01() < d.p[i]) uf.unite(d.ends[i].first, d.ends[i].second);
      }
      if (sides_connected(uf, d)) ++hits;
    }
    hits_per_block[block] = hits;
  });
  long hits = 0;
  for (long h : hits_per_block) hits += h;
  CrossingSample out;
  out.trials = trials;
  out.hits = hits;
  out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

}  // namespace conpt
