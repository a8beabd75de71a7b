#include "conpt/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "conpt/random.hpp"

namespace conpt {

void Network::add_node(int id) { nodes_.insert(id); }

void Network::add_link(int a, int b, LinkWeight w) {
  if (a == b) return;  // self-loops carry no connectivity
  if (!has_node(a)) throw std::invalid_argument("unknown node in link: " + std::to_string(a));
  if (!has_node(b)) throw std::invalid_argument("unknown node in link: " + std::to_string(b));
  if (a > b) std::swap(a, b);
  links_.push_back(Link{a, b, w});
}

void Network::set_boundary_a(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  boundary_a_ = std::move(ids);
}

void Network::set_boundary_b(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  boundary_b_ = std::move(ids);
}

void Network::validate() const {
  for (const Link& l : links_) {
    if (!has_node(l.a) || !has_node(l.b)) {
      throw std::invalid_argument("link endpoint missing from node set");
    }
  }
  for (int id : boundary_a_) {
    if (!has_node(id)) throw std::invalid_argument("boundary A node missing: " + std::to_string(id));
  }
  for (int id : boundary_b_) {
    if (!has_node(id)) throw std::invalid_argument("boundary B node missing: " + std::to_string(id));
  }
  std::vector<int> overlap;
  std::set_intersection(boundary_a_.begin(), boundary_a_.end(), boundary_b_.begin(),
                        boundary_b_.end(), std::back_inserter(overlap));
  if (!overlap.empty()) {
    throw std::invalid_argument("boundary sets overlap at node " + std::to_string(overlap.front()));
  }
}

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Square: return "square";
    case LatticeKind::Honeycomb: return "honeycomb";
    case LatticeKind::Triangular: return "triangular";
  }
  return "?";
}

LatticeKind lattice_kind_from_string(std::string_view name) {
  if (name == "square") return LatticeKind::Square;
  if (name == "honeycomb") return LatticeKind::Honeycomb;
  if (name == "triangular") return LatticeKind::Triangular;
  throw std::invalid_argument("unknown lattice kind: " + std::string(name));
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError("expected integer, got '" + tok + "'", line);
  }
  return value;
}

double parse_double(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw ParseError("expected number, got '" + tok + "'", line);
  }
}

}  // namespace

Network load_network(std::string_view text) {
  Network net;
  std::vector<std::pair<std::vector<int>, int>> boundary_lines[2];
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::tuple<int, int, double, int>> pending_links;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "node") {
      if (toks.size() != 2) throw ParseError("node takes one id", line_no);
      net.add_node(parse_int(toks[1], line_no));
    } else if (toks[0] == "link") {
      if (toks.size() != 4) throw ParseError("link takes two ids and an angle", line_no);
      pending_links.emplace_back(parse_int(toks[1], line_no), parse_int(toks[2], line_no),
                                 parse_double(toks[3], line_no), line_no);
    } else if (toks[0] == "boundary") {
      if (toks.size() < 3 || (toks[1] != "A" && toks[1] != "B")) {
        throw ParseError("boundary takes 'A' or 'B' and node ids", line_no);
      }
      std::vector<int> ids;
      for (std::size_t i = 2; i < toks.size(); ++i) ids.push_back(parse_int(toks[i], line_no));
      boundary_lines[toks[1] == "A" ? 0 : 1].emplace_back(std::move(ids), line_no);
    } else {
      throw ParseError("unknown record '" + toks[0] + "'", line_no);
    }
  }
  for (const auto& [a, b, theta, at] : pending_links) {
    if (!net.has_node(a)) throw ParseError("link references unknown node " + std::to_string(a), at);
    if (!net.has_node(b)) throw ParseError("link references unknown node " + std::to_string(b), at);
    if (!(theta >= -kSnapTol && theta <= kThetaMax + kSnapTol)) {
      throw ParseError("link angle out of range [0, pi/4]: " + std::to_string(theta), at);
    }
    net.add_link(a, b, LinkWeight(theta));
  }
  std::vector<int> sides[2];
  for (int s = 0; s < 2; ++s) {
    std::set<int> seen;
    for (const auto& [ids, at] : boundary_lines[s]) {
      for (int id : ids) {
        if (!net.has_node(id)) {
          throw ParseError("boundary references unknown node " + std::to_string(id), at);
        }
        if (!seen.insert(id).second) {
          throw ParseError("duplicate boundary membership of node " + std::to_string(id), at);
        }
        sides[s].push_back(id);
      }
    }
  }
  for (int a : sides[0]) {
    if (std::find(sides[1].begin(), sides[1].end(), a) != sides[1].end()) {
      throw ParseError("node " + std::to_string(a) + " is in both boundaries", 0);
    }
  }
  net.set_boundary_a(std::move(sides[0]));
  net.set_boundary_b(std::move(sides[1]));
  return net;
}

std::string save_network(const Network& net) {
  std::string out;
  char buf[64];
  for (int id : net.nodes()) {
    out += "node " + std::to_string(id) + "\n";
  }
  std::vector<Link> links = net.links();
  std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.w.theta() < y.w.theta();
  });
  for (const Link& l : links) {
    std::snprintf(buf, sizeof buf, "%.17g", l.w.theta());
    out += "link " + std::to_string(l.a) + " " + std::to_string(l.b) + " " + buf + "\n";
  }
  for (int s = 0; s < 2; ++s) {
    const auto& ids = s == 0 ? net.boundary_a() : net.boundary_b();
    if (ids.empty()) continue;
    out += std::string("boundary ") + (s == 0 ? "A" : "B");
    for (int id : ids) out += " " + std::to_string(id);
    out += "\n";
  }
  return out;
}

Network build_lattice(const LatticeSpec& spec, LinkWeight theta) {
  const int L = spec.size;
  if (L < 2) throw std::invalid_argument("lattice size must be >= 2");
  Network net;
  auto id = [L](int row, int col) { return row * L + col; };
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) net.add_node(id(r, c));
  for (int r = 0; r < L; ++r) {
    for (int c = 0; c < L; ++c) {
      if (c + 1 < L) net.add_link(id(r, c), id(r, c + 1), theta);
      if (r + 1 < L) {
        const bool vertical = spec.kind != LatticeKind::Honeycomb || (r + c) % 2 == 0;
        if (vertical) net.add_link(id(r, c), id(r + 1, c), theta);
      }
      if (spec.kind == LatticeKind::Triangular && r + 1 < L && c + 1 < L) {
        net.add_link(id(r, c), id(r + 1, c + 1), theta);
      }
    }
  }
  std::vector<int> left, right;
  for (int r = 0; r < L; ++r) {
    left.push_back(id(r, 0));
    right.push_back(id(r, L - 1));
  }
  net.set_boundary_a(std::move(left));
  net.set_boundary_b(std::move(right));
  return net;
}

Network build_bethe(int k, int layers, LinkWeight theta) {
  if (k < 3) throw std::invalid_argument("bethe degree must be >= 3");
  if (layers < 1) throw std::invalid_argument("bethe layer count must be >= 1");
  Network net;
  net.add_node(0);
  std::vector<int> frontier{0};
  int next_id = 1;
  for (int layer = 1; layer <= layers; ++layer) {
    const int fanout = layer == 1 ? k : k - 1;
    std::vector<int> next_frontier;
    for (int parent : frontier) {
      for (int child = 0; child < fanout; ++child) {
        net.add_node(next_id);
        net.add_link(parent, next_id, theta);
        next_frontier.push_back(next_id);
        ++next_id;
      }
    }
    frontier = std::move(next_frontier);
  }
  net.set_boundary_a({0});
  net.set_boundary_b(std::move(frontier));
  return net;
}

Network contract_boundaries(const Network& net) {
  if (net.boundary_a().empty() || net.boundary_b().empty()) {
    throw std::invalid_argument("contract_boundaries: both boundary sets must be non-empty");
  }
  Network out = net;
  const LinkWeight maximal(kThetaMax);
  for (const auto* side : {&net.boundary_a(), &net.boundary_b()}) {
    for (std::size_t i = 0; i < side->size(); ++i)
      for (std::size_t j = i + 1; j < side->size(); ++j)
        out.add_link((*side)[i], (*side)[j], maximal);
  }
  return out;
}

Network dilute(const Network& net, double f, std::uint64_t seed) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("retained fraction must be in (0,1]");
  if (f == 1.0) return net;
  Network out;
  for (int id : net.nodes()) out.add_node(id);
  Rng rng(mix_seed(seed, 0x64696c757465ULL));
  for (const Link& l : net.links()) {
    if (rng.uniform01() < f) out.add_link(l.a, l.b, l.w);
  }
  out.set_boundary_a(net.boundary_a());
  out.set_boundary_b(net.boundary_b());
  return out;
}

std::set<int> reachable_from(const Network& net, const std::vector<int>& start) {
  std::map<int, std::vector<int>> adjacency;
  for (const Link& l : net.links()) {
    adjacency[l.a].push_back(l.b);
    adjacency[l.b].push_back(l.a);
  }
  std::set<int> seen;
  std::queue<int> queue;
  for (int id : start) {
    if (net.has_node(id) && seen.insert(id).second) queue.push(id);
  }
  while (!queue.empty()) {
    const int at = queue.front();
    queue.pop();
    const auto it = adjacency.find(at);
    if (it == adjacency.end()) continue;
    for (int next : it->second) {
      if (seen.insert(next).second) queue.push(next);
    }
  }
  return seen;
}

}  // namespace conpt
