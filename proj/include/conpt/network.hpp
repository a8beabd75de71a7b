#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conpt/weights.hpp"

namespace conpt {

struct Link {
  int a = 0;
  int b = 0;
  LinkWeight w;
};

/// Undirected weighted multigraph with optional boundary node sets A and B.
/// Parallel links are allowed; self-loops are dropped on insertion.
/// Networks are immutable by convention once built: operations return new
/// values.
class Network {
 public:
  Network() = default;

  void add_node(int id);
  void add_link(int a, int b, LinkWeight w);
  void set_boundary_a(std::vector<int> ids);
  void set_boundary_b(std::vector<int> ids);

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }

  const std::set<int>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<int>& boundary_a() const { return boundary_a_; }
  const std::vector<int>& boundary_b() const { return boundary_b_; }

  /// Checks link endpoints, boundary membership and disjointness.
  /// Throws std::invalid_argument on violation.
  void validate() const;

 private:
  std::set<int> nodes_;
  std::vector<Link> links_;
  std::vector<int> boundary_a_;
  std::vector<int> boundary_b_;
};

enum class LatticeKind { Square, Honeycomb, Triangular };

std::string_view to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(std::string_view name);

struct LatticeSpec {
  LatticeKind kind = LatticeKind::Square;
  int size = 2;  // number of node columns (and rows), >= 2
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + std::move(message)),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the edge-list document format:
///   # comment
///   node <id>
///   link <idA> <idB> <theta-in-radians>
///   boundary A <id> ...
///   boundary B <id> ...
Network load_network(std::string_view text);

/// Canonical text form: nodes ascending, links sorted by
/// (min id, max id, theta), then boundary lines. save(load(x)) is
/// bit-identical to the canonicalized x.
std::string save_network(const Network& net);

/// Uniform-weight lattice with boundaryA = leftmost node column and
/// boundaryB = rightmost node column. Honeycomb uses a brick-wall
/// embedding; triangular adds one fixed diagonal per square cell.
Network build_lattice(const LatticeSpec& spec, LinkWeight theta);

/// Rooted tree: the root has k children, every other internal node k-1.
/// boundaryA = {root}, boundaryB = the layer-l leaves.
Network build_bethe(int k, int layers, LinkWeight theta);

/// Adds maximal-weight (pi/4) links forming a full clique inside each
/// boundary set, so each boundary behaves as a single meta node under any
/// reduction order. Node count is unchanged.
Network contract_boundaries(const Network& net);

/// Keeps each link independently with probability f (0 < f <= 1), using a
/// generator seeded by `seed`. The result may be disconnected.
Network dilute(const Network& net, double f, std::uint64_t seed);

/// Node ids reachable from `start` ids over the links of `net`.
std::set<int> reachable_from(const Network& net, const std::vector<int>& start);

}  // namespace conpt
