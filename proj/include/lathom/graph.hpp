#ifndef LATHOM_GRAPH_HPP
#define LATHOM_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lathom/error.hpp"

namespace lathom {

using IntVec = std::vector<int>;

inline std::string format_vec(const IntVec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

inline bool is_zero(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

inline IntVec negated(IntVec v) {
  for (auto& x : v) x = -x;
  return v;
}

/// A node of the fundamental cell: periodic coordinates `dpos` in [0, T)^d and
/// bounded cross-section coordinates `kpos` in [0, M)^k.
struct CellNode {
  IntVec dpos;
  IntVec kpos;

  auto operator<=>(const CellNode&) const = default;
  bool operator==(const CellNode&) const = default;

  std::string str() const {
    IntVec all = dpos;
    all.insert(all.end(), kpos.begin(), kpos.end());
    return format_vec(all);
  }
};

/// One periodic family of undirected edges: `from` in cell l joined to `to` in
/// cell l + offset, for every cell l in Z^d.
struct EdgeOrbit {
  CellNode from;
  CellNode to;
  IntVec offset;
  double weight = 1.0;

  bool operator==(const EdgeOrbit&) const = default;

  /// Same orbit read from the other endpoint.
  EdgeOrbit reversed() const { return EdgeOrbit{to, from, negated(offset), weight}; }

  /// Lexicographically smallest endpoint first; for loops around one cell node
  /// the offset is made lexicographically positive.
  EdgeOrbit canonical() const {
    if (to < from) return reversed();
    if (to == from) {
      auto nz = std::find_if(offset.begin(), offset.end(), [](int x) { return x != 0; });
      if (nz != offset.end() && *nz < 0) return reversed();
    }
    return *this;
  }

  /// Key identifying the undirected orbit irrespective of weight.
  auto key() const {
    EdgeOrbit c = canonical();
    return std::make_tuple(std::move(c.from), std::move(c.to), std::move(c.offset));
  }
};

inline bool orbit_less(const EdgeOrbit& a, const EdgeOrbit& b) {
  if (std::tie(a.from, a.to, a.offset) != std::tie(b.from, b.to, b.offset))
    return std::tie(a.from, a.to, a.offset) < std::tie(b.from, b.to, b.offset);
  return a.weight < b.weight;
}

/// Periodic graph X with its edge orbits. Immutable once constructed; the
/// constructor canonicalizes orbit orientation and sorts nodes and orbits, so
/// two graphs describing the same X compare equal.
class LatticeGraph {
 public:
  LatticeGraph(int d, int k, int period, std::vector<CellNode> nodes, std::vector<EdgeOrbit> orbits)
      : d_(d), k_(k), period_(period), nodes_(std::move(nodes)) {
    if (d_ < 1) throw Error(ErrorKind::InvalidGraph, "d must be positive");
    if (k_ < 0) throw Error(ErrorKind::InvalidGraph, "k must be non-negative");
    if (period_ < 1) throw Error(ErrorKind::InvalidGraph, "T must be positive");
    if (nodes_.empty()) throw Error(ErrorKind::InvalidGraph, "graph has no nodes");
    extent_ = 1;
    for (const auto& n : nodes_) {
      if (static_cast<int>(n.dpos.size()) != d_ || static_cast<int>(n.kpos.size()) != k_)
        throw Error(ErrorKind::InvalidGraph, "node " + n.str() + " has wrong arity");
      for (int x : n.dpos)
        if (x < 0 || x >= period_)
          throw Error(ErrorKind::InvalidGraph, "node " + n.str() + " periodic coordinate outside [0,T)");
      for (int x : n.kpos) {
        if (x < 0) throw Error(ErrorKind::InvalidGraph, "node " + n.str() + " has negative cross-section coordinate");
        extent_ = std::max(extent_, x + 1);
      }
    }
    std::sort(nodes_.begin(), nodes_.end());
    if (auto dup = std::adjacent_find(nodes_.begin(), nodes_.end()); dup != nodes_.end())
      throw Error(ErrorKind::InvalidGraph, "duplicate node " + dup->str());

    orbits_.reserve(orbits.size());
    for (const auto& raw : orbits) {
      if (static_cast<int>(raw.offset.size()) != d_)
        throw Error(ErrorKind::InvalidGraph, "orbit offset has wrong arity");
      if (!(raw.weight > 0.0) || !std::isfinite(raw.weight))
        throw Error(ErrorKind::InvalidGraph, "orbit weight must be positive and finite");
      if (raw.from == raw.to && is_zero(raw.offset))
        throw Error(ErrorKind::InvalidGraph, "self-loop at node " + raw.from.str());
      orbits_.push_back(raw.canonical());
    }
    std::sort(orbits_.begin(), orbits_.end(), orbit_less);
    for (std::size_t i = 1; i < orbits_.size(); ++i)
      if (orbits_[i - 1].key() == orbits_[i].key())
        throw Error(ErrorKind::InvalidGraph, "duplicate orbit " + orbits_[i].from.str() + " -> " +
                                                 orbits_[i].to.str() + format_vec(orbits_[i].offset));

    ends_.reserve(orbits_.size());
    for (const auto& o : orbits_) {
      auto a = find_node(o.from);
      auto b = find_node(o.to);
      if (!a || !b)
        throw Error(ErrorKind::UnknownNode, "orbit endpoint " + (a ? o.to : o.from).str() + " is not a node");
      ends_.emplace_back(*a, *b);
    }
  }

  int d() const noexcept { return d_; }
  int k() const noexcept { return k_; }
  int period() const noexcept { return period_; }
  /// Cross-section extent M: every kpos component lies in [0, M).
  int extent() const noexcept { return extent_; }

  const std::vector<CellNode>& nodes() const noexcept { return nodes_; }
  const std::vector<EdgeOrbit>& orbits() const noexcept { return orbits_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Node indices of orbit `i` (from, to).
  std::pair<std::size_t, std::size_t> ends(std::size_t i) const { return ends_[i]; }

  std::optional<std::size_t> find_node(const CellNode& n) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end() || !(*it == n)) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::size_t node_index(const CellNode& n) const {
    if (auto i = find_node(n)) return *i;
    throw Error(ErrorKind::UnknownNode, "node " + n.str() + " is not in the graph");
  }

  /// Geometric displacement of orbit `i` in the periodic directions:
  /// to.dpos + offset*T - from.dpos.
  IntVec displacement_d(std::size_t i) const {
    const auto& o = orbits_[i];
    IntVec v(d_);
    for (int m = 0; m < d_; ++m) v[m] = o.to.dpos[m] + o.offset[m] * period_ - o.from.dpos[m];
    return v;
  }

  /// Max-norm of the full (d+k)-dimensional displacement of orbit `i`.
  int range(std::size_t i) const {
    int r = 0;
    for (int x : displacement_d(i)) r = std::max(r, std::abs(x));
    const auto& o = orbits_[i];
    for (int m = 0; m < k_; ++m) r = std::max(r, std::abs(o.to.kpos[m] - o.from.kpos[m]));
    return r;
  }

  /// R: largest edge range over all orbits (0 when there are none).
  int max_range() const {
    int r = 0;
    for (std::size_t i = 0; i < orbits_.size(); ++i) r = std::max(r, range(i));
    return r;
  }

  double min_weight() const {
    double w = orbits_.empty() ? 0.0 : orbits_.front().weight;
    for (const auto& o : orbits_) w = std::min(w, o.weight);
    return w;
  }

  bool operator==(const LatticeGraph& other) const {
    return d_ == other.d_ && k_ == other.k_ && period_ == other.period_ && nodes_ == other.nodes_ &&
           orbits_ == other.orbits_;
  }

 private:
  int d_;
  int k_;
  int period_;
  int extent_ = 1;
  std::vector<CellNode> nodes_;
  std::vector<EdgeOrbit> orbits_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
};

struct Neighbor {
  CellNode node;
  IntVec offset;
  double weight;

  bool operator==(const Neighbor&) const = default;
};

/// Every edge incident to `node` in cell 0, read outward: the neighbour sits in
/// cell `offset`. Loops around a single cell node appear in both orientations.
inline std::vector<Neighbor> neighbors(const LatticeGraph& graph, const CellNode& node) {
  graph.node_index(node);
  std::vector<Neighbor> out;
  for (const auto& o : graph.orbits()) {
    if (o.from == node) out.push_back({o.to, o.offset, o.weight});
    if (o.to == node) out.push_back({o.from, negated(o.offset), o.weight});
  }
  return out;
}

/// Re-expresses the graph with period lcm(T, M) so that the cross-section fits
/// inside [0, T)^k. The cell problem value is unchanged by this.
inline LatticeGraph lcm_normalized(const LatticeGraph& graph) {
  const int T = graph.period();
  const int big = std::lcm(T, graph.extent());
  if (big == T) return graph;
  const int reps = big / T;
  const int d = graph.d();

  // All shifts s in {0..reps-1}^d.
  std::vector<IntVec> shifts{IntVec{}};
  for (int m = 0; m < d; ++m) {
    std::vector<IntVec> next;
    for (const auto& s : shifts)
      for (int r = 0; r < reps; ++r) {
        auto t = s;
        t.push_back(r);
        next.push_back(std::move(t));
      }
    shifts = std::move(next);
  }

  auto floor_div = [](int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };

  std::vector<CellNode> nodes;
  for (const auto& n : graph.nodes())
    for (const auto& s : shifts) {
      CellNode c = n;
      for (int m = 0; m < d; ++m) c.dpos[m] += s[m] * T;
      nodes.push_back(std::move(c));
    }
  std::vector<EdgeOrbit> orbits;
  for (const auto& o : graph.orbits())
    for (const auto& s : shifts) {
      EdgeOrbit e;
      e.from = o.from;
      e.to = o.to;
      e.weight = o.weight;
      e.offset.assign(d, 0);
      for (int m = 0; m < d; ++m) {
        e.from.dpos[m] += s[m] * T;
        const int target = s[m] + o.offset[m];
        const int big_cell = floor_div(target, reps);
        e.offset[m] = big_cell;
        e.to.dpos[m] += (target - big_cell * reps) * T;
      }
      orbits.push_back(std::move(e));
    }
  return LatticeGraph(d, graph.k(), big, std::move(nodes), std::move(orbits));
}

}  // namespace lathom

#endif  // LATHOM_GRAPH_HPP
