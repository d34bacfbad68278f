#ifndef LATHOM_VALIDATE_HPP
#define LATHOM_VALIDATE_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "lathom/graph.hpp"

namespace lathom {

/// An oriented copy of an orbit as seen from one cell node.
struct Arc {
  std::size_t to;
  IntVec offset;
  double weight;
  std::size_t orbit;
};

/// Outgoing arcs per cell node; every orbit contributes one arc at each end.
inline std::vector<std::vector<Arc>> oriented_arcs(const LatticeGraph& graph) {
  std::vector<std::vector<Arc>> arcs(graph.node_count());
  for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
    const auto [a, b] = graph.ends(i);
    const auto& o = graph.orbits()[i];
    arcs[a].push_back({b, o.offset, o.weight, i});
    arcs[b].push_back({a, negated(o.offset), o.weight, i});
  }
  return arcs;
}

/// A vertex of the infinite graph: cell node `node` translated into cell `cell`.
struct LatticeSite {
  std::size_t node;
  IntVec cell;

  auto operator<=>(const LatticeSite&) const = default;
  bool operator==(const LatticeSite&) const = default;
};

struct LatticeSiteHash {
  std::size_t operator()(const LatticeSite& s) const noexcept {
    std::size_t h = std::hash<std::size_t>{}(s.node);
    for (int x : s.cell) h = h * 1000003u ^ std::hash<int>{}(x);
    return h;
  }
};

inline IntVec add(IntVec a, const IntVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline IntVec unit(int d, int m, int sign = 1) {
  IntVec e(d, 0);
  e[m] = sign;
  return e;
}

// ---------------------------------------------------------------------------
// Integer lattices

/// Lower-triangular Hermite-style basis of the subgroup of Z^d spanned by
/// `generators`. Columns with a zero pivot are dropped, so the basis has
/// `rank` vectors. `index` is |det| when the rank is full, 0 otherwise.
struct SublatticeBasis {
  std::vector<IntVec> basis;
  int rank = 0;
  std::int64_t index = 0;
};

inline SublatticeBasis sublattice_basis(int d, const std::vector<IntVec>& generators) {
  std::vector<std::vector<std::int64_t>> cols;
  for (const auto& g : generators)
    if (!is_zero(g)) cols.emplace_back(g.begin(), g.end());

  SublatticeBasis out;
  std::size_t pivot = 0;
  for (int row = 0; row < d && pivot < cols.size(); ++row) {
    for (;;) {
      std::size_t best = cols.size();
      for (std::size_t c = pivot; c < cols.size(); ++c)
        if (cols[c][row] != 0 && (best == cols.size() || std::llabs(cols[c][row]) < std::llabs(cols[best][row])))
          best = c;
      if (best == cols.size()) break;
      std::swap(cols[pivot], cols[best]);
      bool reduced = true;
      for (std::size_t c = pivot + 1; c < cols.size(); ++c) {
        if (cols[c][row] == 0) continue;
        const std::int64_t q = cols[c][row] / cols[pivot][row];
        for (int r = 0; r < d; ++r) cols[c][r] -= q * cols[pivot][r];
        if (cols[c][row] != 0) reduced = false;
      }
      if (reduced) break;
    }
    if (cols[pivot][row] == 0) continue;
    if (cols[pivot][row] < 0)
      for (auto& x : cols[pivot]) x = -x;
    ++pivot;
  }
  out.rank = static_cast<int>(pivot);
  for (std::size_t c = 0; c < pivot; ++c) out.basis.emplace_back(cols[c].begin(), cols[c].end());
  if (out.rank == d) {
    std::int64_t det = 1;
    // The basis is lower triangular in the rows where pivots were found, and
    // with full rank those are exactly rows 0..d-1.
    for (int r = 0; r < d; ++r) det *= cols[r][r];
    out.index = std::llabs(det);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connectedness

struct WitnessPath {
  std::size_t from;
  std::size_t to;
  IntVec shift;  ///< target is `to` translated into cell `shift`
  std::vector<LatticeSite> sites;

  std::size_t length() const { return sites.empty() ? 0 : sites.size() - 1; }
};

struct ConnectivityResult {
  bool connected = false;
  bool quotient_connected = false;
  std::vector<std::vector<std::size_t>> components;  ///< of the quotient multigraph
  SublatticeBasis sublattice;                        ///< closed-walk offsets
  std::string reason;                                ///< empty when connected
  std::vector<WitnessPath> witnesses;                ///< filled when connected

  const WitnessPath* witness(std::size_t from, std::size_t to, const IntVec& shift) const {
    for (const auto& w : witnesses)
      if (w.from == from && w.to == to && w.shift == shift) return &w;
    return nullptr;
  }
};

namespace detail {

/// Breadth-first shortest paths in the infinite periodic graph from
/// (source, cell 0) to every requested target site.
inline std::vector<WitnessPath> bfs_paths(const LatticeGraph& graph, const std::vector<std::vector<Arc>>& arcs,
                                          std::size_t source, const std::vector<LatticeSite>& targets,
                                          std::size_t max_states = 4'000'000) {
  const int d = graph.d();
  std::unordered_map<LatticeSite, LatticeSite, LatticeSiteHash> parent;
  LatticeSite start{source, IntVec(d, 0)};
  parent.emplace(start, start);
  std::deque<LatticeSite> queue{start};
  std::size_t remaining = targets.size();
  std::vector<bool> found(targets.size(), false);
  auto mark = [&](const LatticeSite& s) {
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (!found[i] && targets[i] == s) {
        found[i] = true;
        --remaining;
      }
  };
  mark(start);
  while (!queue.empty() && remaining > 0) {
    if (parent.size() > max_states)
      throw Error(ErrorKind::DisconnectedGraph, "witness search exceeded state budget");
    LatticeSite cur = std::move(queue.front());
    queue.pop_front();
    for (const auto& a : arcs[cur.node]) {
      LatticeSite next{a.to, add(cur.cell, a.offset)};
      if (parent.count(next)) continue;
      parent.emplace(next, cur);
      mark(next);
      queue.push_back(std::move(next));
    }
  }
  if (remaining > 0) throw Error(ErrorKind::DisconnectedGraph, "witness target unreachable");

  std::vector<WitnessPath> out;
  for (const auto& t : targets) {
    WitnessPath w{source, t.node, t.cell, {}};
    for (LatticeSite s = t;; s = parent.at(s)) {
      w.sites.push_back(s);
      if (s == start) break;
    }
    std::reverse(w.sites.begin(), w.sites.end());
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace detail

/// Decides connectedness of the infinite periodic graph: the quotient graph on
/// cell nodes must be connected and the offsets of closed walks must generate
/// all of Z^d. On success, shortest witness paths are returned from every cell
/// node to every cell node in cell 0 and in the cells +-e_m.
inline ConnectivityResult connectedness_certificate(const LatticeGraph& graph) {
  const int d = graph.d();
  const std::size_t n = graph.node_count();
  const auto arcs = oriented_arcs(graph);
  ConnectivityResult res;

  // Spanning forest of the quotient, recording each node's accumulated offset.
  std::vector<int> comp(n, -1);
  std::vector<IntVec> potential(n, IntVec(d, 0));
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(res.components.size());
    res.components.emplace_back();
    std::deque<std::size_t> queue{s};
    comp[s] = id;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      res.components.back().push_back(p);
      for (const auto& a : arcs[p])
        if (comp[a.to] < 0) {
          comp[a.to] = id;
          potential[a.to] = add(potential[p], a.offset);
          queue.push_back(a.to);
        }
    }
  }
  res.quotient_connected = res.components.size() == 1;

  std::vector<IntVec> generators;
  for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
    const auto [a, b] = graph.ends(i);
    if (comp[a] != comp[0]) continue;
    IntVec g(d);
    for (int m = 0; m < d; ++m) g[m] = potential[a][m] + graph.orbits()[i].offset[m] - potential[b][m];
    generators.push_back(std::move(g));
  }
  res.sublattice = sublattice_basis(d, generators);

  if (!res.quotient_connected) {
    std::string nodes;
    for (std::size_t p : res.components[1]) nodes += (nodes.empty() ? "" : " ") + graph.nodes()[p].str();
    res.reason = "quotient graph has " + std::to_string(res.components.size()) +
                 " components; nodes unreachable from " + graph.nodes()[0].str() + ": " + nodes;
    return res;
  }
  if (res.sublattice.index != 1) {
    std::string basis;
    for (const auto& b : res.sublattice.basis) basis += (basis.empty() ? "" : " ") + format_vec(b);
    res.reason = res.sublattice.rank < d
                     ? "closed-walk offsets span rank " + std::to_string(res.sublattice.rank) + " < d; basis " + basis
                     : "closed-walk offsets generate a proper sublattice of index " +
                           std::to_string(res.sublattice.index) + "; basis " + basis;
    return res;
  }
  res.connected = true;

  std::vector<LatticeSite> targets;
  std::vector<IntVec> shifts{IntVec(d, 0)};
  for (int m = 0; m < d; ++m) {
    shifts.push_back(unit(d, m, +1));
    shifts.push_back(unit(d, m, -1));
  }
  for (std::size_t q = 0; q < n; ++q)
    for (const auto& s : shifts) targets.push_back({q, s});
  for (std::size_t p = 0; p < n; ++p) {
    auto paths = detail::bfs_paths(graph, arcs, p, targets);
    for (auto& w : paths)
      if (!(w.to == p && is_zero(w.shift))) res.witnesses.push_back(std::move(w));
  }
  return res;
}

/// Throws DisconnectedGraph when the certificate failed.
inline const ConnectivityResult& require_connected(const ConnectivityResult& res) {
  if (!res.connected) throw Error(ErrorKind::DisconnectedGraph, res.reason);
  return res;
}

/// Brute-force connectedness on the finite box of cells [-radius, radius]^d:
/// every cell node and every unit translate of node 0 must be reachable from
/// node 0 of cell 0 without leaving the box.
inline bool window_bfs_connected(const LatticeGraph& graph, int radius) {
  const int d = graph.d();
  const auto arcs = oriented_arcs(graph);
  auto inside = [&](const IntVec& c) {
    return std::all_of(c.begin(), c.end(), [&](int x) { return std::abs(x) <= radius; });
  };
  std::unordered_map<LatticeSite, bool, LatticeSiteHash> seen;
  LatticeSite start{0, IntVec(d, 0)};
  seen[start] = true;
  std::deque<LatticeSite> queue{start};
  while (!queue.empty()) {
    LatticeSite cur = std::move(queue.front());
    queue.pop_front();
    for (const auto& a : arcs[cur.node]) {
      LatticeSite next{a.to, add(cur.cell, a.offset)};
      if (!inside(next.cell) || seen.count(next)) continue;
      seen[next] = true;
      queue.push_back(std::move(next));
    }
  }
  for (std::size_t q = 0; q < graph.node_count(); ++q)
    if (!seen.count({q, IntVec(d, 0)})) return false;
  for (int m = 0; m < d; ++m)
    if (!seen.count({0, unit(d, m)}) || !seen.count({0, unit(d, m, -1)})) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Standing assumptions

struct ValidationCheck {
  std::string name;
  bool passed;
  std::string detail;

  bool operator==(const ValidationCheck&) const = default;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  int range = 0;   ///< R, the largest edge displacement (max-norm)
  int extent = 1;  ///< M, cross-section extent

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  bool operator==(const ValidationReport&) const = default;
};

/// Periodicity and ranges of cell nodes, positive weights, edge range R <= T,
/// and connectedness. Pure; failures are reported, never thrown.
inline ValidationReport validate(const LatticeGraph& graph) {
  ValidationReport rep;
  rep.range = graph.max_range();
  rep.extent = graph.extent();
  const int T = graph.period();

  bool ranges = true;
  for (const auto& n : graph.nodes()) {
    for (int x : n.dpos) ranges = ranges && x >= 0 && x < T;
    for (int x : n.kpos) ranges = ranges && x >= 0 && x < graph.extent();
  }
  std::string range_detail = "periodic coordinates in [0," + std::to_string(T) + "), cross-section in [0," +
                             std::to_string(graph.extent()) + ")";
  if (graph.extent() > T)
    range_detail += "; M > T, lcm normalization gives T = " + std::to_string(std::lcm(T, graph.extent()));
  rep.checks.push_back({"node-ranges", ranges, range_detail});

  const bool positive = std::all_of(graph.orbits().begin(), graph.orbits().end(),
                                    [](const auto& o) { return o.weight > 0.0 && std::isfinite(o.weight); });
  rep.checks.push_back({"weights-positive", positive,
                        graph.orbits().empty() ? "no orbits" : "min weight " + std::to_string(graph.min_weight())});

  rep.checks.push_back({"edge-range", rep.range <= T,
                        "R = " + std::to_string(rep.range) + ", T = " + std::to_string(T)});

  const auto conn = connectedness_certificate(graph);
  rep.checks.push_back({"connected", conn.connected, conn.connected ? "certificate found" : conn.reason});
  return rep;
}

}  // namespace lathom

#endif  // LATHOM_VALIDATE_HPP
