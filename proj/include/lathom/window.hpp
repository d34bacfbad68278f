#ifndef LATHOM_WINDOW_HPP
#define LATHOM_WINDOW_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lathom/graph.hpp"
#include "lathom/validate.hpp"

namespace lathom {

/// Box of cell indices, inclusive on both ends.
struct WindowBox {
  IntVec lo;
  IntVec hi;

  static WindowBox cube(int d, int lo, int hi) { return {IntVec(d, lo), IntVec(d, hi)}; }

  int d() const { return static_cast<int>(lo.size()); }
  bool empty() const {
    for (std::size_t m = 0; m < lo.size(); ++m)
      if (hi[m] < lo[m]) return true;
    return lo.empty();
  }
  std::size_t cell_count() const {
    if (empty()) return 0;
    std::size_t c = 1;
    for (std::size_t m = 0; m < lo.size(); ++m) c *= static_cast<std::size_t>(hi[m] - lo[m] + 1);
    return c;
  }
  bool contains(const IntVec& cell) const {
    for (std::size_t m = 0; m < lo.size(); ++m)
      if (cell[m] < lo[m] || cell[m] > hi[m]) return false;
    return true;
  }
  /// Lexicographic rank of `cell` (last axis fastest).
  std::size_t linear(const IntVec& cell) const {
    std::size_t r = 0;
    for (std::size_t m = 0; m < lo.size(); ++m)
      r = r * static_cast<std::size_t>(hi[m] - lo[m] + 1) + static_cast<std::size_t>(cell[m] - lo[m]);
    return r;
  }
  IntVec cell_at(std::size_t r) const {
    IntVec c(lo.size());
    for (std::size_t m = lo.size(); m-- > 0;) {
      const auto w = static_cast<std::size_t>(hi[m] - lo[m] + 1);
      c[m] = lo[m] + static_cast<int>(r % w);
      r /= w;
    }
    return c;
  }
  bool operator==(const WindowBox&) const = default;
};

enum class WrapPolicy { open, clamped, periodic };

struct WindowVertex {
  IntVec cell;
  std::size_t node;
};

struct FiniteEdge {
  std::size_t a;
  std::size_t b;
  double weight;
  std::size_t orbit;
};

/// Finite piece of the periodic graph. The first `window_vertex_count`
/// vertices are the window's own (cell-major, then node order); under the
/// clamped policy the outside endpoints of crossing edges follow as ghosts.
struct FiniteGraph {
  const LatticeGraph* graph = nullptr;
  WindowBox window;
  WrapPolicy policy = WrapPolicy::open;
  std::vector<WindowVertex> vertices;
  std::vector<FiniteEdge> edges;
  std::vector<bool> boundary;
  std::size_t window_vertex_count = 0;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t ghost_count() const { return vertices.size() - window_vertex_count; }

  /// Index of (cell, node) for a cell inside the window.
  std::size_t index(const IntVec& cell, std::size_t node) const {
    return window.linear(cell) * graph->node_count() + node;
  }

  /// Lattice coordinates i^d of vertex v.
  IntVec position(std::size_t v) const {
    const auto& w = vertices[v];
    IntVec x(w.cell.size());
    for (std::size_t m = 0; m < x.size(); ++m)
      x[m] = w.cell[m] * graph->period() + graph->nodes()[w.node].dpos[m];
    return x;
  }

  /// Euclidean distance from the d-coordinates of v to the faces of the
  /// window box [lo*T, (hi+1)*T]; zero for vertices outside it.
  double distance_to_boundary(std::size_t v) const {
    const auto x = position(v);
    const int T = graph->period();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double a = x[m] - window.lo[m] * T;
      const double b = (window.hi[m] + 1) * T - x[m];
      dist = std::min(dist, std::min(a, b));
    }
    return std::max(dist, 0.0);
  }
};

/// Boundary-layer thickness used for clamping: 2*sqrt(d)*T.
inline double default_layer(const LatticeGraph& graph) {
  return 2.0 * std::sqrt(static_cast<double>(graph.d())) * graph.period();
}

/// Builds the finite graph on `box`. Open drops edges leaving the window,
/// clamped keeps them with a ghost outside endpoint marked as boundary and
/// also marks window vertices closer than `layer` (default 2*sqrt(d)*T) to
/// the faces, periodic wraps offsets modulo the window.
inline FiniteGraph instantiate_window(const LatticeGraph& graph, const WindowBox& box, WrapPolicy policy,
                                      std::optional<double> layer = std::nullopt) {
  if (box.d() != graph.d()) throw Error(ErrorKind::InvalidArgument, "window dimension differs from graph");
  if (box.empty()) throw Error(ErrorKind::EmptyWindow, "window has no cells");

  FiniteGraph fg;
  fg.graph = &graph;
  fg.window = box;
  fg.policy = policy;
  const std::size_t n = graph.node_count();
  const std::size_t cells = box.cell_count();
  fg.vertices.reserve(cells * n);
  for (std::size_t c = 0; c < cells; ++c) {
    const IntVec cell = box.cell_at(c);
    for (std::size_t p = 0; p < n; ++p) fg.vertices.push_back({cell, p});
  }
  fg.window_vertex_count = fg.vertices.size();
  fg.boundary.assign(fg.vertices.size(), false);

  std::unordered_map<LatticeSite, std::size_t, LatticeSiteHash> ghosts;
  const int d = graph.d();
  for (std::size_t c = 0; c < cells; ++c) {
    const IntVec cell = box.cell_at(c);
    for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
      const auto [p, q] = graph.ends(i);
      IntVec target = add(cell, graph.orbits()[i].offset);
      const double w = graph.orbits()[i].weight;
      const std::size_t a = c * n + p;
      if (box.contains(target)) {
        fg.edges.push_back({a, fg.index(target, q), w, i});
        continue;
      }
      switch (policy) {
        case WrapPolicy::open:
          break;
        case WrapPolicy::periodic: {
          for (int m = 0; m < d; ++m) {
            const int span = box.hi[m] - box.lo[m] + 1;
            target[m] = box.lo[m] + ((target[m] - box.lo[m]) % span + span) % span;
          }
          fg.edges.push_back({a, fg.index(target, q), w, i});
          break;
        }
        case WrapPolicy::clamped: {
          LatticeSite site{q, target};
          auto [it, inserted] = ghosts.try_emplace(site, fg.vertices.size());
          if (inserted) {
            fg.vertices.push_back({std::move(target), q});
            fg.boundary.push_back(true);
          }
          fg.edges.push_back({a, it->second, w, i});
          break;
        }
      }
    }
    // Orbits enter the cell from the other end as well; only the crossing
    // ones are new, the internal ones were added from their source cell.
    if (policy != WrapPolicy::clamped) continue;
    for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
      const auto [p, q] = graph.ends(i);
      IntVec source = add(cell, negated(graph.orbits()[i].offset));
      if (box.contains(source)) continue;
      LatticeSite site{p, source};
      auto [it, inserted] = ghosts.try_emplace(site, fg.vertices.size());
      if (inserted) {
        fg.vertices.push_back({std::move(source), p});
        fg.boundary.push_back(true);
      }
      fg.edges.push_back({it->second, c * n + q, graph.orbits()[i].weight, i});
    }
  }

  if (policy == WrapPolicy::clamped) {
    const double thickness = layer.value_or(default_layer(graph));
    for (std::size_t v = 0; v < fg.window_vertex_count; ++v)
      if (fg.distance_to_boundary(v) < thickness) fg.boundary[v] = true;
  }
  return fg;
}

}  // namespace lathom

#endif  // LATHOM_WINDOW_HPP
