#ifndef LATHOM_COARSE_GRAIN_HPP
#define LATHOM_COARSE_GRAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lathom/parallel.hpp"
#include "lathom/sparse.hpp"
#include "lathom/validate.hpp"
#include "lathom/window.hpp"

namespace lathom {

/// Axis-aligned box in physical coordinates.
struct RealBox {
  Vector lo;
  Vector hi;

  int d() const { return static_cast<int>(lo.size()); }
};

/// Real values on the vertices of a finite graph, living on the scaled
/// lattice eps*X.
struct LatticeFunction {
  FiniteGraph finite;
  Vector values;
  double scale = 1.0;
};

/// Per-cell means over the cells lying entirely in a domain.
struct CoarseField {
  std::optional<WindowBox> cells;  ///< empty when no cell fits
  Vector cell_means;               ///< in WindowBox::linear order
  double scale = 1.0;
  int period = 1;

  std::size_t size() const { return cell_means.size(); }
  double at(const IntVec& l) const { return cell_means.at(cells->linear(l)); }
  /// Centre of cell l in physical coordinates.
  Vector center(const IntVec& l) const {
    Vector c(l.size());
    for (std::size_t m = 0; m < l.size(); ++m) c[m] = scale * period * (l[m] + 0.5);
    return c;
  }
};

inline double coarse_mean(const LatticeFunction& u, const IntVec& l) {
  const auto& fg = u.finite;
  if (static_cast<int>(l.size()) != fg.window.d() || !fg.window.contains(l))
    throw Error(ErrorKind::CellOutOfWindow, "cell " + format_vec(l) + " is outside the window");
  const std::size_t n = fg.graph->node_count();
  double s = 0.0;
  for (std::size_t p = 0; p < n; ++p) s += u.values[fg.index(l, p)];
  return s / static_cast<double>(n);
}

/// One mean per cell eps*(lT + [0,T]^d) contained in the closed domain.
inline CoarseField coarse_field(const LatticeFunction& u, const RealBox& domain) {
  const auto& fg = u.finite;
  const int d = fg.window.d();
  const int T = fg.graph->period();
  const double side = u.scale * T;
  CoarseField f;
  f.scale = u.scale;
  f.period = T;
  WindowBox box{IntVec(d), IntVec(d)};
  for (int m = 0; m < d; ++m) {
    box.lo[m] = static_cast<int>(std::ceil(domain.lo[m] / side - 1e-9));
    box.hi[m] = static_cast<int>(std::floor(domain.hi[m] / side + 1e-9)) - 1;
  }
  if (box.empty()) return f;
  for (std::size_t c = 0; c < box.cell_count(); ++c) f.cell_means.push_back(coarse_mean(u, box.cell_at(c)));
  f.cells = box;
  return f;
}

// ---------------------------------------------------------------------------
// Path constants

struct PathConstants {
  double C_two = 0.0;
  double C_pw = 0.0;
  int M = 1;
  int M_needed = 1;
  std::size_t translation_length = 0;        ///< longest path (p,0) -> (p,e_m)
  std::size_t translation_multiplicity = 0;  ///< most such paths through one edge
  std::size_t pair_length = 0;               ///< longest path (p,0) -> (q,0)
  std::size_t pair_multiplicity = 0;
};

namespace detail {

using SiteEdge = std::pair<LatticeSite, LatticeSite>;

inline SiteEdge undirected(const LatticeSite& a, const LatticeSite& b) {
  return a < b ? SiteEdge{a, b} : SiteEdge{b, a};
}

inline std::size_t max_multiplicity(const std::vector<const WitnessPath*>& paths) {
  std::map<SiteEdge, std::size_t> count;
  std::size_t best = 0;
  for (const auto* w : paths)
    for (std::size_t s = 1; s < w->sites.size(); ++s)
      best = std::max(best, ++count[undirected(w->sites[s - 1], w->sites[s])]);
  return best;
}

}  // namespace detail

/// Constants from shortest witness paths. A path from (p,l) to (p,l') gives
/// (u_p^l - u_p^l')^2 <= N * (sum of squared differences along it); averaging
/// over p and bounding how often one edge is reused yields
///   C_two = (N/n) * max(1, mult/2),
///   C_pw  = (N/(n*a_min)) * max(1, mult/4),
/// for right-hand sides summed over ordered pairs. M is the smallest margin
/// (at least T) keeping every path inside the enlarged region.
inline PathConstants compute_path_constants(const LatticeGraph& graph) {
  const auto cert = connectedness_certificate(graph);
  require_connected(cert);
  const int d = graph.d();
  const int T = graph.period();
  const auto n = static_cast<double>(graph.node_count());
  PathConstants pc;

  auto margin_for = [&](const WitnessPath& w, const IntVec& hi_cells) {
    int need = 1;
    for (const auto& s : w.sites)
      for (int m = 0; m < d; ++m) {
        const int x = s.cell[m] * T + graph.nodes()[s.node].dpos[m];
        const int hi = (hi_cells[m] + 1) * T - 1;
        need = std::max({need, 1 - x, x - hi + 1});
      }
    return need;
  };

  for (int m = 0; m < d; ++m) {
    std::vector<const WitnessPath*> paths;
    for (std::size_t p = 0; p < graph.node_count(); ++p) {
      const auto* w = cert.witness(p, p, unit(d, m));
      paths.push_back(w);
      pc.translation_length = std::max(pc.translation_length, w->length());
      pc.M_needed = std::max(pc.M_needed, margin_for(*w, unit(d, m)));
    }
    pc.translation_multiplicity = std::max(pc.translation_multiplicity, detail::max_multiplicity(paths));
  }
  std::vector<const WitnessPath*> pairs;
  for (const auto& w : cert.witnesses)
    if (is_zero(w.shift) && w.from != w.to) {
      pairs.push_back(&w);
      pc.pair_length = std::max(pc.pair_length, w.length());
      pc.M_needed = std::max(pc.M_needed, margin_for(w, IntVec(d, 0)));
    }
  pc.pair_multiplicity = detail::max_multiplicity(pairs);

  pc.M = std::max(T, pc.M_needed);
  pc.C_two = static_cast<double>(pc.translation_length) / n *
             std::max(1.0, static_cast<double>(pc.translation_multiplicity) / 2.0);
  pc.C_pw = static_cast<double>(pc.pair_length) / (n * graph.min_weight()) *
            std::max(1.0, static_cast<double>(pc.pair_multiplicity) / 4.0);
  return pc;
}

// ---------------------------------------------------------------------------
// Empirical checks

enum class FieldFamily { gaussian, affine, indicator, checkerboard };

constexpr std::string_view to_string(FieldFamily f) {
  switch (f) {
    case FieldFamily::gaussian: return "gaussian";
    case FieldFamily::affine: return "affine";
    case FieldFamily::indicator: return "indicator";
    case FieldFamily::checkerboard: return "checkerboard";
  }
  return "unknown";
}

struct InequalityReport {
  std::string name;
  double constant_used = 0.0;
  double worst_ratio = 0.0;     ///< max lhs / (constant_used * rhs)
  double sharp_constant = 0.0;  ///< max lhs / rhs seen
  int trials = 0;
  int worst_trial = -1;
  std::string worst_family;
  std::uint64_t seed = 0;

  bool holds() const { return worst_ratio <= 1.0; }
};

namespace detail {

inline FieldFamily family_of(int trial) { return static_cast<FieldFamily>(trial % 4); }

inline Vector random_field(const FiniteGraph& fg, FieldFamily family, std::mt19937_64& rng,
                           const std::vector<bool>* mask = nullptr) {
  std::normal_distribution<double> normal;
  const auto& graph = *fg.graph;
  const std::size_t nv = fg.window_vertex_count;
  Vector u(nv, 0.0);
  switch (family) {
    case FieldFamily::gaussian:
      for (auto& x : u) x = normal(rng);
      break;
    case FieldFamily::affine: {
      Vector a(graph.d() + graph.k());
      for (auto& x : a) x = normal(rng);
      const double c = normal(rng);
      for (std::size_t v = 0; v < nv; ++v) {
        const auto pos = fg.position(v);
        const auto& kpos = graph.nodes()[fg.vertices[v].node].kpos;
        double s = c;
        for (int m = 0; m < graph.d(); ++m) s += a[m] * pos[m];
        for (int m = 0; m < graph.k(); ++m) s += a[graph.d() + m] * kpos[m];
        u[v] = s;
      }
      break;
    }
    case FieldFamily::indicator: {
      std::uniform_int_distribution<std::size_t> pick(0, nv - 1);
      u[pick(rng)] = 1.0;
      break;
    }
    case FieldFamily::checkerboard: {
      const double amp = 1.0 + std::abs(normal(rng));
      for (std::size_t v = 0; v < nv; ++v) {
        int s = 0;
        for (int x : fg.position(v)) s += x;
        for (int x : graph.nodes()[fg.vertices[v].node].kpos) s += x;
        u[v] = (s % 2 == 0) ? amp : -amp;
      }
      break;
    }
  }
  if (mask)
    for (std::size_t v = 0; v < nv; ++v)
      if ((*mask)[v]) u[v] = 0.0;
  return u;
}

inline double ratio(double lhs, double rhs, double constant) {
  if (lhs <= 0.0) return 0.0;
  if (rhs <= 0.0 || constant <= 0.0) return std::numeric_limits<double>::infinity();
  return lhs / (constant * rhs);
}

struct LocalCheck {
  FiniteGraph fg;
  std::vector<IntVec> cells;  ///< cells whose statements are tested
};

/// Window with test cells {0..3}^d and enough margin for the M-enlargement.
inline LocalCheck local_window(const LatticeGraph& graph, int M) {
  const int T = graph.period();
  const int margin = (M - 1 + T - 1) / T;
  const int d = graph.d();
  const int span = d == 1 ? 3 : 2;
  LocalCheck lc{instantiate_window(graph, WindowBox::cube(d, -margin, span + margin), WrapPolicy::open), {}};
  const auto inner = WindowBox::cube(d, 0, span);
  for (std::size_t c = 0; c < inner.cell_count(); ++c) lc.cells.push_back(inner.cell_at(c));
  return lc;
}

/// Sum over ordered pairs of adjacent vertices, both with lattice position in
/// [lo, hi] per axis, of weight * (u_i - u_j)^2 (weight 1 when unweighted).
inline double region_energy(const FiniteGraph& fg, const Vector& u, const IntVec& lo, const IntVec& hi,
                            bool weighted) {
  auto inside = [&](std::size_t v) {
    const auto x = fg.position(v);
    for (std::size_t m = 0; m < x.size(); ++m)
      if (x[m] < lo[m] || x[m] > hi[m]) return false;
    return true;
  };
  double s = 0.0;
  for (const auto& e : fg.edges) {
    if (!inside(e.a) || !inside(e.b)) continue;
    const double du = u[e.a] - u[e.b];
    s += 2.0 * (weighted ? e.weight : 1.0) * du * du;
  }
  return s;
}

template <class TrialFn>
InequalityReport run_trials(std::string name, double constant, int trials, std::uint64_t seed, TrialFn&& trial) {
  struct Outcome {
    double ratio = 0.0;
    double sharp = 0.0;
  };
  std::vector<Outcome> out(static_cast<std::size_t>(std::max(trials, 0)));
  parallel_for(out.size(), [&](std::size_t t) {
    std::mt19937_64 rng(seed * 1000003ULL + t);
    const auto [r, s] = trial(static_cast<int>(t), rng);
    out[t] = {r, s};
  });
  InequalityReport rep;
  rep.name = std::move(name);
  rep.constant_used = constant;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t t = 0; t < out.size(); ++t) {
    rep.sharp_constant = std::max(rep.sharp_constant, out[t].sharp);
    if (rep.worst_trial < 0 || out[t].ratio > rep.worst_ratio) {
      rep.worst_ratio = out[t].ratio;
      rep.worst_trial = static_cast<int>(t);
      rep.worst_family = std::string(to_string(family_of(static_cast<int>(t))));
    }
  }
  return rep;
}

}  // namespace detail

/// Both sides of the two-connectedness inequality for cells l and l + e_m:
/// (|u~^l - u~^l'|^2, unweighted ordered-pair sum over the M-enlarged pair).
inline std::pair<double, double> two_connectedness_terms(const LatticeFunction& u, const IntVec& l, int m, int M) {
  const int d = static_cast<int>(l.size());
  const int T = u.finite.graph->period();
  IntVec l2 = l;
  ++l2[m];
  const double diff = coarse_mean(u, l) - coarse_mean(u, l2);
  IntVec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = l[a] * T - M + 1;
    hi[a] = (l2[a] + 1) * T - 1 + M - 1;
  }
  return {diff * diff, detail::region_energy(u.finite, u.values, lo, hi, false)};
}

/// Both sides of the cell Poincare-Wirtinger inequality for cell l:
/// (sum over the cell of |u_i - u~^l|^2, weighted sum over the M-enlarged cell).
inline std::pair<double, double> poincare_wirtinger_terms(const LatticeFunction& u, const IntVec& l, int M) {
  const int d = static_cast<int>(l.size());
  const int T = u.finite.graph->period();
  const double mean = coarse_mean(u, l);
  double lhs = 0.0;
  for (std::size_t p = 0; p < u.finite.graph->node_count(); ++p) {
    const double dv = u.values[u.finite.index(l, p)] - mean;
    lhs += dv * dv;
  }
  IntVec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = l[a] * T - M + 1;
    hi[a] = (l[a] + 1) * T - 1 + M - 1;
  }
  return {lhs, detail::region_energy(u.finite, u.values, lo, hi, true)};
}

/// |u~^l - u~^l'|^2 <= C_two * sum over edges of the M-enlarged pair region,
/// over every adjacent pair of test cells, on random fields.
inline InequalityReport check_two_connectedness(const LatticeGraph& graph, int trials, std::uint64_t seed,
                                                std::optional<PathConstants> constants = std::nullopt) {
  const auto pc = constants ? *constants : compute_path_constants(graph);
  const auto lc = detail::local_window(graph, pc.M);
  const int d = graph.d();
  return detail::run_trials("two-connectedness", pc.C_two, trials, seed, [&](int t, std::mt19937_64& rng) {
    LatticeFunction u{lc.fg, detail::random_field(lc.fg, detail::family_of(t), rng), 1.0};
    double worst = 0.0, sharp = 0.0;
    for (const auto& l : lc.cells)
      for (int m = 0; m < d; ++m) {
        IntVec l2 = l;
        ++l2[m];
        if (std::find(lc.cells.begin(), lc.cells.end(), l2) == lc.cells.end()) continue;
        const auto [lhs, rhs] = two_connectedness_terms(u, l, m, pc.M);
        worst = std::max(worst, detail::ratio(lhs, rhs, pc.C_two));
        sharp = std::max(sharp, detail::ratio(lhs, rhs, 1.0));
      }
    return std::pair{worst, sharp};
  });
}

/// sum_{i in cell} |u_i - u~^l|^2 <= C_pw * weighted edge sum over the
/// M-enlarged cell, for every test cell, on random fields.
inline InequalityReport check_poincare_wirtinger(const LatticeGraph& graph, int trials, std::uint64_t seed,
                                                 std::optional<PathConstants> constants = std::nullopt) {
  const auto pc = constants ? *constants : compute_path_constants(graph);
  const auto lc = detail::local_window(graph, pc.M);
  return detail::run_trials("poincare-wirtinger", pc.C_pw, trials, seed, [&](int t, std::mt19937_64& rng) {
    LatticeFunction u{lc.fg, detail::random_field(lc.fg, detail::family_of(t), rng), 1.0};
    double worst = 0.0, sharp = 0.0;
    for (const auto& l : lc.cells) {
      const auto [lhs, rhs] = poincare_wirtinger_terms(u, l, pc.M);
      worst = std::max(worst, detail::ratio(lhs, rhs, pc.C_pw));
      sharp = std::max(sharp, detail::ratio(lhs, rhs, 1.0));
    }
    return std::pair{worst, sharp};
  });
}

// ---------------------------------------------------------------------------
// Discrete Poincare inequality on boxes

/// Functions on the lattice in (0, L)^d vanishing within 2*sqrt(d)*T of the
/// boundary, with the Dirichlet form sum over ordered pairs of a (u_i-u_j)^2.
struct DirichletBox {
  FiniteGraph fg;
  std::vector<bool> zero;                ///< per window vertex
  std::vector<std::size_t> free_index;   ///< vertex -> slot, npos when zero
  std::vector<std::size_t> free_vertex;  ///< slot -> vertex
  CsrMatrix form;                        ///< on free slots
};

inline DirichletBox dirichlet_box(const LatticeGraph& graph, int L) {
  const int T = graph.period();
  if (L < T || L % T != 0) throw Error(ErrorKind::InvalidArgument, "L must be a positive multiple of T");
  DirichletBox db;
  db.fg = instantiate_window(graph, WindowBox::cube(graph.d(), 0, L / T - 1), WrapPolicy::open);
  const double layer = default_layer(graph);
  const std::size_t nv = db.fg.window_vertex_count;
  db.zero.assign(nv, false);
  db.free_index.assign(nv, static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < nv; ++v) {
    db.zero[v] = db.fg.distance_to_boundary(v) <= layer;
    if (!db.zero[v]) {
      db.free_index[v] = db.free_vertex.size();
      db.free_vertex.push_back(v);
    }
  }
  if (db.free_vertex.empty()) throw Error(ErrorKind::EmptyInterior, "box of side " + std::to_string(L) + " has no free vertex");
  TripletBuilder tb(db.free_vertex.size());
  for (const auto& e : db.fg.edges) {
    const auto a = db.free_index[e.a], b = db.free_index[e.b];
    const bool fa = a != static_cast<std::size_t>(-1), fb = b != static_cast<std::size_t>(-1);
    if (fa && fb) tb.add_edge(a, b, 2.0 * e.weight);
    else if (fa) tb.add(a, a, 2.0 * e.weight);
    else if (fb) tb.add(b, b, 2.0 * e.weight);
  }
  db.form = tb.build();
  return db;
}

/// Smallest eigenvalue of an SPD matrix by inverse iteration with CG solves.
inline double smallest_eigenvalue(const CsrMatrix& A, double tol = 1e-11, int max_iter = 500) {
  Vector x(A.n, 1.0);
  double nx = norm2(x);
  for (auto& v : x) v /= nx;
  double lambda = dot(x, A * x);
  CgOptions opt;
  opt.tol = 1e-13;
  opt.jacobi = true;
  opt.max_iter = 20 * A.n + 1000;
  for (int it = 0; it < max_iter; ++it) {
    Vector guess = x;
    for (auto& v : guess) v /= lambda;
    Vector y = conjugate_gradient(A, x, opt, std::move(guess)).x;
    nx = norm2(y);
    for (auto& v : y) v /= nx;
    const double next = dot(y, A * y);
    x = std::move(y);
    if (std::abs(next - lambda) <= tol * next) return next;
    lambda = next;
  }
  return lambda;
}

struct PoincareReport {
  int diameter = 0;               ///< side L of the box, lattice units
  double sharp_constant = 0.0;    ///< 1 / smallest eigenvalue of the Dirichlet form
  double c0 = 0.0;                ///< sharp_constant / diam^2, diam = L*sqrt(d)
  double path_constant = 0.0;     ///< explicit bound from a BFS tree to the zero set
  InequalityReport trials;        ///< random admissible fields against path_constant
  std::optional<double> doubling_ratio;  ///< sharp(L) / sharp(L/2) when L/2 was also run
};

namespace detail {

/// maxlen * maxmult / (2 a_min) from a multi-source BFS forest rooted in the
/// zero set: each free u_v is the telescoping sum along its tree path.
inline double tree_path_constant(const DirichletBox& db) {
  const auto& fg = db.fg;
  const std::size_t nv = fg.window_vertex_count;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(nv);
  double a_min = std::numeric_limits<double>::infinity();
  for (const auto& e : fg.edges) {
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
    a_min = std::min(a_min, e.weight);
  }
  std::vector<std::size_t> parent(nv, static_cast<std::size_t>(-1));
  std::vector<std::size_t> depth(nv, 0);
  std::vector<std::size_t> order;
  std::deque<std::size_t> queue;
  std::vector<bool> seen(nv, false);
  for (std::size_t v = 0; v < nv; ++v)
    if (db.zero[v]) {
      seen[v] = true;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (auto [w, wt] : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = v;
        depth[w] = depth[v] + 1;
        queue.push_back(w);
      }
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (!seen[v]) return std::numeric_limits<double>::infinity();
  // Edge (v, parent v) carries the paths of every free vertex in v's subtree.
  std::vector<std::size_t> subtree(nv, 0);
  std::size_t maxlen = 0, maxmult = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto v = *it;
    if (!db.zero[v]) ++subtree[v];
    maxlen = std::max(maxlen, depth[v]);
    if (parent[v] != static_cast<std::size_t>(-1)) {
      maxmult = std::max(maxmult, subtree[v]);
      subtree[parent[v]] += subtree[v];
    }
  }
  return static_cast<double>(maxlen) * static_cast<double>(maxmult) / (2.0 * a_min);
}

}  // namespace detail

/// Box sides {L, 2L} with L a multiple of T near 128 (d = 1), 32 (d = 2)
/// or 8 otherwise.
inline std::vector<int> default_poincare_diameters(const LatticeGraph& graph) {
  const int T = graph.period();
  const int base = graph.d() == 1 ? 128 : graph.d() == 2 ? 32 : 8;
  const int L = (base + T - 1) / T * T;
  return {L, 2 * L};
}

/// For each box side L: the sharp constant, its scale-free version c0, the
/// explicit tree-path constant and random admissible trials against it.
inline std::vector<PoincareReport> check_poincare(const LatticeGraph& graph, const std::vector<int>& diameters,
                                                  int trials, std::uint64_t seed) {
  require_connected(connectedness_certificate(graph));
  std::vector<PoincareReport> out(diameters.size());
  for (std::size_t i = 0; i < diameters.size(); ++i) {
    const int L = diameters[i];
    auto& rep = out[i];
    rep.diameter = L;
    const auto db = dirichlet_box(graph, L);
    rep.sharp_constant = 1.0 / smallest_eigenvalue(db.form);
    rep.c0 = rep.sharp_constant / (static_cast<double>(L) * L * graph.d());
    rep.path_constant = detail::tree_path_constant(db);
    rep.trials = detail::run_trials("poincare", rep.path_constant, trials, seed, [&](int t, std::mt19937_64& rng) {
      const Vector u = detail::random_field(db.fg, detail::family_of(t), rng, &db.zero);
      double lhs = 0.0;
      for (double v : u) lhs += v * v;
      double rhs = 0.0;
      for (const auto& e : db.fg.edges) {
        const double du = u[e.a] - u[e.b];
        rhs += 2.0 * e.weight * du * du;
      }
      return std::pair{detail::ratio(lhs, rhs, rep.path_constant), detail::ratio(lhs, rhs, 1.0)};
    });
    for (std::size_t j = 0; j < i; ++j)
      if (2 * out[j].diameter == L) rep.doubling_ratio = rep.sharp_constant / out[j].sharp_constant;
  }
  return out;
}

}  // namespace lathom

#endif  // LATHOM_COARSE_GRAIN_HPP
