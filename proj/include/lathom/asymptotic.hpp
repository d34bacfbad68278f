#ifndef LATHOM_ASYMPTOTIC_HPP
#define LATHOM_ASYMPTOTIC_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "lathom/cell_solver.hpp"
#include "lathom/parallel.hpp"
#include "lathom/sparse.hpp"
#include "lathom/window.hpp"

namespace lathom {

/// Minimizer of the clamped window problem on K^d cells.
struct WindowSolution {
  int K = 0;
  double value = 0.0;  ///< energy / (KT)^d
  std::size_t free_count = 0;
  std::size_t clamped_count = 0;  ///< window vertices held at z.i^d
  double residual = 0.0;
  Vector values;  ///< one per FiniteGraph vertex, ghosts included
  FiniteGraph finite;
};

/// Window energy: every window vertex i summed against all its neighbours j.
/// Edges inside the window therefore count twice, crossing edges once; the
/// single convention halves both.
inline double window_energy(const FiniteGraph& fg, const Vector& u, Convention conv) {
  double e = 0.0;
  for (const auto& edge : fg.edges) {
    const bool internal = edge.a < fg.window_vertex_count && edge.b < fg.window_vertex_count;
    const double du = u[edge.a] - u[edge.b];
    e += (internal ? 1.0 : 0.5) * edge.weight * du * du;
  }
  return convention_factor(conv) * e;
}

inline WindowSolution finite_window_solution(const LatticeGraph& graph, const Vector& z, int K,
                                             Convention conv = Convention::double_count, double tol = 1e-10) {
  check_direction(graph, z);
  if (K < 2) throw Error(ErrorKind::WindowTooSmall, "K = " + std::to_string(K) + " leaves no interior");
  WindowSolution sol;
  sol.K = K;
  sol.finite = instantiate_window(graph, WindowBox::cube(graph.d(), 0, K - 1), WrapPolicy::clamped);
  const auto& fg = sol.finite;
  const std::size_t nv = fg.vertex_count();

  std::vector<std::size_t> slot(nv, static_cast<std::size_t>(-1));
  sol.values.assign(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (fg.boundary[v]) {
      const auto x = fg.position(v);
      double a = 0.0;
      for (std::size_t m = 0; m < x.size(); ++m) a += z[m] * x[m];
      sol.values[v] = a;
      if (v < fg.window_vertex_count) ++sol.clamped_count;
    } else {
      slot[v] = sol.free_count++;
    }
  }

  if (sol.free_count > 0) {
    TripletBuilder tb(sol.free_count);
    Vector rhs(sol.free_count, 0.0);
    for (const auto& e : fg.edges) {
      const bool internal = e.a < fg.window_vertex_count && e.b < fg.window_vertex_count;
      const double w = (internal ? 1.0 : 0.5) * e.weight;
      const std::size_t a = slot[e.a], b = slot[e.b];
      const bool fa = a != static_cast<std::size_t>(-1), fb = b != static_cast<std::size_t>(-1);
      if (fa && fb) {
        tb.add_edge(a, b, w);
      } else if (fa) {
        tb.add(a, a, w);
        rhs[a] += w * sol.values[e.b];
      } else if (fb) {
        tb.add(b, b, w);
        rhs[b] += w * sol.values[e.a];
      }
    }
    CgOptions opt;
    opt.tol = tol;
    opt.jacobi = true;
    opt.max_iter = 10 * sol.free_count + 100;
    const auto res = solve_spd(tb.build(), rhs, opt);
    sol.residual = res.residual;
    for (std::size_t v = 0; v < nv; ++v)
      if (slot[v] != static_cast<std::size_t>(-1)) sol.values[v] = res.x[slot[v]];
  }
  sol.value = window_energy(fg, sol.values, conv) /
              std::pow(static_cast<double>(K) * graph.period(), graph.d());
  return sol;
}

/// f_0^K(z): clamped-window energy density.
inline double finite_window_value(const LatticeGraph& graph, const Vector& z, int K,
                                  Convention conv = Convention::double_count, double tol = 1e-10) {
  return finite_window_solution(graph, z, K, conv, tol).value;
}

/// Energy density of the affine field z.i^d itself; equals the window value
/// of any fully clamped window.
inline double affine_density(const LatticeGraph& graph, const Vector& z, Convention conv = Convention::double_count) {
  return assemble_quotient_system(graph, z, conv).c / std::pow(static_cast<double>(graph.period()), graph.d());
}

struct ConvergenceRow {
  int K = 0;
  double value = 0.0;
  double gap = 0.0;  ///< value - f_hom
  double relative_gap = 0.0;
  double seconds = 0.0;
};

/// Tiling comparison between windows K and 2K. `bound` is the inequality
/// with the uncovered boundary fraction charged at the affine density,
/// `literal_bound` omits that term.
struct TilingCheck {
  int K = 0;
  double f_K = 0.0;
  double f_2K = 0.0;
  double bound = 0.0;
  double literal_bound = 0.0;
  bool holds = false;
  bool monotone = false;
  bool literal_holds = false;
};

struct ConvergenceTable {
  Vector direction;
  Convention convention = Convention::double_count;
  double f_hom = 0.0;
  double f_affine = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<TilingCheck> tiling;
  std::optional<double> rate;  ///< slope of log gap against log K
  double seconds = 0.0;
};

/// Least-squares slope of log(gap) on log(K) over rows with gap > floor.
inline std::optional<double> fit_rate(const std::vector<ConvergenceRow>& rows, double floor = 1e-12) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.gap > floor) pts.emplace_back(std::log(static_cast<double>(r.K)), std::log(r.gap));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

inline ConvergenceTable convergence_study(const LatticeGraph& graph, const Vector& z, const std::vector<int>& Ks,
                                          Convention conv = Convention::double_count, double tol = 1e-10,
                                          double slack = 1e-6) {
  if (Ks.empty()) throw Error(ErrorKind::InvalidArgument, "K list is empty");
  if (!std::is_sorted(Ks.begin(), Ks.end())) throw Error(ErrorKind::InvalidArgument, "K list must be ascending");
  const auto start = std::chrono::steady_clock::now();
  ConvergenceTable t;
  t.direction = z;
  t.convention = conv;
  t.f_hom = f_hom(graph, z, conv, tol);
  t.f_affine = affine_density(graph, z, conv);
  t.rows.resize(Ks.size());
  parallel_for(Ks.size(), [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto& row = t.rows[i];
    row.K = Ks[i];
    row.value = finite_window_value(graph, z, Ks[i], conv, tol);
    row.gap = row.value - t.f_hom;
    row.relative_gap = t.f_hom != 0.0 ? row.gap / t.f_hom : row.gap;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  for (const auto& a : t.rows)
    for (const auto& b : t.rows) {
      if (b.K != 2 * a.K) continue;
      TilingCheck c;
      c.K = a.K;
      c.f_K = a.value;
      c.f_2K = b.value;
      const double cover = std::pow(static_cast<double>(a.K) / (a.K + 1), graph.d());
      c.literal_bound = cover * (a.value + 1.0 / a.K);
      c.bound = c.literal_bound + t.f_affine * (1.0 - cover);
      c.holds = c.f_2K <= c.bound + slack;
      c.monotone = c.f_2K <= c.f_K + slack;
      c.literal_holds = c.f_2K <= c.literal_bound + slack;
      t.tiling.push_back(c);
    }
  t.rate = fit_rate(t.rows);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

}  // namespace lathom

#endif  // LATHOM_ASYMPTOTIC_HPP
