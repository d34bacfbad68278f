#ifndef LATHOM_BVP_HPP
#define LATHOM_BVP_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lathom/cell_solver.hpp"
#include "lathom/coarse_grain.hpp"
#include "lathom/parallel.hpp"
#include "lathom/sparse.hpp"
#include "lathom/window.hpp"

namespace lathom {

/// Positive rational p/q in lowest terms.
struct Rational {
  long num = 1;
  long den = 1;

  static Rational make(long p, long q) {
    if (q == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    if (q < 0) p = -p, q = -q;
    const long g = std::gcd(p, q);
    return {p / (g ? g : 1), q / (g ? g : 1)};
  }

  /// "p/q" or "p".
  static Rational parse(const std::string& text) {
    auto number = [&](std::string s) {
      while (!s.empty() && s.front() == ' ') s.erase(s.begin());
      while (!s.empty() && s.back() == ' ') s.pop_back();
      long v = 0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || end != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "'" + text + "' is not a rational number");
      return v;
    };
    const auto slash = text.find('/');
    const Rational r = slash == std::string::npos ? make(number(text), 1)
                                                  : make(number(text.substr(0, slash)), number(text.substr(slash + 1)));
    if (r.num <= 0) throw Error(ErrorKind::InvalidArgument, "'" + text + "' must be positive");
    return r;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const Rational&) const = default;
  bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
};

using Datum = std::function<double(const Vector&)>;

struct DirichletProblem {
  LatticeGraph graph;
  RealBox omega;
  Rational eps;
  Datum phi;
  std::optional<int> r;  ///< band width in lattice units, default T
  Convention convention = Convention::double_count;
  double tol = 1e-10;

  int band() const { return r.value_or(graph.period()); }
  /// 1/eps
  long scale_inverse() const { return eps.den; }
};

/// Average of phi over the cube [lo, lo + h]^d: composite 4-point
/// Gauss-Legendre, 8 panels per axis.
inline double cell_average(const Datum& phi, const Vector& lo, double h) {
  static constexpr std::array<double, 4> node{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
  static constexpr std::array<double, 4> weight{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                0.3478548451374538};
  constexpr int panels = 8;
  std::vector<double> t, w;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < 4; ++q) {
      t.push_back((p + 0.5 + 0.5 * node[q]) / panels);
      w.push_back(0.5 * weight[q] / panels);
    }
  const std::size_t d = lo.size();
  std::vector<std::size_t> idx(d, 0);
  Vector x(d);
  double sum = 0.0;
  for (;;) {
    double wt = 1.0;
    for (std::size_t m = 0; m < d; ++m) {
      x[m] = lo[m] + h * t[idx[m]];
      wt *= w[idx[m]];
    }
    const double v = phi(x);
    if (!std::isfinite(v)) {
      std::string at;
      for (double c : x) at += (at.empty() ? "" : ", ") + std::to_string(c);
      throw Error(ErrorKind::DatumUndefined, "datum is not finite at (" + at + ")");
    }
    sum += wt * v;
    std::size_t m = 0;
    while (m < d && ++idx[m] == t.size()) idx[m++] = 0;
    if (m == d) break;
  }
  return sum;
}

/// Domain vertices, their constraint status and the discretized datum.
struct DiscreteDatum {
  std::shared_ptr<const LatticeGraph> graph;
  FiniteGraph finite;
  std::vector<bool> constrained;
  Vector values;  ///< datum average at every vertex; fixed only where constrained
  std::size_t constrained_count = 0;
};

namespace detail {

inline void check_problem(const DirichletProblem& pb) {
  const int d = pb.graph.d();
  const int T = pb.graph.period();
  if (pb.omega.d() != d || static_cast<int>(pb.omega.hi.size()) != d)
    throw Error(ErrorKind::InvalidArgument, "domain dimension differs from graph dimension");
  for (int m = 0; m < d; ++m)
    if (!(pb.omega.lo[m] < pb.omega.hi[m])) throw Error(ErrorKind::InvalidArgument, "domain box is empty");
  if (pb.eps.num != 1 || pb.eps.den % T != 0)
    throw Error(ErrorKind::InvalidArgument,
                "eps = " + pb.eps.str() + ": 1/eps must be an integer multiple of T = " + std::to_string(T));
  if (pb.band() < 1) throw Error(ErrorKind::InvalidArgument, "band width r must be positive");
  if (!pb.phi) throw Error(ErrorKind::InvalidArgument, "no boundary datum");
}

}  // namespace detail

/// Cells of side eps*T meeting the closed domain are instantiated; a vertex is
/// constrained when its open eps*r cube leaves the domain, and then takes the
/// average of phi over eps*(i + [0,1]^d).
inline DiscreteDatum discretize_boundary_datum(const DirichletProblem& pb) {
  detail::check_problem(pb);
  const int d = pb.graph.d();
  const int T = pb.graph.period();
  const long n = pb.scale_inverse();
  const double eps = pb.eps.value();
  const int r = pb.band();
  DiscreteDatum dd;
  dd.graph = std::make_shared<const LatticeGraph>(pb.graph);
  WindowBox box{IntVec(d), IntVec(d)};
  Vector lo(d), hi(d);
  for (int m = 0; m < d; ++m) {
    lo[m] = pb.omega.lo[m] * static_cast<double>(n);
    hi[m] = pb.omega.hi[m] * static_cast<double>(n);
    box.lo[m] = static_cast<int>(std::floor(lo[m] / T + 1e-9));
    box.hi[m] = static_cast<int>(std::floor(hi[m] / T + 1e-9));
  }
  dd.finite = instantiate_window(*dd.graph, box, WrapPolicy::open);
  const std::size_t nv = dd.finite.window_vertex_count;
  dd.constrained.assign(nv, false);
  dd.values.assign(nv, 0.0);
  std::map<IntVec, double> cache;
  for (std::size_t v = 0; v < nv; ++v) {
    const auto x = dd.finite.position(v);
    for (int m = 0; m < d; ++m)
      if (x[m] - r < lo[m] - 1e-9 || x[m] + r > hi[m] + 1e-9) dd.constrained[v] = true;
    auto it = cache.find(x);
    if (it == cache.end()) {
      Vector corner(d);
      for (int m = 0; m < d; ++m) corner[m] = eps * x[m];
      it = cache.emplace(x, cell_average(pb.phi, corner, eps)).first;
    }
    dd.values[v] = it->second;
    if (dd.constrained[v]) ++dd.constrained_count;
  }
  return dd;
}

struct DirichletSolution {
  std::shared_ptr<const LatticeGraph> graph;
  LatticeFunction u;  ///< minimizer on the scaled lattice, scale = eps
  double energy = 0.0;
  double datum_energy = 0.0;  ///< energy of the datum averages used everywhere
  std::size_t free_count = 0;
  std::size_t constrained_count = 0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double constraint_min = 0.0;
  double constraint_max = 0.0;
  bool max_principle = true;
  double l2_norm = 0.0;        ///< sum eps^d u_i^2
  double gradient_norm = 0.0;  ///< sum over ordered pairs eps^(d-2) a (u_i - u_j)^2
};

/// eps^(d-2) * convention * sum over domain edges of a (u_i - u_j)^2.
inline double dirichlet_energy(const FiniteGraph& fg, const Vector& u, double eps, Convention conv) {
  double s = 0.0;
  for (const auto& e : fg.edges) {
    const double du = u[e.a] - u[e.b];
    s += e.weight * du * du;
  }
  return std::pow(eps, fg.window.d() - 2) * convention_factor(conv) * s;
}

inline DirichletSolution solve_dirichlet(const DirichletProblem& pb) {
  auto dd = discretize_boundary_datum(pb);
  const auto& fg = dd.finite;
  const std::size_t nv = fg.window_vertex_count;
  const double eps = pb.eps.value();
  const auto npos = static_cast<std::size_t>(-1);

  DirichletSolution sol;
  sol.graph = dd.graph;
  sol.constrained_count = dd.constrained_count;
  std::vector<std::size_t> slot(nv, npos);
  for (std::size_t v = 0; v < nv; ++v)
    if (!dd.constrained[v]) slot[v] = sol.free_count++;
  if (sol.free_count == 0)
    throw Error(ErrorKind::EmptyInterior, "eps = " + pb.eps.str() + " leaves no free vertex in the domain");

  // Every free vertex must reach a constrained one, otherwise the minimizer
  // is not unique.
  std::vector<std::vector<std::size_t>> adj(nv);
  for (const auto& e : fg.edges) adj[e.a].push_back(e.b), adj[e.b].push_back(e.a);
  std::vector<bool> seen(nv, false);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < nv; ++v)
    if (dd.constrained[v]) seen[v] = true, queue.push_back(v);
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : adj[v])
      if (!seen[w]) seen[w] = true, queue.push_back(w);
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (!seen[v])
      throw Error(ErrorKind::InvalidArgument, "vertex " + format_vec(fg.position(v)) + " is not linked to the boundary");

  Vector u(nv, 0.0);
  sol.constraint_min = std::numeric_limits<double>::infinity();
  sol.constraint_max = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < nv; ++v)
    if (dd.constrained[v]) {
      u[v] = dd.values[v];
      sol.constraint_min = std::min(sol.constraint_min, u[v]);
      sol.constraint_max = std::max(sol.constraint_max, u[v]);
    }

  TripletBuilder tb(sol.free_count);
  Vector rhs(sol.free_count, 0.0);
  for (const auto& e : fg.edges) {
    const auto a = slot[e.a], b = slot[e.b];
    if (a != npos && b != npos) {
      tb.add_edge(a, b, e.weight);
    } else if (a != npos) {
      tb.add(a, a, e.weight);
      rhs[a] += e.weight * u[e.b];
    } else if (b != npos) {
      tb.add(b, b, e.weight);
      rhs[b] += e.weight * u[e.a];
    }
  }
  CgOptions opt;
  opt.tol = pb.tol;
  opt.jacobi = true;
  opt.max_iter = 10 * sol.free_count + 100;
  Vector guess(sol.free_count);
  for (std::size_t v = 0; v < nv; ++v)
    if (slot[v] != npos) guess[slot[v]] = dd.values[v];
  auto A = tb.build();
  auto res = conjugate_gradient(A, rhs, opt, std::move(guess));
  if (!res.converged) throw NoConvergenceError("Dirichlet solve", res.residual);
  sol.residual = res.residual;
  sol.iterations = res.iterations;
  const double slack = 1e-9 * std::max(1.0, std::abs(sol.constraint_max) + std::abs(sol.constraint_min));
  for (std::size_t v = 0; v < nv; ++v)
    if (slot[v] != npos) {
      u[v] = res.x[slot[v]];
      if (u[v] < sol.constraint_min - slack || u[v] > sol.constraint_max + slack) sol.max_principle = false;
    }

  const int d = pb.graph.d();
  sol.energy = dirichlet_energy(fg, u, eps, pb.convention);
  sol.datum_energy = dirichlet_energy(fg, dd.values, eps, pb.convention);
  sol.gradient_norm = dirichlet_energy(fg, u, eps, Convention::double_count);
  for (double x : u) sol.l2_norm += std::pow(eps, d) * x * x;
  sol.u = LatticeFunction{std::move(dd.finite), std::move(u), eps};
  return sol;
}

// ---------------------------------------------------------------------------
// Continuum reference

struct ContinuumSolution {
  int d = 0;
  RealBox omega;
  double energy = 0.0;
  double error_estimate = 0.0;  ///< Richardson estimate, zero when exact
  // d = 1: affine between the endpoint values
  double u_lo = 0.0, u_hi = 0.0;
  // d = 2: nodal values of the fine P1 solution, x fastest
  int nx = 0, ny = 0;
  Vector grid;

  double operator()(const Vector& x) const {
    if (d == 1) {
      const double t = (x[0] - omega.lo[0]) / (omega.hi[0] - omega.lo[0]);
      return u_lo + t * (u_hi - u_lo);
    }
    const double hx = (omega.hi[0] - omega.lo[0]) / nx, hy = (omega.hi[1] - omega.lo[1]) / ny;
    const double px = std::clamp((x[0] - omega.lo[0]) / hx, 0.0, static_cast<double>(nx));
    const double py = std::clamp((x[1] - omega.lo[1]) / hy, 0.0, static_cast<double>(ny));
    const int i = std::min(static_cast<int>(px), nx - 1), j = std::min(static_cast<int>(py), ny - 1);
    const double s = px - i, t = py - j;
    auto at = [&](int a, int b) { return grid[static_cast<std::size_t>(b) * (nx + 1) + a]; };
    const double u00 = at(i, j), u10 = at(i + 1, j), u01 = at(i, j + 1), u11 = at(i + 1, j + 1);
    // Squares are split along the (0,0)-(1,1) diagonal.
    if (s >= t) return u00 + s * (u10 - u00) + t * (u11 - u10);
    return u00 + t * (u01 - u00) + s * (u11 - u01);
  }
};

namespace detail {

/// P1 finite elements for div(A grad u) = 0 on an nx x ny grid of the box,
/// each square split into two triangles, u = phi at boundary nodes.
inline std::pair<double, Vector> p1_solve(const HomogenizedTensor& A, const RealBox& om, const Datum& phi, int nx,
                                          int ny, double tol) {
  const double hx = (om.hi[0] - om.lo[0]) / nx, hy = (om.hi[1] - om.lo[1]) / ny;
  const auto node = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx + 1) + i; };
  const std::size_t nn = static_cast<std::size_t>(nx + 1) * (ny + 1);
  const auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot(nn, npos);
  Vector u(nn, 0.0);
  std::size_t nfree = 0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (i == 0 || j == 0 || i == nx || j == ny) {
        const double v = phi({om.lo[0] + i * hx, om.lo[1] + j * hy});
        if (!std::isfinite(v)) throw Error(ErrorKind::DatumUndefined, "datum is not finite on the boundary");
        u[node(i, j)] = v;
      } else {
        slot[node(i, j)] = nfree++;
      }
    }

  // Reference gradients of the barycentric functions on the two triangles.
  using Grad = std::array<std::array<double, 2>, 3>;
  const Grad lower{{{-1 / hx, 0}, {1 / hx, -1 / hy}, {0, 1 / hy}}};  // (0,0) (1,0) (1,1)
  const Grad upper{{{0, -1 / hy}, {1 / hx, 0}, {-1 / hx, 1 / hy}}};  // (0,0) (1,1) (0,1)
  const double area = 0.5 * hx * hy;
  double Ke[2][3][3];
  for (int t = 0; t < 2; ++t) {
    const Grad& g = t == 0 ? lower : upper;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n) s += g[a][m] * A(m, n) * g[b][n];
        Ke[t][a][b] = area * s;
      }
  }
  auto triangles = [&](int i, int j) {
    return std::array<std::array<std::size_t, 3>, 2>{
        {{node(i, j), node(i + 1, j), node(i + 1, j + 1)}, {node(i, j), node(i + 1, j + 1), node(i, j + 1)}}};
  };

  if (nfree > 0) {
    TripletBuilder tb(nfree);
    Vector rhs(nfree, 0.0);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto tris = triangles(i, j);
        for (int t = 0; t < 2; ++t)
          for (int a = 0; a < 3; ++a) {
            const auto sa = slot[tris[t][a]];
            if (sa == npos) continue;
            for (int b = 0; b < 3; ++b) {
              const auto sb = slot[tris[t][b]];
              if (sb != npos) tb.add(sa, sb, Ke[t][a][b]);
              else rhs[sa] -= Ke[t][a][b] * u[tris[t][b]];
            }
          }
      }
    CgOptions opt;
    opt.tol = tol;
    opt.jacobi = true;
    opt.max_iter = 10 * nfree + 100;
    const auto res = solve_spd(tb.build(), rhs, opt);
    for (std::size_t v = 0; v < nn; ++v)
      if (slot[v] != npos) u[v] = res.x[slot[v]];
  }

  double energy = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto tris = triangles(i, j);
      for (int t = 0; t < 2; ++t)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) energy += u[tris[t][a]] * Ke[t][a][b] * u[tris[t][b]];
    }
  return {energy, std::move(u)};
}

}  // namespace detail

/// Minimizer of the integral of grad u . A grad u with u = phi on the
/// boundary. Exact for d = 1; for d = 2 P1 elements with spacing at most
/// h_max and Richardson extrapolation over h, h/2.
inline ContinuumSolution continuum_reference(const HomogenizedTensor& A, const RealBox& omega, const Datum& phi,
                                             double h_max, double tol = 1e-12) {
  ContinuumSolution c;
  c.d = omega.d();
  c.omega = omega;
  if (c.d == 1) {
    const double a = omega.lo[0], b = omega.hi[0];
    c.u_lo = phi({a});
    c.u_hi = phi({b});
    if (!std::isfinite(c.u_lo) || !std::isfinite(c.u_hi))
      throw Error(ErrorKind::DatumUndefined, "datum is not finite at the endpoints");
    c.energy = A(0, 0) * (c.u_hi - c.u_lo) * (c.u_hi - c.u_lo) / (b - a);
    return c;
  }
  if (c.d != 2) throw Error(ErrorKind::UnsupportedDimension, "continuum reference needs d = 1 or 2");
  const int nx = std::max(2, static_cast<int>(std::ceil((omega.hi[0] - omega.lo[0]) / h_max - 1e-9)));
  const int ny = std::max(2, static_cast<int>(std::ceil((omega.hi[1] - omega.lo[1]) / h_max - 1e-9)));
  const auto coarse = detail::p1_solve(A, omega, phi, nx, ny, tol);
  auto fine = detail::p1_solve(A, omega, phi, 2 * nx, 2 * ny, tol);
  c.nx = 2 * nx;
  c.ny = 2 * ny;
  c.grid = std::move(fine.second);
  c.energy = fine.first + (fine.first - coarse.first) / 3.0;
  c.error_estimate = std::abs(fine.first - coarse.first) / 3.0;
  return c;
}

/// L2 distance between the cell means of u over cells inside the closed
/// domain and the continuum solution at the cell centres.
inline double coarse_l2_error(const DirichletSolution& sol, const ContinuumSolution& ref) {
  const auto cf = coarse_field(sol.u, ref.omega);
  if (!cf.cells) return 0.0;
  const double vol = std::pow(cf.scale * cf.period, ref.d);
  double s = 0.0;
  for (std::size_t c = 0; c < cf.size(); ++c) {
    const auto l = cf.cells->cell_at(c);
    const double diff = cf.cell_means[c] - ref(cf.center(l));
    s += diff * diff * vol;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Refinement study

struct StudyRow {
  Rational eps;
  double discrete_energy = 0.0;
  double continuum_energy = 0.0;
  double continuum_error = 0.0;
  double l2_error = 0.0;
  double l2_norm = 0.0;
  double gradient_norm = 0.0;
  double datum_energy = 0.0;
  bool max_principle = true;
  std::size_t free_count = 0;
  std::size_t constrained_count = 0;
  double seconds = 0.0;
};

struct StudyReport {
  HomogenizedTensor tensor;
  RealBox omega;
  int r = 0;
  Convention convention = Convention::double_count;
  std::vector<StudyRow> rows;
  double max_l2_norm = 0.0;
  double max_gradient_norm = 0.0;
  bool energy_gap_decreasing = false;  ///< |discrete - continuum| strictly decreasing
  bool l2_error_decreasing = false;    ///< strictly decreasing
  bool l2_finest_below_coarsest = false;
  std::optional<double> energy_rate;  ///< slope of log gap against log eps
  std::optional<double> l2_rate;
  double seconds = 0.0;
};

namespace detail {

inline std::optional<double> loglog_slope(const std::vector<std::pair<double, double>>& pts, double floor = 1e-13) {
  std::vector<std::pair<double, double>> logs;
  for (auto [x, y] : pts)
    if (y > floor) logs.emplace_back(std::log(x), std::log(y));
  if (logs.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto [x, y] : logs) mx += x, my += y;
  mx /= logs.size();
  my /= logs.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : logs) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace detail

inline StudyReport epsilon_convergence_study(const LatticeGraph& graph, const RealBox& omega, const Datum& phi,
                                             const std::vector<Rational>& eps_list, std::optional<int> r = std::nullopt,
                                             Convention conv = Convention::double_count, double tol = 1e-10) {
  if (eps_list.empty()) throw Error(ErrorKind::InvalidArgument, "eps list is empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "eps list must be decreasing");
  if (graph.d() > 2) throw Error(ErrorKind::UnsupportedDimension, "studies need d = 1 or 2");
  const auto start = std::chrono::steady_clock::now();
  StudyReport rep;
  rep.tensor = homogenized_tensor(graph, tol, conv);
  rep.omega = omega;
  rep.r = r.value_or(graph.period());
  rep.convention = conv;
  rep.rows.resize(eps_list.size());
  parallel_for(eps_list.size(), [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    DirichletProblem pb{graph, omega, eps_list[i], phi, r, conv, tol};
    const auto sol = solve_dirichlet(pb);
    const auto ref = continuum_reference(rep.tensor, omega, phi, eps_list[i].value() / 2);
    auto& row = rep.rows[i];
    row.eps = eps_list[i];
    row.discrete_energy = sol.energy;
    row.continuum_energy = ref.energy;
    row.continuum_error = ref.error_estimate;
    row.l2_error = coarse_l2_error(sol, ref);
    row.l2_norm = sol.l2_norm;
    row.gradient_norm = sol.gradient_norm;
    row.datum_energy = sol.datum_energy;
    row.max_principle = sol.max_principle;
    row.free_count = sol.free_count;
    row.constrained_count = sol.constrained_count;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  rep.energy_gap_decreasing = rep.l2_error_decreasing = true;
  std::vector<std::pair<double, double>> gaps, errs;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    rep.max_l2_norm = std::max(rep.max_l2_norm, row.l2_norm);
    rep.max_gradient_norm = std::max(rep.max_gradient_norm, row.gradient_norm);
    gaps.emplace_back(row.eps.value(), std::abs(row.discrete_energy - row.continuum_energy));
    errs.emplace_back(row.eps.value(), row.l2_error);
    if (i > 0) {
      if (!(gaps[i].second < gaps[i - 1].second)) rep.energy_gap_decreasing = false;
      if (!(errs[i].second < errs[i - 1].second)) rep.l2_error_decreasing = false;
    }
  }
  rep.l2_finest_below_coarsest = rep.rows.size() > 1 && errs.back().second < errs.front().second;
  rep.energy_rate = detail::loglog_slope(gaps);
  rep.l2_rate = detail::loglog_slope(errs);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace lathom

#endif  // LATHOM_BVP_HPP
