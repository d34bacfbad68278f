#ifndef LATHOM_CELL_SOLVER_HPP
#define LATHOM_CELL_SOLVER_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lathom/graph.hpp"
#include "lathom/parallel.hpp"
#include "lathom/sparse.hpp"

namespace lathom {

/// double_count sums over ordered pairs (each undirected orbit twice);
/// single_count takes each orbit once. double = 2 * single exactly.
enum class Convention { double_count, single_count };

constexpr std::string_view to_string(Convention c) {
  return c == Convention::double_count ? "double" : "single";
}

inline double convention_factor(Convention c) { return c == Convention::double_count ? 2.0 : 1.0; }

inline void check_direction(const LatticeGraph& graph, const Vector& z) {
  if (static_cast<int>(z.size()) != graph.d())
    throw Error(ErrorKind::InvalidDirection, "direction has " + std::to_string(z.size()) + " components, d = " +
                                                 std::to_string(graph.d()));
  for (double v : z)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidDirection, "direction has a non-finite component");
}

inline double project(const Vector& z, const IntVec& delta) {
  double s = 0.0;
  for (std::size_t m = 0; m < z.size(); ++m) s += z[m] * delta[m];
  return s;
}

/// Cell energy as a quadratic in the corrector: chi^T L chi + 2 b.chi + c.
struct QuotientSystem {
  CsrMatrix L;
  Vector b;
  double c = 0.0;
  Convention convention = Convention::double_count;
};

inline QuotientSystem assemble_quotient_system(const LatticeGraph& graph, const Vector& z,
                                               Convention conv = Convention::double_count) {
  check_direction(graph, z);
  const double f = convention_factor(conv);
  const std::size_t n = graph.node_count();
  QuotientSystem sys;
  sys.convention = conv;
  sys.b.assign(n, 0.0);
  TripletBuilder tb(n);
  for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
    const auto [p, q] = graph.ends(i);
    const double w = f * graph.orbits()[i].weight;
    const double s = project(z, graph.displacement_d(i));
    tb.add_edge(p, q, w);
    sys.b[p] -= w * s;
    sys.b[q] += w * s;
    sys.c += w * s * s;
  }
  sys.L = tb.build();
  return sys;
}

inline double quadratic_form_value(const QuotientSystem& sys, const Vector& chi) {
  return dot(chi, sys.L * chi) + 2.0 * dot(sys.b, chi) + sys.c;
}

/// T-periodic corrector chi with u_i = z.i^d + chi_i; mean zero over cell nodes.
struct CorrectorField {
  Vector values;
  Vector direction;
  double residual = 0.0;
  std::size_t iterations = 0;
};

inline CorrectorField solve_corrector(const QuotientSystem& sys, double tol = 1e-10) {
  Vector rhs(sys.b.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys.b[i];
  CgOptions opt;
  opt.tol = tol;
  opt.project_mean = true;
  opt.max_iter = 10 * sys.b.size();
  auto res = solve_spd(sys.L, rhs, opt);
  return {std::move(res.x), {}, res.residual, res.iterations};
}

inline CorrectorField solve_corrector(const LatticeGraph& graph, const Vector& z, double tol = 1e-10,
                                      Convention conv = Convention::double_count) {
  auto field = solve_corrector(assemble_quotient_system(graph, z, conv), tol);
  field.direction = z;
  return field;
}

/// (1/T^d) times the direct pair sum of a_ij (u_i - u_j)^2 with
/// u = z.i^d + chi, over i in the cell and every neighbour j.
inline double cell_energy(const LatticeGraph& graph, const Vector& z, const CorrectorField& chi,
                          Convention conv = Convention::double_count) {
  check_direction(graph, z);
  double e = 0.0;
  for (std::size_t i = 0; i < graph.orbits().size(); ++i) {
    const auto [p, q] = graph.ends(i);
    const double du = chi.values[p] - chi.values[q] - project(z, graph.displacement_d(i));
    e += graph.orbits()[i].weight * du * du;
  }
  return convention_factor(conv) * e / std::pow(static_cast<double>(graph.period()), graph.d());
}

inline double f_hom(const LatticeGraph& graph, const Vector& z, Convention conv = Convention::double_count,
                    double tol = 1e-10) {
  return cell_energy(graph, z, solve_corrector(graph, z, tol, conv), conv);
}

struct HomogenizedTensor {
  int dim = 0;
  std::vector<double> entries;  ///< row-major dim x dim
  Convention convention = Convention::double_count;
  double tolerance = 1e-10;

  double operator()(int m, int n) const { return entries[static_cast<std::size_t>(m * dim + n)]; }

  double quadratic(const Vector& z) const {
    double s = 0.0;
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n) s += (*this)(m, n) * z[m] * z[n];
    return s;
  }
};

/// Diagonal from f_hom(e_m), off-diagonal by polarization. Solves for the
/// d(d+1)/2 directions run in parallel.
inline HomogenizedTensor homogenized_tensor(const LatticeGraph& graph, double tol = 1e-10,
                                            Convention conv = Convention::double_count) {
  const int d = graph.d();
  std::vector<std::pair<int, int>> dirs;
  for (int m = 0; m < d; ++m)
    for (int n = m; n < d; ++n) dirs.emplace_back(m, n);
  std::vector<double> values(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t k) {
    Vector z(d, 0.0);
    z[dirs[k].first] = 1.0;
    z[dirs[k].second] = 1.0;
    values[k] = f_hom(graph, z, conv, tol);
  });

  HomogenizedTensor A;
  A.dim = d;
  A.convention = conv;
  A.tolerance = tol;
  A.entries.assign(static_cast<std::size_t>(d * d), 0.0);
  std::vector<double> diag(d);
  for (std::size_t k = 0; k < dirs.size(); ++k)
    if (dirs[k].first == dirs[k].second) diag[dirs[k].first] = values[k];
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto [m, n] = dirs[k];
    const double v = m == n ? diag[m] : (values[k] - diag[m] - diag[n]) / 2.0;
    A.entries[static_cast<std::size_t>(m * d + n)] = v;
    A.entries[static_cast<std::size_t>(n * d + m)] = v;
  }
  return A;
}

}  // namespace lathom

#endif  // LATHOM_CELL_SOLVER_HPP
