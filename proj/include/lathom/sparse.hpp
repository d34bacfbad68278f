#ifndef LATHOM_SPARSE_HPP
#define LATHOM_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "lathom/error.hpp"

namespace lathom {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline void remove_mean(Vector& v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (auto& x : v) x -= mean;
}

/// Compressed sparse row matrix.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  void multiply(const Vector& x, Vector& y) const {
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
      y[i] = s;
    }
  }

  Vector operator*(const Vector& x) const {
    Vector y;
    multiply(x, y);
    return y;
  }

  double at(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == j) return val[k];
    return 0.0;
  }

  Vector diagonal() const {
    Vector dg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) dg[i] = at(i, i);
    return dg;
  }

  std::size_t nonzeros() const { return val.size(); }
};

/// Accumulates (i, j, v) triplets; duplicates are summed on build().
class TripletBuilder {
 public:
  explicit TripletBuilder(std::size_t n) : n_(n) {}

  void add(std::size_t i, std::size_t j, double v) { entries_.emplace_back(i, j, v); }

  /// Adds w*(e_i - e_j)(e_i - e_j)^T.
  void add_edge(std::size_t i, std::size_t j, double w) {
    add(i, i, w);
    add(j, j, w);
    add(i, j, -w);
    add(j, i, -w);
  }

  CsrMatrix build() {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) <
                                                        std::tie(std::get<0>(b), std::get<1>(b)); });
    CsrMatrix m;
    m.n = n_;
    m.row_ptr.assign(n_ + 1, 0);
    for (std::size_t k = 0; k < entries_.size();) {
      const auto [i, j, v0] = entries_[k];
      double v = 0.0;
      while (k < entries_.size() && std::get<0>(entries_[k]) == i && std::get<1>(entries_[k]) == j)
        v += std::get<2>(entries_[k++]);
      m.col.push_back(j);
      m.val.push_back(v);
      ++m.row_ptr[i + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
  }

 private:
  std::size_t n_;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries_;
};

struct CgOptions {
  double tol = 1e-10;           ///< relative to ||b||, absolute when b = 0
  std::size_t max_iter = 0;     ///< 0 means 10 n
  bool project_mean = false;    ///< work in the mean-zero subspace (kernel = constants)
  bool jacobi = false;          ///< diagonal preconditioning
};

struct CgResult {
  Vector x;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< true ||A x - b|| at exit
  bool converged = false;
};

/// Conjugate gradients for symmetric positive (semi)definite A. With
/// project_mean the right-hand side and every search direction are kept
/// orthogonal to constants, so a Laplacian with constant kernel is solved in
/// its range and the returned x has zero mean.
inline CgResult conjugate_gradient(const CsrMatrix& A, Vector b, const CgOptions& opt, Vector x0 = {}) {
  const std::size_t n = A.n;
  CgResult res;
  if (opt.project_mean) remove_mean(b);
  const double bnorm = norm2(b);
  const double target = bnorm > 0.0 ? opt.tol * bnorm : opt.tol;
  const std::size_t cap = opt.max_iter ? opt.max_iter : std::max<std::size_t>(10 * n, 10);

  Vector& x = res.x;
  x = x0.empty() ? Vector(n, 0.0) : std::move(x0);
  if (opt.project_mean) remove_mean(x);
  Vector r(n), Ap(n), z(n);
  A.multiply(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  if (opt.project_mean) remove_mean(r);

  Vector inv_diag;
  if (opt.jacobi) {
    inv_diag = A.diagonal();
    for (auto& v : inv_diag) v = v > 0.0 ? 1.0 / v : 1.0;
  }
  auto precondition = [&](const Vector& in, Vector& out) {
    if (!opt.jacobi) {
      out = in;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    if (opt.project_mean) remove_mean(out);
  };

  precondition(r, z);
  Vector p = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);
  std::size_t it = 0;
  while (rnorm > target && it < cap) {
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (opt.project_mean) remove_mean(r);
    ++it;
    // Recompute the true residual now and then to stop drift.
    if (it % 50 == 0) {
      A.multiply(x, Ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
      if (opt.project_mean) remove_mean(r);
    }
    rnorm = norm2(r);
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    if (opt.project_mean) remove_mean(p);
  }
  if (opt.project_mean) remove_mean(x);
  res.iterations = it;
  A.multiply(x, Ap);
  for (std::size_t i = 0; i < n; ++i) Ap[i] -= b[i];
  if (opt.project_mean) remove_mean(Ap);
  res.residual = norm2(Ap);
  res.converged = res.residual <= target || bnorm == 0.0;
  return res;
}

/// As conjugate_gradient, but throws NoConvergenceError with the achieved
/// residual when the tolerance was not met.
inline CgResult solve_spd(const CsrMatrix& A, const Vector& b, const CgOptions& opt, Vector x0 = {}) {
  auto res = conjugate_gradient(A, b, opt, std::move(x0));
  if (!res.converged)
    throw NoConvergenceError("conjugate gradients stopped after " + std::to_string(res.iterations) +
                                 " iterations with residual " + std::to_string(res.residual),
                             res.residual);
  return res;
}

}  // namespace lathom

#endif  // LATHOM_SPARSE_HPP
