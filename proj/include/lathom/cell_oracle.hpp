#ifndef LATHOM_CELL_ORACLE_HPP
#define LATHOM_CELL_ORACLE_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lathom/cell_solver.hpp"
#include "lathom/graph.hpp"

namespace lathom {

/// Cell-problem minimum by dense linear algebra, built from neighbors() and
/// solved with an explicit pseudo-inverse. Shares no code with the sparse
/// path beyond the graph model.
inline double brute_force_cell_oracle(const LatticeGraph& graph, const std::vector<double>& z,
                                      Convention conv = Convention::double_count) {
  check_direction(graph, z);
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  if (n > 64) throw Error(ErrorKind::TooLarge, "oracle limited to 64 cell nodes, got " + std::to_string(n));

  // One row per ordered pair (p in the cell, neighbour q): chi_p - chi_q - z.delta.
  std::vector<Eigen::Index> from, to;
  std::vector<double> weight, shift;
  const int T = graph.period();
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto& node = graph.nodes()[static_cast<std::size_t>(p)];
    for (const auto& nb : neighbors(graph, node)) {
      double s = 0.0;
      for (int m = 0; m < graph.d(); ++m) s += z[m] * (nb.node.dpos[m] + nb.offset[m] * T - node.dpos[m]);
      from.push_back(p);
      to.push_back(static_cast<Eigen::Index>(graph.node_index(nb.node)));
      weight.push_back(nb.weight);
      shift.push_back(s);
    }
  }
  const auto rows = static_cast<Eigen::Index>(from.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd g(rows), w(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    D(r, from[r]) += 1.0;
    D(r, to[r]) -= 1.0;
    g(r) = shift[r];
    w(r) = weight[r];
  }
  const Eigen::MatrixXd N = D.transpose() * w.asDiagonal() * D;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(N);
  const double cutoff = 1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd inv = eig.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = std::abs(inv(i)) > cutoff ? 1.0 / inv(i) : 0.0;
  const Eigen::MatrixXd pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd chi = pinv * (D.transpose() * w.asDiagonal() * g);

  const Eigen::VectorXd resid = D * chi - g;
  double e = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) e += w(r) * resid(r) * resid(r);
  if (conv == Convention::single_count) e /= 2.0;
  return e / std::pow(static_cast<double>(T), graph.d());
}

}  // namespace lathom

#endif  // LATHOM_CELL_ORACLE_HPP
