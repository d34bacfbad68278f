#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lathom/cell_oracle.hpp"
#include "lathom/cell_solver.hpp"
#include "lathom/fixtures.hpp"

using namespace lathom;

namespace {

LatticeGraph fixture(const std::string& name) {
  for (const auto& list : {builtin_examples(), builtin_controls()})
    if (auto* g = find_named(list, name)) return g->graph;
  throw std::runtime_error("no fixture " + name);
}

std::vector<LatticeGraph> all_fixtures() {
  std::vector<LatticeGraph> out;
  for (const auto& list : {builtin_examples(), builtin_controls()})
    for (const auto& g : list) out.push_back(g.graph);
  return out;
}

LatticeGraph reweighted(const LatticeGraph& g, std::size_t orbit, double factor) {
  auto orbits = g.orbits();
  for (std::size_t i = 0; i < orbits.size(); ++i)
    if (i == orbit || orbit == static_cast<std::size_t>(-1)) orbits[i].weight *= factor;
  return LatticeGraph(g.d(), g.k(), g.period(), g.nodes(), orbits);
}

Vector random_direction(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  Vector z(d);
  for (auto& x : z) x = n(rng);
  return z;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Assemble, ChainHasZeroLoad) {
  const auto sys = assemble_quotient_system(fixture("chain"), {1.0});
  EXPECT_EQ(sys.L.n, 1u);
  EXPECT_EQ(sys.L.at(0, 0), 0.0);
  EXPECT_EQ(sys.b, (Vector{0.0}));
  EXPECT_EQ(sys.c, 2.0);
}

TEST(Assemble, TriangularLoadIsAntisymmetric) {
  // Only the diagonal orbit carries displacement between distinct nodes:
  // b = 2 * (-1, +1) under double counting.
  const auto sys = assemble_quotient_system(fixture("ex4"), {1.0});
  EXPECT_EQ(sys.b, (Vector{-2.0, 2.0}));
  EXPECT_EQ(sys.L.at(0, 0), 4.0);
  EXPECT_EQ(sys.L.at(0, 1), -4.0);
  const auto single = assemble_quotient_system(fixture("ex4"), {1.0}, Convention::single_count);
  EXPECT_EQ(single.b, (Vector{-1.0, 1.0}));
}

TEST(Assemble, ZeroDirectionGivesZeroLoad) {
  for (const auto& g : all_fixtures()) {
    const auto sys = assemble_quotient_system(g, Vector(g.d(), 0.0));
    for (double v : sys.b) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(sys.c, 0.0);
  }
}

TEST(Assemble, RejectsBadDirections) {
  const auto g = fixture("ex4");
  for (const Vector& z : {Vector{NAN}, Vector{INFINITY}, Vector{1.0, 2.0}}) {
    try {
      assemble_quotient_system(g, z);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidDirection);
    }
  }
}

TEST(Corrector, ChainIsZero) {
  for (double z : {1.0, -3.5, 0.25}) {
    const auto chi = solve_corrector(fixture("chain"), {z});
    EXPECT_EQ(chi.values, (Vector{0.0}));
  }
}

TEST(Corrector, TriangularMatchesHandSolution) {
  const auto chi = solve_corrector(fixture("ex4"), {1.0});
  EXPECT_NEAR(chi.values[0], 0.25, 1e-12);
  EXPECT_NEAR(chi.values[1], -0.25, 1e-12);
}

TEST(Corrector, RhombusMatchesHandSolution) {
  // Node order (0,1) (1,1) (2,1) (3,0) (3,2); u = x + chi rises by 4/3 per
  // chain bond and 2/3 per rhombus bond.
  const auto chi = solve_corrector(fixture("ex5"), {1.0});
  const Vector expected{0.0, 1.0 / 3, 2.0 / 3, 1.0 / 3, 1.0 / 3};
  for (std::size_t p = 0; p < expected.size(); ++p)
    EXPECT_NEAR(chi.values[p] - chi.values[0], expected[p], 1e-12) << p;
}

TEST(Corrector, MeanZeroAndSmallResidual) {
  for (const auto& g : all_fixtures()) {
    const Vector z(g.d(), 1.0);
    const auto sys = assemble_quotient_system(g, z);
    const auto chi = solve_corrector(sys, 1e-10);
    double mean = 0.0;
    for (double v : chi.values) mean += v;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    auto r = sys.L * chi.values;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += sys.b[i];
    EXPECT_LE(norm2(r), 1e-10 * std::max(norm2(sys.b), 1.0));
  }
}

TEST(Corrector, PerturbationDoesNotLowerEnergy) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (const auto& g : all_fixtures()) {
    const Vector z(g.d(), 1.0);
    const auto sys = assemble_quotient_system(g, z);
    const auto chi = solve_corrector(sys);
    const double e0 = quadratic_form_value(sys, chi.values);
    for (int t = 0; t < 20; ++t) {
      Vector v = chi.values;
      Vector dv(v.size());
      for (auto& x : dv) x = n(rng);
      remove_mean(dv);
      const double scale = 1e-3 / std::max(norm2(dv), 1e-300);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * dv[i];
      EXPECT_GE(quadratic_form_value(sys, v), e0 - 1e-12);
    }
  }
}

TEST(CellEnergy, ClosedFormValues) {
  EXPECT_NEAR(f_hom(fixture("chain"), {1.0}), 2.0, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex1"), {1.0}), 4.0, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex2"), {1.0}), 4.0, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex3"), {1.0}), 4.0, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex4"), {1.0}, Convention::single_count), 2.5, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex5"), {1.0}), 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(f_hom(fixture("ex6"), {1.0}), 4.0, 1e-12);
}

TEST(CellEnergy, EqualsQuadraticForm) {
  for (const auto& g : all_fixtures()) {
    const Vector z(g.d(), 0.7);
    const auto sys = assemble_quotient_system(g, z);
    const auto chi = solve_corrector(sys);
    const double scale = std::pow(static_cast<double>(g.period()), g.d());
    EXPECT_NEAR(cell_energy(g, z, chi) * scale, quadratic_form_value(sys, chi.values), 1e-10);
  }
}

TEST(CellEnergy, GaugeInvariance) {
  for (const auto& g : all_fixtures()) {
    const Vector z(g.d(), 1.0);
    auto chi = solve_corrector(g, z);
    const double e = cell_energy(g, z, chi);
    for (auto& v : chi.values) v += 17.25;
    EXPECT_LE(rel(cell_energy(g, z, chi), e), 1e-12);
  }
}

TEST(CellEnergy, DoubleIsTwiceSingleExactly) {
  std::mt19937_64 rng(8);
  for (const auto& g : all_fixtures())
    for (int t = 0; t < 5; ++t) {
      const auto z = random_direction(rng, g.d());
      EXPECT_EQ(f_hom(g, z), 2.0 * f_hom(g, z, Convention::single_count));
    }
}

TEST(CellEnergy, SymmetryAndHomogeneity) {
  std::mt19937_64 rng(9);
  for (const auto& g : all_fixtures()) {
    const auto z = random_direction(rng, g.d());
    const double f = f_hom(g, z);
    Vector neg = z;
    for (auto& x : neg) x = -x;
    EXPECT_LE(rel(f_hom(g, neg), f), 1e-10);
    for (double a : {2.0, 3.0, 0.5}) {
      Vector s = z;
      for (auto& x : s) x *= a;
      EXPECT_LE(rel(f_hom(g, s), a * a * f), 1e-10);
    }
  }
}

TEST(CellEnergy, MonotoneInEachWeight) {
  std::mt19937_64 rng(10);
  for (const auto& g : all_fixtures()) {
    const auto z = random_direction(rng, g.d());
    const double f = f_hom(g, z);
    for (std::size_t i = 0; i < g.orbits().size(); ++i)
      EXPECT_GE(f_hom(reweighted(g, i, 1.5), z), f - 1e-10);
  }
}

TEST(CellEnergy, InvariantUnderLcmNormalization) {
  const auto g = fixture("ex1");
  EXPECT_NEAR(f_hom(lcm_normalized(g), {1.0}), f_hom(g, {1.0}), 1e-10);
}

TEST(Oracle, AgreesWithSparseSolverOnFixtures) {
  std::mt19937_64 rng(12);
  for (const auto& g : all_fixtures())
    for (int t = 0; t < 5; ++t) {
      const auto z = random_direction(rng, g.d());
      for (auto conv : {Convention::double_count, Convention::single_count})
        EXPECT_LE(rel(f_hom(g, z, conv), brute_force_cell_oracle(g, z, conv)), 1e-9);
    }
}

TEST(Oracle, LinearInWeightsQuadraticInDirection) {
  for (const auto& g : all_fixtures()) {
    const Vector z(g.d(), 1.0);
    const double f = brute_force_cell_oracle(g, z);
    EXPECT_LE(rel(brute_force_cell_oracle(reweighted(g, static_cast<std::size_t>(-1), 2.0), z), 2.0 * f), 1e-12);
    Vector s = z;
    for (auto& x : s) x *= 3.0;
    EXPECT_LE(rel(brute_force_cell_oracle(g, s), 9.0 * f), 1e-12);
  }
}

TEST(Oracle, RefusesLargeCells) {
  std::vector<CellNode> nodes;
  for (int x = 0; x < 65; ++x) nodes.push_back({{x}, {}});
  std::vector<EdgeOrbit> orbits;
  for (int x = 0; x < 65; ++x) orbits.push_back({{{x}, {}}, {{(x + 1) % 65}, {}}, {x == 64 ? 1 : 0}, 1.0});
  const LatticeGraph g(1, 0, 65, nodes, orbits);
  EXPECT_NEAR(f_hom(g, {1.0}), 2.0, 1e-9);
  try {
    brute_force_cell_oracle(g, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(Tensor, OneDimensionalFixtures) {
  EXPECT_NEAR(homogenized_tensor(fixture("ex1"))(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(homogenized_tensor(fixture("ex6"))(0, 0), 4.0, 1e-12);
}

TEST(Tensor, SquareLatticeClosedForm) {
  const auto A = homogenized_tensor(fixture("square"));
  EXPECT_NEAR(A(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(A(1, 1), 5.0, 1e-12);
  EXPECT_NEAR(A(0, 1), 1.0, 1e-12);
  EXPECT_EQ(A(0, 1), A(1, 0));
  EXPECT_EQ(A.convention, Convention::double_count);
  EXPECT_EQ(A.tolerance, 1e-10);
}

TEST(Tensor, PolarizationAndDefiniteness) {
  std::mt19937_64 rng(13);
  for (const auto& g : all_fixtures()) {
    const auto A = homogenized_tensor(g);
    Eigen::MatrixXd M(A.dim, A.dim);
    for (int m = 0; m < A.dim; ++m)
      for (int n = 0; n < A.dim; ++n) M(m, n) = A(m, n);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff(), 0.0);
    for (int t = 0; t < 20; ++t) {
      const auto z = random_direction(rng, g.d());
      EXPECT_LE(rel(A.quadratic(z), f_hom(g, z)), 1e-8);
    }
  }
}

TEST(Sparse, CapReportsNoConvergence) {
  TripletBuilder tb(50);
  for (std::size_t i = 0; i + 1 < 50; ++i) tb.add_edge(i, i + 1, 1.0);
  tb.add(0, 0, 1.0);
  const auto A = tb.build();
  Vector b(50, 0.0);
  b[49] = 1.0;
  CgOptions opt;
  opt.max_iter = 3;
  try {
    solve_spd(A, b, opt);
    FAIL();
  } catch (const NoConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
    EXPECT_GT(e.residual(), 1e-10);
  }
  opt.max_iter = 0;
  const auto ok = solve_spd(A, b, opt);
  EXPECT_LE(ok.residual, 1e-10);
}
