#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lathom/coarse_grain.hpp"
#include "lathom/fixtures.hpp"

using namespace lathom;

namespace {

LatticeGraph fixture(const std::string& name) {
  for (const auto& list : {builtin_examples(), builtin_controls()})
    if (auto* g = find_named(list, name)) return g->graph;
  throw std::runtime_error("no fixture " + name);
}

std::vector<std::pair<std::string, LatticeGraph>> all_fixtures() {
  std::vector<std::pair<std::string, LatticeGraph>> out;
  for (const auto& list : {builtin_examples(), builtin_controls()})
    for (const auto& g : list) out.emplace_back(g.name, g.graph);
  return out;
}

// The unit chain written with three nodes per cell.
LatticeGraph chain3() {
  std::vector<CellNode> nodes{{{0}, {}}, {{1}, {}}, {{2}, {}}};
  std::vector<EdgeOrbit> orbits{
      {nodes[0], nodes[1], {0}, 1.0}, {nodes[1], nodes[2], {0}, 1.0}, {nodes[2], nodes[0], {1}, 1.0}};
  return LatticeGraph(1, 0, 3, nodes, orbits);
}

LatticeFunction on_window(const LatticeGraph& g, int lo, int hi, const std::function<double(const Vector&)>& f) {
  LatticeFunction u{instantiate_window(g, WindowBox::cube(g.d(), lo, hi), WrapPolicy::open), {}, 1.0};
  for (std::size_t v = 0; v < u.finite.window_vertex_count; ++v) {
    const auto x = u.finite.position(v);
    u.values.push_back(f(Vector(x.begin(), x.end())));
  }
  return u;
}

double dirichlet_ratio(const DirichletBox& db, const Vector& u) {
  double lhs = 0.0, rhs = 0.0;
  for (double v : u) lhs += v * v;
  for (const auto& e : db.fg.edges) rhs += 2.0 * e.weight * (u[e.a] - u[e.b]) * (u[e.a] - u[e.b]);
  return lhs / rhs;
}

}  // namespace

TEST(CoarseMean, ConstantFieldIsConstant) {
  for (const auto& [name, g] : all_fixtures()) {
    const auto u = on_window(g, 0, 2, [](const Vector&) { return -3.25; });
    const auto cf = coarse_field(u, {Vector(g.d(), 0.0), Vector(g.d(), 3.0 * g.period())});
    ASSERT_EQ(cf.size(), static_cast<std::size_t>(std::pow(3, g.d()))) << name;
    for (double m : cf.cell_means) EXPECT_DOUBLE_EQ(m, -3.25) << name;
  }
}

TEST(CoarseMean, AffineFieldOnPerforatedStrip) {
  // Node positions 0,0,1,1,1 within each cell of period 2.
  const auto g = fixture("ex1");
  const double z = 1.7;
  const auto u = on_window(g, 0, 4, [&](const Vector& x) { return z * x[0]; });
  for (int l = 0; l <= 4; ++l) EXPECT_NEAR(coarse_mean(u, {l}), z * (2.0 * l + 0.6), 1e-12);
}

TEST(CoarseMean, RefinedChainAveragesItsCell) {
  const auto g = chain3();
  const auto u = on_window(g, 0, 5, [](const Vector& x) { return x[0]; });
  for (int l = 0; l <= 5; ++l) EXPECT_NEAR(coarse_mean(u, {l}), 3.0 * l + 1.0, 1e-12);
}

TEST(CoarseMean, IsLinear) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (const auto& [name, g] : all_fixtures()) {
    auto u = on_window(g, 0, 2, [](const Vector&) { return 0.0; });
    auto v = u;
    for (auto& x : u.values) x = n(rng);
    for (auto& x : v.values) x = n(rng);
    const double a = n(rng), b = n(rng);
    auto w = u;
    for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = a * u.values[i] + b * v.values[i];
    const IntVec l(g.d(), 1);
    EXPECT_NEAR(coarse_mean(w, l), a * coarse_mean(u, l) + b * coarse_mean(v, l), 1e-12) << name;
  }
}

TEST(CoarseMean, JensenContraction) {
  // n * mean^2 <= sum of squares over the cell.
  std::mt19937_64 rng(22);
  std::normal_distribution<double> n;
  for (const auto& [name, g] : all_fixtures()) {
    auto u = on_window(g, 0, 2, [](const Vector&) { return 0.0; });
    for (auto& x : u.values) x = 1.0 + n(rng);
    const IntVec l(g.d(), 2);
    double sq = 0.0;
    for (std::size_t p = 0; p < g.node_count(); ++p) sq += std::pow(u.values[u.finite.index(l, p)], 2);
    EXPECT_LE(g.node_count() * std::pow(coarse_mean(u, l), 2), sq + 1e-12) << name;
  }
}

TEST(CoarseMean, OutsideWindowThrows) {
  const auto g = fixture("ex2");
  const auto u = on_window(g, 0, 2, [](const Vector&) { return 1.0; });
  for (const IntVec& l : {IntVec{3}, IntVec{-1}, IntVec{0, 0}}) {
    try {
      coarse_mean(u, l);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::CellOutOfWindow);
    }
  }
}

TEST(CoarseField, OnlyCellsInsideTheDomain) {
  const auto g = fixture("ex1");
  auto u = on_window(g, 0, 7, [](const Vector& x) { return x[0]; });
  u.scale = 0.125;
  // Cells have side 0.25: [0.3, 1] holds cells 2 and 3 only.
  const auto cf = coarse_field(u, {{0.3}, {1.0}});
  ASSERT_TRUE(cf.cells.has_value());
  EXPECT_EQ(cf.cells->lo, IntVec{2});
  EXPECT_EQ(cf.cells->hi, IntVec{3});
  EXPECT_NEAR(cf.center({2})[0], 0.625, 1e-15);
  EXPECT_NEAR(cf.at({3}), 6.6, 1e-12);
}

TEST(CoarseField, DomainSmallerThanACellIsEmpty) {
  const auto g = fixture("ex5");
  const auto u = on_window(g, 0, 2, [](const Vector&) { return 1.0; });
  const auto cf = coarse_field(u, {{0.5}, {3.5}});
  EXPECT_FALSE(cf.cells.has_value());
  EXPECT_EQ(cf.size(), 0u);
}

TEST(PathConstants, ChainIsTrivial) {
  const auto pc = compute_path_constants(fixture("chain"));
  EXPECT_EQ(pc.translation_length, 1u);
  EXPECT_EQ(pc.translation_multiplicity, 1u);
  EXPECT_DOUBLE_EQ(pc.C_two, 1.0);
  EXPECT_EQ(pc.M, 1);
}

TEST(PathConstants, PerforatedStripNeedsLongerPaths) {
  const auto pc = compute_path_constants(fixture("ex1"));
  EXPECT_GT(pc.C_two, 1.0);
  EXPECT_GE(pc.M, 2);
}

TEST(PathConstants, FiniteOnEveryFixture) {
  for (const auto& [name, g] : all_fixtures()) {
    const auto pc = compute_path_constants(g);
    EXPECT_TRUE(std::isfinite(pc.C_two)) << name;
    EXPECT_TRUE(std::isfinite(pc.C_pw)) << name;
    EXPECT_GE(pc.M, g.period()) << name;
    EXPECT_GE(pc.M, pc.M_needed) << name;
  }
}

TEST(Inequalities, ConstantFieldHasZeroLeftSide) {
  for (const auto& [name, g] : all_fixtures()) {
    const auto pc = compute_path_constants(g);
    const int margin = (pc.M + g.period() - 1) / g.period();
    const auto u = on_window(g, -margin, 2 + margin, [](const Vector&) { return 4.5; });
    const IntVec l(g.d(), 0);
    EXPECT_EQ(two_connectedness_terms(u, l, 0, pc.M).first, 0.0) << name;
    EXPECT_EQ(two_connectedness_terms(u, l, 0, pc.M).second, 0.0) << name;
    EXPECT_NEAR(poincare_wirtinger_terms(u, l, pc.M).first, 0.0, 1e-20) << name;
  }
}

TEST(Inequalities, IndicatorOfEverySiteSatisfiesBoth) {
  for (const auto& [name, g] : all_fixtures()) {
    const auto pc = compute_path_constants(g);
    const int margin = (pc.M + g.period() - 1) / g.period();
    auto u = on_window(g, -margin, 2 + margin, [](const Vector&) { return 0.0; });
    const IntVec l(g.d(), 0);
    for (std::size_t v = 0; v < u.finite.window_vertex_count; ++v) {
      std::fill(u.values.begin(), u.values.end(), 0.0);
      u.values[v] = 1.0;
      for (int m = 0; m < g.d(); ++m) {
        const auto [lhs, rhs] = two_connectedness_terms(u, l, m, pc.M);
        EXPECT_LE(lhs, pc.C_two * rhs + 1e-12) << name << " v=" << v;
      }
      const auto [lhs, rhs] = poincare_wirtinger_terms(u, l, pc.M);
      EXPECT_LE(lhs, pc.C_pw * rhs + 1e-12) << name << " v=" << v;
    }
  }
}

TEST(Inequalities, RandomTrialsHoldOnEveryFixture) {
  for (const auto& [name, g] : all_fixtures()) {
    const auto two = check_two_connectedness(g, 200, 7);
    const auto pw = check_poincare_wirtinger(g, 200, 7);
    EXPECT_EQ(two.trials, 200);
    EXPECT_TRUE(two.holds()) << name << " " << two.worst_ratio;
    EXPECT_TRUE(pw.holds()) << name << " " << pw.worst_ratio;
    EXPECT_LE(two.sharp_constant, two.constant_used + 1e-12) << name;
  }
}

TEST(Inequalities, DeterministicGivenSeed) {
  const auto g = fixture("ex6");
  const auto a = check_two_connectedness(g, 40, 99);
  const auto b = check_two_connectedness(g, 40, 99);
  EXPECT_EQ(a.worst_ratio, b.worst_ratio);
  EXPECT_EQ(a.worst_trial, b.worst_trial);
  EXPECT_EQ(a.worst_family, b.worst_family);
  const auto c = check_two_connectedness(g, 40, 100);
  EXPECT_NE(a.worst_ratio, c.worst_ratio);
}

TEST(Eigen, InverseIterationMatchesDenseSolver) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  const std::size_t n = 30;
  TripletBuilder tb(n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = w(rng);
    tb.add_edge(i, i + 1, a);
    D(i, i) += a, D(i + 1, i + 1) += a, D(i, i + 1) -= a, D(i + 1, i) -= a;
  }
  tb.add(0, 0, 0.3);
  D(0, 0) += 0.3;
  const double dense = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D).eigenvalues().minCoeff();
  EXPECT_NEAR(smallest_eigenvalue(tb.build()), dense, 1e-9 * dense);
}

TEST(Poincare, ChainSharpConstantClosedForm) {
  // Free sites 3..L-3 form a path with both ends tied to zero; the form is
  // twice its Dirichlet Laplacian.
  const int L = 64;
  const auto rep = check_poincare(fixture("chain"), {L}, 20, 7);
  const double m = L - 5;
  EXPECT_NEAR(rep[0].sharp_constant, 1.0 / (4.0 * (1.0 - std::cos(M_PI / (m + 1)))), 1e-6);
  EXPECT_LE(rep[0].sharp_constant, rep[0].path_constant);
  EXPECT_TRUE(rep[0].trials.holds());
}

TEST(Poincare, ZeroFieldGivesZeroOnBothSides) {
  const auto g = fixture("ex4");
  const auto db = dirichlet_box(g, 16);
  const Vector u(db.fg.window_vertex_count, 0.0);
  double lhs = 0.0, rhs = 0.0;
  for (double v : u) lhs += v * v;
  for (const auto& e : db.fg.edges) rhs += e.weight * (u[e.a] - u[e.b]) * (u[e.a] - u[e.b]);
  EXPECT_EQ(lhs, 0.0);
  EXPECT_EQ(rhs, 0.0);
}

TEST(Poincare, TentRatioGrowsQuadratically) {
  const auto g = fixture("chain");
  double prev = 0.0;
  for (int L : {64, 128, 256}) {
    const auto db = dirichlet_box(g, L);
    Vector u(db.fg.window_vertex_count, 0.0);
    for (std::size_t v = 0; v < u.size(); ++v)
      if (!db.zero[v]) u[v] = db.fg.distance_to_boundary(v) - default_layer(g);
    const double r = dirichlet_ratio(db, u);
    if (prev > 0.0) {
      EXPECT_GT(r / prev, 3.5);
      EXPECT_LT(r / prev, 4.5);
    }
    prev = r;
  }
}

TEST(Poincare, DoublingRatioNearFour) {
  for (const std::string name : {"ex1", "ex4", "ex6"}) {
    const auto reps = check_poincare(fixture(name), {64, 128}, 20, 7);
    ASSERT_TRUE(reps[1].doubling_ratio.has_value());
    EXPECT_GE(*reps[1].doubling_ratio, 3.2) << name;
    EXPECT_LE(*reps[1].doubling_ratio, 5.0) << name;
    EXPECT_TRUE(reps[1].trials.holds()) << name;
  }
}

TEST(Poincare, SquareLatticeDoublingRatio) {
  const auto reps = check_poincare(fixture("square"), {32, 64}, 20, 7);
  EXPECT_GE(*reps[1].doubling_ratio, 3.2);
  EXPECT_LE(*reps[1].doubling_ratio, 5.0);
}

TEST(Poincare, BoxWithoutInteriorThrows) {
  try {
    dirichlet_box(fixture("chain"), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInterior);
  }
  EXPECT_THROW(dirichlet_box(fixture("ex5"), 6), Error);
}
