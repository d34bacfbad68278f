#ifndef LATHOM_CLI_HPP
#define LATHOM_CLI_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "lathom/asymptotic.hpp"
#include "lathom/bvp.hpp"
#include "lathom/cell_solver.hpp"
#include "lathom/coarse_grain.hpp"
#include "lathom/expression.hpp"
#include "lathom/fixtures.hpp"
#include "lathom/lgf.hpp"
#include "lathom/report.hpp"
#include "lathom/validate.hpp"

namespace lathom::cli {

struct FileNotFound : std::runtime_error {
  explicit FileNotFound(const std::string& path) : std::runtime_error("file not found: " + path) {}
};

/// Reads an LGF file; a bare name of a bundled fixture (ex1, chain, ...) is
/// accepted when no such file exists.
inline LatticeGraph load_graph(const std::string& input) {
  if (std::filesystem::is_regular_file(input)) {
    std::ifstream in(input, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }
  if (input.find('/') == std::string::npos && input.find('.') == std::string::npos)
    for (const auto& list : {builtin_examples(), builtin_controls()})
      if (const auto* g = find_named(list, input)) return g->graph;
  throw FileNotFound(input);
}

struct Common {
  std::string format = "json";
  std::string convention = "double";
  double tol = 1e-10;

  Format fmt() const { return format == "csv" ? Format::csv : format == "human" ? Format::human : Format::json; }
  Convention conv() const { return convention == "single" ? Convention::single_count : Convention::double_count; }
};

inline void add_common(CLI::App* cmd, Common& c, bool with_solver = true) {
  cmd->add_option("--format", c.format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
  if (!with_solver) return;
  cmd->add_option("--convention", c.convention, "double (ordered pairs) or single")
      ->check(CLI::IsMember({"double", "single"}));
  cmd->add_option("--tol", c.tol, "relative solver tolerance")->check(CLI::PositiveNumber);
}

struct Outcome {
  Report report;
  int status = 0;
};

inline Json header(const std::string& command, const std::string& input) {
  return Json{{"schema", kSchema}, {"command", command}, {"input", input}};
}

inline Outcome cmd_validate(const std::string& input) {
  const auto g = load_graph(input);
  const auto v = validate(g);
  Outcome o;
  o.report.body = header("validate", input);
  o.report.body["graph"] = to_json(g);
  o.report.body["validation"] = to_json(v);
  o.report.csv_header = {"check", "passed", "detail"};
  for (const auto& c : v.checks) o.report.csv_rows.push_back({c.name, c.passed, c.detail});
  o.status = v.ok() ? 0 : 1;
  return o;
}

inline Outcome cmd_cell(const std::string& input, const Common& c) {
  const auto g = load_graph(input);
  require_connected(connectedness_certificate(g));
  const int d = g.d();
  const auto A = homogenized_tensor(g, c.tol, c.conv());
  Outcome o;
  auto& b = o.report.body;
  b = header("cell", input);
  b["graph"] = to_json(g);
  b["config"] = {{"convention", c.convention}, {"tolerance", c.tol}};
  Json axes = Json::array();
  o.report.csv_header = {"axis", "f_hom", "f_hom_double", "f_hom_single"};
  for (int m = 0; m < d; ++m) {
    Vector z(d, 0.0);
    z[m] = 1.0;
    const auto chi = solve_corrector(g, z, c.tol);
    const double fd = cell_energy(g, z, chi, Convention::double_count);
    const double fs = cell_energy(g, z, chi, Convention::single_count);
    Json corr = Json::array();
    for (std::size_t p = 0; p < g.node_count(); ++p)
      corr.push_back({{"node", g.nodes()[p].str()}, {"value", chi.values[p]}});
    const double f = c.conv() == Convention::double_count ? fd : fs;
    axes.push_back({{"axis", m + 1},
                    {"f_hom", f},
                    {"f_hom_double", fd},
                    {"f_hom_single", fs},
                    {"corrector", corr},
                    {"residual", chi.residual},
                    {"iterations", chi.iterations}});
    o.report.csv_rows.push_back({m + 1, f, fd, fs});
  }
  b["axes"] = axes;
  b["A_hom"] = to_json(A);
  Eigen::MatrixXd M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = A(i, j);
  b["A_hom_min_eigenvalue"] = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
  return o;
}

inline Outcome cmd_asymptotic(const std::string& input, const Common& c, const std::vector<int>& ks, Vector z) {
  const auto g = load_graph(input);
  require_connected(connectedness_certificate(g));
  if (z.empty()) {
    z.assign(g.d(), 0.0);
    z[0] = 1.0;
  }
  auto sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  const auto t = convergence_study(g, z, sorted, c.conv(), c.tol);
  bool lower = true, tiling = true;
  for (const auto& r : t.rows) lower = lower && r.value >= t.f_hom - 1e-8;
  for (const auto& tc : t.tiling) tiling = tiling && tc.holds;
  Outcome o;
  auto& b = o.report.body;
  b = header("asymptotic", input);
  b["graph"] = to_json(g);
  b["config"] = {{"convention", c.convention}, {"tolerance", c.tol}, {"K", sorted}, {"z", z}};
  b["study"] = to_json(t);
  b["lower_bound_holds"] = lower;
  b["tiling_holds"] = tiling;
  o.report.csv_header = {"K", "value", "gap", "relative_gap", "seconds"};
  for (const auto& r : t.rows) o.report.csv_rows.push_back({r.K, r.value, r.gap, r.relative_gap, r.seconds});
  o.status = lower && tiling ? 0 : 1;
  return o;
}

inline Outcome cmd_inequalities(const std::string& input, int trials, std::uint64_t seed, std::vector<int> diameters) {
  const auto g = load_graph(input);
  require_connected(connectedness_certificate(g));
  if (diameters.empty()) diameters = default_poincare_diameters(g);
  const auto pc = compute_path_constants(g);
  const auto two = check_two_connectedness(g, trials, seed, pc);
  const auto pw = check_poincare_wirtinger(g, trials, seed, pc);
  const auto poincare = check_poincare(g, diameters, trials, seed);
  bool scaling = true, ok = two.holds() && pw.holds();
  Json pj = Json::array();
  for (const auto& p : poincare) {
    pj.push_back(to_json(p));
    ok = ok && p.trials.holds();
    if (p.doubling_ratio) scaling = scaling && *p.doubling_ratio >= 4.0 / 1.25 && *p.doubling_ratio <= 4.0 * 1.25;
  }
  Outcome o;
  auto& b = o.report.body;
  b = header("inequalities", input);
  b["graph"] = to_json(g);
  b["config"] = {{"trials", trials}, {"seed", seed}, {"diameters", diameters}};
  b["path_constants"] = to_json(pc);
  b["two_connectedness"] = to_json(two);
  b["poincare_wirtinger"] = to_json(pw);
  b["poincare"] = pj;
  b["poincare_scaling_holds"] = scaling;
  o.report.csv_header = {"name", "holds", "constant_used", "worst_ratio", "sharp_constant", "trials", "worst_trial",
                         "worst_family"};
  auto row = [&](const std::string& name, const InequalityReport& r) {
    o.report.csv_rows.push_back(
        {name, r.holds(), r.constant_used, r.worst_ratio, r.sharp_constant, r.trials, r.worst_trial, r.worst_family});
  };
  row(two.name, two);
  row(pw.name, pw);
  for (const auto& p : poincare) row("poincare L=" + std::to_string(p.diameter), p.trials);
  o.status = ok && scaling ? 0 : 1;
  return o;
}

inline RealBox parse_omega(const std::vector<double>& v, int d) {
  RealBox box{Vector(d), Vector(d)};
  if (v.size() == 2) {
    for (int m = 0; m < d; ++m) box.lo[m] = v[0], box.hi[m] = v[1];
  } else if (static_cast<int>(v.size()) == 2 * d) {
    for (int m = 0; m < d; ++m) box.lo[m] = v[2 * m], box.hi[m] = v[2 * m + 1];
  } else {
    throw Error(ErrorKind::InvalidArgument, "--omega takes lo,hi or one lo,hi pair per axis");
  }
  return box;
}

inline Outcome cmd_bvp(const std::string& input, const Common& c, const std::vector<double>& omega_in,
                       const std::string& phi_text, const std::vector<std::string>& eps_text, const std::string& r_text) {
  const auto g = load_graph(input);
  require_connected(connectedness_certificate(g));
  const auto omega = parse_omega(omega_in, g.d());
  const auto phi = Expression::parse(phi_text);
  if (phi.arity() > g.d()) throw Error(ErrorKind::InvalidArgument, "datum uses more variables than d");
  std::vector<Rational> eps;
  for (const auto& e : eps_text) eps.push_back(Rational::parse(e));
  std::optional<int> r;
  if (r_text != "T") {
    int v = 0;
    const auto [end, ec] = std::from_chars(r_text.data(), r_text.data() + r_text.size(), v);
    if (ec != std::errc() || end != r_text.data() + r_text.size() || v < 1)
      throw Error(ErrorKind::InvalidArgument, "--r takes T or a positive integer");
    r = v;
  }
  const auto rep = epsilon_convergence_study(
      g, omega, [phi](const Vector& x) { return phi(x); }, eps, r, c.conv(), c.tol);
  bool principle = true;
  for (const auto& row : rep.rows) principle = principle && row.max_principle;
  Outcome o;
  auto& b = o.report.body;
  b = header("bvp", input);
  b["graph"] = to_json(g);
  b["config"] = {{"convention", c.convention}, {"tolerance", c.tol}, {"phi", phi_text}, {"eps", eps_text},
                 {"r", rep.r}};
  b["study"] = to_json(rep);
  b["max_principle_holds"] = principle;
  o.report.csv_header = {"eps", "discrete_energy", "continuum_energy", "l2_error", "seconds"};
  for (const auto& row : rep.rows)
    o.report.csv_rows.push_back({row.eps.str(), row.discrete_energy, row.continuum_energy, row.l2_error, row.seconds});
  o.status = principle ? 0 : 1;
  return o;
}

inline Outcome cmd_examples(const std::string& export_dir) {
  Outcome o;
  auto& b = o.report.body;
  b = Json{{"schema", kSchema}, {"command", "examples"}};
  Json list = Json::array();
  o.report.csv_header = {"name", "d", "k", "T", "nodes", "orbits", "summary"};
  if (!export_dir.empty()) std::filesystem::create_directories(export_dir);
  for (const auto& group : {builtin_examples(), builtin_controls()})
    for (const auto& g : group) {
      Json item{{"name", g.name}, {"summary", g.summary}, {"graph", to_json(g.graph)}};
      if (!export_dir.empty()) {
        const auto path = std::filesystem::path(export_dir) / (g.name + ".lgf");
        std::ofstream out(path, std::ios::binary);
        out << g.source;
        if (!out) throw std::runtime_error("cannot write " + path.string());
        item["path"] = path.string();
      }
      list.push_back(item);
      o.report.csv_rows.push_back({g.name, g.graph.d(), g.graph.k(), g.graph.period(), g.graph.node_count(),
                                   g.graph.orbits().size(), g.summary});
    }
  b["fixtures"] = list;
  return o;
}

inline bool is_usage_error(ErrorKind k) {
  return k == ErrorKind::InvalidArgument || k == ErrorKind::InvalidDirection ||
         k == ErrorKind::UnsupportedDimension || k == ErrorKind::WindowTooSmall;
}

/// Runs one command; args exclude the program name. Exit codes: 0 success,
/// 1 failed check or invalid input graph, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic lattice homogenization toolkit", "lattice-homog"};
  app.require_subcommand(1);
  Common common;
  std::string input, phi = "x", r_text = "T", export_dir;
  std::vector<int> ks{2, 4, 8, 16}, diameters;
  std::vector<double> z, omega{0.0, 1.0};
  std::vector<std::string> eps{"1/4", "1/8", "1/16", "1/32"};
  int trials = 200;
  std::uint64_t seed = 7;

  auto* validate_cmd = app.add_subcommand("validate", "check an LGF file");
  validate_cmd->add_option("input", input, "LGF file or bundled fixture name")->required();
  add_common(validate_cmd, common, false);

  auto* cell_cmd = app.add_subcommand("cell", "solve the cell problem: f_hom per axis, A_hom, correctors");
  cell_cmd->add_option("input", input)->required();
  add_common(cell_cmd, common);

  auto* asym_cmd = app.add_subcommand("asymptotic", "finite-window values against f_hom");
  asym_cmd->add_option("input", input)->required();
  asym_cmd->add_option("--k", ks, "window sizes")->delimiter(',')->check(CLI::PositiveNumber);
  asym_cmd->add_option("--z", z, "direction, default e_1")->delimiter(',');
  add_common(asym_cmd, common);

  auto* ineq_cmd = app.add_subcommand("inequalities", "two-connectedness, Poincare-Wirtinger and Poincare suites");
  ineq_cmd->add_option("input", input)->required();
  ineq_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
  ineq_cmd->add_option("--seed", seed);
  ineq_cmd->add_option("--diameters", diameters, "Poincare box sides")->delimiter(',');
  add_common(ineq_cmd, common, false);

  auto* bvp_cmd = app.add_subcommand("bvp", "Dirichlet problems under eps refinement");
  bvp_cmd->add_option("input", input)->required();
  bvp_cmd->add_option("--omega", omega, "lo,hi (every axis) or lo,hi per axis")->delimiter(',');
  bvp_cmd->add_option("--phi", phi, "boundary datum in x, y");
  bvp_cmd->add_option("--eps", eps, "decreasing rationals 1/n")->delimiter(',');
  bvp_cmd->add_option("--r", r_text, "band width: T or a positive integer");
  add_common(bvp_cmd, common);

  auto* ex_cmd = app.add_subcommand("examples", "list bundled fixtures");
  ex_cmd->add_option("--export", export_dir, "write each fixture to DIR/<name>.lgf");
  add_common(ex_cmd, common, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, m;
    const int code = app.exit(e, o, m);
    out << o.str();
    err << m.str();
    return code == 0 ? 0 : 2;
  }

  const Format fmt = common.fmt();
  auto fail = [&](int code, const Json& j, const std::string& message) {
    err << "lattice-homog: " << message << "\n";
    if (fmt == Format::json) out << j.dump(2) << "\n";
    return code;
  };
  try {
    Outcome o;
    if (app.got_subcommand(validate_cmd)) o = cmd_validate(input);
    else if (app.got_subcommand(cell_cmd)) o = cmd_cell(input, common);
    else if (app.got_subcommand(asym_cmd)) o = cmd_asymptotic(input, common, ks, z);
    else if (app.got_subcommand(ineq_cmd)) o = cmd_inequalities(input, trials, seed, diameters);
    else if (app.got_subcommand(bvp_cmd)) o = cmd_bvp(input, common, omega, phi, eps, r_text);
    else o = cmd_examples(export_dir);
    out << emit(o.report, fmt);
    return o.status;
  } catch (const FileNotFound& e) {
    return fail(2, error_json("FileNotFound", e.what()), e.what());
  } catch (const ParseError& e) {
    return fail(1, error_json(e), input + ": " + e.what());
  } catch (const Error& e) {
    return fail(is_usage_error(e.kind()) ? 2 : 1, error_json(std::string(to_string(e.kind())), e.what()), e.what());
  } catch (const std::exception& e) {
    return fail(1, error_json("Internal", e.what()), e.what());
  }
}

}  // namespace lathom::cli

#endif  // LATHOM_CLI_HPP
