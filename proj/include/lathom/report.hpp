#ifndef LATHOM_REPORT_HPP
#define LATHOM_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "lathom/asymptotic.hpp"
#include "lathom/bvp.hpp"
#include "lathom/cell_solver.hpp"
#include "lathom/coarse_grain.hpp"
#include "lathom/lgf.hpp"
#include "lathom/validate.hpp"

namespace lathom {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "lattice-homog/1";

enum class Format { json, csv, human };

/// One command's output: a JSON body plus a fixed-header table for CSV.
struct Report {
  Json body;
  std::vector<std::string> csv_header;
  std::vector<std::vector<Json>> csv_rows;
};

namespace detail {

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline std::string csv_cell(const Json& v) {
  std::string s = scalar_text(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline bool is_scalar_array(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (x.is_structured()) return false;
  return true;
}

inline void human(const Json& v, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  if (v.is_object()) {
    for (const auto& [key, val] : v.items()) {
      if (val.is_structured() && !is_scalar_array(val)) {
        out += pad + key + ":\n";
        human(val, indent + 2, out);
      } else {
        out += pad + key + ": ";
        human(val, 0, out);
      }
    }
  } else if (is_scalar_array(v)) {
    std::string line;
    for (const auto& x : v) line += (line.empty() ? "" : ", ") + scalar_text(x);
    out += "[" + line + "]\n";
  } else if (v.is_array()) {
    std::size_t i = 0;
    for (const auto& x : v) {
      out += pad + "- [" + std::to_string(i++) + "]\n";
      human(x, indent + 2, out);
    }
  } else {
    out += pad + scalar_text(v) + "\n";
  }
}

}  // namespace detail

/// Deterministic serialization. Numbers print identically in every format.
inline std::string emit(const Report& r, Format f) {
  switch (f) {
    case Format::json: return r.body.dump(2) + "\n";
    case Format::csv: {
      std::string out;
      for (std::size_t i = 0; i < r.csv_header.size(); ++i) out += (i ? "," : "") + r.csv_header[i];
      out += "\n";
      for (const auto& row : r.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_cell(row[i]);
        out += "\n";
      }
      return out;
    }
    case Format::human: {
      std::string out;
      detail::human(r.body, 0, out);
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// JSON views of module results

inline Json to_json(const LatticeGraph& g) {
  return Json{{"d", g.d()}, {"k", g.k()}, {"T", g.period()}, {"extent", g.extent()},
              {"nodes", g.node_count()}, {"orbits", g.orbits().size()}};
}

inline Json to_json(const ValidationReport& v) {
  Json checks = Json::array();
  for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return Json{{"ok", v.ok()}, {"range", v.range}, {"extent", v.extent}, {"checks", checks}};
}

inline Json to_json(const HomogenizedTensor& A) {
  return Json{{"dim", A.dim},
              {"entries", A.entries},
              {"convention", std::string(to_string(A.convention))},
              {"tolerance", A.tolerance}};
}

inline Json to_json(const ConvergenceTable& t) {
  Json rows = Json::array(), tiling = Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"K", r.K}, {"value", r.value}, {"gap", r.gap}, {"relative_gap", r.relative_gap},
                    {"seconds", r.seconds}});
  for (const auto& c : t.tiling)
    tiling.push_back({{"K", c.K}, {"f_K", c.f_K}, {"f_2K", c.f_2K}, {"bound", c.bound},
                      {"literal_bound", c.literal_bound}, {"holds", c.holds}, {"monotone", c.monotone},
                      {"literal_holds", c.literal_holds}});
  return Json{{"direction", t.direction},
              {"convention", std::string(to_string(t.convention))},
              {"f_hom", t.f_hom},
              {"f_affine", t.f_affine},
              {"rows", rows},
              {"tiling", tiling},
              {"rate", t.rate ? Json(*t.rate) : Json(nullptr)},
              {"seconds", t.seconds}};
}

inline Json to_json(const PathConstants& pc) {
  return Json{{"C_two", pc.C_two},
              {"C_pw", pc.C_pw},
              {"M", pc.M},
              {"M_needed", pc.M_needed},
              {"translation_length", pc.translation_length},
              {"translation_multiplicity", pc.translation_multiplicity},
              {"pair_length", pc.pair_length},
              {"pair_multiplicity", pc.pair_multiplicity}};
}

inline Json to_json(const InequalityReport& r) {
  return Json{{"name", r.name},
              {"holds", r.holds()},
              {"constant_used", r.constant_used},
              {"worst_ratio", r.worst_ratio},
              {"sharp_constant", r.sharp_constant},
              {"trials", r.trials},
              {"worst_trial", r.worst_trial},
              {"worst_family", r.worst_family},
              {"seed", r.seed}};
}

inline Json to_json(const PoincareReport& p) {
  return Json{{"diameter", p.diameter},
              {"sharp_constant", p.sharp_constant},
              {"c0", p.c0},
              {"path_constant", p.path_constant},
              {"doubling_ratio", p.doubling_ratio ? Json(*p.doubling_ratio) : Json(nullptr)},
              {"trials", to_json(p.trials)}};
}

inline Json to_json(const StudyReport& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"eps", r.eps.str()},
                    {"discrete_energy", r.discrete_energy},
                    {"continuum_energy", r.continuum_energy},
                    {"continuum_error", r.continuum_error},
                    {"l2_error", r.l2_error},
                    {"l2_norm", r.l2_norm},
                    {"gradient_norm", r.gradient_norm},
                    {"datum_energy", r.datum_energy},
                    {"max_principle", r.max_principle},
                    {"free", r.free_count},
                    {"constrained", r.constrained_count},
                    {"seconds", r.seconds}});
  return Json{{"A_hom", to_json(s.tensor)},
              {"omega", {{"lo", s.omega.lo}, {"hi", s.omega.hi}}},
              {"r", s.r},
              {"convention", std::string(to_string(s.convention))},
              {"rows", rows},
              {"max_l2_norm", s.max_l2_norm},
              {"max_gradient_norm", s.max_gradient_norm},
              {"energy_gap_decreasing", s.energy_gap_decreasing},
              {"l2_error_decreasing", s.l2_error_decreasing},
              {"l2_finest_below_coarsest", s.l2_finest_below_coarsest},
              {"energy_rate", s.energy_rate ? Json(*s.energy_rate) : Json(nullptr)},
              {"l2_rate", s.l2_rate ? Json(*s.l2_rate) : Json(nullptr)},
              {"seconds", s.seconds}};
}

inline Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"schema", kSchema}, {"error", {{"kind", kind}, {"message", message}}}};
}

inline Json error_json(const ParseError& e) {
  auto j = error_json(std::string(to_string(e.kind)), e.message);
  j["error"]["line"] = e.line;
  j["error"]["column"] = e.column;
  return j;
}

}  // namespace lathom

#endif  // LATHOM_REPORT_HPP
