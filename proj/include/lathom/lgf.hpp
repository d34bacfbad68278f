#ifndef LATHOM_LGF_HPP
#define LATHOM_LGF_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "lathom/graph.hpp"

namespace lathom {

enum class ParseErrorKind { Syntax, RangeViolation, DuplicateNode, DuplicateOrbit, AsymmetricWeight, MissingHeader };

constexpr std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::RangeViolation: return "RangeViolation";
    case ParseErrorKind::DuplicateNode: return "DuplicateNode";
    case ParseErrorKind::DuplicateOrbit: return "DuplicateOrbit";
    case ParseErrorKind::AsymmetricWeight: return "AsymmetricWeight";
    case ParseErrorKind::MissingHeader: return "MissingHeader";
  }
  return "Unknown";
}

/// Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, ParseErrorKind kind, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                           std::string(to_string(kind)) + ": " + message),
        line(line),
        column(column),
        kind(kind),
        message(message) {}

  int line;
  int column;
  ParseErrorKind kind;
  std::string message;
};

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  int line() const { return line_; }
  int column() const { return static_cast<int>(pos_) + 1; }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg, int col = 0) const {
    throw ParseError(line_, col ? col : column(), kind, msg);
  }

  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  int integer(bool require_sign = false) {
    const std::size_t start = pos_;
    if (require_sign && peek() != '+' && peek() != '-') fail(ParseErrorKind::Syntax, "expected signed offset");
    std::size_t p = pos_;
    if (p < text_.size() && text_[p] == '+') ++p;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + p, text_.data() + text_.size(), v);
    if (ec != std::errc() || ptr == text_.data() + p)
      throw ParseError(line_, static_cast<int>(start) + 1, ParseErrorKind::Syntax, "expected integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  double real() {
    skip_space();
    const std::size_t start = pos_;
    std::size_t p = pos_;
    if (p < text_.size() && text_[p] == '+') ++p;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + p, text_.data() + text_.size(), v);
    if (ec != std::errc() || ptr == text_.data() + p)
      throw ParseError(line_, static_cast<int>(start) + 1, ParseErrorKind::Syntax, "expected decimal weight");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(ParseErrorKind::Syntax, std::string("expected '") + c + "'");
    ++pos_;
  }

  /// "(a b c)" with spaces or commas between integers.
  IntVec coords() {
    expect('(');
    IntVec v;
    for (;;) {
      skip_space();
      if (peek() == ')') break;
      if (!v.empty() && peek() == ',') {
        ++pos_;
        skip_space();
      }
      v.push_back(integer());
    }
    ++pos_;
    return v;
  }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

inline std::string format_weight(double w) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the line-oriented LGF text format. Throws ParseError.
inline LatticeGraph parse(std::string_view text) {
  int d = -1, k = -1, T = -1;
  std::vector<CellNode> nodes;
  std::map<CellNode, int> node_line;
  struct Pending {
    EdgeOrbit orbit;
    int line;
    int column;
  };
  std::vector<Pending> edges;
  std::map<std::tuple<CellNode, CellNode, IntVec>, std::size_t> seen;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    detail::LineCursor cur(line, line_no);
    if (cur.done()) {
      if (end == text.size()) break;
      continue;
    }
    const int word_col = cur.column();
    const std::string_view kw = cur.word();

    auto header = [&](std::string_view name, int& slot, int min) {
      if (kw != name)
        cur.fail(ParseErrorKind::MissingHeader, "expected header '" + std::string(name) + "'", word_col);
      cur.skip_space();
      const int col = cur.column();
      slot = cur.integer();
      if (slot < min) cur.fail(ParseErrorKind::RangeViolation, std::string(name) + " out of range", col);
      if (!cur.done()) cur.fail(ParseErrorKind::Syntax, "trailing characters");
    };
    if (d < 0) {
      header("d", d, 1);
    } else if (k < 0) {
      header("k", k, 0);
    } else if (T < 0) {
      header("T", T, 1);
    } else if (kw == "node") {
      CellNode n;
      for (int m = 0; m < d + k; ++m) {
        if (cur.done()) cur.fail(ParseErrorKind::Syntax, "node needs " + std::to_string(d + k) + " coordinates");
        const int col = cur.column();
        const int v = cur.integer();
        if (m < d) {
          if (v < 0 || v >= T) cur.fail(ParseErrorKind::RangeViolation, "periodic coordinate outside [0,T)", col);
          n.dpos.push_back(v);
        } else {
          if (v < 0) cur.fail(ParseErrorKind::RangeViolation, "negative cross-section coordinate", col);
          n.kpos.push_back(v);
        }
      }
      if (!cur.done()) cur.fail(ParseErrorKind::Syntax, "trailing characters");
      if (node_line.count(n))
        cur.fail(ParseErrorKind::DuplicateNode,
                 "node " + n.str() + " already declared on line " + std::to_string(node_line[n]), word_col);
      node_line[n] = line_no;
      nodes.push_back(std::move(n));
    } else if (kw == "edge") {
      auto endpoint = [&]() {
        cur.skip_space();
        const int col = cur.column();
        const IntVec c = cur.coords();
        if (static_cast<int>(c.size()) != d + k)
          cur.fail(ParseErrorKind::Syntax, "endpoint needs " + std::to_string(d + k) + " coordinates", col);
        CellNode n{IntVec(c.begin(), c.begin() + d), IntVec(c.begin() + d, c.end())};
        if (!node_line.count(n)) cur.fail(ParseErrorKind::Syntax, "undeclared node " + n.str(), col);
        return n;
      };
      EdgeOrbit o;
      o.from = endpoint();
      o.to = endpoint();
      o.offset.assign(d, 0);
      if (cur.peek() == '+' || cur.peek() == '-') {
        for (int m = 0; m < d; ++m) o.offset[m] = cur.integer(true);
      }
      if (cur.peek() != '\0' && !std::isspace(static_cast<unsigned char>(cur.peek())))
        cur.fail(ParseErrorKind::Syntax, "malformed offset");
      cur.skip_space();
      const int wcol = cur.column();
      if (cur.done()) cur.fail(ParseErrorKind::Syntax, "missing weight");
      o.weight = cur.real();
      if (!cur.done()) cur.fail(ParseErrorKind::Syntax, "trailing characters");
      if (!(o.weight > 0.0) || !std::isfinite(o.weight))
        cur.fail(ParseErrorKind::RangeViolation, "weight must be positive", wcol);
      if (o.from == o.to && is_zero(o.offset))
        cur.fail(ParseErrorKind::RangeViolation, "self-loop with zero displacement", word_col);
      int range = 0;
      for (int m = 0; m < d; ++m) range = std::max(range, std::abs(o.to.dpos[m] + o.offset[m] * T - o.from.dpos[m]));
      for (int m = 0; m < k; ++m) range = std::max(range, std::abs(o.to.kpos[m] - o.from.kpos[m]));
      if (range > T)
        cur.fail(ParseErrorKind::RangeViolation,
                 "edge range " + std::to_string(range) + " exceeds T = " + std::to_string(T), word_col);

      auto key = o.key();
      if (auto it = seen.find(key); it != seen.end()) {
        const auto& prev = edges[it->second];
        const bool reversed = !(prev.orbit.from == o.from && prev.orbit.to == o.to && prev.orbit.offset == o.offset);
        if (reversed && prev.orbit.weight != o.weight)
          cur.fail(ParseErrorKind::AsymmetricWeight,
                   "reverse orientation of the orbit on line " + std::to_string(prev.line) + " has a different weight",
                   word_col);
        cur.fail(ParseErrorKind::DuplicateOrbit, "orbit already declared on line " + std::to_string(prev.line),
                 word_col);
      }
      seen.emplace(std::move(key), edges.size());
      edges.push_back({std::move(o), line_no, word_col});
    } else {
      cur.fail(ParseErrorKind::Syntax, "unknown directive '" + std::string(kw) + "'", word_col);
    }
    if (end == text.size()) break;
  }
  if (T < 0)
    throw ParseError(line_no, 1, ParseErrorKind::MissingHeader,
                     std::string("missing header '") + (d < 0 ? "d" : k < 0 ? "k" : "T") + "'");
  if (nodes.empty()) throw ParseError(line_no, 1, ParseErrorKind::Syntax, "no nodes declared");

  std::vector<EdgeOrbit> orbits;
  orbits.reserve(edges.size());
  for (auto& e : edges) orbits.push_back(std::move(e.orbit));
  return LatticeGraph(d, k, T, std::move(nodes), std::move(orbits));
}

/// Canonical text: header, sorted nodes, canonical orbits in sorted order,
/// shortest round-trip weights, zero offsets omitted.
inline std::string serialize(const LatticeGraph& g) {
  std::string out = "d " + std::to_string(g.d()) + "\nk " + std::to_string(g.k()) + "\nT " +
                    std::to_string(g.period()) + "\n";
  auto coords = [](const CellNode& n) {
    std::string s = "(";
    bool first = true;
    for (const auto* part : {&n.dpos, &n.kpos})
      for (int x : *part) {
        s += (first ? "" : " ") + std::to_string(x);
        first = false;
      }
    return s + ")";
  };
  for (const auto& n : g.nodes()) {
    out += "node";
    for (int x : n.dpos) out += " " + std::to_string(x);
    for (int x : n.kpos) out += " " + std::to_string(x);
    out += "\n";
  }
  for (const auto& o : g.orbits()) {
    out += "edge " + coords(o.from) + " " + coords(o.to);
    if (!is_zero(o.offset))
      for (int x : o.offset) out += (x >= 0 ? "+" : "") + std::to_string(x);
    out += " " + detail::format_weight(o.weight) + "\n";
  }
  return out;
}

}  // namespace lathom

#endif  // LATHOM_LGF_HPP
