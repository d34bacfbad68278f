#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lathom/fixtures.hpp"
#include "lathom/lgf.hpp"
#include "lathom/validate.hpp"

using namespace lathom;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Malformed {
  const char* label;
  const char* text;
  ParseErrorKind kind;
  int line;
  int column;
};

const Malformed kMalformed[] = {
    {"no header", "k 0\nT 1\nnode 0\n", ParseErrorKind::MissingHeader, 1, 1},
    {"headers out of order", "d 1\nT 1\nk 0\n", ParseErrorKind::MissingHeader, 2, 1},
    {"truncated header", "# only dims\nd 1\nk 0\n", ParseErrorKind::MissingHeader, 4, 1},
    {"node before header", "d 1\nnode 0\n", ParseErrorKind::MissingHeader, 2, 1},
    {"duplicate node", "d 1\nk 0\nT 1\nnode 0\n\nnode 0\n", ParseErrorKind::DuplicateNode, 6, 1},
    {"periodic coordinate too large", "d 1\nk 0\nT 2\nnode 2\n", ParseErrorKind::RangeViolation, 4, 6},
    {"undeclared endpoint", "d 1\nk 0\nT 1\nnode 0\nedge (0) (1) 1\n", ParseErrorKind::Syntax, 5, 10},
    {"zero weight", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1 0\n", ParseErrorKind::RangeViolation, 5, 16},
    {"negative weight", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1 -2.5\n", ParseErrorKind::RangeViolation, 5, 16},
    {"duplicate orbit", "d 1\nk 1\nT 1\nnode 0 0\nnode 0 1\nedge (0 0) (0 1) 1\nedge (0 0) (0 1) 1\n",
     ParseErrorKind::DuplicateOrbit, 7, 1},
    {"reverse orbit, other weight",
     "d 1\nk 1\nT 1\nnode 0 0\nnode 0 1\nedge (0 0) (0 1)+1 1\n# reverse\nedge (0 1) (0 0)-1 2\n",
     ParseErrorKind::AsymmetricWeight, 8, 1},
    {"reverse loop, same weight", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1 1\nedge (0) (0)-1 1\n",
     ParseErrorKind::DuplicateOrbit, 6, 1},
    {"range beyond period", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+2 1\n", ParseErrorKind::RangeViolation, 5, 1},
    {"zero displacement loop", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0) 1\n", ParseErrorKind::RangeViolation, 5, 1},
    {"unknown directive", "d 1\nk 0\nT 1\nvertex 0\n", ParseErrorKind::Syntax, 4, 1},
    {"missing weight", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1\n", ParseErrorKind::Syntax, 5, 15},
    {"offset not an integer", "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+x 1\n", ParseErrorKind::Syntax, 5, 13},
    {"wrong node arity", "d 1\nk 1\nT 1\nnode 0\n", ParseErrorKind::Syntax, 4, 7},
};

}  // namespace

TEST(Parse, MinimalChain) {
  const auto g = parse("d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1 1.0\n");
  EXPECT_EQ(g.d(), 1);
  EXPECT_EQ(g.k(), 0);
  EXPECT_EQ(g.period(), 1);
  ASSERT_EQ(g.orbits().size(), 1u);
  EXPECT_EQ(g.orbits()[0].offset, IntVec{1});
  EXPECT_EQ(g, find_named(builtin_controls(), "chain")->graph);
}

TEST(Parse, BundledLadderFile) {
  const auto g = parse(read_file(std::string(LATHOM_FIXTURE_DIR) + "/ex2.lgf"));
  EXPECT_EQ(g.d(), 1);
  EXPECT_EQ(g.k(), 1);
  EXPECT_EQ(g.period(), 1);
  EXPECT_EQ(g.node_count(), 2u);
}

TEST(Parse, BundledFilesMatchBuiltins) {
  for (const auto& list : {builtin_examples(), builtin_controls()})
    for (const auto& g : list) EXPECT_EQ(read_file(std::string(LATHOM_FIXTURE_DIR) + "/" + g.name + ".lgf"), g.source);
}

TEST(Parse, CommentsCommasAndBlankLines) {
  const auto g = parse("# header\r\nd 2   # dims\nk 0\n\nT 2\nnode 0 0\nnode 1 0\n\tedge (0, 0) (1 0)+0-1 0.25 # w\n");
  EXPECT_EQ(g.node_count(), 2u);
  ASSERT_EQ(g.orbits().size(), 1u);
  EXPECT_EQ(g.orbits()[0].offset, (IntVec{0, -1}));
  EXPECT_DOUBLE_EQ(g.orbits()[0].weight, 0.25);
}

TEST(Parse, UndeclaredNodeIsSyntax) {
  try {
    parse("d 1\nk 0\nT 1\nnode 0\nedge (0) (1) 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind, ParseErrorKind::Syntax);
    EXPECT_EQ(e.line, 5);
  }
}

TEST(Parse, MalformedInputsReportKindAndPosition) {
  for (const auto& m : kMalformed) {
    try {
      parse(m.text);
      ADD_FAILURE() << m.label << ": parsed";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind, m.kind) << m.label << ": " << e.what();
      EXPECT_EQ(e.line, m.line) << m.label << ": " << e.what();
      EXPECT_EQ(e.column, m.column) << m.label << ": " << e.what();
    }
  }
}

TEST(Parse, ReverseOrientationWithSameWeightIsDuplicate) {
  EXPECT_THROW(parse("d 1\nk 1\nT 1\nnode 0 0\nnode 0 1\nedge (0 0) (0 1)+1 1\nedge (0 1) (0 0)-1 1\n"),
               ParseError);
}

TEST(Serialize, RoundTripOnFixtures) {
  for (const auto& list : {builtin_examples(), builtin_controls()})
    for (const auto& g : list) {
      const auto text = serialize(g.graph);
      const auto again = parse(text);
      EXPECT_EQ(again, g.graph) << g.name;
      EXPECT_EQ(serialize(again), text) << g.name;
      EXPECT_EQ(parse(serialize(parse(g.source))), parse(g.source)) << g.name;
    }
}

TEST(Serialize, ChainIsDeterministic) {
  const auto controls = builtin_controls();
  const auto& g = find_named(controls, "chain")->graph;
  const auto a = serialize(g);
  EXPECT_EQ(a, serialize(g));
  EXPECT_EQ(a, "d 1\nk 0\nT 1\nnode 0\nedge (0) (0)+1 1\n");
}

TEST(Serialize, ReverseOrientationIsCanonicalized) {
  const auto g = parse("d 1\nk 1\nT 1\nnode 0 1\nnode 0 0\nedge (0 1) (0 0)+1 1.5\n");
  EXPECT_EQ(serialize(g), "d 1\nk 1\nT 1\nnode 0 0\nnode 0 1\nedge (0 0) (0 1)-1 1.5\n");
}

TEST(Serialize, WeightsRoundTripExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(1e-6, 1e6);
  for (int t = 0; t < 100; ++t) {
    const double x = w(rng);
    const CellNode a{{0}, {}};
    LatticeGraph g(1, 0, 1, {a}, {{a, a, {1}, x}});
    EXPECT_EQ(parse(serialize(g)).orbits()[0].weight, x);
  }
}

TEST(Fixtures, ShapesAndValidity) {
  const auto ex = builtin_examples();
  ASSERT_EQ(ex.size(), 6u);
  const auto& ex4 = find_named(ex, "ex4")->graph;
  EXPECT_EQ(ex4.node_count(), 2u);
  EXPECT_EQ(ex4.period(), 1);
  EXPECT_EQ(find_named(ex, "ex5")->graph.period(), 4);
  const auto& ex6 = find_named(ex, "ex6")->graph;
  EXPECT_EQ(ex6.d(), 1);
  EXPECT_EQ(ex6.k(), 2);
  EXPECT_EQ(ex6.period(), 2);
  for (const auto& g : ex) EXPECT_TRUE(validate(g.graph).ok()) << g.name;
}

// Property: random graphs survive serialize/parse unchanged, whatever
// orientation and order their orbits were supplied in.
TEST(Serialize, RandomGraphsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int T = 1 + static_cast<int>(rng() % 3);
    std::vector<CellNode> nodes;
    for (int p = 0; p < 4; ++p) {
      CellNode n{IntVec(d), {p}};
      for (auto& x : n.dpos) x = static_cast<int>(rng() % T);
      nodes.push_back(n);
    }
    std::map<std::tuple<CellNode, CellNode, IntVec>, EdgeOrbit> orbits;
    for (int e = 0; e < 6; ++e) {
      EdgeOrbit o{nodes[rng() % 4], nodes[rng() % 4], IntVec(d), 0.5 + static_cast<double>(rng() % 7) / 3.0};
      for (auto& x : o.offset) x = static_cast<int>(rng() % 3) - 1;
      if (o.from == o.to && is_zero(o.offset)) continue;
      if (rng() % 2) o = o.reversed();
      orbits.emplace(o.key(), o);
    }
    std::vector<EdgeOrbit> list;
    for (auto& [k, o] : orbits) list.push_back(o);
    std::shuffle(list.begin(), list.end(), rng);
    const LatticeGraph g(d, 1, T, nodes, list);
    if (g.max_range() > T) continue;
    EXPECT_EQ(parse(serialize(g)), g) << serialize(g);
  }
}
