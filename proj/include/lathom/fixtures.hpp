#ifndef LATHOM_FIXTURES_HPP
#define LATHOM_FIXTURES_HPP

#include <string>
#include <vector>

#include "lathom/graph.hpp"
#include "lathom/lgf.hpp"

namespace lathom {

struct NamedGraph {
  std::string name;
  std::string summary;
  std::string source;  ///< LGF text, comments included
  LatticeGraph graph;
};

namespace detail {

inline NamedGraph named(std::string name, std::string summary, std::string source) {
  LatticeGraph g = parse(source);
  return {std::move(name), std::move(summary), std::move(source), std::move(g)};
}

}  // namespace detail

/// The six structures used throughout the tests: strips in Z x cross-section.
inline std::vector<NamedGraph> builtin_examples() {
  std::vector<NamedGraph> out;
  out.push_back(detail::named("ex1", "perforated strip: two rails joined by a vertical column every other site", R"(# Strip Z x {0,1,2} with period 2.
# Rails at heights 0 and 2 are nearest-neighbour chains. At odd x a vertical
# column (x,0)-(x,1)-(x,2) joins them; even sites at height 1 are holes.
d 1
k 1
T 2
node 0 0
node 0 2
node 1 0
node 1 1
node 1 2
edge (0 0) (1 0) 1
edge (1 0) (0 0)+1 1
edge (0 2) (1 2) 1
edge (1 2) (0 2)+1 1
edge (1 0) (1 1) 1
edge (1 1) (1 2) 1
)"));
  out.push_back(detail::named("ex2", "ladder Z x {0,1} with both diagonals and the rung", R"(# Z x {0,1}, period 1. Each site is joined to the opposite rail one step
# to the right (both diagonals) and to its partner straight across (rung).
# The diagonals alone would only reach even translates.
d 1
k 1
T 1
node 0 0
node 0 1
edge (0 0) (0 1)+1 1
edge (0 1) (0 0)+1 1
edge (0 0) (0 1) 1
)"));
  out.push_back(detail::named("ex3", "two chains joined by one diagonal per site", R"(# Z x {0,1}, period 1. Both rails are chains; the only link between them is
# the diagonal from (x,0) to (x+1,1).
d 1
k 1
T 1
node 0 0
node 0 1
edge (0 0) (0 0)+1 1
edge (0 1) (0 1)+1 1
edge (0 0) (0 1)+1 1
)"));
  out.push_back(detail::named("ex4", "triangular lattice strip", R"(# Z x {0,1}, period 1. Two chains, rungs, and the diagonal (x,0)-(x+1,1),
# giving a strip of triangles.
d 1
k 1
T 1
node 0 0
node 0 1
edge (0 0) (0 0)+1 1
edge (0 1) (0 1)+1 1
edge (0 0) (0 1) 1
edge (0 0) (0 1)+1 1
)"));
  out.push_back(detail::named("ex5", "chain followed by a rhombus, period 4", R"(# Period 4 along x, heights {0,1,2}. A straight run (0,1)-(1,1)-(2,1)
# opens into a rhombus (2,1)-(3,0)-(4,1) and (2,1)-(3,2)-(4,1); the point
# (4,1) is the next period's (0,1).
d 1
k 1
T 4
node 0 1
node 1 1
node 2 1
node 3 0
node 3 2
edge (0 1) (1 1) 1
edge (1 1) (2 1) 1
edge (2 1) (3 0) 1
edge (2 1) (3 2) 1
edge (3 0) (0 1)+1 1
edge (3 2) (0 1)+1 1
)"));
  out.push_back(detail::named("ex6", "double helix over a square cross-section", R"(# d = 1, k = 2, period 2. Two zigzag strands: one in the plane k2 = 0
# alternating (0;0,0) and (1;1,0), the other in k2 = 1 alternating (0;1,1)
# and (1;0,1). Each level is joined across by one diagonal of the square.
d 1
k 2
T 2
node 0 0 0
node 1 1 0
node 0 1 1
node 1 0 1
edge (0 0 0) (1 1 0) 1
edge (1 1 0) (0 0 0)+1 1
edge (0 1 1) (1 0 1) 1
edge (1 0 1) (0 1 1)+1 1
edge (0 0 0) (0 1 1) 1
edge (1 1 0) (1 0 1) 1
)"));
  return out;
}

/// Control cases with closed-form answers.
inline std::vector<NamedGraph> builtin_controls() {
  std::vector<NamedGraph> out;
  out.push_back(detail::named("chain", "nearest-neighbour chain Z", R"(# Z with unit bonds.
d 1
k 0
T 1
node 0
edge (0) (0)+1 1
)"));
  out.push_back(detail::named("square", "anisotropic square lattice Z^2 with one diagonal", R"(# Z^2: weight 1 along x, 2 along y, 0.5 on the (1,1) diagonal.
d 2
k 0
T 1
node 0 0
edge (0 0) (0 0)+1+0 1
edge (0 0) (0 0)+0+1 2
edge (0 0) (0 0)+1+1 0.5
)"));
  return out;
}

inline const NamedGraph* find_named(const std::vector<NamedGraph>& list, const std::string& name) {
  for (const auto& g : list)
    if (g.name == name) return &g;
  return nullptr;
}

}  // namespace lathom

#endif  // LATHOM_FIXTURES_HPP
