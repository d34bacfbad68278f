#ifndef LATHOM_LATHOM_HPP
#define LATHOM_LATHOM_HPP

#include "lathom/asymptotic.hpp"
#include "lathom/bvp.hpp"
#include "lathom/cell_oracle.hpp"
#include "lathom/cell_solver.hpp"
#include "lathom/coarse_grain.hpp"
#include "lathom/error.hpp"
#include "lathom/expression.hpp"
#include "lathom/fixtures.hpp"
#include "lathom/graph.hpp"
#include "lathom/lgf.hpp"
#include "lathom/parallel.hpp"
#include "lathom/report.hpp"
#include "lathom/sparse.hpp"
#include "lathom/validate.hpp"
#include "lathom/window.hpp"

#endif  // LATHOM_LATHOM_HPP
