#pragma once

#include "qslimit/grid.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/special.hpp"
#include "qslimit/cf_bounds.hpp"
#include "qslimit/envelope_integrals.hpp"
#include "qslimit/cf_solver.hpp"
#include "qslimit/density_solver.hpp"
#include "qslimit/quicksort_sim.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/csv.hpp"
#include "qslimit/json.hpp"
#include "qslimit/report.hpp"
