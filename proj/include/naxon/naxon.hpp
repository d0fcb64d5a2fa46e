#pragma once

#include "naxon/audit.hpp"
#include "naxon/bench.hpp"
#include "naxon/cli.hpp"
#include "naxon/config.hpp"
#include "naxon/errors.hpp"
#include "naxon/grid.hpp"
#include "naxon/io.hpp"
#include "naxon/models.hpp"
#include "naxon/noise.hpp"
#include "naxon/ou.hpp"
#include "naxon/quadrature.hpp"
#include "naxon/rng.hpp"
#include "naxon/solver.hpp"
#include "naxon/tridiag.hpp"
