#pragma once

// Umbrella header.
#include "gnnlab/chain.hpp"
#include "gnnlab/config.hpp"
#include "gnnlab/deficits.hpp"
#include "gnnlab/domains.hpp"
#include "gnnlab/errors.hpp"
#include "gnnlab/fields.hpp"
#include "gnnlab/fit.hpp"
#include "gnnlab/grid.hpp"
#include "gnnlab/io.hpp"
#include "gnnlab/movingplanes.hpp"
#include "gnnlab/operator.hpp"
#include "gnnlab/report.hpp"
#include "gnnlab/solver.hpp"
#include "gnnlab/sweep.hpp"
#include "gnnlab/symmetry.hpp"
