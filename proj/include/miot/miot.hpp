#pragma once

#include "miot/analysis.hpp"
#include "miot/core.hpp"
#include "miot/eigenmodes.hpp"
#include "miot/error.hpp"
#include "miot/langevin.hpp"
#include "miot/linalg.hpp"
#include "miot/selection.hpp"
#include "miot/spectrum.hpp"
#include "miot/units.hpp"
