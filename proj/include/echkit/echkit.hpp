#pragma once

// Umbrella header for the library. oracles.hpp and selftest.hpp are not
// included; they exist for cross-checking.

#include "echkit/core.hpp"
#include "echkit/curves.hpp"
#include "echkit/dynamics.hpp"
#include "echkit/ellipsoid.hpp"
#include "echkit/errors.hpp"
#include "echkit/homology.hpp"
#include "echkit/index.hpp"
#include "echkit/json_io.hpp"
#include "echkit/partitions.hpp"
#include "echkit/real_scalar.hpp"
#include "echkit/search.hpp"
