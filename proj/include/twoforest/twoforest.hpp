#pragma once

// Convenience header: the whole library.

#include "twoforest/enumerate.hpp"
#include "twoforest/error.hpp"
#include "twoforest/exact.hpp"
#include "twoforest/forest_stats.hpp"
#include "twoforest/graph.hpp"
#include "twoforest/green.hpp"
#include "twoforest/io.hpp"
#include "twoforest/lattice.hpp"
#include "twoforest/planar.hpp"
#include "twoforest/sampler.hpp"
