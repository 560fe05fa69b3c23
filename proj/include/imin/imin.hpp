#pragma once

#include "imin/blockers.hpp"
#include "imin/dominator.hpp"
#include "imin/experiment.hpp"
#include "imin/graph.hpp"
#include "imin/live_edge.hpp"
#include "imin/parallel.hpp"
#include "imin/rng.hpp"
#include "imin/spread.hpp"
