#pragma once

#include "bounds.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "gt_sim.hpp"
#include "mixing.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "topology.hpp"
#include "weights.hpp"
