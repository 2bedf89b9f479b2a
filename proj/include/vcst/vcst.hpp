#pragma once

#include "vcst/core.hpp"
#include "vcst/geometry.hpp"
#include "vcst/transport_graph.hpp"
#include "vcst/steiner_trunk.hpp"
#include "vcst/exact_steiner.hpp"
#include "vcst/scenario.hpp"
#include "vcst/plan.hpp"
#include "vcst/coordination.hpp"
#include "vcst/baselines.hpp"
#include "vcst/simulation.hpp"
#include "vcst/experiment.hpp"
