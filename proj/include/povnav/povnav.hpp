#pragma once
// Convenience umbrella.

#include "povnav/config.hpp"
#include "povnav/control.hpp"
#include "povnav/geometry.hpp"
#include "povnav/grid.hpp"
#include "povnav/harness.hpp"
#include "povnav/idwa.hpp"
#include "povnav/image_io.hpp"
#include "povnav/navigability.hpp"
#include "povnav/pathplan.hpp"
#include "povnav/sim.hpp"
#include "povnav/subgoal.hpp"
