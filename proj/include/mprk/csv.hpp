#pragma once

#include "mprk/schemes.hpp"

#include <iosfwd>
#include <string>

namespace mprk {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Header "t,y1,...,yN" followed by one row per time level.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace mprk
