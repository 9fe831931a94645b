#pragma once

#include <vector>

#include "lineloc/geometry.hpp"

namespace lineloc {

struct StampedPose {
  double timestamp = 0.0;  // seconds
  Pose pose;               // world-to-camera
};

/// Timestamped pose sequence, strictly increasing timestamps.
using Trajectory = std::vector<StampedPose>;

/// Throws InputOrderError unless timestamps are strictly increasing.
void validate_timestamps(const Trajectory& traj);

}  // namespace lineloc
