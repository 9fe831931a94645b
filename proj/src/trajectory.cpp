#include "lineloc/trajectory.hpp"

#include "lineloc/errors.hpp"

namespace lineloc {

void validate_timestamps(const Trajectory& traj) {
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (traj[i].timestamp <= traj[i - 1].timestamp) {
      throw InputOrderError("trajectory timestamps must be strictly increasing");
    }
  }
}

}  // namespace lineloc
