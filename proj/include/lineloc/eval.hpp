#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lineloc/geometry.hpp"
#include "lineloc/trajectory.hpp"

namespace lineloc {
namespace eval {

struct PosePair {
  double t_a = 0.0;
  double t_b = 0.0;
  Pose a;
  Pose b;
};

/// Greedy nearest-timestamp association: candidate pairs sorted by |dt|, each
/// pose used at most once, pairs beyond max_dt discarded. Throws
/// NoOverlapError when nothing pairs up.
std::vector<PosePair> associate(const Trajectory& a, const Trajectory& b,
                                double max_dt);

/// Rigid transform mapping estimated positions onto ground truth (scale
/// fixed to 1).
struct AlignmentResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int pairs_used = 0;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

/// Closed-form least-squares rigid alignment (SVD of the cross-covariance,
/// translation from centroids) over the first n_poses associated pairs.
/// Throws DegenerateAlignmentError for collinear or insufficient pairs.
AlignmentResult align(const Trajectory& est, const Trajectory& gt,
                      std::size_t n_poses, double max_dt = 0.02);

/// RMS of position differences between aligned estimate and ground truth
/// over all associated pairs.
double ate_rmse(const Trajectory& est, const Trajectory& gt,
                const AlignmentResult& alignment, double max_dt = 0.02);

struct RpeEntry {
  double length = 0.0;       // requested segment length (m)
  std::size_t segments = 0;  // number of evaluated segments
  double rmse = 0.0;         // translational RMSE (m)
  std::vector<double> errors;
};

/// Relative pose error over fixed ground-truth path lengths, stride one
/// frame. Lengths exceeding the traveled path are reported absent (nullopt).
std::vector<std::optional<RpeEntry>> rpe_over_lengths(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<double>& lengths, double max_dt = 0.02);

/// Euclidean distance between the first and last camera centers.
double loop_gap(const Trajectory& traj);

/// Accumulated camera-center path length.
double path_length(const Trajectory& traj);

struct BoxplotSeries {
  std::string label;
  // one entry per segment length: (length, samples)
  std::vector<std::pair<double, std::vector<double>>> data;
};

/// Min/quartiles/max boxplot of per-segment errors versus segment length,
/// written as a standalone SVG.
void write_rpe_boxplot_svg(const std::string& path,
                           const std::vector<BoxplotSeries>& series);

}  // namespace eval
}  // namespace lineloc
