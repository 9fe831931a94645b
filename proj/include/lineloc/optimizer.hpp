#pragma once

#include <deque>
#include <vector>

#include <Eigen/Core>

#include "lineloc/geometry.hpp"
#include "lineloc/matching.hpp"

namespace lineloc {

/// One 2D-3D correspondence prepared for optimization: the detected line's
/// infinite coefficients plus the matched (possibly trimmed) 3D endpoints in
/// the world frame.
struct LineObservation {
  Correspondence corr;
  InfiniteLineCoeffs coeffs;
  Eigen::Vector3d p3_start = Eigen::Vector3d::Zero();
  Eigen::Vector3d p3_end = Eigen::Vector3d::Zero();
};

/// One keyframe's observations plus the constant offset mapping the current
/// pose to that frame's pose: pose_n = exp_map(delta_xi) * pose_current.
struct WindowEntry {
  Twist delta_xi = Twist::Zero();
  std::vector<LineObservation> observations;
  long frame_id = -1;
};

/// FIFO of the current frame plus the N most recent keyframes. The newest
/// entry is the current frame and carries delta_xi = 0; on advance, every
/// retained entry's offset is re-derived through the new inter-frame motion.
class SlidingWindow {
 public:
  explicit SlidingWindow(std::size_t n_previous) : capacity_(n_previous + 1) {}

  const std::deque<WindowEntry>& entries() const { return entries_; }
  std::deque<WindowEntry>& entries() { return entries_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  std::size_t correspondence_count() const;

  /// Entries dropped because their re-derived offset hit the log singularity.
  std::size_t singular_evictions() const { return singular_evictions_; }
  void note_singular_eviction() { ++singular_evictions_; }

 private:
  std::deque<WindowEntry> entries_;  // oldest -> newest
  std::size_t capacity_;
  std::size_t singular_evictions_ = 0;
};

struct SolverConfig {
  int max_iterations = 50;
  double initial_lambda = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double cost_tolerance = 1e-8;   // relative |delta cost| / cost
  double step_tolerance = 1e-10;  // twist step norm
  double huber_delta = 0.0;       // pixels; 0 disables the robust loss
};

struct SolveReport {
  Pose pose;
  double initial_cost = 0.0;  // px^2, 0.5 * sum of squared residuals
  double final_cost = 0.0;
  int iterations = 0;
  int residual_count = 0;
  bool converged = false;
  int saturated_endpoints = 0;  // endpoints behind the camera at the solution
  // Singular values of the undamped normal matrix J^T J at the solution;
  // their ratio exposes rank deficiency (e.g. all-parallel line maps).
  double normal_min_singular = 0.0;
  double normal_max_singular = 0.0;

  double normal_condition() const {
    return normal_max_singular > 0.0
               ? normal_min_singular / normal_max_singular
               : 0.0;
  }
};

/// Residual saturation value for endpoints behind the camera during a step.
inline constexpr double kSaturationResidualPx = 1e3;

/// Stacked signed point-to-infinite-line residuals at current pose exp(xi):
/// for entry n and observation i, both 3D endpoints are projected under
/// exp_map(delta_xi_n) * exp_map(xi) and evaluated against the detection's
/// line coefficients. Two residuals per observation, ordered by entry then
/// observation index. Endpoints with depth <= 1e-6 contribute the saturation
/// residual instead.
std::vector<double> residuals(const Twist& xi, const SlidingWindow& window,
                              const CameraIntrinsics& k);

/// Levenberg-Marquardt over the 6-dof twist parameterizing the current pose
/// as exp_map(xi) * initial (left-multiplicative update). Throws
/// NoValidResidualsError if every endpoint is saturated at the initial pose,
/// NumericFailureError on non-finite cost, std::invalid_argument on an empty
/// window.
SolveReport solve_pose(const Pose& initial, const SlidingWindow& window,
                       const CameraIntrinsics& k, const SolverConfig& cfg);

/// Keeps the m0 correspondences with the largest overlap_len (boundary ties:
/// lower line2_index wins); input order is preserved among the survivors.
std::vector<Correspondence> cap_correspondences(
    std::vector<Correspondence> c, std::size_t m0);
std::vector<LineObservation> cap_correspondences(
    std::vector<LineObservation> c, std::size_t m0);

/// Pushes new_entry (delta must be zero), re-derives every retained entry's
/// offset as log(exp(old delta) * inverse(inter_frame_motion)), and evicts the
/// oldest entry beyond capacity. Entries whose re-derived offset is
/// log-singular are evicted with a warning count on the window.
SlidingWindow advance_window(SlidingWindow w, const Pose& inter_frame_motion,
                             WindowEntry new_entry);

}  // namespace lineloc
