#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lineloc/geometry.hpp"
#include "lineloc/linemap.hpp"
#include "lineloc/matching.hpp"
#include "lineloc/optimizer.hpp"
#include "lineloc/trajectory.hpp"

namespace lineloc {

struct TrackerConfig {
  double theta0 = 10.0 * M_PI / 180.0;  // rad
  double d0 = 25.0;                     // px
  std::size_t min_correspondences = 8;
  std::size_t m0 = 40;
  std::size_t window_n = 10;
  int refine_iterations = 3;
  double tighten_factor = 0.8;
  SolverConfig solver;
};

void validate(const TrackerConfig& cfg);

struct FrameInput {
  long frame_id = 0;
  double timestamp = 0.0;               // seconds, strictly increasing
  Pose odometry_pose;                   // absolute VIO pose, world-to-camera
  std::vector<LineSegment2> detections;
};

enum class FrameMode { kOptimized, kFallback };

/// One matching + solve round inside a frame's refinement loop.
struct IterationTrace {
  std::size_t correspondence_count = 0;
  double theta = 0.0;  // thresholds active at this iteration
  double d = 0.0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int lm_iterations = 0;
  double normal_condition = 0.0;
};

struct FrameResult {
  long frame_id = 0;
  double timestamp = 0.0;
  Pose pose;
  std::size_t correspondence_count = 0;
  FrameMode mode = FrameMode::kFallback;
  std::vector<IterationTrace> iterations;

  double initial_cost() const {
    return iterations.empty() ? 0.0 : iterations.front().initial_cost;
  }
  double final_cost() const {
    return iterations.empty() ? 0.0 : iterations.back().final_cost;
  }
  int lm_iterations() const {
    int n = 0;
    for (const auto& it : iterations) n += it.lm_iterations;
    return n;
  }
  double normal_condition() const {
    return iterations.empty() ? 0.0 : iterations.back().normal_condition;
  }
};

/// Motion update of the previous estimate by the relative odometry motion:
/// T = cur_odom * inverse(prev_odom); returns T * prev_estimate.
Pose predict_pose(const Pose& prev_estimate, const Pose& prev_odom,
                  const Pose& cur_odom);

/// Per-keyframe pipeline: predict, then repeatedly extract visible lines,
/// match under (theta, d), cap to m0, solve the sliding-window problem, and
/// tighten the thresholds; frames with too few correspondences at every
/// round fall back to the odometry prediction. The window advances once per
/// frame with the inter-frame odometry motion, in fallback mode too.
class Tracker {
 public:
  Tracker(LineMap map, CameraIntrinsics k, TrackerConfig cfg,
          Pose initial_pose);

  FrameResult process_frame(const FrameInput& input);

  const LineMap& map() const { return map_; }
  const SlidingWindow& window() const { return window_; }

 private:
  LineMap map_;
  CameraIntrinsics k_;
  TrackerConfig cfg_;
  Pose prev_estimate_;
  std::optional<Pose> prev_odom_;
  std::optional<long> prev_frame_id_;
  std::optional<double> prev_timestamp_;
  SlidingWindow window_;
};

struct SequenceResult {
  Trajectory trajectory;
  std::vector<FrameResult> frames;
};

SequenceResult run_sequence(const std::vector<FrameInput>& inputs,
                            const LineMap& map, const CameraIntrinsics& k,
                            const TrackerConfig& cfg, const Pose& initial_pose);

}  // namespace lineloc
