#include "lineloc/tracker.hpp"

#include <stdexcept>
#include <unordered_map>

#include "lineloc/errors.hpp"

namespace lineloc {

void validate(const TrackerConfig& cfg) {
  if (!(cfg.theta0 > 0.0) || !(cfg.d0 > 0.0)) {
    throw std::invalid_argument("tracker config: thresholds must be positive");
  }
  if (cfg.min_correspondences < 1) {
    throw std::invalid_argument("tracker config: min_correspondences must be >= 1");
  }
  if (cfg.m0 == 0 || cfg.refine_iterations <= 0) {
    throw std::invalid_argument("tracker config: counts must be positive");
  }
  if (!(cfg.tighten_factor > 0.0 && cfg.tighten_factor < 1.0)) {
    throw std::invalid_argument("tracker config: tighten_factor must be in (0, 1)");
  }
}

Pose predict_pose(const Pose& prev_estimate, const Pose& prev_odom,
                  const Pose& cur_odom) {
  const Pose motion = compose(cur_odom, invert(prev_odom));
  return compose(motion, prev_estimate);
}

Tracker::Tracker(LineMap map, CameraIntrinsics k, TrackerConfig cfg,
                 Pose initial_pose)
    : map_(std::move(map)),
      k_(k),
      cfg_(cfg),
      prev_estimate_(initial_pose),
      window_(cfg.window_n) {
  validate(cfg_);
  validate(k_);
}

FrameResult Tracker::process_frame(const FrameInput& input) {
  if (prev_frame_id_ && input.frame_id <= *prev_frame_id_) {
    throw InputOrderError("process_frame: frame_id did not increase");
  }
  if (prev_timestamp_ && input.timestamp <= *prev_timestamp_) {
    throw InputOrderError("process_frame: timestamp did not increase");
  }

  const Pose prev_odom = prev_odom_.value_or(input.odometry_pose);
  const Pose motion = compose(input.odometry_pose, invert(prev_odom));
  const Pose predicted = compose(motion, prev_estimate_);

  // The window advances exactly once per frame; the current frame's entry is
  // the newest slot and its observations are replaced by each refinement
  // round. On fallback it simply stays empty.
  WindowEntry current_entry;
  current_entry.frame_id = input.frame_id;
  window_ = advance_window(std::move(window_), motion, std::move(current_entry));

  FrameResult result;
  result.frame_id = input.frame_id;
  result.timestamp = input.timestamp;

  Pose estimate = predicted;
  double theta = cfg_.theta0;
  double d = cfg_.d0;
  bool solved_any = false;

  for (int round = 0; round < cfg_.refine_iterations; ++round) {
    const std::vector<VisibleLine> visible = visible_lines(map_, estimate, k_);
    std::vector<Correspondence> matches =
        match_lines(visible, input.detections, estimate, k_, theta, d);
    matches = cap_correspondences(std::move(matches), cfg_.m0);

    IterationTrace trace;
    trace.correspondence_count = matches.size();
    trace.theta = theta;
    trace.d = d;

    if (matches.size() < cfg_.min_correspondences) {
      result.iterations.push_back(trace);
      break;
    }

    // Visible lines are ordered by source_id; map ids to trimmed endpoints.
    std::unordered_map<int, const VisibleLine*> by_id;
    by_id.reserve(visible.size());
    for (const VisibleLine& vl : visible) by_id.emplace(vl.source_id, &vl);

    std::vector<LineObservation> observations;
    observations.reserve(matches.size());
    for (const Correspondence& c : matches) {
      LineObservation obs;
      obs.corr = c;
      obs.coeffs = line_coeffs(input.detections[c.line2_index]);
      const VisibleLine* vl = by_id.at(c.line3_id);
      obs.p3_start = vl->start;
      obs.p3_end = vl->end;
      observations.push_back(obs);
    }
    window_.entries().back().observations = std::move(observations);

    const SolveReport report = solve_pose(estimate, window_, k_, cfg_.solver);
    estimate = report.pose;
    solved_any = true;

    trace.initial_cost = report.initial_cost;
    trace.final_cost = report.final_cost;
    trace.lm_iterations = report.iterations;
    trace.normal_condition = report.normal_condition();
    result.iterations.push_back(trace);

    theta *= cfg_.tighten_factor;
    d *= cfg_.tighten_factor;
  }

  if (solved_any) {
    result.mode = FrameMode::kOptimized;
    result.pose = estimate;
    result.correspondence_count =
        window_.entries().back().observations.size();
  } else {
    result.mode = FrameMode::kFallback;
    result.pose = predicted;
    result.correspondence_count = 0;
    window_.entries().back().observations.clear();
  }

  prev_estimate_ = result.pose;
  prev_odom_ = input.odometry_pose;
  prev_frame_id_ = input.frame_id;
  prev_timestamp_ = input.timestamp;
  return result;
}

SequenceResult run_sequence(const std::vector<FrameInput>& inputs,
                            const LineMap& map, const CameraIntrinsics& k,
                            const TrackerConfig& cfg,
                            const Pose& initial_pose) {
  if (inputs.empty()) {
    throw std::invalid_argument("run_sequence: empty input stream");
  }
  Tracker tracker(map, k, cfg, initial_pose);
  SequenceResult out;
  out.trajectory.reserve(inputs.size());
  out.frames.reserve(inputs.size());
  for (const FrameInput& input : inputs) {
    FrameResult result = tracker.process_frame(input);
    out.trajectory.push_back({result.timestamp, result.pose});
    out.frames.push_back(std::move(result));
  }
  return out;
}

}  // namespace lineloc
