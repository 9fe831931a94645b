#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "lineloc/geometry.hpp"
#include "lineloc/linemap.hpp"
#include "lineloc/matching.hpp"
#include "lineloc/tracker.hpp"
#include "lineloc/trajectory.hpp"

namespace lineloc {

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

/// Map file: one segment per line, "x1 y1 z1 x2 y2 z2" in meters; '#' comment
/// lines ignored; row order defines ids. Degenerate rows are dropped and
/// counted, malformed rows raise ParseError with the line number.
LineMap load_line_map(const std::string& path,
                      std::size_t* dropped_count = nullptr);
void save_line_map(const std::string& path, const LineMap& map);

/// Detection file: "frame_id x1 y1 x2 y2" per line, pixels, '#' comments;
/// frame_ids must be non-decreasing. Detections shorter than 2 px are dropped
/// and counted.
std::vector<LineSegment2> load_detections(const std::string& path,
                                          std::size_t* dropped_count = nullptr);
void save_detections(const std::string& path,
                     const std::vector<LineSegment2>& detections);

/// Trajectory file: "timestamp tx ty tz qx qy qz qw" per line (w-last
/// quaternion), the common plain-text convention: rows store the
/// camera-to-world transform (tx ty tz is the camera center). In-memory poses
/// are world-to-camera; conversion happens here.
Trajectory load_trajectory(const std::string& path);
void save_trajectory(const std::string& path, const Trajectory& traj);

/// Intrinsics config: JSON object with fx, fy, cx, cy, width, height.
CameraIntrinsics load_intrinsics(const std::string& path);
void save_intrinsics(const std::string& path, const CameraIntrinsics& k);

/// Quaternion (x, y, z, w) <-> rotation matrix, for the trajectory boundary.
Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d& r);
Eigen::Matrix3d quaternion_to_rotation(const Eigen::Vector4d& q);

/// Per-frame diagnostics CSV:
/// frame_id,mode,correspondence_count,initial_cost,final_cost,lm_iterations,normal_cond
void save_diagnostics(const std::string& path,
                      const std::vector<FrameResult>& frames);

/// Metrics CSV with a "metric,value,unit" header.
void save_metrics(
    const std::string& path,
    const std::vector<std::tuple<std::string, double, std::string>>& rows);

}  // namespace lineloc
