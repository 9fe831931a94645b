#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lineloc/geometry.hpp"

namespace lineloc {

/// 3D map line segment, endpoints in meters, world frame.
struct LineSegment3 {
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
  int id = -1;

  double length() const { return (end - start).norm(); }
};

/// Prior 3D line-segment map. Ids are dense from 0 in storage order.
struct LineMap {
  std::vector<LineSegment3> segments;

  std::size_t size() const { return segments.size(); }
};

/// Visible (possibly trimmed) subsegment of a map line under a query pose.
/// Both endpoint projections pass in_fov.
struct VisibleLine {
  int source_id = -1;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
};

/// Minimum 3D segment length; anything shorter is degenerate and dropped.
inline constexpr double kMinSegmentLength = 1e-6;

/// Builds a map from segments, assigning dense ids and dropping degenerate
/// entries (length < 1e-6 m). dropped_count, when non-null, receives the
/// number of dropped segments.
LineMap make_line_map(std::vector<LineSegment3> segments,
                      std::size_t* dropped_count = nullptr);

/// Per-frame field-of-view pass over the map. Endpoint classification:
/// both endpoints visible -> whole segment; exactly one visible -> walk from
/// the visible endpoint in 0.1-length steps and keep the last in-FoV sample
/// as the new endpoint; both invisible -> nothing, even if an interior piece
/// would be visible. Output is ordered by source_id.
std::vector<VisibleLine> visible_lines(const LineMap& map, const Pose& pose,
                                       const CameraIntrinsics& k);

}  // namespace lineloc
