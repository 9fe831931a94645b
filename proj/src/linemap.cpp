#include "lineloc/linemap.hpp"

#include <optional>

#include "lineloc/parallel.hpp"

namespace lineloc {

namespace {

// FoV membership of a world point without the projection throw: points at the
// camera plane are simply not visible.
bool point_in_fov(const Eigen::Vector3d& pw, const Pose& pose,
                  const CameraIntrinsics& k) {
  const Eigen::Vector3d pc = pose.apply(pw);
  const double w = pc.z();
  if (std::abs(w) < 1e-12) return false;
  const PixelPoint px(k.fx * pc.x() / w + k.cx, k.fy * pc.y() / w + k.cy);
  return in_fov(px, w, k);
}

std::optional<VisibleLine> classify_segment(const LineSegment3& seg,
                                            const Pose& pose,
                                            const CameraIntrinsics& k) {
  const bool start_visible = point_in_fov(seg.start, pose, k);
  const bool end_visible = point_in_fov(seg.end, pose, k);

  if (start_visible && end_visible) {
    return VisibleLine{seg.id, seg.start, seg.end};
  }
  if (!start_visible && !end_visible) {
    // Interior-only visibility is discarded wholesale.
    return std::nullopt;
  }

  const Eigen::Vector3d from = start_visible ? seg.start : seg.end;
  const Eigen::Vector3d to = start_visible ? seg.end : seg.start;

  // Walk in cumulative 0.1-length steps from the visible endpoint and keep
  // the last sample still in FoV. No bisection refinement.
  int last_good = 0;
  for (int step = 1; step <= 10; ++step) {
    const Eigen::Vector3d sample = from + 0.1 * step * (to - from);
    if (!point_in_fov(sample, pose, k)) break;
    last_good = step;
  }
  if (last_good == 0) {
    return std::nullopt;  // a zero-length subsegment is not a line
  }
  const Eigen::Vector3d trimmed_end = from + 0.1 * last_good * (to - from);
  return VisibleLine{seg.id, from, trimmed_end};
}

}  // namespace

LineMap make_line_map(std::vector<LineSegment3> segments,
                      std::size_t* dropped_count) {
  LineMap map;
  map.segments.reserve(segments.size());
  std::size_t dropped = 0;
  for (auto& seg : segments) {
    if (!seg.start.allFinite() || !seg.end.allFinite() ||
        seg.length() < kMinSegmentLength) {
      ++dropped;
      continue;
    }
    seg.id = static_cast<int>(map.segments.size());
    map.segments.push_back(seg);
  }
  if (dropped_count) *dropped_count = dropped;
  return map;
}

std::vector<VisibleLine> visible_lines(const LineMap& map, const Pose& pose,
                                       const CameraIntrinsics& k) {
  std::vector<std::optional<VisibleLine>> slots(map.segments.size());
  parallel_for(map.segments.size(), [&](std::size_t i) {
    slots[i] = classify_segment(map.segments[i], pose, k);
  });

  std::vector<VisibleLine> out;
  out.reserve(map.segments.size());
  for (auto& slot : slots) {
    if (slot) out.push_back(*slot);
  }
  return out;
}

}  // namespace lineloc
