#include "lineloc/matching.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "lineloc/errors.hpp"
#include "lineloc/parallel.hpp"

namespace lineloc {

InfiniteLineCoeffs line_coeffs(const LineSegment2& l) {
  const Eigen::Vector2d dir = l.end - l.start;
  const double len = dir.norm();
  if (len < 1e-9) {
    throw std::invalid_argument("line_coeffs: degenerate segment");
  }
  InfiniteLineCoeffs coeffs;
  coeffs.a = -dir.y() / len;
  coeffs.b = dir.x() / len;
  coeffs.c = -(coeffs.a * l.start.x() + coeffs.b * l.start.y());
  return coeffs;
}

double angle_distance(const LineSegment2& l2,
                      const std::pair<PixelPoint, PixelPoint>& proj) {
  const Eigen::Vector2d vt = l2.end - l2.start;
  const double lt = vt.norm();
  if (lt < 1e-9) {
    throw std::invalid_argument("angle_distance: degenerate 2D segment");
  }
  const Eigen::Vector2d vu = proj.second - proj.first;
  const double lu = vu.norm();
  if (lu < 1e-6) {
    throw DegenerateProjectionError("angle_distance: projected segment degenerate");
  }
  // Line direction is sign-ambiguous; |dot| folds the angle into [0, pi/2].
  const double cos_t = std::clamp(std::abs(vt.dot(vu)) / (lt * lu), 0.0, 1.0);
  return std::acos(cos_t);
}

double endpoint_line_distance(const InfiniteLineCoeffs& coeffs,
                              const std::pair<PixelPoint, PixelPoint>& proj) {
  return std::abs(coeffs.signed_distance(proj.first)) +
         std::abs(coeffs.signed_distance(proj.second));
}

double overlap_length(const LineSegment2& l2,
                      const std::pair<PixelPoint, PixelPoint>& proj) {
  const Eigen::Vector2d dir = l2.end - l2.start;
  const double len_sq = dir.squaredNorm();
  if (len_sq < 1e-18) {
    return 0.0;
  }
  const auto clamped_alpha = [&](const PixelPoint& p) {
    const double alpha = (p - l2.start).dot(dir) / len_sq;
    return std::clamp(alpha, 0.0, 1.0);
  };
  const double alpha_s = clamped_alpha(proj.first);
  const double alpha_e = clamped_alpha(proj.second);
  return std::abs(alpha_s - alpha_e) * std::sqrt(len_sq);
}

namespace {

struct ProjectedLine {
  std::pair<PixelPoint, PixelPoint> px;
  bool usable = false;  // false when the projection collapses to a point
};

ProjectedLine project_visible(const VisibleLine& vl, const Pose& pose,
                              const CameraIntrinsics& k) {
  ProjectedLine out;
  // Visible lines have both endpoints in FoV, so depth is strictly positive.
  const auto [ps, ws] = project_point(vl.start, pose, k);
  const auto [pe, we] = project_point(vl.end, pose, k);
  out.px = {ps, pe};
  out.usable = (pe - ps).norm() >= 1e-6;
  return out;
}

}  // namespace

std::vector<Correspondence> match_lines(
    const std::vector<VisibleLine>& visible,
    const std::vector<LineSegment2>& detections, const Pose& pose,
    const CameraIntrinsics& k, double theta0, double d0) {
  if (!(theta0 > 0.0) || !(d0 > 0.0)) {
    throw std::invalid_argument("match_lines: thresholds must be positive");
  }

  std::vector<ProjectedLine> projections(visible.size());
  for (std::size_t i = 0; i < visible.size(); ++i) {
    projections[i] = project_visible(visible[i], pose, k);
  }

  std::vector<std::optional<Correspondence>> slots(detections.size());
  parallel_for(detections.size(), [&](std::size_t j) {
    const LineSegment2& det = detections[j];
    const InfiniteLineCoeffs coeffs = line_coeffs(det);

    std::optional<Correspondence> best;
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const ProjectedLine& proj = projections[i];
      if (!proj.usable) continue;
      const double theta = angle_distance(det, proj.px);
      if (!(theta < theta0)) continue;
      const double d = endpoint_line_distance(coeffs, proj.px);
      if (!(d < d0)) continue;
      const double overlap = overlap_length(det, proj.px);

      const bool better =
          !best || d < best->distance.d ||
          (d == best->distance.d &&
           (overlap > best->distance.overlap_len ||
            (overlap == best->distance.overlap_len &&
             visible[i].source_id < best->line3_id)));
      if (better) {
        Correspondence c;
        c.line3_id = visible[i].source_id;
        c.line2_index = static_cast<int>(j);
        c.distance = LineDistance{theta, d, overlap};
        c.projected = proj.px;
        best = c;
      }
    }
    slots[j] = best;
  });

  std::vector<Correspondence> out;
  out.reserve(detections.size());
  for (auto& slot : slots) {
    if (slot) out.push_back(*slot);
  }
  return out;
}

}  // namespace lineloc
