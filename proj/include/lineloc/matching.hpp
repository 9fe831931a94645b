#pragma once

#include <vector>

#include "lineloc/geometry.hpp"
#include "lineloc/linemap.hpp"

namespace lineloc {

/// Detected 2D image line segment, pixels.
struct LineSegment2 {
  PixelPoint start = PixelPoint::Zero();
  PixelPoint end = PixelPoint::Zero();
  long frame_id = 0;

  double length() const { return (end - start).norm(); }
};

/// Detections shorter than this are dropped at ingestion.
inline constexpr double kMinDetectionLength = 2.0;

/// Infinite-line coefficients A*u + B*v + C = 0, normalized so A^2 + B^2 = 1.
struct InfiniteLineCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double signed_distance(const PixelPoint& p) const {
    return a * p.x() + b * p.y() + c;
  }
};

/// Similarity triple between a detected 2D line and a 3D line projection.
struct LineDistance {
  double theta = 0.0;        // radians, in [0, pi/2]
  double d = 0.0;            // pixels, sum over both projected endpoints
  double overlap_len = 0.0;  // pixels
};

/// A matched (3D line, 2D line) pair.
struct Correspondence {
  int line3_id = -1;
  int line2_index = -1;
  LineDistance distance;
  std::pair<PixelPoint, PixelPoint> projected;  // 3D endpoints' projections
};

/// Coefficients of the infinite line through the segment's endpoints.
/// Throws std::invalid_argument on a degenerate segment.
InfiniteLineCoeffs line_coeffs(const LineSegment2& l);

/// 2D angle distance theta = arccos(|v_t . v_u|), folded into [0, pi/2] so it
/// is insensitive to endpoint order. Throws DegenerateProjectionError when the
/// projected segment is shorter than 1e-6 px.
double angle_distance(const LineSegment2& l2,
                      const std::pair<PixelPoint, PixelPoint>& proj);

/// d = sum of |A*u + B*v + C| over both projected endpoints.
double endpoint_line_distance(const InfiniteLineCoeffs& coeffs,
                              const std::pair<PixelPoint, PixelPoint>& proj);

/// Overlap of the projection with the finite detected segment: each projected
/// endpoint is dropped onto l2 with its clamped parameter alpha in [0,1]; the
/// overlap is |alpha_s - alpha_e| times the Euclidean length of l2.
double overlap_length(const LineSegment2& l2,
                      const std::pair<PixelPoint, PixelPoint>& proj);

/// Brute-force thresholded search: for each detection, among visible 3D lines
/// with theta < theta0 and d < d0, pick the one minimizing d (ties: larger
/// overlap_len, then smaller line3_id). One correspondence per 2D line at
/// most; 3D lines may be reused. Output ordered by line2_index.
std::vector<Correspondence> match_lines(
    const std::vector<VisibleLine>& visible,
    const std::vector<LineSegment2>& detections, const Pose& pose,
    const CameraIntrinsics& k, double theta0, double d0);

}  // namespace lineloc
