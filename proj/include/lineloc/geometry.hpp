#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lineloc {

/// se(3) tangent vector, ordered (rx, ry, rz, tx, ty, tz): axis-angle rotation
/// part in radians, translation part in meters.
using Twist = Eigen::Matrix<double, 6, 1>;

using PixelPoint = Eigen::Vector2d;

/// Rigid transform on SE(3), interpreted as world-to-camera throughout:
/// x_cam = rotation * x_world + translation.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  /// Camera optical center in world coordinates.
  Eigen::Vector3d center() const {
    return -(rotation.transpose() * translation);
  }
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

/// Validates fx,fy > 0 and the principal point inside the image; throws
/// std::invalid_argument otherwise.
void validate(const CameraIntrinsics& k);

/// Skew-symmetric matrix such that hat(v) * w == v.cross(w).
Eigen::Matrix3d hat(const Eigen::Vector3d& v);

/// SE(3) exponential, Rodrigues closed form with a Taylor branch below 1e-8 rad.
/// Throws std::invalid_argument on non-finite input.
Pose exp_map(const Twist& xi);

/// Inverse of exp_map. Throws NearSingularError for rotation angle >= pi - 1e-6.
Twist log_map(const Pose& p);

/// Matrix-product composition: compose(a, b) applies b first, then a.
Pose compose(const Pose& a, const Pose& b);

Pose invert(const Pose& a);

/// Rotation angle of the pose in [0, pi].
double rotation_angle(const Pose& p);

/// Re-orthonormalizes the rotation (nearest SO(3) matrix by SVD).
Pose renormalize(const Pose& p);

/// Homogeneous pinhole projection (x, y, w) = K * (pose * P); returns the
/// dehomogenized pixel and the depth w. No field-of-view clamping.
/// Throws AtCameraPlaneError when |w| < 1e-12.
std::pair<PixelPoint, double> project_point(const Eigen::Vector3d& point_world,
                                            const Pose& pose,
                                            const CameraIntrinsics& k);

/// True iff w > 0 and floor(u), floor(v) land inside the image bounds.
bool in_fov(const PixelPoint& px, double w, const CameraIntrinsics& k);

}  // namespace lineloc
