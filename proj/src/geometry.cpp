#include "lineloc/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "lineloc/errors.hpp"

namespace lineloc {

namespace {
constexpr double kSmallAngle = 1e-8;
constexpr double kLogSingularMargin = 1e-6;
}  // namespace

void validate(const CameraIntrinsics& k) {
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
    throw std::invalid_argument("intrinsics: focal lengths must be positive");
  }
  if (!(k.cx > 0.0 && k.cx < k.width) || !(k.cy > 0.0 && k.cy < k.height)) {
    throw std::invalid_argument("intrinsics: principal point outside image");
  }
  if (k.width <= 0 || k.height <= 0) {
    throw std::invalid_argument("intrinsics: image size must be positive");
  }
}

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Pose exp_map(const Twist& xi) {
  if (!xi.allFinite()) {
    throw std::invalid_argument("exp_map: non-finite twist");
  }
  const Eigen::Vector3d phi = xi.head<3>();
  const Eigen::Vector3d rho = xi.tail<3>();
  const double theta = phi.norm();
  const Eigen::Matrix3d omega = hat(phi);
  const Eigen::Matrix3d omega_sq = omega * omega;

  Pose out;
  if (theta < kSmallAngle) {
    out.rotation = Eigen::Matrix3d::Identity() + omega + 0.5 * omega_sq;
    out.translation = (Eigen::Matrix3d::Identity() + 0.5 * omega) * rho;
    return out;
  }
  const double theta_sq = theta * theta;
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / theta_sq;
  const double c = (theta - std::sin(theta)) / (theta_sq * theta);
  out.rotation = Eigen::Matrix3d::Identity() + a * omega + b * omega_sq;
  const Eigen::Matrix3d v =
      Eigen::Matrix3d::Identity() + b * omega + c * omega_sq;
  out.translation = v * rho;
  return out;
}

Twist log_map(const Pose& p) {
  const double cos_theta =
      std::clamp(0.5 * (p.rotation.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta >= M_PI - kLogSingularMargin) {
    throw NearSingularError("log_map: rotation angle within 1e-6 of pi");
  }

  Eigen::Vector3d half_vee;
  half_vee << 0.5 * (p.rotation(2, 1) - p.rotation(1, 2)),
      0.5 * (p.rotation(0, 2) - p.rotation(2, 0)),
      0.5 * (p.rotation(1, 0) - p.rotation(0, 1));

  Eigen::Vector3d phi;
  Eigen::Matrix3d v_inv;
  if (theta < kSmallAngle) {
    phi = half_vee;  // theta/sin(theta) -> 1
    const Eigen::Matrix3d omega = hat(phi);
    v_inv = Eigen::Matrix3d::Identity() - 0.5 * omega;
  } else {
    phi = (theta / std::sin(theta)) * half_vee;
    const Eigen::Matrix3d omega = hat(phi);
    const double theta_sq = theta * theta;
    const double coeff =
        (1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) /
        theta_sq;
    v_inv = Eigen::Matrix3d::Identity() - 0.5 * omega + coeff * omega * omega;
  }

  Twist xi;
  xi.head<3>() = phi;
  xi.tail<3>() = v_inv * p.translation;
  return xi;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose invert(const Pose& a) {
  Pose out;
  out.rotation = a.rotation.transpose();
  out.translation = -(out.rotation * a.translation);
  return out;
}

double rotation_angle(const Pose& p) {
  return std::acos(std::clamp(0.5 * (p.rotation.trace() - 1.0), -1.0, 1.0));
}

Pose renormalize(const Pose& p) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      p.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Pose{r, p.translation};
}

std::pair<PixelPoint, double> project_point(const Eigen::Vector3d& point_world,
                                            const Pose& pose,
                                            const CameraIntrinsics& k) {
  const Eigen::Vector3d pc = pose.apply(point_world);
  const double w = pc.z();
  if (std::abs(w) < 1e-12) {
    throw AtCameraPlaneError("project_point: point at camera plane");
  }
  PixelPoint px(k.fx * pc.x() / w + k.cx, k.fy * pc.y() / w + k.cy);
  return {px, w};
}

bool in_fov(const PixelPoint& px, double w, const CameraIntrinsics& k) {
  if (!(w > 0.0)) {
    return false;
  }
  const double u = std::floor(px.x());
  const double v = std::floor(px.y());
  return u >= 0.0 && u < static_cast<double>(k.width) && v >= 0.0 &&
         v < static_cast<double>(k.height);
}

}  // namespace lineloc
