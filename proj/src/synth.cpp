#include "lineloc/synth.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "lineloc/io.hpp"

namespace lineloc {
namespace synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

void add_box_edges(std::vector<LineSegment3>& segs, const Eigen::Vector3d& lo,
                   const Eigen::Vector3d& hi) {
  const double x0 = lo.x(), x1 = hi.x();
  const double y0 = lo.y(), y1 = hi.y();
  const double z0 = lo.z(), z1 = hi.z();
  const auto add = [&](double ax, double ay, double az, double bx, double by,
                       double bz) {
    segs.push_back({Eigen::Vector3d(ax, ay, az), Eigen::Vector3d(bx, by, bz)});
  };
  // bottom rectangle, top rectangle, vertical corners
  add(x0, y0, z0, x1, y0, z0);
  add(x1, y0, z0, x1, y1, z0);
  add(x1, y1, z0, x0, y1, z0);
  add(x0, y1, z0, x0, y0, z0);
  add(x0, y0, z1, x1, y0, z1);
  add(x1, y0, z1, x1, y1, z1);
  add(x1, y1, z1, x0, y1, z1);
  add(x0, y1, z1, x0, y0, z1);
  add(x0, y0, z0, x0, y0, z1);
  add(x1, y0, z0, x1, y0, z1);
  add(x1, y1, z0, x1, y1, z1);
  add(x0, y1, z0, x0, y1, z1);
}

struct Bounds {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};

Bounds scene_bounds(const SceneSpec& spec) {
  const Eigen::Vector3d& d = spec.dimensions;
  return {Eigen::Vector3d(-0.5 * d.x(), -0.5 * d.y(), 0.0),
          Eigen::Vector3d(0.5 * d.x(), 0.5 * d.y(), d.z())};
}

void add_interior_lines(std::vector<LineSegment3>& segs, const Bounds& b,
                        int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(b.lo.x(), b.hi.x());
  std::uniform_real_distribution<double> uy(b.lo.y(), b.hi.y());
  std::uniform_real_distribution<double> uz(b.lo.z(), b.hi.z());
  const double max_len =
      0.4 * std::min({b.hi.x() - b.lo.x(), b.hi.y() - b.lo.y(),
                      b.hi.z() - b.lo.z()});
  std::uniform_real_distribution<double> ulen(0.5, std::max(0.6, max_len));
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Eigen::Vector3d start(ux(rng), uy(rng), uz(rng));
      const Eigen::Vector3d dir = random_unit_vector(rng);
      const Eigen::Vector3d end = start + ulen(rng) * dir;
      if ((end.array() >= b.lo.array()).all() &&
          (end.array() <= b.hi.array()).all()) {
        segs.push_back({start, end});
        break;
      }
    }
  }
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (!(spec.dimensions.array() > 0.0).all()) {
    throw std::invalid_argument("scene: dimensions must be positive");
  }
  if (spec.edge_density < 0) {
    throw std::invalid_argument("scene: edge density must be non-negative");
  }
}

void validate(const NoiseSpec& noise) {
  if (noise.odom_rot_sigma < 0.0 || noise.odom_trans_sigma < 0.0 ||
      noise.odom_drift_rate < 0.0 || noise.det_endpoint_sigma < 0.0 ||
      noise.clutter_per_frame < 0) {
    throw std::invalid_argument("noise: parameters must be non-negative");
  }
  if (noise.det_dropout_prob < 0.0 || noise.det_dropout_prob > 1.0) {
    throw std::invalid_argument("noise: dropout probability must be in [0, 1]");
  }
}

std::uint64_t frame_seed(std::uint64_t seed, long frame_id, int stream) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(frame_id));
  return splitmix64(s ^ static_cast<std::uint64_t>(stream));
}

LineMap generate_scene(const SceneSpec& spec) {
  validate(spec);
  const Bounds b = scene_bounds(spec);
  std::vector<LineSegment3> segs;

  switch (spec.kind) {
    case SceneKind::kBoxRoom:
      add_box_edges(segs, b.lo, b.hi);
      break;
    case SceneKind::kCorridor: {
      add_box_edges(segs, b.lo, b.hi);
      // Door-frame verticals every ~2 m along both long walls.
      const double span = b.hi.x() - b.lo.x();
      const int n_frames_per_wall = std::max(1, static_cast<int>(span / 2.0));
      for (int i = 1; i <= n_frames_per_wall; ++i) {
        const double x = b.lo.x() + span * i / (n_frames_per_wall + 1.0);
        for (double y : {b.lo.y(), b.hi.y()}) {
          segs.push_back({Eigen::Vector3d(x, y, b.lo.z()),
                          Eigen::Vector3d(x, y, b.hi.z())});
        }
      }
      break;
    }
    case SceneKind::kBuildingFacade: {
      // Wall plane at max y with a window grid.
      const double y = b.hi.y();
      const auto wall_line = [&](double ax, double az, double bx, double bz) {
        segs.push_back({Eigen::Vector3d(ax, y, az), Eigen::Vector3d(bx, y, bz)});
      };
      wall_line(b.lo.x(), b.lo.z(), b.hi.x(), b.lo.z());
      wall_line(b.hi.x(), b.lo.z(), b.hi.x(), b.hi.z());
      wall_line(b.hi.x(), b.hi.z(), b.lo.x(), b.hi.z());
      wall_line(b.lo.x(), b.hi.z(), b.lo.x(), b.lo.z());
      const int cols = 4, rows = 2;
      const double w = (b.hi.x() - b.lo.x()) / cols;
      const double h = (b.hi.z() - b.lo.z()) / rows;
      for (int cx = 0; cx < cols; ++cx) {
        for (int rz = 0; rz < rows; ++rz) {
          const double x0 = b.lo.x() + cx * w + 0.25 * w;
          const double x1 = b.lo.x() + cx * w + 0.75 * w;
          const double z0 = b.lo.z() + rz * h + 0.25 * h;
          const double z1 = b.lo.z() + rz * h + 0.75 * h;
          wall_line(x0, z0, x1, z0);
          wall_line(x1, z0, x1, z1);
          wall_line(x1, z1, x0, z1);
          wall_line(x0, z1, x0, z0);
        }
      }
      break;
    }
  }

  auto rng = make_rng(frame_seed(spec.seed, -1, 0));
  add_interior_lines(segs, b, spec.edge_density, rng);
  return make_line_map(std::move(segs));
}

namespace {

// World-to-camera pose looking from eye toward target, z forward, y down.
Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d forward = target - eye;
  if (forward.norm() < 1e-9) {
    throw std::invalid_argument("look_at: eye coincides with target");
  }
  forward.normalize();
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-9) {
    right = Eigen::Vector3d(1.0, 0.0, 0.0);  // looking straight up/down
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);

  Pose pose;
  pose.rotation.row(0) = right;
  pose.rotation.row(1) = down;
  pose.rotation.row(2) = forward;
  pose.translation = -(pose.rotation * eye);
  return pose;
}

std::vector<Eigen::Vector3d> lawnmower_waypoints(const Bounds& b, double z) {
  // Serpentine over the back half of the room, gazing across it.
  const double x0 = 0.7 * b.lo.x(), x1 = 0.7 * b.hi.x();
  const double y0 = 0.7 * b.lo.y(), y1 = 0.1 * b.lo.y();
  const int rows = 4;
  std::vector<Eigen::Vector3d> pts;
  for (int r = 0; r <= rows; ++r) {
    const double y = y0 + (y1 - y0) * r / rows;
    if (r % 2 == 0) {
      pts.emplace_back(x0, y, z);
      pts.emplace_back(x1, y, z);
    } else {
      pts.emplace_back(x1, y, z);
      pts.emplace_back(x0, y, z);
    }
  }
  return pts;
}

Eigen::Vector3d polyline_point(const std::vector<Eigen::Vector3d>& pts,
                               double s) {
  double remaining = s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = (pts[i + 1] - pts[i]).norm();
    if (remaining <= len || i + 2 == pts.size()) {
      const double a = len > 0.0 ? std::clamp(remaining / len, 0.0, 1.0) : 0.0;
      return pts[i] + a * (pts[i + 1] - pts[i]);
    }
    remaining -= len;
  }
  return pts.back();
}

}  // namespace

Trajectory generate_trajectory(const SceneSpec& spec, int n_frames,
                               PathPattern pattern, std::uint64_t seed) {
  validate(spec);
  if (n_frames < 2) {
    throw std::invalid_argument("generate_trajectory: need at least 2 frames");
  }
  const Bounds b = scene_bounds(spec);
  const Eigen::Vector3d& d = spec.dimensions;
  const double z0 = 0.5 * d.z();
  auto rng = make_rng(frame_seed(seed, -2, 0));
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);

  Trajectory traj;
  traj.reserve(n_frames);
  const double dt = 1.0 / 15.0;

  if (pattern == PathPattern::kLoop) {
    const double radius = 0.35 * std::min(d.x(), d.y());
    const double phase = uphase(rng);
    const Eigen::Vector3d center(0.0, 0.0, z0);
    for (int i = 0; i < n_frames; ++i) {
      const double angle = phase + 2.0 * M_PI * i / (n_frames - 1);
      const Eigen::Vector3d eye =
          center + radius * Eigen::Vector3d(std::cos(angle), std::sin(angle), 0.0);
      traj.push_back({i * dt, look_at(eye, center)});
    }
  } else {
    const auto pts = lawnmower_waypoints(b, z0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      total += (pts[i + 1] - pts[i]).norm();
    }
    const Eigen::Vector3d target(0.0, 0.45 * d.y(), z0);
    for (int i = 0; i < n_frames; ++i) {
      const Eigen::Vector3d eye =
          polyline_point(pts, total * i / (n_frames - 1));
      traj.push_back({i * dt, look_at(eye, target)});
    }
  }
  return traj;
}

Trajectory corrupt_odometry(const Trajectory& gt, const NoiseSpec& noise,
                            std::uint64_t seed) {
  validate(noise);
  if (gt.empty()) return gt;
  if (noise.odom_rot_sigma == 0.0 && noise.odom_trans_sigma == 0.0 &&
      noise.odom_drift_rate == 0.0) {
    return gt;
  }

  auto rng = make_rng(frame_seed(seed, -3, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Vector3d drift_dir = random_unit_vector(rng);

  Trajectory out;
  out.reserve(gt.size());
  out.push_back(gt.front());

  // camera-to-world state
  Eigen::Matrix3d c2w = gt.front().pose.rotation.transpose();
  Eigen::Vector3d center = gt.front().pose.center();

  for (std::size_t i = 1; i < gt.size(); ++i) {
    const Eigen::Matrix3d prev_c2w = gt[i - 1].pose.rotation.transpose();
    const Eigen::Matrix3d cur_c2w = gt[i].pose.rotation.transpose();
    const Eigen::Vector3d step_world =
        gt[i].pose.center() - gt[i - 1].pose.center();
    const double step_len = step_world.norm();

    Eigen::Matrix3d rel = prev_c2w.transpose() * cur_c2w;
    if (noise.odom_rot_sigma > 0.0) {
      const Eigen::Vector3d eps(normal(rng), normal(rng), normal(rng));
      Twist xi = Twist::Zero();
      xi.head<3>() = noise.odom_rot_sigma * eps;
      rel = rel * exp_map(xi).rotation;
    }

    Eigen::Vector3d step_local = prev_c2w.transpose() * step_world;
    if (noise.odom_trans_sigma > 0.0) {
      step_local += noise.odom_trans_sigma *
                    Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    }

    // Integrate the local step in the noisy frame, then apply the bias.
    center += c2w * step_local;
    c2w = c2w * rel;
    center += noise.odom_drift_rate * step_len * drift_dir;

    Pose pose;
    pose.rotation = c2w.transpose();
    pose.translation = -(pose.rotation * center);
    out.push_back({gt[i].timestamp, pose});
  }
  return out;
}

std::vector<LineSegment2> render_detections(const LineMap& map,
                                            const Pose& gt_pose,
                                            const CameraIntrinsics& k,
                                            const NoiseSpec& noise,
                                            std::uint64_t seed,
                                            long frame_id) {
  validate(noise);
  const std::vector<VisibleLine> visible = visible_lines(map, gt_pose, k);

  auto noise_rng = make_rng(frame_seed(seed, frame_id, 1));
  auto dropout_rng = make_rng(frame_seed(seed, frame_id, 2));
  auto clutter_rng = make_rng(frame_seed(seed, frame_id, 3));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<LineSegment2> out;
  out.reserve(visible.size() + noise.clutter_per_frame);

  for (const VisibleLine& vl : visible) {
    const auto [ps, ws] = project_point(vl.start, gt_pose, k);
    const auto [pe, we] = project_point(vl.end, gt_pose, k);
    LineSegment2 det;
    det.frame_id = frame_id;
    det.start = ps;
    det.end = pe;
    if (noise.det_endpoint_sigma > 0.0) {
      det.start += noise.det_endpoint_sigma *
                   Eigen::Vector2d(normal(noise_rng), normal(noise_rng));
      det.end += noise.det_endpoint_sigma *
                 Eigen::Vector2d(normal(noise_rng), normal(noise_rng));
    }
    if (noise.det_dropout_prob > 0.0 &&
        unit(dropout_rng) < noise.det_dropout_prob) {
      continue;
    }
    if (det.length() < kMinDetectionLength) continue;
    out.push_back(det);
  }

  std::uniform_real_distribution<double> ux(0.0, static_cast<double>(k.width));
  std::uniform_real_distribution<double> uy(0.0, static_cast<double>(k.height));
  std::uniform_real_distribution<double> ulen(20.0, 200.0);
  std::uniform_real_distribution<double> uangle(0.0, 2.0 * M_PI);
  for (int i = 0; i < noise.clutter_per_frame; ++i) {
    LineSegment2 det;
    det.frame_id = frame_id;
    det.start = Eigen::Vector2d(ux(clutter_rng), uy(clutter_rng));
    const double angle = uangle(clutter_rng);
    det.end = det.start +
              ulen(clutter_rng) *
                  Eigen::Vector2d(std::cos(angle), std::sin(angle));
    out.push_back(det);
  }
  return out;
}

CameraIntrinsics default_intrinsics() {
  CameraIntrinsics k;
  k.fx = 300.0;
  k.fy = 300.0;
  k.cx = 320.0;
  k.cy = 240.0;
  k.width = 640;
  k.height = 480;
  return k;
}

DatasetPaths emit_dataset(const SceneSpec& scene, const NoiseSpec& noise,
                          int n_frames, PathPattern pattern,
                          const CameraIntrinsics& k,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const LineMap map = generate_scene(scene);
  const Trajectory gt =
      generate_trajectory(scene, n_frames, pattern, scene.seed);
  const Trajectory odom = corrupt_odometry(gt, noise, scene.seed);

  std::vector<LineSegment2> detections;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto frame_dets = render_detections(
        map, gt[i].pose, k, noise, scene.seed, static_cast<long>(i));
    detections.insert(detections.end(), frame_dets.begin(), frame_dets.end());
  }

  DatasetPaths paths;
  paths.map = out_dir + "/map.txt";
  paths.gt_trajectory = out_dir + "/gt.txt";
  paths.odometry = out_dir + "/odometry.txt";
  paths.detections = out_dir + "/detections.txt";
  paths.intrinsics = out_dir + "/intrinsics.json";
  save_line_map(paths.map, map);
  save_trajectory(paths.gt_trajectory, gt);
  save_trajectory(paths.odometry, odom);
  save_detections(paths.detections, detections);
  save_intrinsics(paths.intrinsics, k);
  return paths;
}

}  // namespace synth
}  // namespace lineloc
