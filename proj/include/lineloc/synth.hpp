#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lineloc/geometry.hpp"
#include "lineloc/linemap.hpp"
#include "lineloc/matching.hpp"
#include "lineloc/trajectory.hpp"

namespace lineloc {
namespace synth {

enum class SceneKind { kBoxRoom, kCorridor, kBuildingFacade };

struct SceneSpec {
  SceneKind kind = SceneKind::kBoxRoom;
  Eigen::Vector3d dimensions = Eigen::Vector3d(10.0, 8.0, 3.0);  // meters
  int edge_density = 0;  // extra interior lines beyond the wireframe
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double odom_rot_sigma = 0.0;     // rad per step
  double odom_trans_sigma = 0.0;   // m per step
  double odom_drift_rate = 0.0;    // fraction of traveled distance
  double det_endpoint_sigma = 0.0; // px
  double det_dropout_prob = 0.0;   // in [0, 1]
  int clutter_per_frame = 0;
};

void validate(const SceneSpec& spec);
void validate(const NoiseSpec& noise);

enum class PathPattern { kLoop, kLawnmower };

/// Axis-aligned wireframe edges of the scene plus `edge_density` seeded
/// interior lines, all inside the scene's bounding volume. Deterministic per
/// (spec, seed).
LineMap generate_scene(const SceneSpec& spec);

/// Smooth camera path inside the scene looking at scene content, one pose per
/// frame at 15 Hz timestamps. The loop pattern returns to its starting pose.
Trajectory generate_trajectory(const SceneSpec& spec, int n_frames,
                               PathPattern pattern, std::uint64_t seed);

/// Composes each ground-truth inter-frame motion with sampled noise plus a
/// systematic drift bias (fixed world direction drawn from the seed), then
/// integrates from the true initial pose. All-zero noise returns gt
/// unchanged.
Trajectory corrupt_odometry(const Trajectory& gt, const NoiseSpec& noise,
                            std::uint64_t seed);

/// Projects the visible lines at the ground-truth pose, perturbs endpoints
/// with isotropic Gaussian noise, applies dropout, and appends uniform
/// clutter segments (length 20-200 px). Results shorter than 2 px are
/// dropped, matching the ingestion rule.
std::vector<LineSegment2> render_detections(const LineMap& map,
                                            const Pose& gt_pose,
                                            const CameraIntrinsics& k,
                                            const NoiseSpec& noise,
                                            std::uint64_t seed, long frame_id);

/// Default synthetic camera.
CameraIntrinsics default_intrinsics();

/// Derives the per-frame RNG stream seed, so dropping one frame does not
/// reshuffle the others.
std::uint64_t frame_seed(std::uint64_t seed, long frame_id, int stream);

struct DatasetPaths {
  std::string map;
  std::string gt_trajectory;
  std::string odometry;
  std::string detections;
  std::string intrinsics;
};

/// Writes the five dataset files (map, ground-truth trajectory, odometry,
/// detections, intrinsics) into out_dir and returns their paths.
DatasetPaths emit_dataset(const SceneSpec& scene, const NoiseSpec& noise,
                          int n_frames, PathPattern pattern,
                          const CameraIntrinsics& k,
                          const std::string& out_dir);

}  // namespace synth
}  // namespace lineloc
