#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>

#include "lineloc/errors.hpp"
#include "lineloc/eval.hpp"
#include "lineloc/io.hpp"
#include "lineloc/parallel.hpp"
#include "lineloc/synth.hpp"
#include "lineloc/tracker.hpp"

namespace {

using namespace lineloc;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct SynthArgs {
  std::string scene = "box-room";
  std::vector<double> dims = {10.0, 8.0, 3.0};
  int density = 40;
  int n_frames = 100;
  std::string pattern = "loop";
  std::uint64_t seed = 0;
  synth::NoiseSpec noise;
  std::string out_dir = "dataset";
  double fx = 300.0, fy = 300.0, cx = 320.0, cy = 240.0;
  int width = 640, height = 480;
};

struct TrackArgs {
  std::string map_path, detections_path, odometry_path, intrinsics_path;
  std::vector<double> init_pose;  // tx ty tz qx qy qz qw (camera-to-world)
  std::string out_dir = ".";
  double theta0_deg = 10.0;
  double d0_px = 25.0;
  std::size_t min_corr = 8;
  std::size_t m0 = 40;
  std::size_t window = 10;
  int refine_iters = 3;
  double tighten = 0.8;
};

struct EvalArgs {
  std::vector<std::string> est_paths;
  std::string gt_path;
  std::size_t align_n = 200;
  std::vector<double> lengths = {7.0, 15.0, 22.0, 30.0, 37.0};
  double max_dt = 0.02;
  std::string out_dir = ".";
};

Pose parse_init_pose(const std::vector<double>& v) {
  if (v.size() != 7) {
    throw CLI::ValidationError("--init-pose expects 7 values: tx ty tz qx qy qz qw");
  }
  const Eigen::Matrix3d r_cw =
      quaternion_to_rotation(Eigen::Vector4d(v[3], v[4], v[5], v[6]));
  Pose pose;
  pose.rotation = r_cw.transpose();
  pose.translation = -(pose.rotation * Eigen::Vector3d(v[0], v[1], v[2]));
  return pose;
}

int run_synth(const SynthArgs& args) {
  synth::SceneSpec scene;
  if (args.scene == "box-room") {
    scene.kind = synth::SceneKind::kBoxRoom;
  } else if (args.scene == "corridor") {
    scene.kind = synth::SceneKind::kCorridor;
  } else if (args.scene == "building-facade") {
    scene.kind = synth::SceneKind::kBuildingFacade;
  } else {
    std::cerr << "error: unknown scene kind '" << args.scene << "'\n";
    return kExitUsage;
  }
  if (args.n_frames < 2) {
    std::cerr << "error: --frames must be at least 2\n";
    return kExitUsage;
  }
  if (args.dims.size() != 3) {
    std::cerr << "error: --dims expects 3 values\n";
    return kExitUsage;
  }
  scene.dimensions = Eigen::Vector3d(args.dims[0], args.dims[1], args.dims[2]);
  scene.edge_density = args.density;
  scene.seed = args.seed;

  const synth::PathPattern pattern = args.pattern == "lawnmower"
                                         ? synth::PathPattern::kLawnmower
                                         : synth::PathPattern::kLoop;
  if (args.pattern != "loop" && args.pattern != "lawnmower") {
    std::cerr << "error: unknown pattern '" << args.pattern << "'\n";
    return kExitUsage;
  }

  CameraIntrinsics k;
  k.fx = args.fx;
  k.fy = args.fy;
  k.cx = args.cx;
  k.cy = args.cy;
  k.width = args.width;
  k.height = args.height;
  validate(k);

  const synth::DatasetPaths paths = synth::emit_dataset(
      scene, args.noise, args.n_frames, pattern, k, args.out_dir);

  std::size_t dropped = 0;
  const LineMap map = load_line_map(paths.map, &dropped);
  const auto detections = load_detections(paths.detections);
  const Trajectory gt = load_trajectory(paths.gt_trajectory);

  std::cout << "dataset manifest (" << args.out_dir << ")\n"
            << "  map:        " << paths.map << "  (" << map.size()
            << " segments)\n"
            << "  gt:         " << paths.gt_trajectory << "  (" << gt.size()
            << " poses)\n"
            << "  odometry:   " << paths.odometry << "\n"
            << "  detections: " << paths.detections << "  ("
            << detections.size() << " segments)\n"
            << "  intrinsics: " << paths.intrinsics << "\n"
            << "  seed:       " << args.seed << "\n";
  return kExitOk;
}

int run_track(const TrackArgs& args) {
  TrackerConfig cfg;
  cfg.theta0 = args.theta0_deg * M_PI / 180.0;
  cfg.d0 = args.d0_px;
  cfg.min_correspondences = args.min_corr;
  cfg.m0 = args.m0;
  cfg.window_n = args.window;
  cfg.refine_iterations = args.refine_iters;
  cfg.tighten_factor = args.tighten;

  const LineMap map = load_line_map(args.map_path);
  const CameraIntrinsics k = load_intrinsics(args.intrinsics_path);
  const Trajectory odometry = load_trajectory(args.odometry_path);
  const std::vector<LineSegment2> detections =
      load_detections(args.detections_path);
  const Pose initial_pose = parse_init_pose(args.init_pose);

  std::map<long, std::vector<LineSegment2>> by_frame;
  for (const LineSegment2& det : detections) {
    if (det.frame_id >= static_cast<long>(odometry.size())) {
      throw std::runtime_error(
          "detections reference frame " + std::to_string(det.frame_id) +
          " but odometry has " + std::to_string(odometry.size()) + " rows");
    }
    by_frame[det.frame_id].push_back(det);
  }

  std::vector<FrameInput> inputs;
  inputs.reserve(odometry.size());
  for (std::size_t i = 0; i < odometry.size(); ++i) {
    FrameInput input;
    input.frame_id = static_cast<long>(i);
    input.timestamp = odometry[i].timestamp;
    input.odometry_pose = odometry[i].pose;
    if (auto it = by_frame.find(input.frame_id); it != by_frame.end()) {
      input.detections = std::move(it->second);
    }
    inputs.push_back(std::move(input));
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SequenceResult result = run_sequence(inputs, map, k, cfg, initial_pose);
  const auto t1 = std::chrono::steady_clock::now();
  const double total_s = std::chrono::duration<double>(t1 - t0).count();

  std::filesystem::create_directories(args.out_dir);
  save_trajectory(args.out_dir + "/trajectory.txt", result.trajectory);
  save_diagnostics(args.out_dir + "/diagnostics.csv", result.frames);

  std::size_t fallback = 0, corr_total = 0;
  for (const FrameResult& f : result.frames) {
    if (f.mode == FrameMode::kFallback) ++fallback;
    corr_total += f.correspondence_count;
  }
  std::printf("frames:               %zu\n", result.frames.size());
  std::printf("fallback frames:      %zu\n", fallback);
  std::printf("mean correspondences: %.2f\n",
              static_cast<double>(corr_total) / result.frames.size());
  std::printf("wall time per frame:  %.3f ms\n",
              1e3 * total_s / result.frames.size());
  return kExitOk;
}

int run_eval(const EvalArgs& args) {
  const Trajectory gt = load_trajectory(args.gt_path);
  std::filesystem::create_directories(args.out_dir);

  std::vector<std::tuple<std::string, double, std::string>> rows;
  std::vector<eval::BoxplotSeries> series;

  for (const std::string& est_path : args.est_paths) {
    const Trajectory est = load_trajectory(est_path);
    const std::string label =
        std::filesystem::path(est_path).stem().string();

    std::size_t align_n = args.align_n;
    if (align_n > est.size()) {
      std::cerr << "warning: --align-n " << align_n << " clamped to "
                << est.size() << " poses\n";
      align_n = est.size();
    }

    const eval::AlignmentResult alignment =
        eval::align(est, gt, align_n, args.max_dt);
    const double ate = eval::ate_rmse(est, gt, alignment, args.max_dt);
    const double gap = eval::loop_gap(est);
    const auto rpe =
        eval::rpe_over_lengths(est, gt, args.lengths, args.max_dt);

    rows.emplace_back(label + ".ate_rmse", ate, "m");
    rows.emplace_back(label + ".loop_gap", gap, "m");
    rows.emplace_back(label + ".aligned_pairs",
                      static_cast<double>(alignment.pairs_used), "count");

    eval::BoxplotSeries box;
    box.label = label;
    for (std::size_t i = 0; i < rpe.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s.rpe_rmse_%gm", label.c_str(),
                    args.lengths[i]);
      if (rpe[i]) {
        rows.emplace_back(name, rpe[i]->rmse, "m");
        box.data.emplace_back(args.lengths[i], rpe[i]->errors);
      } else {
        std::cerr << "warning: segment length " << args.lengths[i]
                  << " m exceeds the traveled path for " << label << "\n";
      }
    }
    series.push_back(std::move(box));

    std::printf("%s: ate_rmse=%.6f m  loop_gap=%.6f m\n", label.c_str(), ate,
                gap);
  }

  save_metrics(args.out_dir + "/metrics.csv", rows);
  eval::write_rpe_boxplot_svg(args.out_dir + "/rpe_boxplot.svg", series);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monocular camera localization in prior 3D line maps"};
  app.require_subcommand(1);

  int threads = static_cast<int>(std::thread::hardware_concurrency());
  app.add_option("--threads", threads,
                 "Worker threads for per-frame line classification/matching "
                 "(outputs are identical at any value)")
      ->capture_default_str();

  SynthArgs synth_args;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--scene", synth_args.scene,
                        "Scene kind: box-room, corridor, building-facade")
      ->capture_default_str();
  synth_cmd->add_option("--dims", synth_args.dims,
                        "Scene dimensions in meters: dx dy dz")
      ->expected(3)
      ->capture_default_str();
  synth_cmd->add_option("--density", synth_args.density,
                        "Extra interior lines beyond the wireframe")
      ->capture_default_str();
  synth_cmd->add_option("--frames", synth_args.n_frames, "Number of keyframes")
      ->capture_default_str();
  synth_cmd->add_option("--pattern", synth_args.pattern,
                        "Trajectory pattern: loop or lawnmower")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "RNG seed")
      ->capture_default_str();
  synth_cmd->add_option("--odom-rot-sigma", synth_args.noise.odom_rot_sigma,
                        "Odometry rotation noise per step (rad)")
      ->capture_default_str();
  synth_cmd
      ->add_option("--odom-trans-sigma", synth_args.noise.odom_trans_sigma,
                   "Odometry translation noise per step (m)")
      ->capture_default_str();
  synth_cmd->add_option("--odom-drift", synth_args.noise.odom_drift_rate,
                        "Systematic odometry drift (fraction of distance)")
      ->capture_default_str();
  synth_cmd->add_option("--det-sigma", synth_args.noise.det_endpoint_sigma,
                        "Detection endpoint noise (px)")
      ->capture_default_str();
  synth_cmd->add_option("--det-dropout", synth_args.noise.det_dropout_prob,
                        "Detection dropout probability")
      ->capture_default_str();
  synth_cmd->add_option("--clutter", synth_args.noise.clutter_per_frame,
                        "Clutter detections per frame")
      ->capture_default_str();
  synth_cmd->add_option("--fx", synth_args.fx, "Focal length x (px)")
      ->capture_default_str();
  synth_cmd->add_option("--fy", synth_args.fy, "Focal length y (px)")
      ->capture_default_str();
  synth_cmd->add_option("--cx", synth_args.cx, "Principal point x (px)")
      ->capture_default_str();
  synth_cmd->add_option("--cy", synth_args.cy, "Principal point y (px)")
      ->capture_default_str();
  synth_cmd->add_option("--width", synth_args.width, "Image width (px)")
      ->capture_default_str();
  synth_cmd->add_option("--height", synth_args.height, "Image height (px)")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")
      ->capture_default_str();

  TrackArgs track_args;
  auto* track_cmd = app.add_subcommand(
      "track", "Track camera poses against a 3D line map");
  track_cmd->add_option("--map", track_args.map_path, "3D line map file")
      ->required();
  track_cmd
      ->add_option("--detections", track_args.detections_path,
                   "2D line detections file")
      ->required();
  track_cmd
      ->add_option("--odometry", track_args.odometry_path,
                   "Odometry trajectory file")
      ->required();
  track_cmd
      ->add_option("--intrinsics", track_args.intrinsics_path,
                   "Camera intrinsics JSON")
      ->required();
  track_cmd
      ->add_option("--init-pose", track_args.init_pose,
                   "Initial camera-to-world pose: tx ty tz qx qy qz qw")
      ->expected(7)
      ->required();
  track_cmd->add_option("--out", track_args.out_dir, "Output directory")
      ->capture_default_str();
  track_cmd
      ->add_option("--theta0-deg", track_args.theta0_deg,
                   "Angle threshold (degrees)")
      ->capture_default_str();
  track_cmd
      ->add_option("--d0-px", track_args.d0_px,
                   "Endpoint-to-line distance threshold (px)")
      ->capture_default_str();
  track_cmd
      ->add_option("--min-corr", track_args.min_corr,
                   "Minimum correspondences before falling back to odometry")
      ->capture_default_str();
  track_cmd
      ->add_option("--m0", track_args.m0,
                   "Per-frame correspondence cap (largest overlap kept)")
      ->capture_default_str();
  track_cmd->add_option("--window", track_args.window,
                        "Previous keyframes in the sliding window")
      ->capture_default_str();
  track_cmd
      ->add_option("--refine-iters", track_args.refine_iters,
                   "Match/optimize refinement rounds per frame")
      ->capture_default_str();
  track_cmd
      ->add_option("--tighten", track_args.tighten,
                   "Threshold tightening factor per refinement round")
      ->capture_default_str();

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate trajectories against ground truth");
  eval_cmd
      ->add_option("--est", eval_args.est_paths,
                   "Estimated trajectory file (repeatable for comparison)")
      ->required();
  eval_cmd->add_option("--gt", eval_args.gt_path, "Ground-truth trajectory")
      ->required();
  eval_cmd
      ->add_option("--align-n", eval_args.align_n,
                   "Number of beginning poses used for alignment")
      ->capture_default_str();
  eval_cmd
      ->add_option("--lengths", eval_args.lengths,
                   "RPE segment lengths in meters")
      ->capture_default_str();
  eval_cmd->add_option("--max-dt", eval_args.max_dt,
                       "Timestamp association tolerance (s)")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out_dir, "Output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  set_thread_count(std::max(1, threads));

  try {
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (track_cmd->parsed()) return run_track(track_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
