#include "lineloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lineloc/errors.hpp"

namespace lineloc {

namespace {

// %.17g always round-trips; prefer the shortest precision that does, so the
// emitted files stay stable and readable.
std::string shortest_roundtrip(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) fields.push_back(tok);
  return fields;
}

bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

double parse_field(const std::string& tok, const std::string& path,
                   std::size_t lineno) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(path, lineno, "non-numeric field '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v)) {
    throw ParseError(path, lineno, "non-numeric field '" + tok + "'");
  }
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  return out;
}

}  // namespace

std::string format_double(double v) { return shortest_roundtrip(v); }

LineMap load_line_map(const std::string& path, std::size_t* dropped_count) {
  std::ifstream in = open_input(path);
  std::vector<LineSegment3> segments;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw ParseError(path, lineno,
                       "expected 6 fields, got " + std::to_string(fields.size()));
    }
    LineSegment3 seg;
    for (int i = 0; i < 3; ++i) seg.start[i] = parse_field(fields[i], path, lineno);
    for (int i = 0; i < 3; ++i) seg.end[i] = parse_field(fields[3 + i], path, lineno);
    segments.push_back(seg);
  }
  return make_line_map(std::move(segments), dropped_count);
}

void save_line_map(const std::string& path, const LineMap& map) {
  std::ofstream out = open_output(path);
  out << "# x1 y1 z1 x2 y2 z2\n";
  for (const LineSegment3& seg : map.segments) {
    out << format_double(seg.start.x()) << ' ' << format_double(seg.start.y())
        << ' ' << format_double(seg.start.z()) << ' '
        << format_double(seg.end.x()) << ' ' << format_double(seg.end.y())
        << ' ' << format_double(seg.end.z()) << '\n';
  }
}

std::vector<LineSegment2> load_detections(const std::string& path,
                                          std::size_t* dropped_count) {
  std::ifstream in = open_input(path);
  std::vector<LineSegment2> detections;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dropped = 0;
  long last_frame = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(path, lineno,
                       "expected 5 fields, got " + std::to_string(fields.size()));
    }
    LineSegment2 det;
    const double frame = parse_field(fields[0], path, lineno);
    det.frame_id = static_cast<long>(frame);
    if (static_cast<double>(det.frame_id) != frame || det.frame_id < 0) {
      throw ParseError(path, lineno, "frame_id must be a non-negative integer");
    }
    if (det.frame_id < last_frame) {
      throw ParseError(path, lineno, "frame_ids must be non-decreasing");
    }
    last_frame = det.frame_id;
    det.start.x() = parse_field(fields[1], path, lineno);
    det.start.y() = parse_field(fields[2], path, lineno);
    det.end.x() = parse_field(fields[3], path, lineno);
    det.end.y() = parse_field(fields[4], path, lineno);
    if (det.length() < kMinDetectionLength) {
      ++dropped;
      continue;
    }
    detections.push_back(det);
  }
  if (dropped_count) *dropped_count = dropped;
  return detections;
}

void save_detections(const std::string& path,
                     const std::vector<LineSegment2>& detections) {
  std::ofstream out = open_output(path);
  out << "# frame_id x1 y1 x2 y2\n";
  for (const LineSegment2& det : detections) {
    out << det.frame_id << ' ' << format_double(det.start.x()) << ' '
        << format_double(det.start.y()) << ' ' << format_double(det.end.x())
        << ' ' << format_double(det.end.y()) << '\n';
  }
}

Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  // Canonical sign keeps file output deterministic.
  if (q.w() < 0.0 ||
      (q.w() == 0.0 && (q.x() < 0.0 || (q.x() == 0.0 && (q.y() < 0.0 ||
       (q.y() == 0.0 && q.z() < 0.0)))))) {
    q.coeffs() = -q.coeffs();
  }
  return Eigen::Vector4d(q.x(), q.y(), q.z(), q.w());
}

Eigen::Matrix3d quaternion_to_rotation(const Eigen::Vector4d& q) {
  Eigen::Quaterniond quat(q[3], q[0], q[1], q[2]);
  const double n = quat.norm();
  if (!(n > 1e-12)) {
    throw std::invalid_argument("quaternion has near-zero norm");
  }
  quat.coeffs() /= n;
  return quat.toRotationMatrix();
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in = open_input(path);
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 8) {
      throw ParseError(path, lineno,
                       "expected 8 fields, got " + std::to_string(fields.size()));
    }
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parse_field(fields[i], path, lineno);

    // Row is camera-to-world; store world-to-camera.
    const Eigen::Matrix3d r_cw =
        quaternion_to_rotation(Eigen::Vector4d(v[4], v[5], v[6], v[7]));
    const Eigen::Vector3d center(v[1], v[2], v[3]);
    Pose pose;
    pose.rotation = r_cw.transpose();
    pose.translation = -(pose.rotation * center);

    if (!traj.empty() && v[0] <= traj.back().timestamp) {
      throw ParseError(path, lineno, "timestamps must be strictly increasing");
    }
    traj.push_back({v[0], pose});
  }
  return traj;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_output(path);
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (const StampedPose& sp : traj) {
    const Eigen::Matrix3d r_cw = sp.pose.rotation.transpose();
    const Eigen::Vector3d center = -(r_cw * sp.pose.translation);
    const Eigen::Vector4d q = rotation_to_quaternion(r_cw);
    out << format_double(sp.timestamp) << ' ' << format_double(center.x())
        << ' ' << format_double(center.y()) << ' '
        << format_double(center.z()) << ' ' << format_double(q[0]) << ' '
        << format_double(q[1]) << ' ' << format_double(q[2]) << ' '
        << format_double(q[3]) << '\n';
  }
}

CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 1, std::string("invalid JSON: ") + e.what());
  }
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 1, std::string("missing intrinsics field: ") + e.what());
  }
  validate(k);
  return k;
}

void save_intrinsics(const std::string& path, const CameraIntrinsics& k) {
  nlohmann::json j;
  j["fx"] = k.fx;
  j["fy"] = k.fy;
  j["cx"] = k.cx;
  j["cy"] = k.cy;
  j["width"] = k.width;
  j["height"] = k.height;
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

void save_diagnostics(const std::string& path,
                      const std::vector<FrameResult>& frames) {
  std::ofstream out = open_output(path);
  out << "frame_id,mode,correspondence_count,initial_cost,final_cost,"
         "lm_iterations,normal_cond\n";
  for (const FrameResult& f : frames) {
    out << f.frame_id << ','
        << (f.mode == FrameMode::kOptimized ? "optimized" : "fallback") << ','
        << f.correspondence_count << ',' << format_double(f.initial_cost())
        << ',' << format_double(f.final_cost()) << ',' << f.lm_iterations()
        << ',' << format_double(f.normal_condition()) << '\n';
  }
}

void save_metrics(
    const std::string& path,
    const std::vector<std::tuple<std::string, double, std::string>>& rows) {
  std::ofstream out = open_output(path);
  out << "metric,value,unit\n";
  for (const auto& [metric, value, unit] : rows) {
    out << metric << ',' << format_double(value) << ',' << unit << '\n';
  }
}

}  // namespace lineloc
