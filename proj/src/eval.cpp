#include "lineloc/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "lineloc/errors.hpp"
#include "lineloc/io.hpp"

namespace lineloc {
namespace eval {

std::vector<PosePair> associate(const Trajectory& a, const Trajectory& b,
                                double max_dt) {
  if (!(max_dt > 0.0)) {
    throw std::invalid_argument("associate: max_dt must be positive");
  }
  validate_timestamps(a);
  validate_timestamps(b);

  struct Candidate {
    double dt;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // b is sorted by time; only a window of entries can be within max_dt.
    const auto lower = std::lower_bound(
        b.begin(), b.end(), a[i].timestamp - max_dt,
        [](const StampedPose& sp, double t) { return sp.timestamp < t; });
    for (auto it = lower; it != b.end() && it->timestamp <= a[i].timestamp + max_dt;
         ++it) {
      candidates.push_back(
          {std::abs(it->timestamp - a[i].timestamp), i,
           static_cast<std::size_t>(it - b.begin())});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& lhs, const Candidate& rhs) {
              if (lhs.dt != rhs.dt) return lhs.dt < rhs.dt;
              if (lhs.i != rhs.i) return lhs.i < rhs.i;
              return lhs.j < rhs.j;
            });

  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  std::vector<PosePair> pairs;
  for (const Candidate& c : candidates) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = true;
    used_b[c.j] = true;
    pairs.push_back({a[c.i].timestamp, b[c.j].timestamp, a[c.i].pose,
                     b[c.j].pose});
  }
  if (pairs.empty()) {
    throw NoOverlapError("associate: no timestamp pairs within max_dt");
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const PosePair& lhs, const PosePair& rhs) {
              return lhs.t_a < rhs.t_a;
            });
  return pairs;
}

AlignmentResult align(const Trajectory& est, const Trajectory& gt,
                      std::size_t n_poses, double max_dt) {
  auto pairs = associate(est, gt, max_dt);
  if (pairs.size() > n_poses) pairs.resize(n_poses);
  if (pairs.size() < 3) {
    throw DegenerateAlignmentError("align: need at least 3 paired poses");
  }

  Eigen::Vector3d centroid_est = Eigen::Vector3d::Zero();
  Eigen::Vector3d centroid_gt = Eigen::Vector3d::Zero();
  for (const PosePair& p : pairs) {
    centroid_est += p.a.center();
    centroid_gt += p.b.center();
  }
  centroid_est /= static_cast<double>(pairs.size());
  centroid_gt /= static_cast<double>(pairs.size());

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  double spread = 0.0;
  for (const PosePair& p : pairs) {
    const Eigen::Vector3d de = p.a.center() - centroid_est;
    const Eigen::Vector3d dg = p.b.center() - centroid_gt;
    cross += dg * de.transpose();
    spread += de.squaredNorm();
  }

  // Collinear positions leave a rotation about the line unconstrained.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (spread < 1e-18 || sv(1) <= 1e-10 * std::max(sv(0), 1e-300)) {
    throw DegenerateAlignmentError("align: paired positions are collinear");
  }

  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  AlignmentResult out;
  out.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  out.translation = centroid_gt - out.rotation * centroid_est;
  out.pairs_used = static_cast<int>(pairs.size());
  return out;
}

double ate_rmse(const Trajectory& est, const Trajectory& gt,
                const AlignmentResult& alignment, double max_dt) {
  const auto pairs = associate(est, gt, max_dt);
  double sum_sq = 0.0;
  for (const PosePair& p : pairs) {
    sum_sq += (alignment.apply(p.a.center()) - p.b.center()).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

std::vector<std::optional<RpeEntry>> rpe_over_lengths(
    const Trajectory& est, const Trajectory& gt,
    const std::vector<double>& lengths, double max_dt) {
  const auto pairs = associate(est, gt, max_dt);
  const std::size_t n = pairs.size();

  // Accumulated ground-truth path length along the paired sequence.
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cum[i] = cum[i - 1] + (pairs[i].b.center() - pairs[i - 1].b.center()).norm();
  }

  std::vector<std::optional<RpeEntry>> out;
  out.reserve(lengths.size());
  for (double length : lengths) {
    if (!(length > 0.0)) {
      throw std::invalid_argument("rpe: segment lengths must be positive");
    }
    RpeEntry entry;
    entry.length = length;
    for (std::size_t i = 0; i < n; ++i) {
      // First index whose accumulated path from i reaches the length.
      const auto it = std::lower_bound(cum.begin() + i, cum.end(),
                                       cum[i] + length);
      if (it == cum.end()) break;
      const std::size_t j = static_cast<std::size_t>(it - cum.begin());
      const Pose rel_gt = compose(pairs[j].b, invert(pairs[i].b));
      const Pose rel_est = compose(pairs[j].a, invert(pairs[i].a));
      const Pose err = compose(invert(rel_gt), rel_est);
      entry.errors.push_back(err.center().norm());
    }
    if (entry.errors.empty()) {
      out.push_back(std::nullopt);
      continue;
    }
    double sum_sq = 0.0;
    for (double e : entry.errors) sum_sq += e * e;
    entry.segments = entry.errors.size();
    entry.rmse = std::sqrt(sum_sq / static_cast<double>(entry.errors.size()));
    out.push_back(std::move(entry));
  }
  return out;
}

double loop_gap(const Trajectory& traj) {
  if (traj.size() < 2) {
    throw std::invalid_argument("loop_gap: need at least 2 poses");
  }
  return (traj.back().pose.center() - traj.front().pose.center()).norm();
}

double path_length(const Trajectory& traj) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    total += (traj[i].pose.center() - traj[i - 1].pose.center()).norm();
  }
  return total;
}

namespace {

struct BoxStats {
  double min, q1, median, q3, max;
};

double quantile(std::vector<double> sorted, double q) {
  const double idx = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = idx - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

BoxStats box_stats(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {v.front(), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75),
          v.back()};
}

}  // namespace

void write_rpe_boxplot_svg(const std::string& path,
                           const std::vector<BoxplotSeries>& series) {
  const double width = 640.0, height = 420.0;
  const double ml = 70.0, mr = 20.0, mt = 30.0, mb = 50.0;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double max_err = 1e-12;
  std::size_t n_groups = 0;
  for (const auto& s : series) {
    n_groups = std::max(n_groups, s.data.size());
    for (const auto& [len, errs] : s.data) {
      for (double e : errs) max_err = std::max(max_err, e);
    }
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2
      << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
         "Relative translation error vs segment length</text>\n";

  const auto y_of = [&](double err) {
    return mt + plot_h * (1.0 - err / (1.05 * max_err));
  };
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double err = 1.05 * max_err * tick / 4.0;
    const double y = y_of(err);
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(err)
        << "</text>\n";
  }
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" transform=\"rotate(-90 16 " << mt + plot_h / 2
      << ")\" text-anchor=\"middle\" font-size=\"12\">error (m)</text>\n";
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">segment length (m)</text>\n";

  const char* colors[] = {"#2c7fb8", "#d95f0e", "#31a354", "#756bb1"};
  const double group_w = plot_w / std::max<std::size_t>(1, n_groups);
  const double box_w = 0.8 * group_w / std::max<std::size_t>(1, series.size());

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    for (std::size_t g = 0; g < series[s].data.size(); ++g) {
      const auto& [len, errs] = series[s].data[g];
      if (errs.empty()) continue;
      const BoxStats st = box_stats(errs);
      const double cx =
          ml + group_w * (g + 0.5) + box_w * (s - 0.5 * (series.size() - 1));
      const double x0 = cx - 0.4 * box_w, x1 = cx + 0.4 * box_w;
      // whiskers
      out << "<line x1=\"" << cx << "\" y1=\"" << y_of(st.min) << "\" x2=\""
          << cx << "\" y2=\"" << y_of(st.max) << "\" stroke=\"" << color
          << "\"/>\n";
      // box
      out << "<rect x=\"" << x0 << "\" y=\"" << y_of(st.q3) << "\" width=\""
          << x1 - x0 << "\" height=\"" << y_of(st.q1) - y_of(st.q3)
          << "\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\""
          << color << "\"/>\n";
      // median
      out << "<line x1=\"" << x0 << "\" y1=\"" << y_of(st.median)
          << "\" x2=\"" << x1 << "\" y2=\"" << y_of(st.median)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      if (s == 0) {
        out << "<text x=\"" << ml + group_w * (g + 0.5) << "\" y=\""
            << mt + plot_h + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">"
            << format_double(len) << "</text>\n";
      }
    }
    out << "<rect x=\"" << ml + 10 + 120.0 * s << "\" y=\"" << mt - 16
        << "\" width=\"12\" height=\"12\" fill=\"" << color
        << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
    out << "<text x=\"" << ml + 26 + 120.0 * s << "\" y=\"" << mt - 6
        << "\" font-size=\"11\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace eval
}  // namespace lineloc
