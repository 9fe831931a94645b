#include "lineloc/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lineloc/errors.hpp"

namespace lineloc {

namespace {

constexpr double kMinDepth = 1e-6;
constexpr double kLambdaMax = 1e12;

struct Evaluation {
  Eigen::VectorXd r;
  Eigen::MatrixXd jacobian;  // empty unless requested
  int saturated_endpoints = 0;
  double cost = 0.0;  // 0.5 * sum w_i r_i^2 (Huber-weighted when enabled)
};

// Residual of one endpoint under pose_n = offset * current, plus its 1x6
// Jacobian w.r.t. a left-multiplicative twist perturbation of `current`.
void endpoint_residual(const Eigen::Vector3d& p_world,
                       const InfiniteLineCoeffs& coeffs, const Pose& current,
                       const Pose& offset, const CameraIntrinsics& k,
                       bool with_jacobian, double* r_out,
                       Eigen::Matrix<double, 1, 6>* j_out, bool* saturated) {
  const Eigen::Vector3d y = current.apply(p_world);  // current camera frame
  const Eigen::Vector3d pc = offset.apply(y);        // entry camera frame
  const double w = pc.z();
  if (w <= kMinDepth) {
    *r_out = kSaturationResidualPx;
    if (with_jacobian) j_out->setZero();
    *saturated = true;
    return;
  }
  const double u = k.fx * pc.x() / w + k.cx;
  const double v = k.fy * pc.y() / w + k.cy;
  *r_out = coeffs.a * u + coeffs.b * v + coeffs.c;
  *saturated = false;

  if (!with_jacobian) return;
  // dr/dpc through the dehomogenized pinhole model.
  const double inv_w = 1.0 / w;
  Eigen::RowVector3d dr_dpc;
  dr_dpc.x() = coeffs.a * k.fx * inv_w;
  dr_dpc.y() = coeffs.b * k.fy * inv_w;
  dr_dpc.z() = -(coeffs.a * k.fx * pc.x() + coeffs.b * k.fy * pc.y()) *
               inv_w * inv_w;
  // Left perturbation of `current`: d(exp(e)*y)/de = [-hat(y) | I].
  Eigen::Matrix<double, 3, 6> dy_de;
  dy_de.block<3, 3>(0, 0) = -hat(y);
  dy_de.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
  *j_out = dr_dpc * offset.rotation * dy_de;
}

Evaluation evaluate(const Pose& current, const SlidingWindow& window,
                    const CameraIntrinsics& k, const SolverConfig& cfg,
                    bool with_jacobian) {
  const std::size_t n_res = 2 * window.correspondence_count();
  Evaluation eval;
  eval.r.resize(n_res);
  if (with_jacobian) eval.jacobian.resize(n_res, 6);

  std::size_t row = 0;
  for (const WindowEntry& entry : window.entries()) {
    const Pose offset = exp_map(entry.delta_xi);
    for (const LineObservation& obs : entry.observations) {
      for (const Eigen::Vector3d* p : {&obs.p3_start, &obs.p3_end}) {
        double r = 0.0;
        Eigen::Matrix<double, 1, 6> j;
        bool saturated = false;
        endpoint_residual(*p, obs.coeffs, current, offset, k, with_jacobian,
                          &r, &j, &saturated);
        eval.r[row] = r;
        if (with_jacobian) eval.jacobian.row(row) = j;
        if (saturated) ++eval.saturated_endpoints;
        ++row;
      }
    }
  }

  // Cost with optional Huber weighting (IRLS form).
  double cost = 0.0;
  for (Eigen::Index i = 0; i < eval.r.size(); ++i) {
    const double r = eval.r[i];
    if (cfg.huber_delta > 0.0 && std::abs(r) > cfg.huber_delta) {
      cost += cfg.huber_delta * (std::abs(r) - 0.5 * cfg.huber_delta);
    } else {
      cost += 0.5 * r * r;
    }
  }
  eval.cost = cost;
  return eval;
}

double huber_weight(double r, double delta) {
  if (delta <= 0.0) return 1.0;
  const double a = std::abs(r);
  return a <= delta ? 1.0 : delta / a;
}

}  // namespace

std::size_t SlidingWindow::correspondence_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.observations.size();
  return n;
}

std::vector<double> residuals(const Twist& xi, const SlidingWindow& window,
                              const CameraIntrinsics& k) {
  const Evaluation eval =
      evaluate(exp_map(xi), window, k, SolverConfig{}, false);
  return {eval.r.data(), eval.r.data() + eval.r.size()};
}

SolveReport solve_pose(const Pose& initial, const SlidingWindow& window,
                       const CameraIntrinsics& k, const SolverConfig& cfg) {
  if (window.correspondence_count() == 0) {
    throw std::invalid_argument("solve_pose: window has no correspondences");
  }

  Pose current = initial;
  Evaluation eval = evaluate(current, window, k, cfg, true);
  if (eval.saturated_endpoints == eval.r.size()) {
    throw NoValidResidualsError("solve_pose: all residuals saturated");
  }
  if (!std::isfinite(eval.cost)) {
    throw NumericFailureError("solve_pose: non-finite initial cost");
  }

  SolveReport report;
  report.initial_cost = eval.cost;
  report.residual_count = static_cast<int>(eval.r.size());

  double lambda = cfg.initial_lambda;
  double cost = eval.cost;
  bool converged = false;
  int iterations = 0;

  for (; iterations < cfg.max_iterations && !converged; ++iterations) {
    // Weighted normal equations (weights are 1 unless Huber is enabled).
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (Eigen::Index i = 0; i < eval.r.size(); ++i) {
      const double wgt = huber_weight(eval.r[i], cfg.huber_delta);
      const Eigen::Matrix<double, 1, 6> row = eval.jacobian.row(i);
      jtj.noalias() += wgt * row.transpose() * row;
      jtr.noalias() += wgt * row.transpose() * eval.r[i];
    }

    bool accepted = false;
    while (lambda <= kLambdaMax) {
      const Eigen::Matrix<double, 6, 6> damped =
          jtj + lambda * Eigen::Matrix<double, 6, 6>::Identity();
      const Twist step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        throw NumericFailureError("solve_pose: non-finite step");
      }
      if (step.norm() < cfg.step_tolerance) {
        converged = true;
        break;
      }
      const Pose candidate = compose(exp_map(step), current);
      const Evaluation trial = evaluate(candidate, window, k, cfg, true);
      if (!std::isfinite(trial.cost)) {
        throw NumericFailureError("solve_pose: non-finite cost");
      }
      if (trial.cost < cost) {
        const double rel_drop = (cost - trial.cost) / std::max(cost, 1e-300);
        current = candidate;
        eval = trial;
        cost = trial.cost;
        lambda = std::max(lambda * cfg.lambda_down, 1e-18);
        accepted = true;
        if (rel_drop < cfg.cost_tolerance) converged = true;
        break;
      }
      lambda *= cfg.lambda_up;
    }
    if (!accepted && !converged) {
      break;  // damping exhausted, keep the best pose found
    }
  }

  report.pose = current;
  report.final_cost = cost;
  report.iterations = iterations;
  report.converged = converged;
  report.saturated_endpoints = eval.saturated_endpoints;

  Eigen::Matrix<double, 6, 6> jtj = eval.jacobian.transpose() * eval.jacobian;
  const Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(jtj);
  report.normal_max_singular = svd.singularValues()(0);
  report.normal_min_singular = svd.singularValues()(5);
  return report;
}

namespace {

template <typename T, typename OverlapFn, typename IndexFn>
std::vector<T> cap_impl(std::vector<T> c, std::size_t m0, OverlapFn overlap,
                        IndexFn index) {
  if (c.size() <= m0) return c;
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    const double lo = overlap(c[lhs]);
    const double ro = overlap(c[rhs]);
    if (lo != ro) return lo > ro;
    return index(c[lhs]) < index(c[rhs]);
  });
  order.resize(m0);
  std::sort(order.begin(), order.end());  // restore stable input order
  std::vector<T> out;
  out.reserve(m0);
  for (std::size_t i : order) out.push_back(std::move(c[i]));
  return out;
}

}  // namespace

std::vector<Correspondence> cap_correspondences(std::vector<Correspondence> c,
                                                std::size_t m0) {
  if (m0 == 0) throw std::invalid_argument("cap_correspondences: m0 must be positive");
  return cap_impl(
      std::move(c), m0,
      [](const Correspondence& x) { return x.distance.overlap_len; },
      [](const Correspondence& x) { return x.line2_index; });
}

std::vector<LineObservation> cap_correspondences(std::vector<LineObservation> c,
                                                 std::size_t m0) {
  if (m0 == 0) throw std::invalid_argument("cap_correspondences: m0 must be positive");
  return cap_impl(
      std::move(c), m0,
      [](const LineObservation& x) { return x.corr.distance.overlap_len; },
      [](const LineObservation& x) { return x.corr.line2_index; });
}

SlidingWindow advance_window(SlidingWindow w, const Pose& inter_frame_motion,
                             WindowEntry new_entry) {
  if (new_entry.delta_xi.norm() != 0.0) {
    throw std::invalid_argument("advance_window: new entry must carry a zero offset");
  }
  const Pose motion_inv = invert(inter_frame_motion);

  auto& entries = w.entries();
  for (auto it = entries.begin(); it != entries.end();) {
    try {
      it->delta_xi = log_map(compose(exp_map(it->delta_xi), motion_inv));
      ++it;
    } catch (const NearSingularError&) {
      it = entries.erase(it);  // pathological motion, drop the entry
      w.note_singular_eviction();
    }
  }
  entries.push_back(std::move(new_entry));
  while (entries.size() > w.capacity()) {
    entries.pop_front();
  }
  return w;
}

}  // namespace lineloc
