/**
 * @file oracles.hpp
 * @brief Independent reference computations used by the unit and acceptance tests
 */
#pragma once

#include "wristed/kinematics.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace oracle {

using wristed::Vec3;
using Mat4 = Eigen::Matrix4d;

inline Mat4 hx(double a) {
  Mat4 T = Mat4::Identity();
  T(1, 1) = std::cos(a);
  T(1, 2) = -std::sin(a);
  T(2, 1) = std::sin(a);
  T(2, 2) = std::cos(a);
  return T;
}

inline Mat4 hy(double a) {
  Mat4 T = Mat4::Identity();
  T(0, 0) = std::cos(a);
  T(0, 2) = std::sin(a);
  T(2, 0) = -std::sin(a);
  T(2, 2) = std::cos(a);
  return T;
}

inline Mat4 hz(double a) {
  Mat4 T = Mat4::Identity();
  T(0, 0) = std::cos(a);
  T(0, 1) = -std::sin(a);
  T(1, 0) = std::sin(a);
  T(1, 1) = std::cos(a);
  return T;
}

inline Mat4 tz(double d) {
  Mat4 T = Mat4::Identity();
  T(2, 3) = d;
  return T;
}

struct NaivePose {
  Vec3 x_s, x_w, x_t;
  Eigen::Matrix3d R4, R5, R6, R_e;
};

/// Chain of homogeneous transforms, one joint at a time.
inline NaivePose naive_fk(const wristed::RobotModel& m, const wristed::Vec6& q) {
  const Mat4 base = m.rcm_pose.matrix();
  const Mat4 Ts = base * hx(q(0)) * hy(q(1)) * tz(q(2));
  const Mat4 T4 = Ts * hz(q(3));
  const Mat4 T5 = T4 * hx(q(4));
  const Mat4 Tw = T5 * tz(m.l_w);
  const Mat4 T6 = Tw * hy(q(5));
  const Mat4 Tt = T6 * tz(m.l_t);
  const Mat4 Te = Tt * hz(std::numbers::pi / 2.0);
  NaivePose p;
  p.x_s = Ts.block<3, 1>(0, 3);
  p.x_w = Tw.block<3, 1>(0, 3);
  p.x_t = Tt.block<3, 1>(0, 3);
  p.R4 = T4.block<3, 3>(0, 0);
  p.R5 = T5.block<3, 3>(0, 0);
  p.R6 = T6.block<3, 3>(0, 0);
  p.R_e = Te.block<3, 3>(0, 0);
  return p;
}

/// Central differences of a vector function of the joint vector.
inline Eigen::MatrixXd finite_difference(const std::function<Eigen::VectorXd(const wristed::Vec6&)>& f,
                                         const wristed::Vec6& q, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(q);
  Eigen::MatrixXd J(f0.size(), 6);
  for (int j = 0; j < 6; ++j) {
    wristed::Vec6 a = q, b = q;
    a(j) += h;
    b(j) -= h;
    J.col(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

/// Minimum over a coarse sampling of t followed by ternary refinement of the bracketing cell.
inline double brute_point_segment(const Vec3& a, const Vec3& b, const Vec3& p, int samples = 4000) {
  auto dist = [&](double t) { return (a + t * (b - a) - p).norm(); };
  int best = 0;
  for (int k = 1; k <= samples; ++k)
    if (dist(static_cast<double>(k) / samples) < dist(static_cast<double>(best) / samples)) best = k;
  double lo = std::max(0.0, (best - 1.0) / samples), hi = std::min(1.0, (best + 1.0) / samples);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (dist(m1) < dist(m2)) hi = m2;
    else lo = m1;
  }
  return dist(0.5 * (lo + hi));
}

/// Segment-segment distance by sampling one segment and solving the other with the point oracle.
inline double brute_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1,
                                    int samples = 2000) {
  auto dist = [&](double s) { return brute_point_segment(q0, q1, p0 + s * (p1 - p0), 200); };
  int best = 0;
  double best_d = dist(0.0);
  for (int k = 1; k <= samples; ++k) {
    const double d = dist(static_cast<double>(k) / samples);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  double lo = std::max(0.0, (best - 1.0) / samples), hi = std::min(1.0, (best + 1.0) / samples);
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (dist(m1) < dist(m2)) hi = m2;
    else lo = m1;
  }
  return std::min(best_d, dist(0.5 * (lo + hi)));
}

struct TangentScan {
  Vec3 best = Vec3::Zero();
  double best_score = -std::numeric_limits<double>::infinity();
  double resolution = 0.0;  ///< rad between neighbouring samples on the tangent circle
};

/// Scans the circle of unit directions from x that graze the sphere, using a basis unrelated
/// to g, and returns the one best aligned with g - x.
inline TangentScan dense_tangent_scan(const Vec3& x, const Vec3& g, const Vec3& center, double r,
                                      int samples = 200000) {
  TangentScan out;
  const Vec3 D = center - x;
  const Vec3 u = D.normalized();
  const double s = std::min(1.0, r / D.norm()), c = std::sqrt(1.0 - s * s);
  const Vec3 e1 = u.unitOrthogonal(), e2 = u.cross(e1);
  out.resolution = 2.0 * std::numbers::pi / samples;
  for (int k = 0; k < samples; ++k) {
    const double ph = k * out.resolution;
    const Vec3 v = c * u + s * (std::cos(ph) * e1 + std::sin(ph) * e2);
    const double score = v.dot(g - x);
    if (score > out.best_score) {
      out.best_score = score;
      out.best = v;
    }
  }
  return out;
}

/// First sign change of f on a uniform grid over [lo, hi], bisected to full precision.
inline double dense_sign_change(const std::function<double(double)>& f, double lo, double hi,
                                int samples = 100000) {
  double prev_x = lo, prev = f(lo);
  for (int k = 1; k <= samples; ++k) {
    const double x = lo + (hi - lo) * k / samples;
    const double v = f(x);
    if ((v > 0.0) != (prev > 0.0)) {
      double a = prev_x, b = x;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        ((f(m) > 0.0) == (prev > 0.0) ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    prev_x = x;
    prev = v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Least-squares fit of a + b cos(t) + c sin(t) per component; returns the max abs residual.
inline double sinusoid_fit_residual(const std::vector<Vec3>& samples) {
  const int n = static_cast<int>(samples.size());
  Eigen::MatrixXd A(n, 3);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / (n - 1);
    A.row(k) << 1.0, std::cos(t), std::sin(t);
  }
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) y(k) = samples[k](c);
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    worst = std::max(worst, (A * coef - y).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Uniform joint sample within the model limits; q1, q2 within +-0.6 rad, q4 within +-pi.
inline wristed::JointState random_joints(std::mt19937_64& rng, const wristed::RobotModel& m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.0, 1.0);
  wristed::JointState q;
  q.q << 0.6 * u(rng), 0.6 * u(rng), m.q3_range.lo + t(rng) * (m.q3_range.hi - m.q3_range.lo),
      std::numbers::pi * u(rng), m.wrist_limits.hi * u(rng), m.wrist_limits.hi * u(rng);
  return q;
}

inline wristed::RobotModel tilted_model() {
  wristed::RobotModel m;
  m.rcm_pose.linear() = Eigen::AngleAxisd(0.7, Vec3(0.3, -0.5, 0.8).normalized()).toRotationMatrix();
  m.rcm_pose.translation() = Vec3(-40.0, 12.0, 30.0);
  return m;
}

}  // namespace oracle
