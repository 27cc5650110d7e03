#include "wristed/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wristed {

namespace {

constexpr double kPi = std::numbers::pi;

// Frames of the chain expressed in the RCM frame.
struct ChainFrames {
  Mat3 R1, R_s, R4, R5, R6;
  Vec3 x_s, x_w, x_t;
};

ChainFrames chain(const RobotModel& model, const Vec6& q) {
  ChainFrames f;
  f.R1 = rot_x(q(0));
  f.R_s = f.R1 * rot_y(q(1));
  f.x_s = q(2) * f.R_s.col(2);
  f.R4 = f.R_s * rot_z(q(3));
  f.R5 = f.R4 * rot_x(q(4));
  f.R6 = f.R5 * rot_y(q(5));
  f.x_w = f.x_s + model.l_w * f.R5.col(2);
  f.x_t = f.x_w + model.l_t * f.R6.col(2);
  return f;
}

// Joint axes and axis points in the world frame; index 2 is the prismatic joint.
struct WorldAxes {
  std::array<Vec3, 6> axis;
  std::array<Vec3, 6> origin;
};

WorldAxes world_axes(const RobotModel& model, const ChainFrames& f) {
  const Mat3 R = model.rcm_pose.linear();
  const Vec3 o = model.rcm_pose.translation();
  WorldAxes a;
  a.axis[0] = R * Vec3::UnitX();
  a.axis[1] = R * (f.R1 * Vec3::UnitY());
  a.axis[2] = R * f.R_s.col(2);
  a.axis[3] = R * f.R_s.col(2);
  a.axis[4] = R * f.R4.col(0);
  a.axis[5] = R * f.R5.col(1);
  a.origin[0] = o;
  a.origin[1] = o;
  a.origin[2] = o;
  a.origin[3] = model.rcm_pose * f.x_s;
  a.origin[4] = model.rcm_pose * f.x_s;
  a.origin[5] = model.rcm_pose * f.x_w;
  return a;
}

Mat36 attached_point_jacobian(const WorldAxes& a, const Vec3& p, int joints) {
  Mat36 J = Mat36::Zero();
  for (int j = 0; j < joints; ++j) {
    J.col(j) = (j == 2) ? a.axis[2] : Vec3(a.axis[j].cross(p - a.origin[j]));
  }
  return J;
}

Mat36 attached_vector_jacobian(const WorldAxes& a, const Vec3& v, int joints) {
  Mat36 J = Mat36::Zero();
  for (int j = 0; j < joints; ++j) {
    if (j != 2) J.col(j) = a.axis[j].cross(v);
  }
  return J;
}

int joints_for(Segment s) {
  switch (s) {
    case Segment::Shaft: return 4;
    case Segment::Wrist: return 5;
    case Segment::Tool: return 6;
  }
  return 6;
}

}  // namespace

void RobotModel::validate() const {
  if (!(l_w > 0.0) || !(l_t > 0.0)) throw std::invalid_argument("link lengths must be positive");
  if (!(q3_range.lo < q3_range.hi)) throw std::invalid_argument("q3_range must be a non-empty interval");
  if (!(wrist_limits.lo < wrist_limits.hi)) throw std::invalid_argument("wrist_limits must be a non-empty interval");
  Mat3 T;
  T << l_h, l_v, m;
  if (!(T.transpose() * T).isIdentity(1e-9)) throw std::invalid_argument("l_h, l_v, m must be orthonormal");
  for (const auto& v : local_nodal_vectors) {
    if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("local nodal vectors must be unit length");
  }
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

bool within_limits(const RobotModel& model, const JointState& q) {
  return model.q3_range.contains(q.q(2)) && model.wrist_limits.contains(q.q(4)) &&
         model.wrist_limits.contains(q.q(5));
}

SkeletonPose forward_kinematics(const RobotModel& model, const JointState& q) {
  const ChainFrames f = chain(model, q.q);
  const Mat3 R = model.rcm_pose.linear();
  SkeletonPose pose;
  pose.x_rcm = model.rcm_pose.translation();
  pose.x_s = model.rcm_pose * f.x_s;
  pose.x_w = model.rcm_pose * f.x_w;
  pose.x_t = model.rcm_pose * f.x_t;
  pose.xi1 = R * f.R4 * model.local_nodal_vectors[0];
  pose.xi2 = R * f.R5 * model.local_nodal_vectors[1];
  pose.xi3 = R * f.R6 * model.local_nodal_vectors[2];
  pose.R_e = R * f.R6 * rot_z(kPi / 2.0);
  pose.valid = within_limits(model, q);
  return pose;
}

std::vector<Vec3> nodal_vector_sweep(const RobotModel& model, const JointState& q,
                                     int joint_index, int samples) {
  if (joint_index < 4 || joint_index > 6) throw std::invalid_argument("joint_index must be 4, 5 or 6");
  if (samples < 2) throw std::invalid_argument("samples must be at least 2");
  const int j = joint_index - 1;
  const double q0 = q.q(j);
  std::vector<Vec3> out;
  out.reserve(samples);
  JointState s = q;
  for (int k = 0; k < samples; ++k) {
    s.q(j) = q0 + 2.0 * kPi * k / (samples - 1);
    out.push_back(forward_kinematics(model, s).xi(joint_index - 4));
  }
  return out;
}

SkeletonJacobians position_jacobians(const RobotModel& model, const JointState& q) {
  const ChainFrames f = chain(model, q.q);
  const WorldAxes a = world_axes(model, f);
  const SkeletonPose pose = forward_kinematics(model, q);
  SkeletonJacobians J;
  J.J_s = attached_point_jacobian(a, pose.x_s, 3).leftCols<3>();
  J.J_w = attached_point_jacobian(a, pose.x_w, 5);
  J.J_t = attached_point_jacobian(a, pose.x_t, 6);
  J.J_xi[0] = attached_vector_jacobian(a, pose.xi1, 4);
  J.J_xi[1] = attached_vector_jacobian(a, pose.xi2, 5);
  J.J_xi[2] = attached_vector_jacobian(a, pose.xi3, 6);
  return J;
}

Mat36 point_jacobian(const RobotModel& model, const JointState& q, Segment segment,
                     const Vec3& point) {
  const ChainFrames f = chain(model, q.q);
  return attached_point_jacobian(world_axes(model, f), point, joints_for(segment));
}

ClosestPoint closest_skeleton_point(const RobotModel& model, const JointState& q,
                                    const Vec3& p) {
  const SkeletonPose pose = forward_kinematics(model, q);
  const std::array<std::pair<Vec3, Vec3>, 3> segs{{{pose.x_rcm, pose.x_s},
                                                   {pose.x_s, pose.x_w},
                                                   {pose.x_w, pose.x_t}}};
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vec3 c = closest_point_on_segment(segs[i].first, segs[i].second, p);
    const double dist = (p - c).norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.x_clo = c;
      best.segment = static_cast<Segment>(i);
    }
  }
  best.J_clo = point_jacobian(model, q, best.segment, best.x_clo);
  return best;
}

bool near_singular(const Eigen::MatrixXd& J, double threshold) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return true;
  return s(s.size() - 1) / s(0) < threshold;
}

Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

double point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  return (p - closest_point_on_segment(a, b, p)).norm();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  constexpr double eps = 1e-18;
  double s = 0.0, t = 0.0;
  if (a <= eps && e <= eps) return r.norm();
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double skeleton_distance(const SkeletonPose& a, const SkeletonPose& b) {
  const std::array<Vec3, 4> pa{a.x_rcm, a.x_s, a.x_w, a.x_t};
  const std::array<Vec3, 4> pb{b.x_rcm, b.x_s, b.x_w, b.x_t};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      best = std::min(best, segment_segment_distance(pa[i], pa[i + 1], pb[j], pb[j + 1]));
  return best;
}

Mat3 rotation_from_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-15) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, rv / angle).toRotationMatrix();
}

Vec3 rotation_to_vector(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

}  // namespace wristed
