/**
 * @file kinematics.hpp
 * @brief Forward kinematics, Jacobians and skeleton queries for a wristed instrument
 *
 * Joint order: q1 yaw and q2 pitch about the RCM, q3 insertion [mm], q4 shaft roll,
 * q5 wrist pitch, q6 wrist yaw. Lengths in mm, angles in rad.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <numbers>
#include <vector>

namespace wristed {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

struct RobotModel {
  double l_w = 9.1;
  double l_t = 9.5;
  Interval q3_range{150.0, 200.0};
  Interval wrist_limits{-std::numbers::pi / 2.0, std::numbers::pi / 2.0};
  Eigen::Isometry3d rcm_pose = Eigen::Isometry3d::Identity();
  /// xi1 in the roll frame, xi2 in the pitch frame, xi3 in the yaw frame
  std::array<Vec3, 3> local_nodal_vectors{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  Vec3 l_h{-1.0, 0.0, 0.0};
  Vec3 l_v{0.0, 1.0, 0.0};
  Vec3 m{0.0, 0.0, 1.0};

  /// Throws std::invalid_argument on non-positive links, bad limits or non-orthonormal tool axes.
  void validate() const;
};

struct JointState {
  Vec6 q = Vec6::Zero();
  double jaw = 0.0;
};

struct SkeletonPose {
  Vec3 x_rcm = Vec3::Zero();
  Vec3 x_s = Vec3::Zero();
  Vec3 x_w = Vec3::Zero();
  Vec3 x_t = Vec3::Zero();
  Vec3 xi1 = Vec3::UnitX();
  Vec3 xi2 = Vec3::UnitY();
  Vec3 xi3 = Vec3::UnitZ();
  Mat3 R_e = Mat3::Identity();
  bool valid = true;

  const Vec3& xi(int i) const { return i == 0 ? xi1 : (i == 1 ? xi2 : xi3); }
  Vec3 tool_l_h(const RobotModel& model) const { return R_e * model.l_h; }
  Vec3 tool_l_v(const RobotModel& model) const { return R_e * model.l_v; }
  Vec3 tool_m(const RobotModel& model) const { return R_e * model.m; }
};

struct SkeletonJacobians {
  Mat3 J_s = Mat3::Zero();  ///< d x_s / d q_s
  Mat36 J_w = Mat36::Zero();
  Mat36 J_t = Mat36::Zero();
  std::array<Mat36, 3> J_xi{Mat36::Zero(), Mat36::Zero(), Mat36::Zero()};
};

enum class Segment { Shaft = 0, Wrist = 1, Tool = 2 };

struct ClosestPoint {
  Vec3 x_clo = Vec3::Zero();
  Mat36 J_clo = Mat36::Zero();  ///< columns of joints distal to the point are zero
  Segment segment = Segment::Shaft;
  double distance = 0.0;
};

Mat3 rot_x(double a);
Mat3 rot_y(double a);
Mat3 rot_z(double a);

bool within_limits(const RobotModel& model, const JointState& q);

SkeletonPose forward_kinematics(const RobotModel& model, const JointState& q);

/// Samples the nodal vector driven by joint 4, 5 or 6 over [q_j, q_j + 2*pi].
std::vector<Vec3> nodal_vector_sweep(const RobotModel& model, const JointState& q,
                                     int joint_index, int samples);

SkeletonJacobians position_jacobians(const RobotModel& model, const JointState& q);

/// Jacobian of a point rigidly attached to the given segment.
Mat36 point_jacobian(const RobotModel& model, const JointState& q, Segment segment,
                     const Vec3& point);

ClosestPoint closest_skeleton_point(const RobotModel& model, const JointState& q,
                                    const Vec3& p);

/// True when sigma_min / sigma_max of the matrix is below the threshold.
bool near_singular(const Eigen::MatrixXd& J, double threshold = 1e-6);

Vec3 closest_point_on_segment(const Vec3& a, const Vec3& b, const Vec3& p);
double point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& p);
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

/// Minimum distance between the skeletons RCM->x_s->x_w->x_t of two poses.
double skeleton_distance(const SkeletonPose& a, const SkeletonPose& b);

/// Rotation matrix from a rotation vector (axis * angle).
Mat3 rotation_from_vector(const Vec3& rv);
Vec3 rotation_to_vector(const Mat3& R);

}  // namespace wristed
