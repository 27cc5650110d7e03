/**
 * @file nss.hpp
 * @brief Nodal state space: goal decomposition, state vector and its Jacobians
 */
#pragma once

#include "wristed/kinematics.hpp"

namespace wristed {

/// Rigid frame: origin plus rotation whose columns are the x, y, z axes.
struct Frame {
  Vec3 p = Vec3::Zero();
  Mat3 R = Mat3::Identity();
};

struct GoalState {
  Vec3 x_g = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  ///< columns x_g, y_g, z_g
  Vec3 x_sg = Vec3::Zero();      ///< shaft-junction goal used for the position rows

  Vec3 x_hat() const { return axes.col(0); }
  Vec3 y_hat() const { return axes.col(1); }
  Vec3 z_hat() const { return axes.col(2); }
  Frame frame() const { return {x_g, axes}; }
};

/// Velocity of the goal frame: origin rate [mm/s] and angular rate [rad/s] in world.
struct GoalRate {
  Vec3 v = Vec3::Zero();
  Vec3 w = Vec3::Zero();
};

struct NssState {
  Vec3 e_s = Vec3::Zero();
  double eta1 = 0.0;  ///< |e_s| in mm
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double norm = 0.0;

  /// Working 6-vector (e_s, eta2, eta3, eta4).
  Vec6 vector() const;
};

/// Position scale [mm] that makes the position block comparable to the inner products.
inline constexpr double kPositionScale = 10.0;
inline constexpr double kDefaultGoalEps = 5e-3;

Vec3 naive_shaft_goal(const Vec3& x_g, const SkeletonPose& pose);

/// Goal for the given frame with the naive shaft goal evaluated at the pose.
GoalState make_goal(const Frame& target, const SkeletonPose& pose);

NssState eta(const SkeletonPose& pose, const GoalState& goal);

/// d(eta)/dq with the shaft goal held fixed over the tick.
Mat6 eta_jacobian(const SkeletonJacobians& J, const SkeletonPose& pose, const GoalState& goal);

/// Partial rate of eta caused by the goal frame moving at the given rate.
Vec6 eta_goal_rate(const SkeletonPose& pose, const GoalState& goal, const GoalRate& rate);

bool goal_reached(const NssState& state, double eps_g = kDefaultGoalEps);

}  // namespace wristed
