/**
 * @file avoidance.hpp
 * @brief Sphere-obstacle avoidance by tangent escape and goal switching
 */
#pragma once

#include "wristed/controller.hpp"

#include <vector>

namespace wristed {

struct Obstacle {
  enum class Kind { Static, TrackedArm };
  Vec3 center = Vec3::Zero();
  double r_o = 10.0;
  Kind kind = Kind::Static;
};

struct AvoidanceParams {
  double a_e = 0.8;      ///< mm per tick
  int blend_ticks = 10;  ///< linear fuse window
};

/// Unit tangent from x_clo to the sphere closest to the direction of x_sg; radial when inside.
Vec3 escape_direction(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle);

Vec3 escape_goal(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle, double a_e);

/// Distance from the obstacle centre to segment x_clo -> x_sg minus r_o; <= 0 means blocked.
double blocking_test(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle);

/// Spheres standing in for another arm: x_t, x_w, and shaft samples from x_s to `span` mm up, at most r_o / 2 apart.
std::vector<Obstacle> tracked_arm_obstacles(const SkeletonPose& other, double r_o, double span);

struct AvoidanceResult {
  GoalState goal;
  bool blocked = false;
  double clearance = 0.0;  ///< smallest distance from the skeleton to any obstacle centre
};

/// Fuses the escape goal into the nominal goal with weight `blend`.
AvoidanceResult avoidance_goal(const RobotModel& model, const JointState& q,
                               const SkeletonPose& pose, const GoalState& nominal,
                               const std::vector<Obstacle>& obstacles, double blend,
                               const AvoidanceParams& params, const ControlGains& gains);

}  // namespace wristed
