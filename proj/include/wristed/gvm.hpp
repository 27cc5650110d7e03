/**
 * @file gvm.hpp
 * @brief Goal-varying manipulation: pre-contact pose, path, progress dynamics
 */
#pragma once

#include "wristed/controller.hpp"

#include <vector>

namespace wristed {

struct Path {
  enum class Kind { Linear, Arc, Waypoints };
  Kind kind = Kind::Linear;
  // Arc: the start frame is rotated about `axis` through `center` by tau * angle.
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
  std::vector<Frame> waypoints;  ///< includes both ends
};

struct GvmContext {
  Frame X_p;
  Frame X_c;
  Path rho;
  double tau = 0.0;
  double gamma = 0.05;
  double kappa = 0.5;
  double d = 25.0;
};

/// Contact pose shifted back by d along its heading; d must exceed min_d.
Frame pre_contact_pose(const Frame& X_c, double d, double min_d = 18.6,
                       const Vec3& heading = Vec3::UnitZ());

double tau_derivative(double eta_norm, double gamma, double kappa);
double tau_update(double tau, double tau_dot, double dt);

/// Shortest-arc blend of two rotations.
Mat3 slerp(const Mat3& A, const Mat3& B, double t);

/// Frame on the path at parameter tau.
Frame path_frame(const GvmContext& ctx, double tau);

/// Derivative of the path frame with respect to tau.
GoalRate path_tangent(const GvmContext& ctx, double tau);

Frame instant_goal(const GvmContext& ctx);

/// Arc path rotating the pre-contact frame about `axis` through `center` by up to `angle`.
Path arc_path(const Vec3& center, const Vec3& axis, double angle);

struct GvmCommand {
  ControlCommand cmd;
  double tau_dot = 0.0;
  GoalState goal;
  NssState state;
};

/// tau_dot actually realised over one tick once the [0, 1] clamp applies.
double effective_tau_rate(double tau, double tau_dot, double dt);

/// Instant-goal control with the moving-goal feed-forward term.
GvmCommand gvm_control_step(const RobotModel& model, const JointState& q, const GvmContext& ctx,
                            const AllocationState& alloc, const ControlGains& gains);

}  // namespace wristed
