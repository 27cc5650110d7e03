#include "wristed/controller.hpp"

#include <algorithm>
#include <cmath>

namespace wristed {

namespace {

double successor(double prev, double k) {
  if (prev <= 0.0) return 0.0;
  return std::exp(-k * (1.0 / prev - 1.0));
}

double tool_step(const RobotModel& model, const JointState& q, const Vec3& x_t0, const Vec6& dq) {
  JointState n = q;
  n.q += dq;
  return (forward_kinematics(model, n).x_t - x_t0).norm();
}

}  // namespace

AllocationState sma_update(double eta1_norm, const ControlGains& gains) {
  AllocationState a;
  if (!gains.sma) return a;
  a.lambda2 = std::exp(-gains.k_alloc(0) * eta1_norm);
  a.lambda3 = successor(a.lambda2, gains.k_alloc(1));
  a.lambda4 = successor(a.lambda3, gains.k_alloc(2));
  return a;
}

Vec6 allocation_weights(const AllocationState& alloc) {
  Vec6 w;
  w << 1.0, 1.0, 1.0, alloc.lambda2, alloc.lambda3, alloc.lambda4;
  return w;
}

ControlCommand control_step(const Mat6& eta_jac, const NssState& state,
                            const AllocationState& alloc, const ControlGains& gains,
                            const Vec6& goal_rate) {
  ControlCommand cmd;
  if (near_singular(eta_jac)) {
    cmd.singular = true;
    return cmd;
  }
  const Vec6 rhs = -(gains.gamma.asDiagonal() * state.vector()) - goal_rate;
  cmd.u = allocation_weights(alloc).asDiagonal() * eta_jac.partialPivLu().solve(rhs);
  return cmd;
}

ControlCommand control_step(const RobotModel& model, const JointState& q, const GoalState& goal,
                            const AllocationState& alloc, const ControlGains& gains) {
  const SkeletonPose pose = forward_kinematics(model, q);
  const NssState s = eta(pose, goal);
  return control_step(eta_jacobian(position_jacobians(model, q), pose, goal), s, alloc, gains);
}

StepResult integrate(const RobotModel& model, const JointState& q, const Vec6& u,
                     const ControlGains& gains) {
  StepResult r;
  r.q = q;
  const Vec6 dq = u * gains.dt;
  const Vec3 x_t0 = forward_kinematics(model, q).x_t;
  const double full = tool_step(model, q, x_t0, dq);
  if (full > gains.step_saturation) {
    // Secant refinement so the saturated tool step matches the bound.
    double s0 = 0.0, f0 = -gains.step_saturation;
    double s1 = gains.step_saturation / full;
    double f1 = tool_step(model, q, x_t0, s1 * dq) - gains.step_saturation;
    for (int it = 0; it < 20 && std::abs(f1) > 1e-12; ++it) {
      if (f1 == f0) break;
      const double s2 = std::clamp(s1 - f1 * (s1 - s0) / (f1 - f0), 0.0, 1.0);
      s0 = s1;
      f0 = f1;
      s1 = s2;
      f1 = tool_step(model, q, x_t0, s1 * dq) - gains.step_saturation;
    }
    r.scale = s1;
  }
  r.q.q += r.scale * dq;
  const double q3 = model.q3_range.clamp(r.q.q(2));
  if (q3 != r.q.q(2)) {
    r.q.q(2) = q3;
    r.limit_hit = true;
  }
  for (int j : {4, 5}) {
    const double c = model.wrist_limits.clamp(r.q.q(j));
    if (c != r.q.q(j)) {
      r.q.q(j) = c;
      r.limit_hit = true;
    }
  }
  return r;
}

}  // namespace wristed
