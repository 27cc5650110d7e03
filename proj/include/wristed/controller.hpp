/**
 * @file controller.hpp
 * @brief DS controller with sequential motion allocation and a saturating integrator
 */
#pragma once

#include "wristed/nss.hpp"

namespace wristed {

struct ControlGains {
  Vec6 gamma = (Vec6() << 0.1, 0.1, 0.1, 2.0, 2.0, 2.0).finished();
  Vec3 k_alloc{0.2, 1.0, 1.0};
  double step_saturation = 0.8;  ///< mm of tool translation per tick
  double dt = 0.05;              ///< s
  bool sma = true;               ///< false forces all lambda to 1
};

struct AllocationState {
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double lambda4 = 1.0;
};

/// eta1_norm is |e_s| divided by the position scale.
AllocationState sma_update(double eta1_norm, const ControlGains& gains);

/// L = blockdiag(I3, lambda2, lambda3, lambda4).
Vec6 allocation_weights(const AllocationState& alloc);

struct ControlCommand {
  Vec6 u = Vec6::Zero();
  bool singular = false;
};

/// u = L * (d eta / d q)^-1 * (-Gamma eta - goal_rate).
ControlCommand control_step(const Mat6& eta_jac, const NssState& state,
                            const AllocationState& alloc, const ControlGains& gains,
                            const Vec6& goal_rate = Vec6::Zero());

/// Convenience overload that evaluates the Jacobians at q.
ControlCommand control_step(const RobotModel& model, const JointState& q, const GoalState& goal,
                            const AllocationState& alloc, const ControlGains& gains);

struct StepResult {
  JointState q;
  double scale = 1.0;    ///< factor applied to u by the step saturation
  bool limit_hit = false;
};

/// Euler step of u over dt with tool-step saturation; q3, q5 and q6 are clamped to their limits.
StepResult integrate(const RobotModel& model, const JointState& q, const Vec6& u,
                     const ControlGains& gains);

}  // namespace wristed
