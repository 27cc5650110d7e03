#include "wristed/nss.hpp"

#include <cmath>

namespace wristed {

Vec6 NssState::vector() const {
  Vec6 v;
  v << e_s, eta2, eta3, eta4;
  return v;
}

Vec3 naive_shaft_goal(const Vec3& x_g, const SkeletonPose& pose) {
  return x_g - pose.x_t + pose.x_s;
}

GoalState make_goal(const Frame& target, const SkeletonPose& pose) {
  GoalState g;
  g.x_g = target.p;
  g.axes = target.R;
  g.x_sg = naive_shaft_goal(target.p, pose);
  return g;
}

NssState eta(const SkeletonPose& pose, const GoalState& goal) {
  NssState s;
  s.e_s = pose.x_s - goal.x_sg;
  s.eta1 = s.e_s.norm();
  s.eta2 = pose.xi1.dot(goal.x_hat());
  s.eta3 = pose.xi2.dot(goal.z_hat());
  s.eta4 = pose.xi3.dot(goal.y_hat());
  s.norm = std::sqrt((s.e_s / kPositionScale).squaredNorm() + s.eta2 * s.eta2 +
                     s.eta3 * s.eta3 + s.eta4 * s.eta4);
  return s;
}

Mat6 eta_jacobian(const SkeletonJacobians& J, const SkeletonPose&, const GoalState& goal) {
  Mat6 D = Mat6::Zero();
  D.topLeftCorner<3, 3>() = J.J_s;
  D.row(3) = goal.x_hat().transpose() * J.J_xi[0];
  D.row(4) = goal.z_hat().transpose() * J.J_xi[1];
  D.row(5) = goal.y_hat().transpose() * J.J_xi[2];
  return D;
}

Vec6 eta_goal_rate(const SkeletonPose& pose, const GoalState& goal, const GoalRate& rate) {
  Vec6 r;
  r.head<3>() = -rate.v;
  r(3) = pose.xi1.dot(rate.w.cross(goal.x_hat()));
  r(4) = pose.xi2.dot(rate.w.cross(goal.z_hat()));
  r(5) = pose.xi3.dot(rate.w.cross(goal.y_hat()));
  return r;
}

bool goal_reached(const NssState& state, double eps_g) { return state.norm < eps_g; }

}  // namespace wristed
