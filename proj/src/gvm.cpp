#include "wristed/gvm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wristed {

Frame pre_contact_pose(const Frame& X_c, double d, double min_d, const Vec3& heading) {
  if (!(d > min_d)) throw std::invalid_argument("pre-contact distance must exceed l_w + l_t");
  return {X_c.p - d * (X_c.R * heading), X_c.R};
}

double tau_derivative(double eta_norm, double gamma, double kappa) {
  return gamma * (2.0 * std::exp(-kappa * eta_norm) - 1.0);
}

double tau_update(double tau, double tau_dot, double dt) {
  return std::clamp(tau + tau_dot * dt, 0.0, 1.0);
}

double effective_tau_rate(double tau, double tau_dot, double dt) {
  return (tau_update(tau, tau_dot, dt) - tau) / dt;
}

Mat3 slerp(const Mat3& A, const Mat3& B, double t) {
  const Vec3 rv = rotation_to_vector(A.transpose() * B);
  return A * rotation_from_vector(t * rv);
}

Path arc_path(const Vec3& center, const Vec3& axis, double angle) {
  Path p;
  p.kind = Path::Kind::Arc;
  p.center = center;
  p.axis = axis.normalized();
  p.angle = angle;
  return p;
}

namespace {

struct WaypointSpan {
  const Frame* a;
  const Frame* b;
  double s;
  double scale;  ///< d(s)/d(tau)
};

WaypointSpan waypoint_segment(const std::vector<Frame>& w, double tau) {
  const int n = static_cast<int>(w.size()) - 1;
  const double x = std::clamp(tau, 0.0, 1.0) * n;
  const int k = std::min(static_cast<int>(std::floor(x)), n - 1);
  return {&w[k], &w[k + 1], x - k, static_cast<double>(n)};
}

}  // namespace

Frame path_frame(const GvmContext& ctx, double tau) {
  switch (ctx.rho.kind) {
    case Path::Kind::Linear:
      return {(1.0 - tau) * ctx.X_p.p + tau * ctx.X_c.p, slerp(ctx.X_p.R, ctx.X_c.R, tau)};
    case Path::Kind::Arc: {
      const Mat3 Q = rotation_from_vector(tau * ctx.rho.angle * ctx.rho.axis);
      return {ctx.rho.center + Q * (ctx.X_p.p - ctx.rho.center), Q * ctx.X_p.R};
    }
    case Path::Kind::Waypoints: {
      if (ctx.rho.waypoints.size() < 2) throw std::invalid_argument("waypoint path needs two frames");
      const WaypointSpan sg = waypoint_segment(ctx.rho.waypoints, tau);
      return {(1.0 - sg.s) * sg.a->p + sg.s * sg.b->p, slerp(sg.a->R, sg.b->R, sg.s)};
    }
  }
  return ctx.X_p;
}

GoalRate path_tangent(const GvmContext& ctx, double tau) {
  GoalRate r;
  switch (ctx.rho.kind) {
    case Path::Kind::Linear:
      r.v = ctx.X_c.p - ctx.X_p.p;
      r.w = ctx.X_p.R * rotation_to_vector(ctx.X_p.R.transpose() * ctx.X_c.R);
      break;
    case Path::Kind::Arc: {
      const Frame f = path_frame(ctx, tau);
      r.w = ctx.rho.angle * ctx.rho.axis;
      r.v = r.w.cross(f.p - ctx.rho.center);
      break;
    }
    case Path::Kind::Waypoints: {
      const WaypointSpan sg = waypoint_segment(ctx.rho.waypoints, tau);
      r.v = sg.scale * (sg.b->p - sg.a->p);
      r.w = sg.scale * (sg.a->R * rotation_to_vector(sg.a->R.transpose() * sg.b->R));
      break;
    }
  }
  return r;
}

Frame instant_goal(const GvmContext& ctx) { return path_frame(ctx, ctx.tau); }

GvmCommand gvm_control_step(const RobotModel& model, const JointState& q, const GvmContext& ctx,
                            const AllocationState& alloc, const ControlGains& gains) {
  GvmCommand out;
  const SkeletonPose pose = forward_kinematics(model, q);
  out.goal = make_goal(instant_goal(ctx), pose);
  out.state = eta(pose, out.goal);
  out.tau_dot = tau_derivative(out.state.norm, ctx.gamma, ctx.kappa);
  const double rate = effective_tau_rate(ctx.tau, out.tau_dot, gains.dt);
  GoalRate gr = path_tangent(ctx, ctx.tau);
  gr.v *= rate;
  gr.w *= rate;
  const Mat6 D = eta_jacobian(position_jacobians(model, q), pose, out.goal);
  out.cmd = control_step(D, out.state, alloc, gains, eta_goal_rate(pose, out.goal, gr));
  return out;
}

}  // namespace wristed
