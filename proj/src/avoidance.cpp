#include "wristed/avoidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wristed {

namespace {

Vec3 any_perpendicular(const Vec3& u) {
  const Vec3 ref = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return u.cross(ref).normalized();
}

}  // namespace

Vec3 escape_direction(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle) {
  const Vec3 D = obstacle.center - x_clo;
  const double dist = D.norm();
  if (dist == 0.0) return Vec3::UnitX();
  const Vec3 u = D / dist;
  if (dist < obstacle.r_o) return -u;
  const Vec3 g = x_sg - x_clo;
  Vec3 g_perp = g - g.dot(u) * u;
  const double gp = g_perp.norm();
  const Vec3 n = gp > 1e-12 * std::max(1.0, g.norm()) ? Vec3(g_perp / gp) : any_perpendicular(u);
  const double s = std::min(1.0, obstacle.r_o / dist);
  const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
  return c * u + s * n;
}

Vec3 escape_goal(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle, double a_e) {
  return x_clo + a_e * escape_direction(x_clo, x_sg, obstacle);
}

double blocking_test(const Vec3& x_clo, const Vec3& x_sg, const Obstacle& obstacle) {
  return point_segment_distance(x_clo, x_sg, obstacle.center) - obstacle.r_o;
}

std::vector<Obstacle> tracked_arm_obstacles(const SkeletonPose& other, double r_o, double span) {
  const Vec3 back = (other.x_rcm - other.x_s).normalized();
  std::vector<Obstacle> out{{other.x_t, r_o, Obstacle::Kind::TrackedArm},
                            {other.x_w, r_o, Obstacle::Kind::TrackedArm}};
  const int n = std::max(1, static_cast<int>(std::ceil(span / (0.5 * r_o))));
  for (int k = 0; k <= n; ++k) {
    out.push_back({Vec3(other.x_s + (span * k / n) * back), r_o, Obstacle::Kind::TrackedArm});
  }
  return out;
}

AvoidanceResult avoidance_goal(const RobotModel& model, const JointState& q,
                               const SkeletonPose& pose, const GoalState& nominal,
                               const std::vector<Obstacle>& obstacles, double blend,
                               const AvoidanceParams& params, const ControlGains& gains) {
  AvoidanceResult r;
  r.goal = nominal;
  r.clearance = std::numeric_limits<double>::infinity();
  if (obstacles.empty()) return r;

  double worst = std::numeric_limits<double>::infinity();
  ClosestPoint worst_cp;
  const Obstacle* worst_obs = nullptr;
  for (const Obstacle& o : obstacles) {
    const ClosestPoint cp = closest_skeleton_point(model, q, o.center);
    r.clearance = std::min(r.clearance, cp.distance);
    const double f = blocking_test(cp.x_clo, nominal.x_sg, o);
    if (f < worst) {
      worst = f;
      worst_cp = cp;
      worst_obs = &o;
    }
  }
  r.blocked = worst <= 0.0;
  if (blend <= 0.0) return r;

  const Vec3 v_clo = params.a_e * escape_direction(worst_cp.x_clo, nominal.x_sg, *worst_obs) / gains.dt;
  const Mat3 J_clo = worst_cp.J_clo.leftCols<3>();
  Vec3 v_s = v_clo;
  if (!near_singular(J_clo)) {
    v_s = position_jacobians(model, q).J_s * J_clo.partialPivLu().solve(v_clo);
  }
  const Vec3 x_sg_escape = pose.x_s + v_s.cwiseQuotient(gains.gamma.head<3>());
  r.goal.x_sg = blend * x_sg_escape + (1.0 - blend) * nominal.x_sg;
  return r;
}

}  // namespace wristed
