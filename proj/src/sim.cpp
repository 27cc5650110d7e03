#include "wristed/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wristed {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void add_event(std::string& events, const std::string& e) {
  if (!events.empty()) events += ';';
  events += e;
}

// Sensed state of one target for the current tick.
struct Sensed {
  Frame truth;     ///< true start or contact frame
  Frame frame;     ///< sensed start or contact frame
  Path path;       ///< sensed path
  bool moving = false;
};

Frame path_end(const Frame& start, const Path& path) {
  GvmContext ctx;
  ctx.X_p = start;
  ctx.rho = path;
  return path_frame(ctx, 1.0);
}

Path moved_path(const Path& path, const Frame& from, const Frame& to) {
  const Mat3 dR = to.R * from.R.transpose();
  Path p = path;
  p.center = to.p + dR * (path.center - from.p);
  p.axis = dR * path.axis;
  for (Frame& w : p.waypoints) {
    w.p = to.p + dR * (w.p - from.p);
    w.R = dR * w.R;
  }
  return p;
}

struct ArmRuntime {
  JointState q;
  int step = -1;
  bool done = true;
  PhaseState ps;
  double tau = 0.0;
  double blend = 0.0;
};

// What the active step asks of the controller this tick.
struct Resolved {
  bool active = false;
  bool gvm = false;
  bool forced = false;
  GvmContext ctx;
  Frame free_goal;
  bool has_target = false;
  Frame truth;
  bool moving = false;
};

Frame contact_of(const Target& t, const Frame& start, const Path& path) {
  return t.is_path ? path_end(start, path) : start;
}

Resolved resolve(const Scenario& sc, const ArmConfig& arm, const ArmRuntime& rt,
                 const std::vector<Sensed>& sensed) {
  Resolved r;
  if (rt.step < 0 || rt.step >= static_cast<int>(arm.steps.size())) return r;
  const SmpStep& step = arm.steps[rt.step];
  if (step.mode == Mode::Idle) return r;
  r.active = true;
  const double min_d = arm.model.l_w + arm.model.l_t;

  auto lookup = [&](const std::string& name) -> const Target& {
    return sc.targets[sc.target_index(name)];
  };
  auto sensed_of = [&](const std::string& name) -> const Sensed& {
    return sensed[sc.target_index(name)];
  };
  auto linear_ctx = [&](const Frame& contact) {
    GvmContext ctx;
    ctx.X_c = contact;
    ctx.X_p = pre_contact_pose(contact, sc.gvm.d, min_d, arm.model.m);
    ctx.gamma = sc.gvm.gamma;
    ctx.kappa = sc.gvm.kappa;
    ctx.d = sc.gvm.d;
    ctx.tau = rt.tau;
    return ctx;
  };

  const Target& target = lookup(step.target_ref);
  const Sensed& ts = sensed_of(step.target_ref);
  r.has_target = true;
  r.truth = contact_of(target, ts.truth, target.is_path ? moved_path(target.path, target.pose, ts.truth)
                                                        : target.path);
  r.moving = ts.moving;
  const Frame contact = contact_of(target, ts.frame, ts.path);

  if (rt.ps.phase == Phase::I) {
    const Target& rtarget = lookup(step.retract_ref);
    const Sensed& rs = sensed_of(step.retract_ref);
    r.gvm = true;
    r.forced = true;
    r.truth = contact_of(rtarget, rs.truth,
                         rtarget.is_path ? moved_path(rtarget.path, rtarget.pose, rs.truth) : rtarget.path);
    r.ctx = linear_ctx(contact_of(rtarget, rs.frame, rs.path));
    r.moving = r.moving || rs.moving;
    return r;
  }
  switch (step.mode) {
    case Mode::I:
    case Mode::II:
      r.free_goal = contact;
      break;
    case Mode::III:
    case Mode::IV:
      r.gvm = true;
      r.ctx = linear_ctx(contact);
      break;
    case Mode::V:
      r.gvm = true;
      r.ctx.X_p = ts.frame;
      r.ctx.rho = ts.path;
      r.ctx.X_c = contact;
      r.ctx.gamma = sc.gvm.gamma;
      r.ctx.kappa = sc.gvm.kappa;
      r.ctx.d = sc.gvm.d;
      r.ctx.tau = rt.tau;
      break;
    default:
      break;
  }
  return r;
}

void start_step(ArmRuntime& rt, const ArmConfig& arm, int k, std::string& events) {
  rt.step = k;
  const Mode mode = arm.steps[k].mode;
  const double jaw_target = rt.ps.jaw_target;
  rt.ps = initial_phase(mode);
  rt.ps.jaw_target = jaw_target;
  rt.tau = rt.ps.phase == Phase::I ? 1.0 : 0.0;
  rt.done = mode == Mode::Idle;
  add_event(events, "step_start:" + std::to_string(k));
}

bool barrier_at(const Scenario& sc, int k) {
  if (sc.barrier_every_step) return true;
  return std::find(sc.barriers.begin(), sc.barriers.end(), k) != sc.barriers.end();
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t k) {
  return Rng(splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15ULL));
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Perturbation noise_sample(Rng& rng, const Noise& m) {
  Perturbation p;
  for (int i = 0; i < 3; ++i) p.dp(i) = m.position * rng.uniform(-1.0, 1.0);
  for (int i = 0; i < 3; ++i) p.drv(i) = m.orientation * rng.uniform(-1.0, 1.0);
  return p;
}

namespace {

// Distance travelled along the linear profile at tick t, and whether the target moves then.
std::pair<double, bool> travelled(const MotionProfile& mp, double length, int t) {
  if (!mp.linear || t < mp.linear_start || length == 0.0 || mp.speed <= 0.0) return {0.0, false};
  std::vector<Halt> halts = mp.halts;
  std::sort(halts.begin(), halts.end(), [](const Halt& a, const Halt& b) { return a.at < b.at; });
  double elapsed = t - mp.linear_start;
  double s = 0.0;
  for (const Halt& h : halts) {
    const double seg = std::clamp(h.at, 0.0, 1.0) * length - s;
    const double move = seg / mp.speed;
    if (elapsed < move) return {s + elapsed * mp.speed, true};
    elapsed -= move;
    s += seg;
    if (elapsed < h.ticks) return {s, false};
    elapsed -= h.ticks;
  }
  const double rest = (length - s) / mp.speed;
  if (elapsed < rest) return {s + elapsed * mp.speed, true};
  return {length, false};
}

}  // namespace

Frame MotionProfile::at(const Frame& base, int t) const {
  Frame f = base;
  if (linear) {
    const Vec3 delta = to - base.p;
    const double length = delta.norm();
    if (length > 0.0) f.p = base.p + travelled(*this, length, t).first / length * delta;
  }
  if (sinusoid && t >= sinusoid_start) {
    const int s = std::min(t, sinusoid_start + sinusoid_duration) - sinusoid_start;
    const double w = std::sin(omega * s);
    f.R = f.R * rot_x(amplitude(0) * w) * rot_y(amplitude(1) * w) * rot_z(amplitude(2) * w);
  }
  return f;
}

bool MotionProfile::moving(const Frame& base, int t) const {
  bool m = false;
  if (linear) m = travelled(*this, (to - base.p).norm(), t).second;
  if (sinusoid && t >= sinusoid_start && t < sinusoid_start + sinusoid_duration) m = true;
  return m;
}

int Scenario::target_index(const std::string& n) const {
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (targets[i].name == n) return static_cast<int>(i);
  throw std::invalid_argument("unknown target '" + n + "'");
}

void Scenario::validate() const {
  if (ticks < 0) throw std::invalid_argument("ticks: must be non-negative");
  if (!(gains.dt > 0.0)) throw std::invalid_argument("gains.dt: must be positive");
  if ((gains.gamma.array() <= 0.0).any()) throw std::invalid_argument("gains.gamma: entries must be positive");
  if (!(gains.step_saturation > 0.0)) throw std::invalid_argument("gains.step_saturation: must be positive");
  if (arms.empty() || arms.size() > 2) throw std::invalid_argument("arms: one or two arms required");
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i].name == targets[j].name) throw std::invalid_argument("targets: duplicate name '" + targets[i].name + "'");
  for (const ArmConfig& a : arms) {
    a.model.validate();
    if (!(gvm.d > a.model.l_w + a.model.l_t))
      throw std::invalid_argument("gvm.d: must exceed l_w + l_t");
    for (const SmpStep& s : a.steps) {
      validate_step(s);
      if (!s.target_ref.empty()) target_index(s.target_ref);
      if (!s.retract_ref.empty()) target_index(s.retract_ref);
      if (s.mode == Mode::V && !targets[target_index(s.target_ref)].is_path)
        throw std::invalid_argument("arms." + a.name + ": mode V needs a path target");
    }
  }
  for (const Disturbance& d : disturbances)
    if (d.arm < 0 || d.arm >= static_cast<int>(arms.size()))
      throw std::invalid_argument("disturbances: arm index out of range");
}

double intrusion(const SkeletonPose& pose, const Frame& X_c, const Vec3& heading) {
  return -(X_c.R * heading).dot(pose.x_t - X_c.p);
}

TrajectoryLog run(const Scenario& sc) {
  sc.validate();
  const int n_arms = static_cast<int>(sc.arms.size());
  std::size_t n_steps = 0;
  for (const ArmConfig& a : sc.arms) n_steps = std::max(n_steps, a.steps.size());

  TrajectoryLog log;
  log.name = sc.name;
  log.seed = sc.seed;
  log.dt = sc.gains.dt;
  log.ticks.reserve(sc.ticks);
  log.steps.resize(n_arms);

  std::vector<ArmRuntime> rt(n_arms);
  std::vector<ArmConfig> arms = sc.arms;
  for (int i = 0; i < n_arms; ++i) {
    arms[i].steps.resize(n_steps);
    rt[i].q = arms[i].q0;
    for (std::size_t k = 0; k < n_steps; ++k) log.steps[i].push_back({static_cast<int>(k), arms[i].steps[k].mode});
    log.arm_names.push_back(arms[i].name);
  }

  std::vector<Rng> rngs;
  for (std::size_t k = 0; k < sc.targets.size(); ++k) rngs.push_back(Rng::stream(sc.seed, k));

  for (int t = 0; t < sc.ticks; ++t) {
    TickRecord rec;
    rec.t = t;
    rec.arms.resize(n_arms);

    // Advance steps; a barrier holds every arm until all finished the previous step.
    for (int i = 0; i < n_arms; ++i) {
      while (n_steps > 0) {
        const int k = rt[i].step;
        if (k >= 0 && (!rt[i].done || k + 1 >= static_cast<int>(n_steps))) break;
        const int next = k + 1;
        if (k >= 0 && barrier_at(sc, next)) {
          bool ready = true;
          for (int j = 0; j < n_arms; ++j)
            ready = ready && (rt[j].step > k || (rt[j].step == k && rt[j].done));
          if (!ready) break;
        }
        start_step(rt[i], arms[i], next, rec.arms[i].events);
        log.steps[i][next].start = t;
        if (rt[i].done) log.steps[i][next].complete = t;
      }
    }

    std::vector<Sensed> sensed(sc.targets.size());
    for (std::size_t k = 0; k < sc.targets.size(); ++k) {
      const Target& tg = sc.targets[k];
      const Perturbation p = noise_sample(rngs[k], tg.noise);
      Sensed& s = sensed[k];
      s.truth = tg.motion.at(tg.pose, t);
      s.moving = tg.motion.moving(tg.pose, t);
      s.frame = {s.truth.p + p.dp, rotation_from_vector(p.drv) * s.truth.R};
      s.path = tg.is_path ? moved_path(tg.path, tg.pose, s.frame) : tg.path;
    }

    std::vector<SkeletonPose> snapshot(n_arms);
    for (int i = 0; i < n_arms; ++i) snapshot[i] = forward_kinematics(arms[i].model, rt[i].q);

    for (int i = 0; i < n_arms; ++i) {
      const ArmConfig& arm = arms[i];
      ArmRuntime& r = rt[i];
      ArmTick& at = rec.arms[i];
      const SkeletonPose& pose = snapshot[i];
      at.step = r.step;
      at.q = r.q;
      at.x_t = pose.x_t;
      at.rv_e = rotation_to_vector(pose.R_e);
      if (n_arms == 2) at.arm_distance = skeleton_distance(pose, snapshot[1 - i]);

      std::vector<Obstacle> obstacles = sc.obstacles;
      if (sc.avoidance.enabled && n_arms == 2) {
        const auto tracked = tracked_arm_obstacles(snapshot[1 - i], sc.avoidance.r_o, sc.avoidance.tracked_span);
        obstacles.insert(obstacles.end(), tracked.begin(), tracked.end());
      }
      if (!sc.avoidance.enabled) obstacles.clear();

      Resolved res = resolve(sc, arm, r, sensed);
      if (res.active) {
        const SmpStep& step = arm.steps[r.step];
        const PhaseState before = r.ps;
        r.ps = phase_transition(r.ps, step, r.tau, 0.0);
        if (r.ps.phase != before.phase) {
          add_event(at.events, "phase:" + std::string(r.ps.phase == Phase::II ? "II" : "III"));
          if (before.phase == Phase::I) r.tau = 0.0;
          res = resolve(sc, arm, r, sensed);
        }
      }
      at.mode = r.step >= 0 && r.step < static_cast<int>(n_steps) ? arm.steps[r.step].mode : Mode::Idle;
      at.phase = r.ps.phase;
      at.tau = r.tau;
      at.has_target = res.has_target;
      at.target = res.truth;
      at.target_moving = res.moving;
      if (res.has_target) at.phi = intrusion(pose, res.truth, arm.model.m);

      if (!res.active) {
        at.alloc = sma_update(0.0, sc.gains);
        at.goal = pose.x_t;
        at.step_done = r.done;
        at.blend = r.blend;
        for (const Obstacle& o : obstacles)
          at.clearance = std::min(at.clearance, closest_skeleton_point(arm.model, r.q, o.center).distance);
      } else {
        const SmpStep& step = arm.steps[r.step];
        const Frame nominal_frame = res.gvm ? instant_goal(res.ctx) : res.free_goal;
        const GoalState nominal = make_goal(nominal_frame, pose);
        const NssState nominal_state = eta(pose, nominal);

        const AvoidanceResult probe = avoidance_goal(arm.model, r.q, pose, nominal, obstacles, 0.0,
                                                     sc.avoidance.params, sc.gains);
        const double window = std::max(1, sc.avoidance.params.blend_ticks);
        r.blend = std::clamp(r.blend + (probe.blocked ? 1.0 : -1.0) / window, 0.0, 1.0);
        if (probe.blocked) add_event(at.events, "blocked");
        const GoalState goal = r.blend > 0.0
                                   ? avoidance_goal(arm.model, r.q, pose, nominal, obstacles, r.blend,
                                                    sc.avoidance.params, sc.gains).goal
                                   : nominal;
        const NssState state = r.blend > 0.0 ? eta(pose, goal) : nominal_state;

        double tau_dot = 0.0;
        if (res.forced) tau_dot = -sc.gvm.retract_rate;
        else if (res.gvm) tau_dot = tau_derivative(nominal_state.norm, sc.gvm.gamma, sc.gvm.kappa);

        const AllocationState alloc = sma_update(state.e_s.norm() / kPositionScale, sc.gains);
        Vec6 goal_rate = Vec6::Zero();
        if (res.gvm) {
          GoalRate gr = path_tangent(res.ctx, r.tau);
          const double rate = effective_tau_rate(r.tau, tau_dot, sc.gains.dt);
          gr.v *= rate;
          gr.w *= rate;
          goal_rate = eta_goal_rate(pose, goal, gr);
        }
        const Mat6 D = eta_jacobian(position_jacobians(arm.model, r.q), pose, goal);
        const ControlCommand cmd = control_step(D, state, alloc, sc.gains, goal_rate);

        at.state = nominal_state;
        at.alloc = alloc;
        at.tau_dot = tau_dot;
        at.goal = nominal_frame.p;
        at.clearance = probe.clearance;
        at.blend = r.blend;
        at.singular = cmd.singular;
        if (cmd.singular) add_event(at.events, "singular");

        if (!r.done) {
          StepSummary& ss = log.steps[i][r.step];
          if (ss.settling < 0 && nominal_state.norm < step.eps_g) ss.settling = t;
          if (step_complete(r.ps, nominal_state, r.tau, step)) {
            r.done = true;
            ss.complete = t;
            add_event(at.events, "step_complete:" + std::to_string(r.step));
          }
        }
        at.step_done = r.done;

        const StepResult sr = integrate(arm.model, r.q, cmd.u, sc.gains);
        at.saturation = sr.scale;
        at.limit_hit = sr.limit_hit;
        if (sr.limit_hit) add_event(at.events, "limit_hit");
        r.ps.jaw_target = jaw_schedule(r.ps, step.mode, r.tau, tau_dot, sc.jaw);
        const double jaw = jaw_ramp(r.q.jaw, r.ps.jaw_target, sc.jaw);
        r.q = sr.q;
        r.q.jaw = jaw;
        if (res.gvm) r.tau = tau_update(r.tau, tau_dot, sc.gains.dt);
      }

      for (const Disturbance& d : sc.disturbances) {
        if (d.arm == i && d.tick == t) {
          r.q.q += d.dq;
          add_event(at.events, "disturbance");
        }
      }
    }
    log.ticks.push_back(std::move(rec));
  }
  return log;
}

bool RunMetrics::invariants_clean() const {
  for (const ArmMetrics& a : arms) {
    if (a.limit_hits || a.lambda_violations || a.tau_violations || a.joint_violations ||
        a.link_violations || a.singular_events)
      return false;
  }
  return true;
}

RunMetrics metrics(const TrajectoryLog& log, const Scenario& sc) {
  RunMetrics m;
  m.name = log.name;
  m.seed = log.seed;
  m.ticks = static_cast<int>(log.ticks.size());
  m.dt = log.dt;
  const int n_arms = static_cast<int>(log.arm_names.size());
  const int n = m.ticks;
  const int tail = std::max(1, n / 10);
  for (int i = 0; i < n_arms; ++i) {
    ArmMetrics a;
    a.name = log.arm_names[i];
    a.steps = log.steps[i];
    const RobotModel& model = sc.arms[i].model;
    double tail_sum = 0.0;
    int tail_count = 0;
    for (int t = 0; t < n; ++t) {
      const ArmTick& at = log.ticks[t].arms[i];
      const AllocationState& l = at.alloc;
      const bool ordered = l.lambda2 >= l.lambda3 && l.lambda3 >= l.lambda4 && l.lambda4 >= 0.0 && l.lambda2 <= 1.0;
      if (!ordered) ++a.lambda_violations;
      if (at.tau < 0.0 || at.tau > 1.0) ++a.tau_violations;
      if (!within_limits(model, at.q)) ++a.joint_violations;
      const SkeletonPose p = forward_kinematics(model, at.q);
      if (std::abs((p.x_w - p.x_s).norm() - model.l_w) > 1e-9 * model.l_w ||
          std::abs((p.x_t - p.x_w).norm() - model.l_t) > 1e-9 * model.l_t)
        ++a.link_violations;
      if (at.limit_hit) ++a.limit_hits;
      if (at.singular) ++a.singular_events;
      if (!std::isnan(at.phi)) {
        a.min_phi = std::min(a.min_phi, at.phi);
        if (at.phi < 0.0) ++a.intrusion_count;
      }
      a.min_clearance = std::min(a.min_clearance, at.clearance);
      a.min_arm_distance = std::min(a.min_arm_distance, at.arm_distance);
      if (t >= n - tail && at.has_target) {
        tail_sum += (at.x_t - at.target.p).norm();
        ++tail_count;
      }
    }
    if (tail_count > 0) a.e_t_s = tail_sum / tail_count;
    if (n > 0) {
      a.final_eta_norm = log.ticks.back().arms[i].state.norm;
      a.final_tau = log.ticks.back().arms[i].tau;
    }
    a.pipeline_complete = std::all_of(a.steps.begin(), a.steps.end(),
                                      [](const StepSummary& s) { return s.complete >= 0; });
    m.arms.push_back(std::move(a));
  }
  return m;
}

}  // namespace wristed
