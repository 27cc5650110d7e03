#include "wristed/scenario_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wristed {

// Generated from scenarios/*.json at configure time.
extern const std::vector<Preset>& embedded_presets();

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioError(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N) fail(field, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

// Reads an optional key into `out`; objects listing unknown keys are rejected by check_keys.
template <typename F>
void opt(const json& j, const char* key, const std::string& field, F&& read) {
  if (j.contains(key)) read(j.at(key), field + "." + key);
}

void check_keys(const json& j, const std::string& field, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(field, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      fail(field + "." + it.key(), "unknown key");
  }
}

Frame frame(const json& j, const std::string& field) {
  Frame f;
  f.p = vec<3>(j.at("position"), field + ".position");
  opt(j, "rotation", field, [&](const json& v, const std::string& p) { f.R = rotation_from_vector(vec<3>(v, p)); });
  return f;
}

RobotModel model(const json& j, const std::string& field) {
  check_keys(j, field, {"l_w", "l_t", "q3_range", "wrist_limit", "rcm_position", "rcm_rotation"});
  RobotModel m;
  opt(j, "l_w", field, [&](const json& v, const std::string& p) { m.l_w = number(v, p); });
  opt(j, "l_t", field, [&](const json& v, const std::string& p) { m.l_t = number(v, p); });
  opt(j, "q3_range", field, [&](const json& v, const std::string& p) {
    const Eigen::Vector2d r = vec<2>(v, p);
    m.q3_range = {r(0), r(1)};
  });
  opt(j, "wrist_limit", field, [&](const json& v, const std::string& p) {
    const double w = number(v, p);
    m.wrist_limits = {-w, w};
  });
  opt(j, "rcm_position", field, [&](const json& v, const std::string& p) { m.rcm_pose.translation() = vec<3>(v, p); });
  opt(j, "rcm_rotation", field, [&](const json& v, const std::string& p) {
    m.rcm_pose.linear() = rotation_from_vector(vec<3>(v, p));
  });
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  return m;
}

Noise noise(const json& j, const std::string& field) {
  check_keys(j, field, {"position", "orientation"});
  Noise n;
  opt(j, "position", field, [&](const json& v, const std::string& p) { n.position = number(v, p); });
  opt(j, "orientation", field, [&](const json& v, const std::string& p) { n.orientation = number(v, p); });
  if (n.position < 0.0 || n.orientation < 0.0) fail(field, "magnitudes must be non-negative");
  return n;
}

MotionProfile motion(const json& j, const std::string& field) {
  check_keys(j, field, {"linear", "sinusoid"});
  MotionProfile mp;
  opt(j, "linear", field, [&](const json& l, const std::string& p) {
    check_keys(l, p, {"to", "speed", "start", "halts"});
    mp.linear = true;
    mp.to = vec<3>(l.at("to"), p + ".to");
    opt(l, "speed", p, [&](const json& v, const std::string& q) { mp.speed = number(v, q); });
    opt(l, "start", p, [&](const json& v, const std::string& q) { mp.linear_start = integer(v, q); });
    opt(l, "halts", p, [&](const json& hs, const std::string& q) {
      if (!hs.is_array()) fail(q, "expected an array");
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const std::string hf = q + "[" + std::to_string(i) + "]";
        check_keys(hs[i], hf, {"at", "ticks"});
        mp.halts.push_back({number(hs[i].at("at"), hf + ".at"), integer(hs[i].at("ticks"), hf + ".ticks")});
      }
    });
    if (!(mp.speed > 0.0)) fail(p + ".speed", "must be positive");
  });
  opt(j, "sinusoid", field, [&](const json& s, const std::string& p) {
    check_keys(s, p, {"amplitude", "omega", "start", "duration"});
    mp.sinusoid = true;
    mp.amplitude = vec<3>(s.at("amplitude"), p + ".amplitude");
    opt(s, "omega", p, [&](const json& v, const std::string& q) { mp.omega = number(v, q); });
    opt(s, "start", p, [&](const json& v, const std::string& q) { mp.sinusoid_start = integer(v, q); });
    opt(s, "duration", p, [&](const json& v, const std::string& q) { mp.sinusoid_duration = integer(v, q); });
  });
  return mp;
}

Path path(const json& j, const std::string& field) {
  check_keys(j, field, {"type", "center", "axis", "angle", "frames"});
  const std::string type = j.value("type", "arc");
  if (type == "arc") {
    return arc_path(vec<3>(j.at("center"), field + ".center"), vec<3>(j.at("axis"), field + ".axis"),
                    number(j.at("angle"), field + ".angle"));
  }
  if (type == "waypoints") {
    Path p;
    p.kind = Path::Kind::Waypoints;
    const json& fs = j.at("frames");
    if (!fs.is_array() || fs.size() < 2) fail(field + ".frames", "expected at least two frames");
    for (std::size_t i = 0; i < fs.size(); ++i) p.waypoints.push_back(frame(fs[i], field + ".frames[" + std::to_string(i) + "]"));
    return p;
  }
  fail(field + ".type", "expected 'arc' or 'waypoints'");
}

JointState joints(const json& j, const std::string& field) {
  JointState q;
  q.q = vec<6>(j, field);
  return q;
}

Scenario parse(const json& root) {
  check_keys(root, "scenario", {"name", "seed", "ticks", "dt", "gains", "gvm", "jaw", "avoidance", "arms",
                                "targets", "obstacles", "barriers", "disturbances"});
  Scenario sc;
  opt(root, "name", "", [&](const json& v, const std::string&) { sc.name = v.get<std::string>(); });
  opt(root, "seed", "", [&](const json& v, const std::string&) {
    if (!v.is_number_unsigned()) fail("seed", "expected a non-negative integer");
    sc.seed = v.get<std::uint64_t>();
  });
  opt(root, "ticks", "", [&](const json& v, const std::string&) { sc.ticks = integer(v, "ticks"); });
  opt(root, "dt", "", [&](const json& v, const std::string&) { sc.gains.dt = number(v, "dt"); });

  opt(root, "gains", "", [&](const json& g, const std::string&) {
    check_keys(g, "gains", {"gamma", "k_alloc", "step_saturation", "sma"});
    opt(g, "gamma", "gains", [&](const json& v, const std::string& p) { sc.gains.gamma = vec<6>(v, p); });
    opt(g, "k_alloc", "gains", [&](const json& v, const std::string& p) { sc.gains.k_alloc = vec<3>(v, p); });
    opt(g, "step_saturation", "gains", [&](const json& v, const std::string& p) { sc.gains.step_saturation = number(v, p); });
    opt(g, "sma", "gains", [&](const json& v, const std::string&) { sc.gains.sma = v.get<bool>(); });
  });
  opt(root, "gvm", "", [&](const json& g, const std::string&) {
    check_keys(g, "gvm", {"gamma", "kappa", "d", "retract_rate"});
    opt(g, "gamma", "gvm", [&](const json& v, const std::string& p) { sc.gvm.gamma = number(v, p); });
    opt(g, "kappa", "gvm", [&](const json& v, const std::string& p) { sc.gvm.kappa = number(v, p); });
    opt(g, "d", "gvm", [&](const json& v, const std::string& p) { sc.gvm.d = number(v, p); });
    opt(g, "retract_rate", "gvm", [&](const json& v, const std::string& p) { sc.gvm.retract_rate = number(v, p); });
  });
  opt(root, "jaw", "", [&](const json& g, const std::string&) {
    check_keys(g, "jaw", {"open", "ramp_ticks", "close_tau"});
    opt(g, "open", "jaw", [&](const json& v, const std::string& p) { sc.jaw.open = number(v, p); });
    opt(g, "ramp_ticks", "jaw", [&](const json& v, const std::string& p) { sc.jaw.ramp_ticks = integer(v, p); });
    opt(g, "close_tau", "jaw", [&](const json& v, const std::string& p) { sc.jaw.close_tau = number(v, p); });
  });
  opt(root, "avoidance", "", [&](const json& g, const std::string&) {
    check_keys(g, "avoidance", {"enabled", "r_o", "a_e", "blend_ticks", "tracked_span"});
    opt(g, "enabled", "avoidance", [&](const json& v, const std::string&) { sc.avoidance.enabled = v.get<bool>(); });
    opt(g, "r_o", "avoidance", [&](const json& v, const std::string& p) { sc.avoidance.r_o = number(v, p); });
    opt(g, "a_e", "avoidance", [&](const json& v, const std::string& p) { sc.avoidance.params.a_e = number(v, p); });
    opt(g, "blend_ticks", "avoidance", [&](const json& v, const std::string& p) { sc.avoidance.params.blend_ticks = integer(v, p); });
    opt(g, "tracked_span", "avoidance", [&](const json& v, const std::string& p) { sc.avoidance.tracked_span = number(v, p); });
  });

  if (!root.contains("arms") || !root["arms"].is_array()) fail("arms", "expected an array");
  const json& arms = root["arms"];
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::string f = "arms[" + std::to_string(i) + "]";
    const json& a = arms[i];
    check_keys(a, f, {"name", "model", "joints", "jaw", "pipeline", "targets", "retract", "eps", "eps_g"});
    ArmConfig arm;
    arm.name = a.value("name", "arm" + std::to_string(i));
    if (a.contains("model")) arm.model = model(a["model"], f + ".model");
    arm.q0 = joints(a.at("joints"), f + ".joints");
    opt(a, "jaw", f, [&](const json& v, const std::string& p) { arm.q0.jaw = number(v, p); });
    std::vector<Mode> modes;
    if (a.contains("pipeline")) {
      if (!a["pipeline"].is_string()) fail(f + ".pipeline", "expected a string");
      try {
        modes = parse_pipeline(a["pipeline"].get<std::string>());
      } catch (const PipelineError& e) {
        fail(f + ".pipeline", e.what());
      }
    }
    auto refs = [&](const char* key) {
      std::vector<std::string> out(modes.size());
      if (!a.contains(key)) return out;
      const json& r = a[key];
      if (!r.is_array() || r.size() != modes.size())
        fail(f + "." + key, "expected one entry per pipeline step");
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k].is_string()) out[k] = r[k].get<std::string>();
        else if (!r[k].is_null()) fail(f + "." + key + "[" + std::to_string(k) + "]", "expected a name or null");
      }
      return out;
    };
    const auto targets = refs("targets");
    const auto retract = refs("retract");
    for (std::size_t k = 0; k < modes.size(); ++k) {
      SmpStep s;
      s.mode = modes[k];
      s.target_ref = targets[k];
      s.retract_ref = retract[k];
      opt(a, "eps", f, [&](const json& v, const std::string& p) { s.eps = number(v, p); });
      opt(a, "eps_g", f, [&](const json& v, const std::string& p) { s.eps_g = number(v, p); });
      try {
        validate_step(s);
      } catch (const PipelineError& e) {
        fail(f + ".pipeline[" + std::to_string(k) + "]", e.what());
      }
      arm.steps.push_back(s);
    }
    sc.arms.push_back(std::move(arm));
  }

  opt(root, "targets", "", [&](const json& ts, const std::string&) {
    if (!ts.is_array()) fail("targets", "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string f = "targets[" + std::to_string(i) + "]";
      const json& t = ts[i];
      check_keys(t, f, {"name", "position", "rotation", "from_joints", "noise", "motion", "path"});
      Target tg;
      if (!t.contains("name") || !t["name"].is_string()) fail(f + ".name", "expected a string");
      tg.name = t["name"].get<std::string>();
      if (t.contains("from_joints")) {
        const json& fj = t["from_joints"];
        check_keys(fj, f + ".from_joints", {"arm", "joints"});
        const std::string arm = fj.value("arm", "");
        auto it = std::find_if(sc.arms.begin(), sc.arms.end(), [&](const ArmConfig& a) { return a.name == arm; });
        if (it == sc.arms.end()) fail(f + ".from_joints.arm", "unknown arm '" + arm + "'");
        const SkeletonPose pose = forward_kinematics(it->model, joints(fj.at("joints"), f + ".from_joints.joints"));
        tg.pose = {pose.x_t, pose.R_e};
      } else if (t.contains("position")) {
        tg.pose = frame(t, f);
      } else {
        fail(f, "needs 'position' or 'from_joints'");
      }
      opt(t, "noise", f, [&](const json& v, const std::string& p) { tg.noise = noise(v, p); });
      opt(t, "motion", f, [&](const json& v, const std::string& p) { tg.motion = motion(v, p); });
      opt(t, "path", f, [&](const json& v, const std::string& p) {
        tg.is_path = true;
        tg.path = path(v, p);
      });
      sc.targets.push_back(std::move(tg));
    }
  });

  opt(root, "obstacles", "", [&](const json& os, const std::string&) {
    if (!os.is_array()) fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < os.size(); ++i) {
      const std::string f = "obstacles[" + std::to_string(i) + "]";
      check_keys(os[i], f, {"center", "r_o"});
      Obstacle o;
      o.center = vec<3>(os[i].at("center"), f + ".center");
      o.r_o = os[i].contains("r_o") ? number(os[i]["r_o"], f + ".r_o") : sc.avoidance.r_o;
      sc.obstacles.push_back(o);
    }
  });

  opt(root, "barriers", "", [&](const json& b, const std::string&) {
    if (b.is_string() && b.get<std::string>() == "all") return;
    if (!b.is_array()) fail("barriers", "expected \"all\" or an array of step indices");
    sc.barrier_every_step = false;
    for (std::size_t i = 0; i < b.size(); ++i) sc.barriers.push_back(integer(b[i], "barriers[" + std::to_string(i) + "]"));
  });

  opt(root, "disturbances", "", [&](const json& ds, const std::string&) {
    if (!ds.is_array()) fail("disturbances", "expected an array");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::string f = "disturbances[" + std::to_string(i) + "]";
      check_keys(ds[i], f, {"arm", "tick", "joints"});
      Disturbance d;
      d.arm = ds[i].contains("arm") ? integer(ds[i]["arm"], f + ".arm") : 0;
      d.tick = integer(ds[i].at("tick"), f + ".tick");
      d.dq = vec<6>(ds[i].at("joints"), f + ".joints");
      sc.disturbances.push_back(d);
    }
  });

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return sc;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("syntax: ") + e.what());
  }
  try {
    return parse(root);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("schema: ") + e.what());
  }
}

RobotModel parse_robot_model(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("syntax: ") + e.what());
  }
  try {
    return model(root, "model");
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("schema: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot read scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

const std::vector<Preset>& presets() { return embedded_presets(); }

Scenario load_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return parse_scenario(p.text);
  throw ScenarioError("preset: unknown preset '" + name + "'");
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t", "arm", "step", "mode", "phase",
      "q1", "q2", "q3", "q4", "q5", "q6", "jaw",
      "x_t", "y_t", "z_t", "rv_e_x", "rv_e_y", "rv_e_z",
      "e_s_x", "e_s_y", "e_s_z", "eta1", "eta2", "eta3", "eta4", "eta_norm",
      "lambda2", "lambda3", "lambda4", "tau", "tau_dot",
      "goal_x", "goal_y", "goal_z",
      "target_x", "target_y", "target_z", "target_rv_x", "target_rv_y", "target_rv_z", "target_moving",
      "phi", "clearance", "arm_distance", "blend", "saturation",
      "limit_hit", "singular", "step_done", "events"};
  return cols;
}

namespace {

void put(std::string& row, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  row += buf;
  row += ',';
}

void put(std::string& row, int v) {
  row += std::to_string(v);
  row += ',';
}

void put(std::string& row, const Vec3& v) {
  for (int i = 0; i < 3; ++i) put(row, v(i));
}

}  // namespace

void write_csv(std::ostream& out, const TrajectoryLog& log) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string row;
  for (const TickRecord& rec : log.ticks) {
    for (std::size_t i = 0; i < rec.arms.size(); ++i) {
      const ArmTick& a = rec.arms[i];
      row.clear();
      put(row, rec.t);
      row += log.arm_names[i] + ',';
      put(row, a.step);
      put(row, static_cast<int>(a.mode));
      put(row, static_cast<int>(a.phase));
      for (int k = 0; k < 6; ++k) put(row, a.q.q(k));
      put(row, a.q.jaw);
      put(row, a.x_t);
      put(row, a.rv_e);
      put(row, a.state.e_s);
      put(row, a.state.eta1);
      put(row, a.state.eta2);
      put(row, a.state.eta3);
      put(row, a.state.eta4);
      put(row, a.state.norm);
      put(row, a.alloc.lambda2);
      put(row, a.alloc.lambda3);
      put(row, a.alloc.lambda4);
      put(row, a.tau);
      put(row, a.tau_dot);
      put(row, a.goal);
      put(row, a.has_target ? a.target.p : Vec3::Constant(std::nan("")));
      put(row, a.has_target ? rotation_to_vector(a.target.R) : Vec3::Constant(std::nan("")));
      put(row, a.target_moving ? 1 : 0);
      put(row, a.phi);
      put(row, a.clearance);
      put(row, a.arm_distance);
      put(row, a.blend);
      put(row, a.saturation);
      put(row, a.limit_hit ? 1 : 0);
      put(row, a.singular ? 1 : 0);
      put(row, a.step_done ? 1 : 0);
      row += a.events;
      out << row << '\n';
    }
  }
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string summary_json(const RunMetrics& m) {
  json j;
  j["name"] = m.name;
  j["seed"] = m.seed;
  j["ticks"] = m.ticks;
  j["dt"] = m.dt;
  j["invariants_clean"] = m.invariants_clean();
  j["arms"] = json::array();
  for (const ArmMetrics& a : m.arms) {
    json ja;
    ja["name"] = a.name;
    ja["pipeline_complete"] = a.pipeline_complete;
    ja["final_eta_norm"] = finite_or_null(a.final_eta_norm);
    ja["final_tau"] = a.final_tau;
    ja["e_t_s"] = finite_or_null(a.e_t_s);
    ja["min_clearance"] = finite_or_null(a.min_clearance);
    ja["min_arm_distance"] = finite_or_null(a.min_arm_distance);
    ja["min_phi"] = finite_or_null(a.min_phi);
    ja["intrusion_count"] = a.intrusion_count;
    ja["limit_hits"] = a.limit_hits;
    ja["singular_events"] = a.singular_events;
    ja["lambda_violations"] = a.lambda_violations;
    ja["tau_violations"] = a.tau_violations;
    ja["joint_violations"] = a.joint_violations;
    ja["link_violations"] = a.link_violations;
    ja["steps"] = json::array();
    for (const StepSummary& s : a.steps) {
      json js;
      js["index"] = s.index;
      js["mode"] = mode_name(s.mode);
      js["start"] = s.start;
      js["complete"] = s.complete;
      js["settling"] = s.settling;
      js["duration"] = s.start >= 0 && s.complete >= 0 ? json(s.complete - s.start) : json(nullptr);
      ja["steps"].push_back(js);
    }
    j["arms"].push_back(ja);
  }
  return j.dump(2) + "\n";
}

}  // namespace wristed
