/**
 * @file sim.hpp
 * @brief Deterministic fixed-step scenario engine and run metrics
 */
#pragma once

#include "wristed/avoidance.hpp"
#include "wristed/gvm.hpp"
#include "wristed/pipeline.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace wristed {

/// Seeded 64-bit Mersenne Twister with one independent stream per target.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Stream k is seeded with splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15).
  static Rng stream(std::uint64_t seed, std::uint64_t k);
  /// Uniform in [lo, hi] from the top 53 bits, identical on every platform.
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

struct Noise {
  double position = 0.0;     ///< mm, per axis
  double orientation = 0.0;  ///< rad, per axis
};

/// Position and rotation-vector perturbation.
struct Perturbation {
  Vec3 dp = Vec3::Zero();
  Vec3 drv = Vec3::Zero();
};

Perturbation noise_sample(Rng& rng, const Noise& magnitudes);

struct Halt {
  double at = 0.5;  ///< fraction of the travel
  int ticks = 0;
};

struct MotionProfile {
  bool linear = false;
  Vec3 to = Vec3::Zero();
  double speed = 0.1;  ///< mm per tick
  int linear_start = 0;
  std::vector<Halt> halts;

  bool sinusoid = false;
  Vec3 amplitude = Vec3::Zero();  ///< rad about the target's own x, y, z axes
  double omega = 0.025;           ///< rad per tick
  int sinusoid_start = 0;
  int sinusoid_duration = 0;

  bool is_static() const { return !linear && !sinusoid; }
  /// Rigid displacement of the base frame at tick t.
  Frame at(const Frame& base, int t) const;
  bool moving(const Frame& base, int t) const;
};

struct Target {
  std::string name;
  Frame pose;  ///< contact pose, or the start frame of a path
  bool is_path = false;
  Path path;   ///< arc centre and axis in world; waypoints in world
  MotionProfile motion;
  Noise noise;
};

struct ArmConfig {
  std::string name;
  RobotModel model;
  JointState q0;
  std::vector<SmpStep> steps;
};

struct Disturbance {
  int arm = 0;
  int tick = 0;
  Vec6 dq = Vec6::Zero();
};

struct GvmParams {
  double gamma = 0.05;
  double kappa = 0.5;
  double d = 25.0;
  double retract_rate = 0.05;  ///< forced tau decay rate in phase I
};

struct AvoidanceConfig {
  bool enabled = false;
  double r_o = 10.0;
  double tracked_span = 20.0;  ///< mm of shaft covered by the other arm's spheres
  AvoidanceParams params;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  int ticks = 1000;
  ControlGains gains;
  GvmParams gvm;
  JawParams jaw;
  AvoidanceConfig avoidance;
  std::vector<ArmConfig> arms;
  std::vector<Target> targets;
  std::vector<Obstacle> obstacles;
  bool barrier_every_step = true;
  std::vector<int> barriers;  ///< step indices, used when barrier_every_step is false
  std::vector<Disturbance> disturbances;

  /// Throws std::invalid_argument (or PipelineError) naming the offending field.
  void validate() const;
  int target_index(const std::string& name) const;
};

struct ArmTick {
  int step = -1;
  Mode mode = Mode::Idle;
  Phase phase = Phase::II;
  JointState q;
  Vec3 x_t = Vec3::Zero();
  Vec3 rv_e = Vec3::Zero();
  NssState state;
  AllocationState alloc;
  double tau = 0.0;
  double tau_dot = 0.0;
  Vec3 goal = Vec3::Zero();       ///< instant goal origin
  bool has_target = false;
  Frame target;                   ///< true contact frame of the active step
  double phi = std::numeric_limits<double>::quiet_NaN();
  double clearance = std::numeric_limits<double>::infinity();
  double arm_distance = std::numeric_limits<double>::infinity();
  double blend = 0.0;
  double saturation = 1.0;
  bool target_moving = false;
  bool limit_hit = false;
  bool singular = false;
  bool step_done = false;
  std::string events;
};

struct TickRecord {
  int t = 0;
  std::vector<ArmTick> arms;
};

struct StepSummary {
  int index = 0;
  Mode mode = Mode::Idle;
  int start = -1;
  int complete = -1;
  int settling = -1;
};

struct TrajectoryLog {
  std::string name;
  std::uint64_t seed = 0;
  double dt = 0.05;
  std::vector<std::string> arm_names;
  std::vector<TickRecord> ticks;
  std::vector<std::vector<StepSummary>> steps;
};

/// Signed approach-axis coordinate of the tip in the contact frame; approach side positive.
double intrusion(const SkeletonPose& pose, const Frame& X_c, const Vec3& heading = Vec3::UnitZ());

TrajectoryLog run(const Scenario& scenario);

struct ArmMetrics {
  std::string name;
  double final_eta_norm = 0.0;
  double final_tau = 0.0;
  double e_t_s = std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::infinity();
  double min_arm_distance = std::numeric_limits<double>::infinity();
  double min_phi = std::numeric_limits<double>::infinity();
  int intrusion_count = 0;
  int limit_hits = 0;
  int singular_events = 0;
  int lambda_violations = 0;
  int tau_violations = 0;
  int joint_violations = 0;
  int link_violations = 0;
  bool pipeline_complete = false;
  std::vector<StepSummary> steps;
};

struct RunMetrics {
  std::string name;
  std::uint64_t seed = 0;
  int ticks = 0;
  double dt = 0.05;
  std::vector<ArmMetrics> arms;
  bool invariants_clean() const;
};

RunMetrics metrics(const TrajectoryLog& log, const Scenario& scenario);

}  // namespace wristed
