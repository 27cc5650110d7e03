/**
 * @file pipeline.hpp
 * @brief Motion primitives, modes of behaviour, pipeline strings and jaw scheduling
 */
#pragma once

#include "wristed/nss.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wristed {

enum class Mode { Idle = 0, I = 1, II = 2, III = 3, IV = 4, V = 5 };
enum class Phase { I = 1, II = 2, III = 3 };

class PipelineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SmpStep {
  Mode mode = Mode::Idle;
  std::string target_ref;
  std::string retract_ref;
  double eps = 0.01;
  double eps_g = kDefaultGoalEps;
};

/// One step list per arm plus the step indices that both arms must reach together.
struct Pipeline {
  std::vector<std::vector<SmpStep>> arms;
  std::vector<int> barriers;
};

struct PhaseState {
  Phase phase = Phase::II;
  double jaw_target = 0.0;
};

struct JawParams {
  double open = 30.0 * 3.14159265358979323846 / 180.0;
  int ramp_ticks = 20;
  double close_tau = 0.99;
};

std::vector<Mode> parse_pipeline(std::string_view text);
std::string format_pipeline(const std::vector<Mode>& modes);

/// Phases a mode passes through, in order.
std::vector<Phase> mode_phases(Mode mode);
std::string mode_name(Mode mode);

/// Throws PipelineError when a step misses a reference its mode needs.
void validate_step(const SmpStep& step);

/// Pads the shorter arm lists with idle steps.
void pad_pipeline(Pipeline& p);

PhaseState initial_phase(Mode mode);

/// Phase I hands over to phase II once tau < eps; phase II becomes III once tau > 0.
PhaseState phase_transition(const PhaseState& ps, const SmpStep& step, double tau, double eta_norm);

bool step_complete(const PhaseState& ps, const NssState& state, double tau, const SmpStep& step);

/// Jaw target after this tick; the caller ramps the jaw towards it.
double jaw_schedule(const PhaseState& ps, Mode mode, double tau, double tau_dot,
                    const JawParams& params = {});

/// Moves the jaw towards its target by at most open / ramp_ticks.
double jaw_ramp(double jaw, double target, const JawParams& params = {});

}  // namespace wristed
