#include "wristed/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace wristed {

std::vector<Mode> parse_pipeline(std::string_view text) {
  std::vector<Mode> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dash = text.find('-', pos);
    const std::string_view tok = text.substr(pos, dash == std::string_view::npos ? text.npos : dash - pos);
    if (tok.size() != 1 || tok[0] < '0' || tok[0] > '5') {
      throw PipelineError("invalid mode token '" + std::string(tok) + "' in pipeline '" +
                          std::string(text) + "'");
    }
    out.push_back(static_cast<Mode>(tok[0] - '0'));
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return out;
}

std::string format_pipeline(const std::vector<Mode>& modes) {
  std::string s;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) s += '-';
    s += static_cast<char>('0' + static_cast<int>(modes[i]));
  }
  return s;
}

std::vector<Phase> mode_phases(Mode mode) {
  switch (mode) {
    case Mode::Idle: return {};
    case Mode::I: return {Phase::II};
    case Mode::II: return {Phase::I, Phase::II};
    case Mode::III: return {Phase::II, Phase::III};
    case Mode::IV: return {Phase::I, Phase::II, Phase::III};
    case Mode::V: return {Phase::III};
  }
  return {};
}

std::string mode_name(Mode mode) {
  static const char* names[] = {"idle", "I", "II", "III", "IV", "V"};
  return names[static_cast<int>(mode)];
}

void validate_step(const SmpStep& step) {
  const bool needs_retract = step.mode == Mode::II || step.mode == Mode::IV;
  const bool needs_target = step.mode != Mode::Idle;
  if (needs_retract && step.retract_ref.empty())
    throw PipelineError("mode " + mode_name(step.mode) + " step needs a retract reference");
  if (needs_target && step.target_ref.empty())
    throw PipelineError("mode " + mode_name(step.mode) + " step needs a target reference");
  if (!(step.eps > 0.0) || !(step.eps_g > 0.0))
    throw PipelineError("step thresholds must be positive");
}

void pad_pipeline(Pipeline& p) {
  std::size_t n = 0;
  for (const auto& a : p.arms) n = std::max(n, a.size());
  for (auto& a : p.arms) a.resize(n);
}

PhaseState initial_phase(Mode mode) {
  PhaseState ps;
  const auto phases = mode_phases(mode);
  ps.phase = phases.empty() ? Phase::II : phases.front();
  return ps;
}

PhaseState phase_transition(const PhaseState& ps, const SmpStep& step, double tau, double) {
  PhaseState next = ps;
  switch (step.mode) {
    case Mode::II:
    case Mode::IV:
      if (ps.phase == Phase::I && tau < step.eps) next.phase = Phase::II;
      else if (step.mode == Mode::IV && ps.phase == Phase::II && tau > 0.0) next.phase = Phase::III;
      break;
    case Mode::III:
      if (ps.phase == Phase::II && tau > 0.0) next.phase = Phase::III;
      break;
    default:
      break;
  }
  return next;
}

bool step_complete(const PhaseState& ps, const NssState& state, double tau, const SmpStep& step) {
  switch (step.mode) {
    case Mode::Idle: return true;
    case Mode::I: return state.norm < step.eps_g;
    case Mode::II: return ps.phase == Phase::II && state.norm < step.eps_g;
    case Mode::III:
    case Mode::IV:
    case Mode::V: return ps.phase == Phase::III && tau == 1.0 && state.norm < step.eps_g;
  }
  return false;
}

double jaw_schedule(const PhaseState& ps, Mode mode, double tau, double tau_dot,
                    const JawParams& params) {
  if (mode == Mode::Idle || mode == Mode::V) return ps.jaw_target;
  switch (ps.phase) {
    case Phase::I:
      if (tau <= 1.0 - params.close_tau) return 0.0;
      if (tau_dot < 0.0) return params.open;
      return ps.jaw_target;
    case Phase::II:
      return 0.0;
    case Phase::III:
      if (tau >= params.close_tau) return 0.0;
      if (tau > 0.0 && tau_dot > 0.0) return params.open;
      return ps.jaw_target;
  }
  return ps.jaw_target;
}

double jaw_ramp(double jaw, double target, const JawParams& params) {
  const double step = params.open / std::max(1, params.ramp_ticks);
  if (std::abs(target - jaw) <= step) return target;
  return jaw + (target > jaw ? step : -step);
}

}  // namespace wristed
