/**
 * @file test_pipeline.cpp
 * @brief Pipeline strings, mode phases, transitions, completion and jaw scheduling
 */
#include "wristed/pipeline.hpp"

#include <gtest/gtest.h>

using namespace wristed;

TEST(Pipeline, ParseAndFormatRoundTrip) {
  for (const char* s : {"3-5-0-0-0-4-1", "0-0-3-5-2-1-2", "3", "1-5", "0"}) {
    EXPECT_EQ(format_pipeline(parse_pipeline(s)), s);
  }
  const auto m = parse_pipeline("3-5-0-0-0-4-1");
  ASSERT_EQ(m.size(), 7u);
  EXPECT_EQ(m[0], Mode::III);
  EXPECT_EQ(m[1], Mode::V);
  EXPECT_EQ(m[2], Mode::Idle);
  EXPECT_EQ(m[5], Mode::IV);
  EXPECT_EQ(m[6], Mode::I);
}

TEST(Pipeline, RejectsMalformedStrings) {
  for (const char* s : {"", "6", "3--1", "-3", "3-", "a", "12", "3 -1", "3-5-x"}) {
    EXPECT_THROW(parse_pipeline(s), PipelineError) << s;
  }
}

TEST(Pipeline, ModePhases) {
  EXPECT_TRUE(mode_phases(Mode::Idle).empty());
  EXPECT_EQ(mode_phases(Mode::I), (std::vector<Phase>{Phase::II}));
  EXPECT_EQ(mode_phases(Mode::II), (std::vector<Phase>{Phase::I, Phase::II}));
  EXPECT_EQ(mode_phases(Mode::III), (std::vector<Phase>{Phase::II, Phase::III}));
  EXPECT_EQ(mode_phases(Mode::IV), (std::vector<Phase>{Phase::I, Phase::II, Phase::III}));
  EXPECT_EQ(mode_phases(Mode::V), (std::vector<Phase>{Phase::III}));
  EXPECT_EQ(initial_phase(Mode::IV).phase, Phase::I);
  EXPECT_EQ(initial_phase(Mode::V).phase, Phase::III);
  EXPECT_EQ(initial_phase(Mode::I).phase, Phase::II);
}

TEST(Pipeline, StepValidation) {
  SmpStep s;
  EXPECT_NO_THROW(validate_step(s));
  s.mode = Mode::III;
  EXPECT_THROW(validate_step(s), PipelineError);
  s.target_ref = "t";
  EXPECT_NO_THROW(validate_step(s));
  s.mode = Mode::IV;
  EXPECT_THROW(validate_step(s), PipelineError);
  s.retract_ref = "r";
  EXPECT_NO_THROW(validate_step(s));
  s.eps = 0.0;
  EXPECT_THROW(validate_step(s), PipelineError);
}

TEST(Pipeline, PaddingEqualisesArms) {
  Pipeline p;
  p.arms.resize(2);
  p.arms[0].resize(3);
  p.arms[1].resize(7);
  pad_pipeline(p);
  EXPECT_EQ(p.arms[0].size(), 7u);
  EXPECT_EQ(p.arms[0][6].mode, Mode::Idle);
}

TEST(Pipeline, PhaseTransitions) {
  SmpStep iv{Mode::IV, "t", "r"};
  PhaseState ps = initial_phase(Mode::IV);
  ps = phase_transition(ps, iv, 0.5, 0.0);
  EXPECT_EQ(ps.phase, Phase::I);
  ps = phase_transition(ps, iv, 0.005, 0.0);
  EXPECT_EQ(ps.phase, Phase::II);
  ps = phase_transition(ps, iv, 0.0, 0.0);
  EXPECT_EQ(ps.phase, Phase::II);
  ps = phase_transition(ps, iv, 0.001, 0.0);
  EXPECT_EQ(ps.phase, Phase::III);

  SmpStep ii{Mode::II, "t", "r"};
  ps = phase_transition(initial_phase(Mode::II), ii, 0.001, 0.0);
  EXPECT_EQ(ps.phase, Phase::II);
  ps = phase_transition(ps, ii, 0.5, 0.0);
  EXPECT_EQ(ps.phase, Phase::II);

  SmpStep iii{Mode::III, "t"};
  ps = phase_transition(initial_phase(Mode::III), iii, 0.0, 0.0);
  EXPECT_EQ(ps.phase, Phase::II);
  ps = phase_transition(ps, iii, 1e-9, 0.0);
  EXPECT_EQ(ps.phase, Phase::III);
}

TEST(Pipeline, CompletionRules) {
  NssState small;
  small.norm = 1e-4;
  NssState big;
  big.norm = 1.0;
  const SmpStep i{Mode::I, "t"};
  EXPECT_TRUE(step_complete(initial_phase(Mode::I), small, 0.0, i));
  EXPECT_FALSE(step_complete(initial_phase(Mode::I), big, 0.0, i));
  const SmpStep iii{Mode::III, "t"};
  PhaseState p3;
  p3.phase = Phase::III;
  EXPECT_FALSE(step_complete(p3, small, 0.99, iii));
  EXPECT_TRUE(step_complete(p3, small, 1.0, iii));
  EXPECT_FALSE(step_complete(initial_phase(Mode::III), small, 1.0, iii));
  const SmpStep ii{Mode::II, "t", "r"};
  EXPECT_FALSE(step_complete(initial_phase(Mode::II), small, 0.0, ii));
  PhaseState p2;
  p2.phase = Phase::II;
  EXPECT_TRUE(step_complete(p2, small, 0.0, ii));
  EXPECT_TRUE(step_complete(PhaseState{}, big, 0.0, SmpStep{}));
}

TEST(Pipeline, JawOpensOnApproachAndClosesAtContact) {
  const JawParams jp;
  PhaseState ps;
  ps.phase = Phase::III;
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::III, 0.5, 0.01, jp), jp.open);
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::III, 0.995, 0.01, jp), 0.0);
  ps.jaw_target = jp.open;
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::III, 0.5, -0.01, jp), jp.open);
  ps.phase = Phase::I;
  ps.jaw_target = 0.0;
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::IV, 0.5, -0.05, jp), jp.open);
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::IV, 0.005, -0.05, jp), 0.0);
  ps.phase = Phase::II;
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::I, 0.0, 0.0, jp), 0.0);
  ps.jaw_target = 0.3;
  EXPECT_DOUBLE_EQ(jaw_schedule(ps, Mode::V, 0.5, 0.05, jp), 0.3);
}

TEST(Pipeline, JawRampIsRateLimited) {
  const JawParams jp;
  double jaw = 0.0;
  int ticks = 0;
  while (jaw != jp.open && ticks < 100) {
    const double next = jaw_ramp(jaw, jp.open, jp);
    EXPECT_LE(next - jaw, jp.open / jp.ramp_ticks + 1e-15);
    jaw = next;
    ++ticks;
  }
  EXPECT_GE(ticks, jp.ramp_ticks);
  EXPECT_LE(ticks, jp.ramp_ticks + 1);
  EXPECT_DOUBLE_EQ(jaw_ramp(0.1, 0.0, jp), 0.1 - jp.open / jp.ramp_ticks);
}
