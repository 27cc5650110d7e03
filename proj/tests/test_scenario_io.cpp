/**
 * @file test_scenario_io.cpp
 * @brief Scenario parsing, shipped presets, CSV layout and JSON summaries
 */
#include "wristed/scenario_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <sstream>

using namespace wristed;
using nlohmann::json;

namespace {

const char* kMinimal = R"({
  "name": "mini", "seed": 3, "ticks": 40,
  "arms": [{"name": "psm1", "joints": [0, 0, 170, 0, 0, 0], "pipeline": "3-2",
            "targets": ["t", "t"], "retract": [null, "t"]}],
  "targets": [{"name": "t", "position": [1, 2, 185], "rotation": [0, 0, 0.2], "noise": {"position": 0.1}}]
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

std::string with(const std::string& key_path, const json& value) {
  json j = json::parse(kMinimal);
  j[json::json_pointer(key_path)] = value;
  return j.dump();
}

}  // namespace

TEST(ScenarioIo, ParsesMinimalScenario) {
  const Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.name, "mini");
  EXPECT_EQ(sc.seed, 3u);
  EXPECT_EQ(sc.ticks, 40);
  ASSERT_EQ(sc.arms.size(), 1u);
  ASSERT_EQ(sc.arms[0].steps.size(), 2u);
  EXPECT_EQ(sc.arms[0].steps[1].mode, Mode::II);
  EXPECT_EQ(sc.arms[0].steps[1].retract_ref, "t");
  EXPECT_DOUBLE_EQ(sc.targets[0].noise.position, 0.1);
  EXPECT_NEAR(sc.targets[0].pose.p.z(), 185.0, 0.0);
  EXPECT_TRUE(sc.barrier_every_step);
}

TEST(ScenarioIo, ErrorsNameTheField) {
  EXPECT_NE(error_of(with("/bogus", 1)).find("scenario.bogus"), std::string::npos);
  EXPECT_NE(error_of(with("/ticks", "many")).find("ticks"), std::string::npos);
  EXPECT_NE(error_of(with("/arms/0/joints", json::array({1, 2}))).find("arms[0].joints"), std::string::npos);
  EXPECT_NE(error_of(with("/arms/0/pipeline", "3-9")).find("arms[0].pipeline"), std::string::npos);
  EXPECT_NE(error_of(with("/arms/0/retract", json::array({nullptr, nullptr}))).find("arms[0].pipeline[1]"),
            std::string::npos);
  EXPECT_NE(error_of(with("/targets/0/noise/position", -1.0)).find("targets[0].noise"), std::string::npos);
  EXPECT_NE(error_of(with("/arms/0/model", json{{"l_w", -1.0}})).find("arms[0].model"), std::string::npos);
  EXPECT_NE(error_of(with("/arms/0/targets", json::array({"t", "nope"}))).find("nope"), std::string::npos);
  EXPECT_NE(error_of("{not json").find("syntax"), std::string::npos);
}

TEST(ScenarioIo, RobotModelDocument) {
  const RobotModel m = parse_robot_model(R"({"l_w": 8.0, "l_t": 10.0, "q3_range": [140, 210],
      "wrist_limit": 1.2, "rcm_position": [1, 2, 3], "rcm_rotation": [0, 0, 1.5707963267948966]})");
  EXPECT_DOUBLE_EQ(m.l_w, 8.0);
  EXPECT_DOUBLE_EQ(m.l_t, 10.0);
  EXPECT_DOUBLE_EQ(m.q3_range.hi, 210.0);
  EXPECT_DOUBLE_EQ(m.wrist_limits.lo, -1.2);
  EXPECT_EQ(m.rcm_pose.translation(), Vec3(1, 2, 3));
  EXPECT_LT((m.rcm_pose.linear() * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-12);
  EXPECT_THROW(parse_robot_model(R"({"l_t": 0})"), ScenarioError);
  EXPECT_THROW(parse_robot_model(R"({"length": 3})"), ScenarioError);
}

TEST(ScenarioIo, PresetsAreShippedAndValid) {
  const std::vector<std::string> expected = {
      "debridement_4", "debridement_6", "scene1_case1", "scene1_case2", "scene1_case3", "scene2_dualarm",
      "scene3_perturbed", "scene4_case1", "scene4_case2", "scene4_case3", "suturing_5throw"};
  std::vector<std::string> names;
  for (const Preset& p : presets()) names.push_back(p.name);
  EXPECT_EQ(names, expected);
  for (const auto& n : expected) {
    const Scenario sc = load_preset(n);
    EXPECT_EQ(sc.name, n);
    EXPECT_NO_THROW(sc.validate());
  }
  EXPECT_THROW(load_preset("nope"), ScenarioError);
}

TEST(ScenarioIo, CsvHasOneRowPerArmAndTick) {
  const Scenario sc = parse_scenario(kMinimal);
  const TrajectoryLog log = run(sc);
  std::ostringstream out;
  write_csv(out, log);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  std::string joined;
  for (const auto& c : csv_columns()) joined += (joined.empty() ? "" : ",") + c;
  EXPECT_EQ(header, joined);
  EXPECT_EQ(csv_columns().size(), 50u);
  EXPECT_EQ(csv_columns().front(), "t");
  EXPECT_EQ(csv_columns().back(), "events");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    const auto commas = std::count(line.begin(), line.end(), ',');
    EXPECT_EQ(commas, static_cast<long>(csv_columns().size()) - 1);
  }
  EXPECT_EQ(rows, sc.ticks);
}

TEST(ScenarioIo, SummaryJsonFields) {
  const Scenario sc = parse_scenario(kMinimal);
  const json j = json::parse(summary_json(metrics(run(sc), sc)));
  EXPECT_EQ(j["name"], "mini");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["ticks"], 40);
  EXPECT_TRUE(j["invariants_clean"].is_boolean());
  ASSERT_EQ(j["arms"].size(), 1u);
  const json& a = j["arms"][0];
  for (const char* k : {"name", "pipeline_complete", "final_eta_norm", "final_tau", "e_t_s", "min_clearance",
                        "min_arm_distance", "min_phi", "intrusion_count", "limit_hits", "singular_events",
                        "lambda_violations", "tau_violations", "joint_violations", "link_violations", "steps"})
    EXPECT_TRUE(a.contains(k)) << k;
  EXPECT_TRUE(a["min_clearance"].is_null());
  ASSERT_EQ(a["steps"].size(), 2u);
  EXPECT_EQ(a["steps"][0]["mode"], "III");
  EXPECT_EQ(a["steps"][0]["start"], 0);
}
