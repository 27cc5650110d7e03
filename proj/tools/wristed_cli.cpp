/**
 * @file wristed_cli.cpp
 * @brief Command-line entry point: list presets, validate and run scenarios
 */
#include "wristed/scenario_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum Exit { kOk = 0, kUsage = 1, kScenario = 2, kRuntime = 3 };

wristed::Scenario resolve(const std::string& ref) {
  if (std::filesystem::exists(ref)) return wristed::load_scenario(ref);
  return wristed::load_preset(ref);
}

void print_summary(const wristed::RunMetrics& m) {
  std::printf("scenario %s  seed %llu  ticks %d  invariants %s\n", m.name.c_str(),
              static_cast<unsigned long long>(m.seed), m.ticks, m.invariants_clean() ? "clean" : "VIOLATED");
  for (const auto& a : m.arms) {
    std::printf("  %s: complete=%s final|eta|=%.3e tau=%.3f e_t,s=%.4f min_phi=%.4f intrusions=%d "
                "limit_hits=%d min_clearance=%.3f min_arm_distance=%.3f\n",
                a.name.c_str(), a.pipeline_complete ? "yes" : "no", a.final_eta_norm, a.final_tau, a.e_t_s,
                a.min_phi, a.intrusion_count, a.limit_hits, a.min_clearance, a.min_arm_distance);
    for (const auto& s : a.steps)
      std::printf("    step %d mode %s start %d settle %d complete %d\n", s.index,
                  wristed::mode_name(s.mode).c_str(), s.start, s.settling, s.complete);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wristed-instrument planning and control simulator"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Print the shipped preset names, one per line");

  std::string validate_ref;
  auto* validate = app.add_subcommand("validate", "Check a scenario file or preset without running it");
  validate->add_option("scenario", validate_ref, "Scenario path or preset name")->required();

  std::string run_ref;
  std::optional<std::uint64_t> seed;
  std::optional<int> ticks;
  std::optional<double> noise;
  const char* env_out = std::getenv("WRISTED_OUT_DIR");
  std::string out_dir = env_out && *env_out ? env_out : ".";
  std::string format = "both";
  auto* run = app.add_subcommand("run", "Run a scenario and write <name>.csv and <name>.summary.json");
  run->add_option("scenario", run_ref, "Scenario path or preset name")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--ticks", ticks, "Override the run duration in ticks")->check(CLI::NonNegativeNumber);
  run->add_option("--noise", noise, "Override every target's position noise magnitude [mm]")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory (default: $WRISTED_OUT_DIR or .)");
  run->add_option("--format", format, "Output files to write")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (list->parsed()) {
    for (const auto& p : wristed::presets()) std::cout << p.name << '\n';
    return kOk;
  }

  if (validate->parsed()) {
    try {
      const wristed::Scenario sc = resolve(validate_ref);
      std::cout << "ok: " << sc.name << '\n';
      return kOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kScenario;
    }
  }

  wristed::Scenario sc;
  try {
    sc = resolve(run_ref);
    if (seed) sc.seed = *seed;
    if (ticks) sc.ticks = *ticks;
    if (noise)
      for (auto& t : sc.targets) t.noise.position = *noise;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScenario;
  }

  try {
    const wristed::TrajectoryLog log = wristed::run(sc);
    const wristed::RunMetrics m = wristed::metrics(log, sc);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base = std::filesystem::path(out_dir) / sc.name;
    if (format != "json") {
      std::ofstream csv(base.string() + ".csv", std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write " + base.string() + ".csv");
      wristed::write_csv(csv, log);
    }
    if (format != "csv") {
      std::ofstream js(base.string() + ".summary.json", std::ios::binary);
      if (!js) throw std::runtime_error("cannot write " + base.string() + ".summary.json");
      js << wristed::summary_json(m);
    }
    print_summary(m);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScenario;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
