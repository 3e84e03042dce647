// Command-line front end for the desoldering process simulator.
//
// Exit codes: 0 success, 1 run ended in a process fault, 2 configuration
// error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "desolder/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFault = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desoldering process simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string report_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t trials = 1;
  std::size_t jobs = 1;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Override the scenario seed")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write its trace");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_path, "Trace CSV output path")->required();
  run->add_option("--report", report_path, "Run report JSON output path");
  add_seed(run);

  CLI::App* batch = app.add_subcommand("batch", "Run a Monte-Carlo batch of trials");
  batch->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  batch->add_option("--trials", trials, "Number of trials")->required()
      ->check(CLI::PositiveNumber);
  batch->add_option("--out", out_path, "Batch report JSON output path")->required();
  batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_seed(batch);

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    desolder::Scenario scenario = desolder::load_scenario_file(scenario_path);
    if (seed_set) scenario.seed = seed;

    if (validate->parsed()) {
      std::cout << "ok: " << scenario.label << "\n";
      return kExitOk;
    }

    if (run->parsed()) {
      const desolder::RunResult result = desolder::run_scenario(scenario);
      desolder::write_trace_file(result.trace, out_path);
      if (!report_path.empty())
        desolder::write_text_file(desolder::report_to_json(result.report), report_path);
      std::cout << (result.report.desolder_success ? "desolder ok" : "desolder failed");
      if (!result.report.fault.empty()) std::cout << ", fault: " << result.report.fault;
      std::cout << "\n";
      return result.report.fault.empty() ? kExitOk : kExitFault;
    }

    // batch
    const desolder::BatchReport report = desolder::run_batch(scenario, trials, jobs);
    desolder::write_text_file(desolder::batch_report_to_json(report), out_path);
    std::cout << "desolder_rate " << report.desolder_rate << ", grasp_rate " << report.grasp_rate
              << "\n";
    return kExitOk;
  } catch (const desolder::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const desolder::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
