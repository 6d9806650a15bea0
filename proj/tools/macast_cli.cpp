// Copyright 2026 The macast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// macast: runs the Monte Carlo experiments and replays saved scenarios.
//
//   macast rate-vs-power --trials 20 --seed 7 --out-dir out --svg
//   macast two-user-los --config fig6.ini
//   macast replay out/scenarios/trial_0.json --n 4 --power-dbm 10

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macast/channel.hpp"
#include "macast/errors.hpp"
#include "macast/harness.hpp"
#include "macast/placement.hpp"
#include "macast/two_user.hpp"

namespace {

struct Flags {
  int m = 0;
  int n = 0;
  int k = 0;
  double power_dbm = 0.0;
  double noise_dbm = 0.0;
  double carrier_ghz = 0.0;
  double radius_m = 0.0;
  int paths = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  std::vector<double> sweep;
  std::string init;
  int threads = 1;
  std::string out_dir = "out";
  bool svg = false;
  bool dump_scenarios = false;
};

macast::ExperimentConfig BuildConfig(const CLI::App& app, macast::ExperimentId id, const Flags& f) {
  macast::ExperimentConfig c = macast::ExperimentConfig::Defaults(id);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--m")) c.m = f.m;
  if (given("--n")) c.n = f.n;
  if (given("--k")) c.k = f.k;
  if (given("--power-dbm")) c.power_dbm = f.power_dbm;
  if (given("--noise-dbm")) c.noise_dbm = f.noise_dbm;
  if (given("--carrier-ghz")) c.carrier_ghz = f.carrier_ghz;
  if (given("--radius")) c.cell_radius_m = f.radius_m;
  if (given("--paths")) c.paths = f.paths;
  if (given("--trials")) c.trials = f.trials;
  if (given("--seed")) c.seed = f.seed;
  if (given("--sweep")) c.sweep = f.sweep;
  if (given("--init")) c.init = macast::ParseInitMode(f.init);
  c.threads = f.threads;
  if (given("--methods")) {
    c.methods.clear();
    for (const std::string& m : f.methods) c.methods.push_back(macast::ParseMethod(m));
  }
  c.Validate();
  return c;
}

int RunOne(const macast::ExperimentConfig& config, const Flags& f) {
  const std::filesystem::path out_dir(f.out_dir);
  const macast::ExperimentResult result = macast::RunExperiment(config);
  macast::EmitFigureData(result, out_dir, f.svg);
  if (f.dump_scenarios) {
    std::filesystem::create_directories(out_dir / "scenarios");
    for (int t = 0; t < config.trials; ++t) {
      std::ofstream out(out_dir / "scenarios" / ("trial_" + std::to_string(t) + ".json"));
      out << macast::ScenarioToJson(macast::TrialScenario(config, t)) << "\n";
    }
  }
  std::cout << macast::AggregateCsv(result) << "\n" << macast::Summary(result);
  std::cout << "wrote " << (out_dir / (std::string(macast::ToString(config.experiment)) + ".csv")).string()
            << "\n";
  return 0;
}

// Re-runs AO (anchored at the ULA) and the FPA baseline on a saved scenario.
int Replay(const CLI::App& app, const std::string& path, const Flags& f) {
  std::ifstream in(path);
  if (!in) throw macast::ConfigError("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const macast::Scenario scenario = macast::ScenarioFromJson(buffer.str());

  const int m = app.count("--m") ? f.m : 25;
  const int n = app.count("--n") ? f.n : 4;
  const double budget = macast::DbmToWatts(app.count("--power-dbm") ? f.power_dbm : 10.0);
  int side = 1;
  while (side * side < m) ++side;
  if (side * side != m) throw macast::ConfigError("--m must be a perfect square");
  if (n < 1 || n > m) throw macast::ConfigError("--n must lie in [1, M]");

  const macast::PositionGrid grid = macast::PositionGrid::Square(side, scenario.wavelength);
  const macast::PlacementProblem problem(scenario, grid);
  const macast::PlacementSet start =
      macast::NearestGridPlacement(grid, macast::UlaCoordinates(n, scenario.wavelength));
  const Eigen::VectorXcd w0 =
      macast::WeakestUserMatchedFilter(problem.Channels(start), problem.noise_powers(), budget);
  const macast::AoState ao = macast::AoJoint(problem, start, w0, budget);
  const macast::BaselineResult fpa = macast::FpaBaseline(scenario, n, budget);

  std::cout << "method,rate\n";
  std::cout << "ao_sca," << ao.rate_trace.back() << "\n";
  std::cout << "fpa," << fpa.rate << "\n";
  if (scenario.users.size() == 2) {
    const macast::GreedyResult g = macast::GreedyPlacement(problem, n, budget);
    std::cout << "greedy," << g.rate << "\n";
  }
  std::cout << "placement";
  for (int idx : ao.placement.indices()) std::cout << " " << idx;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna multicast beamforming experiments"};
  app.set_config("--config", "", "INI/TOML file with option values (keys are long option names)");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--m", f.m, "Grid candidate count M (perfect square)");
  app.add_option("--n", f.n, "Antenna count N");
  app.add_option("--k", f.k, "User count K");
  app.add_option("--power-dbm", f.power_dbm, "Transmit power budget P in dBm");
  app.add_option("--noise-dbm", f.noise_dbm, "Noise power in dBm");
  app.add_option("--carrier-ghz", f.carrier_ghz, "Carrier frequency in GHz");
  app.add_option("--radius", f.radius_m, "Hexagonal cell radius in meters");
  app.add_option("--paths", f.paths, "Paths per user L");
  app.add_option("--trials", f.trials, "Monte Carlo trials");
  app.add_option("--seed", f.seed, "Base RNG seed");
  app.add_option("--methods", f.methods, "Methods: ao_sca,greedy,bab,exhaustive,fpa")->delimiter(',');
  app.add_option("--sweep", f.sweep, "Swept axis values (N, P dBm, K or M)")->delimiter(',');
  app.add_option("--init", f.init, "AO initialization: anchored|random");
  app.add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", f.out_dir, "Output directory");
  app.add_flag("--svg", f.svg, "Also write an SVG line chart");
  app.add_flag("--dump-scenarios", f.dump_scenarios, "Write each trial's scenario as JSON");

  const std::vector<std::pair<std::string, macast::ExperimentId>> experiments = {
      {"convergence", macast::ExperimentId::kConvergence},
      {"rate-vs-power", macast::ExperimentId::kRateVsPower},
      {"rate-vs-users", macast::ExperimentId::kRateVsUsers},
      {"two-user-los", macast::ExperimentId::kTwoUserLos},
      {"bab-complexity", macast::ExperimentId::kBabComplexity},
  };
  std::vector<std::pair<CLI::App*, macast::ExperimentId>> subs;
  for (const auto& [name, id] : experiments)
    subs.emplace_back(app.add_subcommand(name, "Run the " + name + " experiment"), id);
  std::string replay_file;
  CLI::App* replay = app.add_subcommand("replay", "Re-run AO and FPA on a saved scenario");
  replay->add_option("scenario-file", replay_file, "Scenario JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (replay->parsed()) return Replay(app, replay_file, f);
    for (const auto& [sub, id] : subs)
      if (sub->parsed()) return RunOne(BuildConfig(app, id, f), f);
  } catch (const macast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
