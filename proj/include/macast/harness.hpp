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

// Monte Carlo experiment driver: seeded scenarios, fixed-position baselines,
// per-trial records and the aggregated figure data.

#ifndef MACAST_HARNESS_HPP_
#define MACAST_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "macast/channel.hpp"
#include "macast/convex_core.hpp"
#include "macast/placement.hpp"

namespace macast {

enum class ExperimentId { kConvergence, kRateVsPower, kRateVsUsers, kTwoUserLos, kBabComplexity };
enum class Method { kAoSca, kGreedy, kBab, kExhaustive, kFpa };
enum class InitMode { kAnchored, kRandom };

std::string_view ToString(ExperimentId id);
std::string_view ToString(Method method);
std::string_view ToString(InitMode mode);
// Accept both "rate_vs_power" and "rate-vs-power" spellings.
ExperimentId ParseExperimentId(std::string_view text);
Method ParseMethod(std::string_view text);
InitMode ParseInitMode(std::string_view text);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::kConvergence;
  int m = 25;
  int n = 4;
  int k = 5;
  double power_dbm = 10.0;
  double noise_dbm = -95.0;
  double carrier_ghz = 5.0;
  double cell_radius_m = 150.0;
  int paths = 4;
  double spacing_wavelengths = 0.5;
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<Method> methods;
  // Values of the experiment's swept axis: N (convergence), P in dBm
  // (rate_vs_power, two_user_los), K (rate_vs_users) or M (bab_complexity).
  std::vector<double> sweep;
  InitMode init = InitMode::kAnchored;
  int threads = 1;

  static ExperimentConfig Defaults(ExperimentId id);
  // Throws ConfigError.
  void Validate() const;
};

struct TrialRecord {
  int trial = 0;
  Method method = Method::kAoSca;
  double sweep_value = 0.0;
  double rate = 0.0;
  int iterations = 0;
  bool converged = false;  // AO stopped on its tolerance, not the round cap
  std::int64_t visited_nodes = 0;
  double wall_time_s = 0.0;
  std::vector<double> rate_trace;  // AO rate per outer iteration (convergence only)
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;  // ordered by trial, then sweep point, then method
};

// ULA of N elements spaced lambda/2 along x, centered at the origin.
std::vector<Coordinate> UlaCoordinates(int antennas, double wavelength);

struct BaselineResult {
  Beamformer beamformer;
  double rate = 0.0;
};

// Fixed-position array evaluated at its true coordinates: closed form for
// K = 2, SCA from the weakest-user matched filter otherwise.
BaselineResult FpaBaseline(const Scenario& scenario, int antennas, double budget,
                           const ScaOptions& options = {});

// Same optimizer applied to the grid points nearest the ULA.
BaselineResult FpaOnGrid(const PlacementProblem& problem, const PositionGrid& grid, int antennas,
                         double budget, const ScaOptions& options = {});

// The scenario trial `trial` of RunExperiment(config) draws (for
// rate_vs_users, the largest-K scenario whose user prefixes are swept).
Scenario TrialScenario(const ExperimentConfig& config, int trial);

// Runs all trials (on config.threads workers) and folds the records in
// trial order, so output depends only on the config.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Mean-per-sweep-point figure data; schema depends on the experiment:
//   convergence     iteration,mean_rate,N
//   rate_vs_power   power_dbm,method,mean_rate
//   rate_vs_users   K,method,mean_rate
//   two_user_los    power_dbm,method,mean_rate
//   bab_complexity  M,method,mean_visited_nodes,mean_rate
std::string AggregateCsv(const ExperimentResult& result);

// trial,method,sweep,rate,iterations,visited_nodes
std::string RecordsCsv(const ExperimentResult& result);

// One line chart, one series per method (or per N for convergence).
std::string FigureSvg(const ExperimentResult& result);

// Human-readable notes: timing per method, convergence share, greedy gap.
std::string Summary(const ExperimentResult& result);

// Writes <id>.csv, <id>_trials.csv, <id>_summary.txt and optionally
// <id>.svg into out_dir. Throws std::invalid_argument on empty results.
void EmitFigureData(const ExperimentResult& result, const std::filesystem::path& out_dir, bool svg);

}  // namespace macast

#endif  // MACAST_HARNESS_HPP_
