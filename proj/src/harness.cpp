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

#include "macast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "macast/errors.hpp"
#include "macast/los_bab.hpp"
#include "macast/svg_plot.hpp"
#include "macast/two_user.hpp"

namespace macast {
namespace {

constexpr std::pair<ExperimentId, std::string_view> kExperimentNames[] = {
    {ExperimentId::kConvergence, "convergence"},
    {ExperimentId::kRateVsPower, "rate_vs_power"},
    {ExperimentId::kRateVsUsers, "rate_vs_users"},
    {ExperimentId::kTwoUserLos, "two_user_los"},
    {ExperimentId::kBabComplexity, "bab_complexity"},
};

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::kAoSca, "ao_sca"}, {Method::kGreedy, "greedy"}, {Method::kBab, "bab"},
    {Method::kExhaustive, "exhaustive"}, {Method::kFpa, "fpa"},
};

std::string Normalize(std::string_view text) {
  std::string out(text);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

bool IsLosExperiment(ExperimentId id) {
  return id == ExperimentId::kTwoUserLos || id == ExperimentId::kBabComplexity;
}

int SquareSide(int m) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  return side * side == m ? side : -1;
}

bool IsCount(double v) { return std::isfinite(v) && v >= 1.0 && v == std::floor(v); }

template <class F>
auto Timed(double& seconds, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  auto out = body();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Eigen::VectorXcd RandomBeamformer(ScenarioRng& rng, int antennas, double budget) {
  Eigen::VectorXcd w(antennas);
  for (int n = 0; n < antennas; ++n) w(n) = rng.ComplexNormal(1.0);
  return std::sqrt(budget) * w.normalized();
}

BaselineResult SolveFixed(const Eigen::MatrixXcd& channels, std::span<const double> noise, double budget,
                          const ScaOptions& options) {
  if (channels.cols() == 2) {
    const TwoUserGeometry geometry =
        MakeTwoUserGeometry(channels.col(0), channels.col(1), noise[0], noise[1], budget);
    TwoUserBeamformResult bf = OptimalBeamformerTwoUser(geometry, budget);
    const double rate = MulticastRate(channels, noise, bf.beamformer.weights());
    return BaselineResult{std::move(bf.beamformer), rate};
  }
  const Eigen::VectorXcd w0 = WeakestUserMatchedFilter(channels, noise, budget);
  ScaResult sca = ScaBeamform(channels, noise, budget, w0, options);
  const double rate = MulticastRate(channels, noise, sca.beamformer.weights());
  return BaselineResult{std::move(sca.beamformer), rate};
}

class TrialRunner {
 public:
  explicit TrialRunner(const ExperimentConfig& config)
      : c_(config),
        wavelength_(WavelengthForCarrier(config.carrier_ghz)),
        noise_w_(DbmToWatts(config.noise_dbm)) {}

  Scenario SampleTrialScenario(int trial) const {
    ScenarioRng rng(c_.seed, 2 * static_cast<std::uint64_t>(trial));
    if (IsLosExperiment(c_.experiment))
      return SampleLosTwoUserScenario(rng, c_.cell_radius_m, c_.carrier_ghz, noise_w_);
    int users = c_.k;
    if (c_.experiment == ExperimentId::kRateVsUsers)
      users = static_cast<int>(*std::max_element(c_.sweep.begin(), c_.sweep.end()));
    return SampleScenario(rng, Params(users));
  }

  std::vector<TrialRecord> Run(int trial) const {
    const Scenario scenario = SampleTrialScenario(trial);
    ScenarioRng init_rng(c_.seed, 2 * static_cast<std::uint64_t>(trial) + 1);
    std::vector<TrialRecord> out;
    switch (c_.experiment) {
      case ExperimentId::kConvergence: Convergence(trial, scenario, init_rng, out); break;
      case ExperimentId::kRateVsPower: RateVsPower(trial, scenario, init_rng, out); break;
      case ExperimentId::kRateVsUsers: RateVsUsers(trial, scenario, init_rng, out); break;
      case ExperimentId::kTwoUserLos: TwoUserLos(trial, scenario, init_rng, out); break;
      case ExperimentId::kBabComplexity: BabComplexity(trial, scenario, out); break;
    }
    return out;
  }

 private:
  ScenarioParams Params(int users) const {
    ScenarioParams p;
    p.users = users;
    p.paths = c_.paths;
    p.cell_radius_m = c_.cell_radius_m;
    p.carrier_ghz = c_.carrier_ghz;
    p.noise_power_w = noise_w_;
    return p;
  }

  PositionGrid Grid(int m) const { return PositionGrid::Square(SquareSide(m), wavelength_, c_.spacing_wavelengths); }

  struct AoStart {
    PlacementSet placement;
    Eigen::VectorXcd w_direction;  // unit norm; scaled by sqrt(P) per sweep point
  };

  AoStart MakeStart(const PlacementProblem& problem, const PositionGrid& grid, int antennas,
                    ScenarioRng& init_rng) const {
    if (c_.init == InitMode::kRandom) {
      PlacementSet placement = RandomPlacement(init_rng, grid.size(), antennas);
      return AoStart{std::move(placement), RandomBeamformer(init_rng, antennas, 1.0)};
    }
    const std::vector<Coordinate> ula = UlaCoordinates(antennas, wavelength_);
    PlacementSet placement = NearestGridPlacement(grid, ula);
    const Eigen::MatrixXcd h = problem.Channels(placement);
    return AoStart{placement, WeakestUserMatchedFilter(h, problem.noise_powers(), 1.0)};
  }

  TrialRecord RunAo(int trial, double sweep, const PlacementProblem& problem, const AoStart& start,
                    double budget, bool keep_trace) const {
    TrialRecord r;
    r.trial = trial;
    r.sweep_value = sweep;
    AoState state = Timed(r.wall_time_s, [&] {
      return AoJoint(problem, start.placement, std::sqrt(budget) * start.w_direction, budget);
    });
    r.rate = state.rate_trace.back();
    r.iterations = state.rounds;
    r.converged = state.converged;
    if (keep_trace) r.rate_trace = std::move(state.rate_trace);
    return r;
  }

  TrialRecord RunFpa(int trial, double sweep, const Scenario& scenario, int antennas, double budget) const {
    TrialRecord r;
    r.trial = trial;
    r.method = Method::kFpa;
    r.sweep_value = sweep;
    BaselineResult base = Timed(r.wall_time_s, [&] { return FpaBaseline(scenario, antennas, budget); });
    r.rate = base.rate;
    return r;
  }

  void Convergence(int trial, const Scenario& scenario, ScenarioRng& init_rng,
                   std::vector<TrialRecord>& out) const {
    const PositionGrid grid = Grid(c_.m);
    const PlacementProblem problem(scenario, grid);
    const double budget = DbmToWatts(c_.power_dbm);
    for (double n : c_.sweep) {
      const AoStart start = MakeStart(problem, grid, static_cast<int>(n), init_rng);
      out.push_back(RunAo(trial, n, problem, start, budget, true));
    }
  }

  void RateVsPower(int trial, const Scenario& scenario, ScenarioRng& init_rng,
                   std::vector<TrialRecord>& out) const {
    const PositionGrid grid = Grid(c_.m);
    const PlacementProblem problem(scenario, grid);
    const AoStart start = MakeStart(problem, grid, c_.n, init_rng);
    for (double p_dbm : c_.sweep) {
      const double budget = DbmToWatts(p_dbm);
      for (Method method : c_.methods) {
        if (method == Method::kAoSca) out.push_back(RunAo(trial, p_dbm, problem, start, budget, false));
        if (method == Method::kFpa) out.push_back(RunFpa(trial, p_dbm, scenario, c_.n, budget));
      }
    }
  }

  void RateVsUsers(int trial, const Scenario& full, ScenarioRng& init_rng,
                   std::vector<TrialRecord>& out) const {
    const PositionGrid grid = Grid(c_.m);
    const double budget = DbmToWatts(c_.power_dbm);
    for (double k : c_.sweep) {
      Scenario scenario{full.wavelength,
                        {full.users.begin(), full.users.begin() + static_cast<int>(k)}};
      const PlacementProblem problem(scenario, grid);
      const AoStart start = MakeStart(problem, grid, c_.n, init_rng);
      for (Method method : c_.methods) {
        if (method == Method::kAoSca) out.push_back(RunAo(trial, k, problem, start, budget, false));
        if (method == Method::kFpa) out.push_back(RunFpa(trial, k, scenario, c_.n, budget));
      }
    }
  }

  // Runs one LoS method on a fixed grid at one power level.
  TrialRecord LosMethod(int trial, double sweep, Method method, const Scenario& scenario,
                        const PositionGrid& grid, const PlacementProblem& problem,
                        const Eigen::MatrixXd& q, double kappa, double budget,
                        const AoStart* start) const {
    TrialRecord r;
    r.trial = trial;
    r.method = method;
    r.sweep_value = sweep;
    switch (method) {
      case Method::kBab: {
        BabResult bab = Timed(r.wall_time_s, [&] { return BabSearch(q, c_.n); });
        r.rate = LosRate(bab.selection, q, budget, kappa, noise_w_);
        r.visited_nodes = bab.visited_nodes;
        break;
      }
      case Method::kExhaustive: {
        SubsetSearchResult ex = Timed(r.wall_time_s, [&] { return ExhaustiveSearch(q, c_.n); });
        r.rate = LosRate(ex.selection, q, budget, kappa, noise_w_);
        // Counted in the same unit as the BAB: nodes of the unpruned tree.
        r.visited_nodes = FullTreeNodeCount(grid.size(), c_.n);
        break;
      }
      case Method::kGreedy: {
        GreedyResult g = Timed(r.wall_time_s, [&] { return GreedyPlacement(problem, c_.n, budget); });
        r.rate = g.rate;
        r.visited_nodes = g.evaluations;
        break;
      }
      case Method::kFpa: return RunFpa(trial, sweep, scenario, c_.n, budget);
      case Method::kAoSca: return RunAo(trial, sweep, problem, *start, budget, false);
    }
    return r;
  }

  void TwoUserLos(int trial, const Scenario& scenario, ScenarioRng& init_rng,
                  std::vector<TrialRecord>& out) const {
    const double kappa = LosKappa(scenario);
    const PositionGrid grid = Grid(c_.m);
    const PlacementProblem problem(scenario, grid);
    const Eigen::MatrixXd q = BuildCoupling(grid, scenario.users[0].paths()[0].direction(),
                                            scenario.users[1].paths()[0].direction()).q;
    const AoStart start = MakeStart(problem, grid, c_.n, init_rng);
    for (double p_dbm : c_.sweep) {
      const double budget = DbmToWatts(p_dbm);
      for (Method method : c_.methods)
        out.push_back(LosMethod(trial, p_dbm, method, scenario, grid, problem, q, kappa, budget, &start));
    }
  }

  void BabComplexity(int trial, const Scenario& scenario, std::vector<TrialRecord>& out) const {
    const double kappa = LosKappa(scenario);
    const double budget = DbmToWatts(c_.power_dbm);
    for (double m : c_.sweep) {
      const PositionGrid grid = Grid(static_cast<int>(m));
      const PlacementProblem problem(scenario, grid);
      const Eigen::MatrixXd q = BuildCoupling(grid, scenario.users[0].paths()[0].direction(),
                                              scenario.users[1].paths()[0].direction()).q;
      for (Method method : c_.methods)
        out.push_back(LosMethod(trial, m, method, scenario, grid, problem, q, kappa, budget, nullptr));
    }
  }

  const ExperimentConfig& c_;
  double wavelength_;
  double noise_w_;
};

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string_view SweepColumn(ExperimentId id) {
  switch (id) {
    case ExperimentId::kConvergence: return "N";
    case ExperimentId::kRateVsPower:
    case ExperimentId::kTwoUserLos: return "power_dbm";
    case ExperimentId::kRateVsUsers: return "K";
    case ExperimentId::kBabComplexity: return "M";
  }
  return "sweep";
}

struct Cell {
  std::vector<double> rates;
  std::vector<double> visited;
};

// (sweep index, method) -> samples, in config order.
std::map<std::pair<std::size_t, Method>, Cell> GroupRecords(const ExperimentResult& result) {
  std::map<std::pair<std::size_t, Method>, Cell> cells;
  const auto& sweep = result.config.sweep;
  for (const TrialRecord& r : result.records) {
    const std::size_t idx =
        static_cast<std::size_t>(std::find(sweep.begin(), sweep.end(), r.sweep_value) - sweep.begin());
    Cell& cell = cells[{idx, r.method}];
    cell.rates.push_back(r.rate);
    cell.visited.push_back(static_cast<double>(r.visited_nodes));
  }
  return cells;
}

// Convergence curves: AO traces that stop early hold their final value.
std::vector<std::vector<double>> MeanTraces(const ExperimentResult& result) {
  const auto& sweep = result.config.sweep;
  std::vector<std::vector<const std::vector<double>*>> per_n(sweep.size());
  for (const TrialRecord& r : result.records) {
    const auto idx = static_cast<std::size_t>(std::find(sweep.begin(), sweep.end(), r.sweep_value) - sweep.begin());
    per_n[idx].push_back(&r.rate_trace);
  }
  std::vector<std::vector<double>> means(sweep.size());
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    std::size_t length = 0;
    for (const auto* t : per_n[i]) length = std::max(length, t->size());
    for (std::size_t it = 0; it < length; ++it) {
      double s = 0.0;
      for (const auto* t : per_n[i]) s += t->empty() ? 0.0 : (*t)[std::min(it, t->size() - 1)];
      means[i].push_back(s / static_cast<double>(per_n[i].size()));
    }
  }
  return means;
}

}  // namespace

std::string_view ToString(ExperimentId id) {
  for (const auto& [key, name] : kExperimentNames)
    if (key == id) return name;
  return "unknown";
}

std::string_view ToString(Method method) {
  for (const auto& [key, name] : kMethodNames)
    if (key == method) return name;
  return "unknown";
}

std::string_view ToString(InitMode mode) { return mode == InitMode::kRandom ? "random" : "anchored"; }

ExperimentId ParseExperimentId(std::string_view text) {
  const std::string key = Normalize(text);
  for (const auto& [id, name] : kExperimentNames)
    if (name == key) return id;
  throw ConfigError(fmt::format("unknown experiment '{}'", text));
}

Method ParseMethod(std::string_view text) {
  const std::string key = Normalize(text);
  for (const auto& [method, name] : kMethodNames)
    if (name == key) return method;
  throw ConfigError(fmt::format("unknown method '{}'", text));
}

InitMode ParseInitMode(std::string_view text) {
  if (text == "anchored") return InitMode::kAnchored;
  if (text == "random") return InitMode::kRandom;
  throw ConfigError(fmt::format("unknown init mode '{}' (anchored|random)", text));
}

ExperimentConfig ExperimentConfig::Defaults(ExperimentId id) {
  ExperimentConfig c;
  c.experiment = id;
  switch (id) {
    case ExperimentId::kConvergence:
      c.methods = {Method::kAoSca};
      c.sweep = {2, 4, 6};
      c.init = InitMode::kRandom;
      break;
    case ExperimentId::kRateVsPower:
      c.methods = {Method::kAoSca, Method::kFpa};
      c.sweep = {0, 5, 10, 15, 20};
      break;
    case ExperimentId::kRateVsUsers:
      c.methods = {Method::kAoSca, Method::kFpa};
      c.sweep = {2, 3, 4, 5, 6, 7, 8};
      break;
    case ExperimentId::kTwoUserLos:
      c.m = 16;
      c.k = 2;
      c.paths = 1;
      c.methods = {Method::kBab, Method::kGreedy, Method::kExhaustive, Method::kFpa};
      c.sweep = {0, 5, 10, 15, 20};
      break;
    case ExperimentId::kBabComplexity:
      c.k = 2;
      c.paths = 1;
      c.methods = {Method::kBab, Method::kExhaustive, Method::kGreedy};
      c.sweep = {9, 16, 25};
      break;
  }
  return c;
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const bool los = IsLosExperiment(experiment);
  if (!los || experiment == ExperimentId::kTwoUserLos)
    if (SquareSide(m) < 1) fail(fmt::format("M={} is not a positive perfect square", m));
  if (n < 1) fail("N must be >= 1");
  if (experiment != ExperimentId::kConvergence && experiment != ExperimentId::kBabComplexity && n > m)
    fail(fmt::format("N={} exceeds M={}", n, m));
  if (k < 1) fail("K must be >= 1");
  if (los && k != 2) fail("LoS experiments are two-user; K must be 2");
  if (los && paths != 1) fail("LoS experiments are single-path; L must be 1");
  if (paths < 1) fail("L must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (!std::isfinite(power_dbm) || !std::isfinite(noise_dbm)) fail("powers must be finite");
  if (!(carrier_ghz > 0.0) || !std::isfinite(carrier_ghz)) fail("carrier must be positive");
  if (!(cell_radius_m > kMinUserDistanceM)) fail("cell radius must exceed the minimum user distance");
  if (!(spacing_wavelengths > 0.0)) fail("grid spacing must be positive");
  if (methods.empty()) fail("method list is empty");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size())
    fail("method list has duplicates");
  if (sweep.empty()) fail("sweep list is empty");
  if (std::set<double>(sweep.begin(), sweep.end()).size() != sweep.size()) fail("sweep list has duplicates");

  std::set<Method> allowed;
  switch (experiment) {
    case ExperimentId::kConvergence: allowed = {Method::kAoSca}; break;
    case ExperimentId::kRateVsPower:
    case ExperimentId::kRateVsUsers: allowed = {Method::kAoSca, Method::kFpa}; break;
    case ExperimentId::kTwoUserLos:
      allowed = {Method::kAoSca, Method::kGreedy, Method::kBab, Method::kExhaustive, Method::kFpa};
      break;
    case ExperimentId::kBabComplexity: allowed = {Method::kGreedy, Method::kBab, Method::kExhaustive}; break;
  }
  for (Method method : methods)
    if (!allowed.count(method))
      fail(fmt::format("method {} is not available for {}", ToString(method), ToString(experiment)));

  const bool exhaustive = std::find(methods.begin(), methods.end(), Method::kExhaustive) != methods.end();
  for (double v : sweep) {
    switch (experiment) {
      case ExperimentId::kConvergence:
        if (!IsCount(v) || v > m) fail(fmt::format("N sweep value {} must be an integer in [1, M]", v));
        break;
      case ExperimentId::kRateVsUsers:
        if (!IsCount(v)) fail(fmt::format("K sweep value {} must be a positive integer", v));
        break;
      case ExperimentId::kRateVsPower:
      case ExperimentId::kTwoUserLos:
        if (!std::isfinite(v)) fail("power sweep values must be finite");
        break;
      case ExperimentId::kBabComplexity: {
        if (!IsCount(v) || SquareSide(static_cast<int>(v)) < 1)
          fail(fmt::format("M sweep value {} must be a perfect square", v));
        if (v < n) fail(fmt::format("M sweep value {} is below N={}", v, n));
        if (exhaustive && Binomial(static_cast<int>(v), n) > kDefaultExhaustiveCap)
          fail(fmt::format("exhaustive search over C({}, {}) subsets exceeds the cap", v, n));
        break;
      }
    }
  }
  if (experiment == ExperimentId::kTwoUserLos && exhaustive && Binomial(m, n) > kDefaultExhaustiveCap)
    fail(fmt::format("exhaustive search over C({}, {}) subsets exceeds the cap", m, n));
}

std::vector<Coordinate> UlaCoordinates(int antennas, double wavelength) {
  if (antennas < 1) throw std::invalid_argument("UlaCoordinates: need at least one antenna");
  std::vector<Coordinate> out;
  out.reserve(static_cast<std::size_t>(antennas));
  const double center = 0.5 * (antennas - 1);
  for (int n = 0; n < antennas; ++n) out.push_back({(n - center) * 0.5 * wavelength, 0.0});
  return out;
}

BaselineResult FpaBaseline(const Scenario& scenario, int antennas, double budget, const ScaOptions& options) {
  const std::vector<Coordinate> ula = UlaCoordinates(antennas, scenario.wavelength);
  const Eigen::MatrixXcd h = ChannelMatrixAt(scenario.users, ula, scenario.wavelength);
  const std::vector<double> noise = scenario.noise_powers();
  return SolveFixed(h, noise, budget, options);
}

BaselineResult FpaOnGrid(const PlacementProblem& problem, const PositionGrid& grid, int antennas,
                         double budget, const ScaOptions& options) {
  const std::vector<Coordinate> ula = UlaCoordinates(antennas, grid.wavelength());
  const PlacementSet placement = NearestGridPlacement(grid, ula);
  return SolveFixed(problem.Channels(placement), problem.noise_powers(), budget, options);
}

Scenario TrialScenario(const ExperimentConfig& config, int trial) {
  config.Validate();
  if (trial < 0) throw std::invalid_argument("TrialScenario: negative trial index");
  return TrialRunner(config).SampleTrialScenario(trial);
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const TrialRunner runner(config);
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(config.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int t = next++; t < config.trials; t = next++) {
      try {
        per_trial[static_cast<std::size_t>(t)] = runner.Run(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  const int workers = std::min(config.threads, config.trials);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result{config, {}};
  for (auto& records : per_trial)
    for (auto& r : records) result.records.push_back(std::move(r));
  return result;
}

std::string AggregateCsv(const ExperimentResult& result) {
  if (result.records.empty()) throw std::invalid_argument("AggregateCsv: no records");
  const ExperimentConfig& c = result.config;
  std::string out;
  if (c.experiment == ExperimentId::kConvergence) {
    out += "iteration,mean_rate,N\n";
    const auto traces = MeanTraces(result);
    for (std::size_t i = 0; i < traces.size(); ++i)
      for (std::size_t it = 0; it < traces[i].size(); ++it)
        out += fmt::format("{},{:.10f},{:g}\n", it, traces[i][it], c.sweep[i]);
    return out;
  }
  const bool complexity = c.experiment == ExperimentId::kBabComplexity;
  out += fmt::format("{},method,{}mean_rate\n", SweepColumn(c.experiment),
                     complexity ? "mean_visited_nodes," : "");
  for (const auto& [key, cell] : GroupRecords(result)) {
    const auto& [idx, method] = key;
    if (complexity) {
      out += fmt::format("{:g},{},{:.4f},{:.10f}\n", c.sweep[idx], ToString(method), Mean(cell.visited),
                         Mean(cell.rates));
    } else {
      out += fmt::format("{:g},{},{:.10f}\n", c.sweep[idx], ToString(method), Mean(cell.rates));
    }
  }
  return out;
}

std::string RecordsCsv(const ExperimentResult& result) {
  if (result.records.empty()) throw std::invalid_argument("RecordsCsv: no records");
  std::string out = "trial,method,sweep,rate,iterations,visited_nodes\n";
  for (const TrialRecord& r : result.records)
    out += fmt::format("{},{},{:g},{:.10f},{},{}\n", r.trial, ToString(r.method), r.sweep_value, r.rate,
                       r.iterations, r.visited_nodes);
  return out;
}

std::string FigureSvg(const ExperimentResult& result) {
  if (result.records.empty()) throw std::invalid_argument("FigureSvg: no records");
  const ExperimentConfig& c = result.config;
  const std::string title(ToString(c.experiment));
  std::vector<PlotSeries> series;
  if (c.experiment == ExperimentId::kConvergence) {
    const auto traces = MeanTraces(result);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      PlotSeries s{fmt::format("N={:g}", c.sweep[i]), {}};
      for (std::size_t it = 0; it < traces[i].size(); ++it)
        s.points.emplace_back(static_cast<double>(it), traces[i][it]);
      series.push_back(std::move(s));
    }
    return RenderLineChart(title, "iteration", "rate (bits/s/Hz)", series);
  }
  const bool complexity = c.experiment == ExperimentId::kBabComplexity;
  std::map<Method, PlotSeries> by_method;
  for (const auto& [key, cell] : GroupRecords(result)) {
    PlotSeries& s = by_method[key.second];
    s.name = std::string(ToString(key.second));
    s.points.emplace_back(c.sweep[key.first], complexity ? Mean(cell.visited) : Mean(cell.rates));
  }
  for (auto& [method, s] : by_method) {
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));
  }
  return RenderLineChart(title, std::string(SweepColumn(c.experiment)),
                         complexity ? "visited nodes" : "rate (bits/s/Hz)", series);
}

std::string Summary(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  std::string out = fmt::format("experiment {} trials={} seed={} init={}\n", ToString(c.experiment),
                                c.trials, c.seed, ToString(c.init));
  std::map<Method, std::vector<double>> times;
  for (const TrialRecord& r : result.records) times[r.method].push_back(r.wall_time_s);
  for (const auto& [method, t] : times)
    out += fmt::format("  {:<10} mean wall time {:.3e} s over {} runs\n", ToString(method), Mean(t), t.size());

  if (c.experiment == ExperimentId::kConvergence) {
    std::map<double, std::pair<int, int>> within;  // N -> (converged within 10, total)
    for (const TrialRecord& r : result.records) {
      auto& [ok, total] = within[r.sweep_value];
      ++total;
      if (r.converged && r.iterations <= 10) ++ok;
    }
    for (const auto& [n, counts] : within)
      out += fmt::format("  N={:g}: {}/{} trials stopped within 10 outer iterations\n", n, counts.first,
                         counts.second);
  }

  if (IsLosExperiment(c.experiment)) {
    // Pair greedy with BAB per (trial, sweep point).
    std::map<std::pair<int, double>, std::pair<double, double>> pairs;
    std::set<std::pair<int, double>> have_bab, have_greedy;
    for (const TrialRecord& r : result.records) {
      const auto key = std::make_pair(r.trial, r.sweep_value);
      if (r.method == Method::kBab) {
        pairs[key].first = r.rate;
        have_bab.insert(key);
      } else if (r.method == Method::kGreedy) {
        pairs[key].second = r.rate;
        have_greedy.insert(key);
      }
    }
    std::vector<double> gaps;
    int greedy_above = 0;
    for (const auto& [key, rates] : pairs) {
      if (!have_bab.count(key) || !have_greedy.count(key)) continue;
      gaps.push_back(rates.first - rates.second);
      if (rates.second > rates.first + 1e-9) ++greedy_above;
    }
    if (!gaps.empty()) {
      out += fmt::format("  greedy vs bab: median gap {:.6f} bits/s/Hz, max gap {:.6f}, greedy above bab in {} of {}\n",
                         Median(gaps), *std::max_element(gaps.begin(), gaps.end()), greedy_above, gaps.size());
    }
  }
  return out;
}

void EmitFigureData(const ExperimentResult& result, const std::filesystem::path& out_dir, bool svg) {
  if (result.records.empty()) throw std::invalid_argument("EmitFigureData: no records");
  std::filesystem::create_directories(out_dir);
  const std::string stem(ToString(result.config.experiment));
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot open {}", (out_dir / name).string()));
    f << body;
  };
  write(stem + ".csv", AggregateCsv(result));
  write(stem + "_trials.csv", RecordsCsv(result));
  write(stem + "_summary.txt", Summary(result));
  if (svg) write(stem + ".svg", FigureSvg(result));
}

}  // namespace macast
