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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
//
// Usage: acceptance <path-to-macast-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "macast/harness.hpp"
#include "macast/los_bab.hpp"
#include "macast/placement.hpp"
#include "macast/two_user.hpp"
#include "oracles.hpp"

using namespace macast;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// rows x cols lattice with half-wavelength spacing.
PositionGrid Lattice(int rows, int cols, double wavelength) {
  std::vector<Coordinate> pts;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) pts.push_back({c * wavelength / 2, r * wavelength / 2});
  return PositionGrid(pts, 0.5, wavelength);
}

PositionGrid GridFor(int m, double wavelength) {
  switch (m) {
    case 6: return Lattice(2, 3, wavelength);
    case 12: return Lattice(3, 4, wavelength);
    default: {
      const int side = static_cast<int>(std::lround(std::sqrt(m)));
      return PositionGrid::Square(side, wavelength);
    }
  }
}

Scenario LosInstance(std::uint64_t stream) {
  ScenarioRng rng(kSeed, stream);
  return SampleLosTwoUserScenario(rng, 150.0, 5.0, DbmToWatts(-95.0));
}

CouplingMatrix CouplingFor(const Scenario& s, const PositionGrid& grid) {
  return BuildCoupling(grid, s.users[0].paths()[0].direction(), s.users[1].paths()[0].direction());
}

bool RelClose(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// The 200-instance LoS set shared by the exactness and pruning criteria.
struct LosSetStats {
  int instances = 0;
  int mismatches = 0;
  double seconds = 0.0;
  std::map<int, std::pair<double, double>> nodes;  // M -> (sum visited by BAB, sum full-tree size)
  std::map<int, int> per_m;
};

LosSetStats RunLosSet() {
  LosSetStats st;
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t stream = 0;
  int combo = 0;
  for (int m : {6, 9, 12, 16}) {
    for (int n : {2, 3, 4}) {
      const int count = combo++ < 8 ? 17 : 16;  // 200 over the 12 (M, N) pairs
      for (int i = 0; i < count; ++i) {
        const Scenario s = LosInstance(1000 + stream++);
        const CouplingMatrix c = CouplingFor(s, GridFor(m, s.wavelength));
        const BabResult bab = BabSearch(c.q, n);
        const SubsetSearchResult ex = ExhaustiveSearch(c.q, n);
        ++st.instances;
        if (!RelClose(bab.objective, ex.objective, 1e-9)) ++st.mismatches;
        st.nodes[m].first += static_cast<double>(bab.visited_nodes);
        st.nodes[m].second += static_cast<double>(FullTreeNodeCount(m, n));
        ++st.per_m[m];
      }
    }
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return st;
}

Outcome BabOptimality(const LosSetStats& st) {
  Outcome o;
  o.pass = st.instances == 200 && st.mismatches == 0 && st.seconds < 10.0;
  o.detail = fmt::format("{} instances, {} mismatches, {:.3f} s", st.instances, st.mismatches, st.seconds);
  return o;
}

Outcome BabComplexity(const LosSetStats& st) {
  Outcome o;
  double previous_gap = -1.0;
  for (const auto& [m, sums] : st.nodes) {
    const double count = st.per_m.at(m);
    const double visited = sums.first / count, full = sums.second / count;
    if (!(visited < full) || !(full - visited > previous_gap)) o.pass = false;
    previous_gap = full - visited;
    o.detail += fmt::format("{}M={}: {:.1f}/{:.1f}", o.detail.empty() ? "" : "  ", m, visited, full);
  }
  return o;
}

struct TwoUserStats {
  int cases = 0;
  int interior = 0;
  double worst_gap = 0.0;       // max |closed - sca|
  double worst_shortfall = 0.0;  // max (sca - closed)
  double worst_residual = 0.0;
  double worst_mu_sum = 0.0;
  double worst_balance = 0.0;
};

TwoUserStats TwoUserTrials() {
  TwoUserStats st;
  ExperimentConfig config = ExperimentConfig::Defaults(ExperimentId::kRateVsPower);
  config.k = 2;
  const double budget = DbmToWatts(config.power_dbm);
  for (int t = 0; t < 100; ++t) {
    const Scenario s = TrialScenario(config, t);
    const PositionGrid grid = PositionGrid::Square(5, s.wavelength);
    const PlacementProblem problem(s, grid);
    ScenarioRng rng(kSeed, 9000 + static_cast<std::uint64_t>(t));
    const PlacementSet placement = RandomPlacement(rng, 25, 4);
    const Eigen::MatrixXcd h = problem.Channels(placement);
    const std::vector<double> noise = s.noise_powers();
    const TwoUserGeometry g = MakeTwoUserGeometry(h.col(0), h.col(1), noise[0], noise[1], budget);
    const TwoUserBeamformResult closed = OptimalBeamformerTwoUser(g, budget);
    const ScaResult sca = ScaBeamform(h, noise, budget, WeakestUserMatchedFilter(h, noise, budget));
    const double sca_rate = MulticastRate(h, noise, sca.beamformer.weights());
    ++st.cases;
    st.worst_gap = std::max(st.worst_gap, std::abs(closed.rate - sca_rate));
    st.worst_shortfall = std::max(st.worst_shortfall, sca_rate - closed.rate);
    const KktSolution& kkt = closed.kkt;
    if (!kkt.interior) continue;
    ++st.interior;
    const Eigen::MatrixXcd a = kkt.mu1 * g.scaled1 * g.scaled1.adjoint() + kkt.mu2 * g.scaled2 * g.scaled2.adjoint();
    st.worst_residual = std::max(st.worst_residual, (a * kkt.direction - kkt.lagrange * kkt.direction).norm() /
                                                        std::max(1.0, kkt.lagrange));
    st.worst_mu_sum = std::max(st.worst_mu_sum, std::abs(kkt.mu1 + kkt.mu2 - 1.0));
    const std::vector<oracle::cd> w = oracle::ToStd(closed.beamformer.weights());
    const double s1 = oracle::Snr(oracle::ToStd(h.col(0)), w, noise[0]);
    const double s2 = oracle::Snr(oracle::ToStd(h.col(1)), w, noise[1]);
    st.worst_balance = std::max(st.worst_balance, std::abs(s1 - s2) / std::max(s1, s2));
  }
  return st;
}

Outcome ClosedFormVsSca(const TwoUserStats& st) {
  Outcome o;
  o.pass = st.cases == 100 && st.worst_gap <= 1e-3 && st.worst_shortfall <= 1e-3;
  o.detail = fmt::format("{} cases, max |closed-sca| {:.2e} bit/s/Hz, max sca-closed {:.2e}", st.cases, st.worst_gap,
                         st.worst_shortfall);
  return o;
}

Outcome KktCertificate(const TwoUserStats& st) {
  Outcome o;
  o.pass = st.interior > 0 && st.worst_residual <= 1e-8 && st.worst_mu_sum <= 1e-12 && st.worst_balance <= 1e-8;
  o.detail = fmt::format("{} interior cases, residual {:.2e}, |mu1+mu2-1| {:.2e}, SNR imbalance {:.2e}", st.interior,
                         st.worst_residual, st.worst_mu_sum, st.worst_balance);
  return o;
}

Outcome AoConvergence() {
  Outcome o;
  const ExperimentResult r = RunExperiment(ExperimentConfig::Defaults(ExperimentId::kConvergence));
  std::map<double, std::pair<int, int>> within;  // N -> (stopped within 10, total)
  int violations = 0;
  for (const TrialRecord& rec : r.records) {
    for (std::size_t i = 1; i < rec.rate_trace.size(); ++i)
      if (rec.rate_trace[i] < rec.rate_trace[i - 1] - 1e-9) ++violations;
    auto& [ok, total] = within[rec.sweep_value];
    ++total;
    if (rec.converged && rec.iterations <= 10) ++ok;
  }
  o.pass = violations == 0 && !within.empty();
  for (const auto& [n, counts] : within) {
    if (counts.first < 0.9 * counts.second) o.pass = false;
    o.detail += fmt::format("N={}: {}/{}  ", n, counts.first, counts.second);
  }
  o.detail += fmt::format("monotonicity violations {}", violations);
  return o;
}

Outcome AoDominatesFpa() {
  Outcome o;
  const ExperimentConfig config = ExperimentConfig::Defaults(ExperimentId::kRateVsPower);
  const double budget = DbmToWatts(config.power_dbm);
  int wins = 0;
  for (int t = 0; t < 100; ++t) {
    const Scenario s = TrialScenario(config, t);
    const PositionGrid grid = PositionGrid::Square(5, s.wavelength);
    const PlacementProblem problem(s, grid);
    const PlacementSet start = NearestGridPlacement(grid, UlaCoordinates(4, s.wavelength));
    const Eigen::VectorXcd w0 = WeakestUserMatchedFilter(problem.Channels(start), problem.noise_powers(), budget);
    const AoState ao = AoJoint(problem, start, w0, budget);
    if (ao.rate_trace.back() >= FpaOnGrid(problem, grid, 4, budget).rate - 1e-9) ++wins;
  }
  o.pass = wins == 100;
  o.detail = fmt::format("AO >= grid FPA in {}/100 trials", wins);
  return o;
}

Outcome GreedyBelowBab() {
  Outcome o;
  std::vector<double> gaps;
  int above = 0;
  const double budget = DbmToWatts(10.0);
  for (int t = 0; t < 100; ++t) {
    const Scenario s = LosInstance(20000 + static_cast<std::uint64_t>(t));
    const PositionGrid grid = PositionGrid::Square(4, s.wavelength);
    const CouplingMatrix c = CouplingFor(s, grid);
    const double kappa = LosKappa(s);
    const double noise = s.users[0].noise_power();
    const BabResult bab = BabSearch(c.q, 4);
    const double bab_rate = LosRate(bab.selection, c.q, budget, kappa, noise);
    const GreedyResult greedy = GreedyPlacement(PlacementProblem(s, grid), 4, budget);
    // Score both placements with the same formula; also check the rate the
    // greedy beamformer actually achieves.
    const double greedy_rate =
        LosRate(SelectionVector(greedy.placement.indices(), 16), c.q, budget, kappa, noise);
    const double slack = 1e-9 * std::max(1.0, bab_rate);
    if (greedy_rate > bab_rate + slack || greedy.rate > bab_rate + slack) ++above;
    gaps.push_back(bab_rate - greedy_rate);
  }
  o.pass = above == 0;
  o.detail = fmt::format("greedy above BAB in {}/100 trials, median gap {:.3e}, max gap {:.3e} bit/s/Hz", above,
                         Median(gaps), *std::max_element(gaps.begin(), gaps.end()));
  return o;
}

Outcome OracleIdentities() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  double worst_increment = 0.0;
  int pairs = 0;
  for (std::uint64_t i = 0; pairs < 10000; ++i) {
    const Scenario s = LosInstance(30000 + i);
    const CouplingMatrix c = CouplingFor(s, PositionGrid::Square(5, s.wavelength));
    std::vector<int> order(25);
    for (int k = 0; k < 25; ++k) order[static_cast<std::size_t>(k)] = k;
    std::shuffle(order.begin(), order.end(), rng);
    SearchNode node = SearchNode::Root(25);
    for (int step = 0; step < 24 && pairs < 10000; ++step, ++pairs) {
      const int k = order[static_cast<std::size_t>(step)];
      std::vector<int> with = node.selected;
      with.push_back(k);
      const double want = oracle::Quad(c.q, with);
      worst_increment = std::max(worst_increment, std::abs(ObjectiveIncrement(c.q, node, k) - want) / std::max(1.0, want));
      Extend(c.q, node, k);
    }
  }

  double worst_rate = 0.0, worst_quad = 0.0;
  const double budget = DbmToWatts(10.0);
  for (int t = 0; t < 100; ++t) {
    const Scenario s = LosInstance(40000 + static_cast<std::uint64_t>(t));
    const PositionGrid grid = PositionGrid::Square(4, s.wavelength);
    const CouplingMatrix c = CouplingFor(s, grid);
    std::vector<int> all(16);
    for (int k = 0; k < 16; ++k) all[static_cast<std::size_t>(k)] = k;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> sel(all.begin(), all.begin() + 4);
    std::sort(sel.begin(), sel.end());
    const Eigen::MatrixXcd h = PlacementProblem(s, grid).Channels(PlacementSet(sel, 16));
    const double noise = s.users[0].noise_power();
    const double closed = TwoUserRate(MakeTwoUserGeometry(h.col(0), h.col(1), noise, noise, budget));
    const double los = LosRate(SelectionVector(sel, 16), c.q, budget, LosKappa(s), noise);
    worst_rate = std::max(worst_rate, std::abs(los - closed) / std::max(1.0, closed));
    const double want = oracle::SteeringCorrelationSq(grid, s.users[0].paths()[0].direction(),
                                                      s.users[1].paths()[0].direction(), sel);
    worst_quad = std::max(worst_quad, std::abs(QuadraticForm(c.q, sel) - want) / std::max(1.0, want));
  }
  o.pass = worst_increment <= 1e-12 && worst_rate <= 1e-9 && worst_quad <= 1e-9;
  o.detail = fmt::format("{} increments max rel err {:.2e}; LoS vs two-user rate {:.2e}; a^T Q a vs steering {:.2e}",
                         pairs, worst_increment, worst_rate, worst_quad);
  return o;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome Reproducibility(const std::string& cli) {
  Outcome o;
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "macast_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::filesystem::path config = dir / "run.toml";
  std::ofstream(config) << "trials = 100\nseed = 1\nthreads = 1\n";
  std::vector<std::string> csvs;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = fmt::format("\"{}\" --config \"{}\" --out-dir \"{}\" rate-vs-power > /dev/null", cli,
                                        config.string(), (dir / run).string());
    if (std::system(cmd.c_str()) != 0) {
      o.pass = false;
      o.detail = "CLI run failed: " + cmd;
      return o;
    }
    csvs.push_back(ReadFile(dir / run / "rate_vs_power.csv") + ReadFile(dir / run / "rate_vs_power_trials.csv"));
  }
  o.pass = !csvs[0].empty() && csvs[0] == csvs[1];
  o.detail = fmt::format("two runs of the same config file, {} bytes of CSV, {}", csvs[0].size(),
                         o.pass ? "byte-identical" : "different");
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-macast-cli>\n");
    return 2;
  }
  const LosSetStats los_set = RunLosSet();
  const TwoUserStats two_user = TwoUserTrials();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"BAB equals exhaustive search on 200 LoS instances in under 10 s", [&] { return BabOptimality(los_set); }},
      {"BAB visits fewer nodes than the full tree, with the gap widening in M", [&] { return BabComplexity(los_set); }},
      {"two-user closed form matches SCA within 1e-3", [&] { return ClosedFormVsSca(two_user); }},
      {"two-user KKT certificate holds", [&] { return KktCertificate(two_user); }},
      {"AO is monotone and stops within 10 rounds in at least 90% of trials", AoConvergence},
      {"anchored AO never falls below the grid fixed array", AoDominatesFpa},
      {"greedy placement never beats BAB", GreedyBelowBab},
      {"oracle identities", OracleIdentities},
      {"same config file gives byte-identical CSV", [&] { return Reproducibility(argv[1]); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s [%s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
