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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "macast/errors.hpp"
#include "macast/harness.hpp"
#include "macast/los_bab.hpp"
#include "macast/svg_plot.hpp"
#include "macast/two_user.hpp"

using namespace macast;

namespace {

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig Small(ExperimentId id, int trials = 4) {
  ExperimentConfig c = ExperimentConfig::Defaults(id);
  c.trials = trials;
  return c;
}

// Compares against a checked-in file; MACAST_UPDATE_GOLDEN=1 rewrites it.
void CheckGolden(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = std::filesystem::path(MACAST_GOLDEN_DIR) / name;
  if (const char* update = std::getenv("MACAST_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    std::ofstream(path, std::ios::binary) << actual;
  }
  REQUIRE_MESSAGE(std::filesystem::exists(path), "missing golden file " << path);
  CHECK(ReadFile(path) == actual);
}

}  // namespace

TEST_CASE("defaults carry the reference simulation parameters") {
  const ExperimentConfig c = ExperimentConfig::Defaults(ExperimentId::kRateVsPower);
  CHECK(c.m == 25);
  CHECK(c.n == 4);
  CHECK(c.k == 5);
  CHECK(c.power_dbm == 10.0);
  CHECK(c.noise_dbm == -95.0);
  CHECK(c.carrier_ghz == 5.0);
  CHECK(c.cell_radius_m == 150.0);
  CHECK(c.paths == 4);
  CHECK(c.spacing_wavelengths == 0.5);
  CHECK(c.trials == 100);
  CHECK(c.sweep == std::vector<double>{0, 5, 10, 15, 20});
  for (ExperimentId id : {ExperimentId::kConvergence, ExperimentId::kRateVsPower, ExperimentId::kRateVsUsers,
                          ExperimentId::kTwoUserLos, ExperimentId::kBabComplexity}) {
    CHECK_NOTHROW(ExperimentConfig::Defaults(id).Validate());
    CHECK(ParseExperimentId(ToString(id)) == id);
  }
  const ExperimentConfig los = ExperimentConfig::Defaults(ExperimentId::kTwoUserLos);
  CHECK(los.k == 2);
  CHECK(los.paths == 1);
}

TEST_CASE("name parsing") {
  CHECK(ParseExperimentId("rate-vs-power") == ExperimentId::kRateVsPower);
  CHECK(ParseExperimentId("bab_complexity") == ExperimentId::kBabComplexity);
  CHECK(ParseMethod("ao-sca") == Method::kAoSca);
  CHECK(ParseMethod("exhaustive") == Method::kExhaustive);
  CHECK(ParseInitMode("random") == InitMode::kRandom);
  CHECK_THROWS_AS(ParseExperimentId("fig9"), ConfigError);
  CHECK_THROWS_AS(ParseMethod("magic"), ConfigError);
  CHECK_THROWS_AS(ParseInitMode(""), ConfigError);
}

TEST_CASE("invalid configurations are rejected") {
  auto rejects = [](auto edit, ExperimentId id = ExperimentId::kRateVsPower) {
    ExperimentConfig c = ExperimentConfig::Defaults(id);
    edit(c);
    CHECK_THROWS_AS(c.Validate(), ConfigError);
    CHECK_THROWS_AS(RunExperiment(c), ConfigError);
  };
  rejects([](ExperimentConfig& c) { c.m = 24; });
  rejects([](ExperimentConfig& c) { c.n = 26; });
  rejects([](ExperimentConfig& c) { c.n = 0; });
  rejects([](ExperimentConfig& c) { c.k = 0; });
  rejects([](ExperimentConfig& c) { c.trials = 0; });
  rejects([](ExperimentConfig& c) { c.threads = 0; });
  rejects([](ExperimentConfig& c) { c.carrier_ghz = 0.0; });
  rejects([](ExperimentConfig& c) { c.cell_radius_m = 0.5; });
  rejects([](ExperimentConfig& c) { c.methods.clear(); });
  rejects([](ExperimentConfig& c) { c.methods = {Method::kFpa, Method::kFpa}; });
  rejects([](ExperimentConfig& c) { c.methods = {Method::kBab}; });
  rejects([](ExperimentConfig& c) { c.sweep.clear(); });
  rejects([](ExperimentConfig& c) { c.sweep = {5, 5}; });
  rejects([](ExperimentConfig& c) { c.k = 3; }, ExperimentId::kTwoUserLos);
  rejects([](ExperimentConfig& c) { c.paths = 2; }, ExperimentId::kTwoUserLos);
  rejects([](ExperimentConfig& c) { c.sweep = {10}; }, ExperimentId::kBabComplexity);
  rejects([](ExperimentConfig& c) { c.sweep = {100}; c.n = 10; }, ExperimentId::kBabComplexity);
  rejects([](ExperimentConfig& c) { c.sweep = {2.5}; }, ExperimentId::kRateVsUsers);
  rejects([](ExperimentConfig& c) { c.sweep = {30}; }, ExperimentId::kConvergence);
}

TEST_CASE("ULA coordinates are centered with half-wavelength spacing") {
  const auto ula = UlaCoordinates(4, 0.06);
  REQUIRE(ula.size() == 4);
  CHECK(ula[0].x == doctest::Approx(-0.045));
  CHECK(ula[3].x == doctest::Approx(0.045));
  for (std::size_t i = 1; i < ula.size(); ++i) CHECK(ula[i].x - ula[i - 1].x == doctest::Approx(0.03));
  for (const auto& p : ula) CHECK(p.y == 0.0);
}

TEST_CASE("fixed-array baseline uses the closed form for two users") {
  ExperimentConfig c = Small(ExperimentId::kTwoUserLos);
  const Scenario s = TrialScenario(c, 0);
  const double budget = DbmToWatts(10.0);
  const BaselineResult fpa = FpaBaseline(s, 4, budget);
  const auto ula = UlaCoordinates(4, s.wavelength);
  const Eigen::MatrixXcd h = ChannelMatrixAt(s.users, ula, s.wavelength);
  const TwoUserGeometry g = MakeTwoUserGeometry(h.col(0), h.col(1), s.users[0].noise_power(), s.users[1].noise_power(), budget);
  CHECK(fpa.rate == doctest::Approx(TwoUserRate(g)).epsilon(1e-12));
  CHECK(fpa.beamformer.power() == doctest::Approx(budget));
}

TEST_CASE("trial scenarios are reproducible and independent of other trials") {
  const ExperimentConfig c = Small(ExperimentId::kRateVsPower);
  const Scenario a = TrialScenario(c, 3);
  const Scenario b = TrialScenario(c, 3);
  REQUIRE(a.users.size() == 5);
  for (std::size_t k = 0; k < a.users.size(); ++k)
    for (std::size_t l = 0; l < a.users[k].paths().size(); ++l)
      CHECK(a.users[k].paths()[l].gain == b.users[k].paths()[l].gain);
  const Scenario other = TrialScenario(c, 4);
  CHECK(other.users[0].paths()[0].gain != a.users[0].paths()[0].gain);
  ExperimentConfig more = c;
  more.trials = 50;
  CHECK(TrialScenario(more, 3).users[0].paths()[0].gain == a.users[0].paths()[0].gain);
  ExperimentConfig reseeded = c;
  reseeded.seed = 2;
  CHECK(TrialScenario(reseeded, 3).users[0].paths()[0].gain != a.users[0].paths()[0].gain);
}

TEST_CASE("output is deterministic across runs and thread counts") {
  for (ExperimentId id : {ExperimentId::kRateVsPower, ExperimentId::kTwoUserLos, ExperimentId::kConvergence}) {
    ExperimentConfig c = Small(id, 6);
    const ExperimentResult one = RunExperiment(c);
    const ExperimentResult again = RunExperiment(c);
    c.threads = 3;
    const ExperimentResult many = RunExperiment(c);
    CHECK(AggregateCsv(one) == AggregateCsv(again));
    CHECK(AggregateCsv(one) == AggregateCsv(many));
    CHECK(RecordsCsv(one) == RecordsCsv(many));
  }
}

TEST_CASE("records are ordered by trial, sweep point and method") {
  const ExperimentConfig c = Small(ExperimentId::kRateVsPower, 3);
  const ExperimentResult r = RunExperiment(c);
  REQUIRE(r.records.size() == 3 * 5 * 2);
  std::size_t i = 0;
  for (int t = 0; t < 3; ++t)
    for (double p : c.sweep)
      for (Method m : c.methods) {
        CHECK(r.records[i].trial == t);
        CHECK(r.records[i].sweep_value == p);
        CHECK(r.records[i].method == m);
        ++i;
      }
}

TEST_CASE("aggregate schemas") {
  const std::map<ExperimentId, std::string> headers = {
      {ExperimentId::kConvergence, "iteration,mean_rate,N"},
      {ExperimentId::kRateVsPower, "power_dbm,method,mean_rate"},
      {ExperimentId::kRateVsUsers, "K,method,mean_rate"},
      {ExperimentId::kTwoUserLos, "power_dbm,method,mean_rate"},
      {ExperimentId::kBabComplexity, "M,method,mean_visited_nodes,mean_rate"},
  };
  for (const auto& [id, header] : headers) {
    ExperimentConfig c = Small(id, 2);
    if (id == ExperimentId::kRateVsUsers) c.sweep = {2, 3};
    const ExperimentResult r = RunExperiment(c);
    const auto lines = Lines(AggregateCsv(r));
    REQUIRE(lines.size() > 1);
    CHECK(lines[0] == header);
    const auto columns = std::count(header.begin(), header.end(), ',');
    for (const auto& line : lines) CHECK(std::count(line.begin(), line.end(), ',') == columns);
    if (id != ExperimentId::kConvergence)
      CHECK(lines.size() == 1 + c.sweep.size() * c.methods.size());
    CHECK(Lines(RecordsCsv(r))[0] == "trial,method,sweep,rate,iterations,visited_nodes");
  }
}

TEST_CASE("golden aggregate for a small fixed configuration") {
  ExperimentConfig c = Small(ExperimentId::kRateVsPower, 3);
  c.sweep = {0, 10, 20};
  CheckGolden("rate_vs_power_small.csv", AggregateCsv(RunExperiment(c)));
  ExperimentConfig los = Small(ExperimentId::kBabComplexity, 3);
  los.sweep = {9, 16};
  CheckGolden("bab_complexity_small.csv", AggregateCsv(RunExperiment(los)));
}

TEST_CASE("mean rate grows with transmit power") {
  ExperimentConfig c = Small(ExperimentId::kRateVsPower, 10);
  const ExperimentResult r = RunExperiment(c);
  std::map<std::pair<Method, double>, double> mean;
  for (const auto& rec : r.records) mean[{rec.method, rec.sweep_value}] += rec.rate / c.trials;
  for (Method m : c.methods)
    for (std::size_t i = 1; i < c.sweep.size(); ++i)
      CHECK(mean[{m, c.sweep[i]}] >= mean[{m, c.sweep[i - 1]}]);
}

TEST_CASE("complexity records: bab equals exhaustive and visits fewer nodes") {
  const ExperimentResult r = RunExperiment(Small(ExperimentId::kBabComplexity, 5));
  std::map<std::pair<int, double>, const TrialRecord*> bab, ex;
  for (const auto& rec : r.records) {
    if (rec.method == Method::kBab) bab[{rec.trial, rec.sweep_value}] = &rec;
    if (rec.method == Method::kExhaustive) ex[{rec.trial, rec.sweep_value}] = &rec;
  }
  REQUIRE(bab.size() == ex.size());
  for (const auto& [key, b] : bab) {
    const TrialRecord* e = ex.at(key);
    CHECK(b->rate == doctest::Approx(e->rate).epsilon(1e-9));
    CHECK(b->visited_nodes <= e->visited_nodes);
    CHECK(e->visited_nodes == FullTreeNodeCount(static_cast<int>(key.second), 4));
  }
}

TEST_CASE("convergence traces are non-decreasing") {
  const ExperimentResult r = RunExperiment(Small(ExperimentId::kConvergence, 4));
  for (const auto& rec : r.records) {
    REQUIRE_FALSE(rec.rate_trace.empty());
    for (std::size_t i = 1; i < rec.rate_trace.size(); ++i) CHECK(rec.rate_trace[i] >= rec.rate_trace[i - 1] - 1e-9);
    CHECK(rec.rate == rec.rate_trace.back());
  }
  CHECK(Summary(r).find("stopped within 10 outer iterations") != std::string::npos);
}

TEST_CASE("figure files") {
  const ExperimentResult r = RunExperiment(Small(ExperimentId::kTwoUserLos, 2));
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "macast_test_figure";
  std::filesystem::remove_all(dir);
  EmitFigureData(r, dir, true);
  CHECK(ReadFile(dir / "two_user_los.csv") == AggregateCsv(r));
  CHECK(ReadFile(dir / "two_user_los_trials.csv") == RecordsCsv(r));
  CHECK(ReadFile(dir / "two_user_los_summary.txt") == Summary(r));
  const std::string svg = ReadFile(dir / "two_user_los.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("greedy") != std::string::npos);
  std::filesystem::remove_all(dir);

  ExperimentResult empty;
  empty.config = r.config;
  CHECK_THROWS_AS(EmitFigureData(empty, dir, false), std::invalid_argument);
  CHECK_THROWS(RenderLineChart("t", "x", "y", {}));
}
