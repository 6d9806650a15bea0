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

#include "macast/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "macast/errors.hpp"

namespace macast {

PlacementProblem::PlacementProblem(Eigen::MatrixXcd gain_table, std::vector<double> noise_powers)
    : gains_(std::move(gain_table)), noise_powers_(std::move(noise_powers)) {
  if (gains_.cols() != static_cast<Eigen::Index>(noise_powers_.size()))
    throw DimensionMismatch("gain table needs one column per noise power");
  if (gains_.rows() == 0 || gains_.cols() == 0) throw DimensionMismatch("empty gain table");
  for (double s : noise_powers_) {
    if (!(s > 0.0)) throw std::invalid_argument("noise powers must be positive");
  }
}

PlacementProblem::PlacementProblem(const Scenario& scenario, const PositionGrid& grid)
    : PlacementProblem(GainTable(scenario.users, grid), scenario.noise_powers()) {}

Eigen::MatrixXcd PlacementProblem::Channels(const PlacementSet& placement) const {
  if (placement.grid_size() != grid_size()) throw InvalidPlacement("placement built for another grid");
  Eigen::MatrixXcd h(placement.size(), gains_.cols());
  for (int n = 0; n < placement.size(); ++n) h.row(n) = gains_.row(placement[n]);
  return h;
}

double PlacementProblem::MinSnr(const PlacementSet& placement, const Eigen::VectorXcd& w) const {
  return macast::MinSnr(Channels(placement), noise_powers_, w);
}

int BestSinglePosition(const PlacementProblem& problem, const PlacementSet& placement,
                       const Eigen::VectorXcd& w, int antenna) {
  if (placement.grid_size() != problem.grid_size()) throw InvalidPlacement("placement built for another grid");
  if (antenna < 0 || antenna >= placement.size()) throw InvalidPlacement("antenna index out of range");
  if (w.size() != placement.size()) throw DimensionMismatch("beamformer length differs from antenna count");

  const Eigen::MatrixXcd& gains = problem.gains();
  const auto noise = problem.noise_powers();
  const int k_users = problem.users();

  // Received amplitude with antenna `antenna` removed.
  Eigen::VectorXcd base = problem.Channels(placement).adjoint() * w;
  const Complex wn = w(antenna);
  for (int k = 0; k < k_users; ++k) base(k) -= std::conj(gains(placement[antenna], k)) * wn;

  std::vector<char> occupied(static_cast<std::size_t>(problem.grid_size()), 0);
  for (int n = 0; n < placement.size(); ++n) {
    if (n != antenna) occupied[static_cast<std::size_t>(placement[n])] = 1;
  }

  int best_index = placement[antenna];
  double best_value = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < problem.grid_size(); ++m) {
    if (occupied[static_cast<std::size_t>(m)]) continue;
    double value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_users; ++k) {
      const Complex y = base(k) + std::conj(gains(m, k)) * wn;
      value = std::min(value, std::norm(y) / noise[static_cast<std::size_t>(k)]);
    }
    if (value > best_value) {
      best_value = value;
      best_index = m;
    }
  }
  return best_index;
}

PositionSearchResult OptimizePositions(const PlacementProblem& problem, const PlacementSet& initial,
                                       const Eigen::VectorXcd& w, const PositionSearchOptions& options) {
  PositionSearchResult result{initial, {problem.MinSnr(initial, w)}, 0, 0};
  const int admissible = problem.grid_size() - initial.size() + 1;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (int n = 0; n < result.placement.size(); ++n) {
      result.placement.Move(n, BestSinglePosition(problem, result.placement, w, n));
      result.candidates_evaluated += admissible;
    }
    result.sweeps = sweep;
    const double previous = result.objective_trace.back();
    const double current = problem.MinSnr(result.placement, w);
    result.objective_trace.push_back(current);
    if (current - previous <= options.tolerance * previous) break;
  }
  return result;
}

AoState AoJoint(const PlacementProblem& problem, const PlacementSet& initial, const Eigen::VectorXcd& w0,
                double budget, const AoOptions& options) {
  AoState state{initial, Beamformer(w0, budget), 0, false,
                {RateFromSnr(problem.MinSnr(initial, w0))}};
  for (int round = 1; round <= options.max_rounds; ++round) {
    const Eigen::MatrixXcd channels = problem.Channels(state.placement);
    ScaResult sca = ScaBeamform(channels, problem.noise_powers(), budget, state.beamformer.weights(),
                                options.sca);
    PositionSearchResult moved =
        OptimizePositions(problem, state.placement, sca.beamformer.weights(), options.positions);

    const double previous = state.rate_trace.back();
    const double current = RateFromSnr(problem.MinSnr(moved.placement, sca.beamformer.weights()));
    state.rounds = round;
    if (current < previous) {
      state.rate_trace.push_back(previous);
      state.converged = true;
      break;
    }
    state.beamformer = std::move(sca.beamformer);
    state.placement = std::move(moved.placement);
    state.rate_trace.push_back(current);
    if (current - previous <= options.tolerance * previous) {
      state.converged = true;
      break;
    }
  }
  return state;
}

double RateUpperBound(const PlacementProblem& problem, double budget) {
  double best = 0.0;
  for (int k = 0; k < problem.users(); ++k) {
    best = std::max(best, budget * problem.gains().col(k).squaredNorm() /
                              problem.noise_powers()[static_cast<std::size_t>(k)]);
  }
  return RateFromSnr(best);
}

PlacementSet NearestGridPlacement(const PositionGrid& grid, std::span<const Coordinate> coordinates) {
  if (static_cast<int>(coordinates.size()) > grid.size())
    throw InvalidPlacement("more coordinates than grid points");
  const double tie = 1e-12 * grid.spacing_meters() * grid.spacing_meters();
  std::vector<char> used(static_cast<std::size_t>(grid.size()), 0);
  std::vector<int> indices;
  indices.reserve(coordinates.size());
  for (const Coordinate& c : coordinates) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int m = 0; m < grid.size(); ++m) {
      if (used[static_cast<std::size_t>(m)]) continue;
      const double dx = grid[m].x - c.x;
      const double dy = grid[m].y - c.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2 - tie) {
        best_d2 = d2;
        best = m;
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    indices.push_back(best);
  }
  return PlacementSet(std::move(indices), grid.size());
}

PlacementSet RandomPlacement(ScenarioRng& rng, int grid_size, int antennas) {
  if (antennas < 1 || antennas > grid_size) throw InvalidPlacement("need 1 <= N <= M");
  std::vector<int> pool(static_cast<std::size_t>(grid_size));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < antennas; ++i) {
    const int remaining = grid_size - i;
    const int pick = i + std::min(remaining - 1, static_cast<int>(rng.Uniform() * remaining));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(antennas));
  return PlacementSet(std::move(pool), grid_size);
}

}  // namespace macast
