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

#ifndef MACAST_PLACEMENT_HPP_
#define MACAST_PLACEMENT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "macast/channel.hpp"
#include "macast/convex_core.hpp"

namespace macast {

// Gain table of one scenario (M x K, entry (m, k) = h_k(p_m)) together
// with the user noise powers. Immutable; shared by every position search.
class PlacementProblem {
 public:
  PlacementProblem(Eigen::MatrixXcd gain_table, std::vector<double> noise_powers);
  PlacementProblem(const Scenario& scenario, const PositionGrid& grid);

  int grid_size() const { return static_cast<int>(gains_.rows()); }
  int users() const { return static_cast<int>(gains_.cols()); }
  const Eigen::MatrixXcd& gains() const { return gains_; }
  std::span<const double> noise_powers() const { return noise_powers_; }

  // N x K channel matrix for a placement, read from the table.
  Eigen::MatrixXcd Channels(const PlacementSet& placement) const;
  double MinSnr(const PlacementSet& placement, const Eigen::VectorXcd& w) const;

 private:
  Eigen::MatrixXcd gains_;
  std::vector<double> noise_powers_;
};

// Grid index maximizing the min-SNR when antenna n moves there and all
// other antennas stay put. Exhaustive over admissible points; ties go to
// the lowest grid index. The current position of antenna n is admissible.
int BestSinglePosition(const PlacementProblem& problem, const PlacementSet& placement,
                       const Eigen::VectorXcd& w, int antenna);

struct PositionSearchOptions {
  double tolerance = 1e-4;
  int max_sweeps = 100;
};

struct PositionSearchResult {
  PlacementSet placement;
  std::vector<double> objective_trace;  // min-SNR after each sweep, entry 0 = start
  int sweeps = 0;
  std::int64_t candidates_evaluated = 0;
};

// Element-wise coordinate ascent: sweeps antennas 1..N in order, moving each
// to its best single position, until the fractional increase of a sweep
// falls below the tolerance.
PositionSearchResult OptimizePositions(const PlacementProblem& problem,
                                       const PlacementSet& initial, const Eigen::VectorXcd& w,
                                       const PositionSearchOptions& options = {});

struct AoOptions {
  double tolerance = 1e-4;
  int max_rounds = 30;
  ScaOptions sca;
  PositionSearchOptions positions;
};

struct AoState {
  PlacementSet placement;
  Beamformer beamformer;
  int rounds = 0;
  bool converged = false;
  // Multicast rate at the initial pair, then after every round.
  std::vector<double> rate_trace;
};

// Alternates SCA beamforming (warm-started at the previous beamformer) and
// element-wise position search until the fractional rate increase of a
// round drops below the tolerance.
AoState AoJoint(const PlacementProblem& problem, const PlacementSet& initial,
                const Eigen::VectorXcd& w0, double budget, const AoOptions& options = {});

// log2(1 + P max_k ||h_k(all grid points)||^2 / sigma_k^2): no placement and
// beamformer can exceed it.
double RateUpperBound(const PlacementProblem& problem, double budget);

// N distinct grid points nearest the given coordinates, assigned in order;
// distance ties go to the lowest grid index.
PlacementSet NearestGridPlacement(const PositionGrid& grid, std::span<const Coordinate> coordinates);

// Uniformly random distinct placement.
PlacementSet RandomPlacement(ScenarioRng& rng, int grid_size, int antennas);

}  // namespace macast

#endif  // MACAST_PLACEMENT_HPP_
