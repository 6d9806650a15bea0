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

// Closed-form optimal beamforming for two multicast users and the greedy
// antenna placement built on top of it.

#ifndef MACAST_TWO_USER_HPP_
#define MACAST_TWO_USER_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "macast/channel.hpp"
#include "macast/convex_core.hpp"
#include "macast/placement.hpp"

namespace macast {

// Scaled channels h_i_hat = sqrt(P) / sigma_i * h_i and their energies
// alpha_i = ||h_i_hat||^2 and cross term alpha_12 = h_1_hat^H h_2_hat.
struct TwoUserGeometry {
  Eigen::VectorXcd scaled1;
  Eigen::VectorXcd scaled2;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Complex alpha12;
};

TwoUserGeometry MakeTwoUserGeometry(const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                                    double noise1, double noise2, double budget);

// Stationary point of the normalized problem
//   max x  s.t.  x <= |h_i_hat^H p|^2,  ||p|| = 1.
// In the interior case both users are served with equal SNR; otherwise
// `mrt_user` (1 or 2) names the user whose matched filter is optimal.
struct KktSolution {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double lagrange = 0.0;  // eigenvalue of mu1 h1 h1^H + mu2 h2 h2^H at p
  Eigen::VectorXcd direction;
  double min_snr = 0.0;
  bool interior = false;
  int mrt_user = 0;
};

inline constexpr double kBranchSlack = 1e-12;

KktSolution SolveTwoUserKkt(const TwoUserGeometry& geometry);

// Piecewise closed-form maximum of min(SNR_1, SNR_2) and the rate from it.
double TwoUserMinSnr(double alpha1, double alpha2, double abs_alpha12);
double TwoUserRate(double alpha1, double alpha2, double abs_alpha12);
double TwoUserRate(const TwoUserGeometry& geometry);

struct TwoUserBeamformResult {
  Beamformer beamformer;
  double rate = 0.0;
  KktSolution kkt;
};

// w = sqrt(P) p with p from SolveTwoUserKkt. Throws ZeroChannel if both
// channels vanish.
TwoUserBeamformResult OptimalBeamformerTwoUser(const TwoUserGeometry& geometry, double budget);

struct GreedyResult {
  PlacementSet placement;
  Beamformer beamformer;
  double rate = 0.0;
  std::int64_t evaluations = 0;
};

// Adds one grid index per step, choosing the unselected candidate with the
// largest closed-form rate increase (empty set has rate 0, ties to the
// lowest index), then applies the closed-form beamformer. The placement is
// returned in selection order.
GreedyResult GreedyPlacement(const PlacementProblem& problem, int antennas, double budget);

}  // namespace macast

#endif  // MACAST_TWO_USER_HPP_
