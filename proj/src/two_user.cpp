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

#include "macast/two_user.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "macast/errors.hpp"

namespace macast {

TwoUserGeometry MakeTwoUserGeometry(const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                                    double noise1, double noise2, double budget) {
  if (h1.size() != h2.size()) throw DimensionMismatch("two-user channels differ in length");
  if (!(noise1 > 0.0) || !(noise2 > 0.0)) throw std::invalid_argument("noise powers must be positive");
  if (!(budget > 0.0)) throw std::invalid_argument("power budget must be positive");
  TwoUserGeometry g;
  g.scaled1 = (std::sqrt(budget / noise1)) * h1;
  g.scaled2 = (std::sqrt(budget / noise2)) * h2;
  g.alpha1 = g.scaled1.squaredNorm();
  g.alpha2 = g.scaled2.squaredNorm();
  g.alpha12 = g.scaled1.dot(g.scaled2);
  return g;
}

double TwoUserMinSnr(double alpha1, double alpha2, double abs_alpha12) {
  if (alpha1 <= abs_alpha12 * (1.0 + kBranchSlack)) return alpha1;
  if (alpha2 <= abs_alpha12 * (1.0 + kBranchSlack)) return alpha2;
  const double denom = alpha1 + alpha2 - 2.0 * abs_alpha12;
  assert(denom > 0.0);
  return (alpha1 * alpha2 - abs_alpha12 * abs_alpha12) / denom;
}

double TwoUserRate(double alpha1, double alpha2, double abs_alpha12) {
  return RateFromSnr(TwoUserMinSnr(alpha1, alpha2, abs_alpha12));
}

double TwoUserRate(const TwoUserGeometry& geometry) {
  return TwoUserRate(geometry.alpha1, geometry.alpha2, std::abs(geometry.alpha12));
}

KktSolution SolveTwoUserKkt(const TwoUserGeometry& geometry) {
  const double a1 = geometry.alpha1;
  const double a2 = geometry.alpha2;
  const double c = std::abs(geometry.alpha12);
  if (!(a1 > 0.0) && !(a2 > 0.0)) throw ZeroChannel("both user channels are zero");

  KktSolution sol;
  auto matched = [&](int user) {
    const double own = user == 1 ? a1 : a2;
    // A zero channel cannot be aligned with; any unit vector attains SNR 0.
    const Eigen::VectorXcd& mine = user == 1 ? geometry.scaled1 : geometry.scaled2;
    const Eigen::VectorXcd& other = user == 1 ? geometry.scaled2 : geometry.scaled1;
    const Eigen::VectorXcd& basis = own > 0.0 ? mine : other;
    sol.mrt_user = user;
    sol.mu1 = user == 1 ? 1.0 : 0.0;
    sol.mu2 = 1.0 - sol.mu1;
    sol.lagrange = own;
    sol.direction = basis.normalized();
    sol.min_snr = own;
  };

  if (a1 <= c * (1.0 + kBranchSlack)) {
    matched(1);
    return sol;
  }
  if (a2 <= c * (1.0 + kBranchSlack)) {
    matched(2);
    return sol;
  }

  const double denom = a1 + a2 - 2.0 * c;
  sol.interior = true;
  sol.mu1 = (a2 - c) / denom;
  sol.mu2 = (a1 - c) / denom;
  sol.lagrange = (a1 * a2 - c * c) / denom;
  // e^{-j angle(alpha12)} aligns the second user's contribution with the first.
  const Complex align = c > 0.0 ? std::conj(geometry.alpha12) / c : Complex{1.0, 0.0};
  Eigen::VectorXcd p = sol.mu1 * geometry.scaled1 + (sol.mu2 * align) * geometry.scaled2;
  sol.direction = p / p.norm();
  sol.min_snr = sol.lagrange;
  return sol;
}

TwoUserBeamformResult OptimalBeamformerTwoUser(const TwoUserGeometry& geometry, double budget) {
  KktSolution kkt = SolveTwoUserKkt(geometry);
  Eigen::VectorXcd w = std::sqrt(budget) * kkt.direction;
  const double rate = RateFromSnr(kkt.min_snr);
  return TwoUserBeamformResult{Beamformer(std::move(w), budget), rate, std::move(kkt)};
}

GreedyResult GreedyPlacement(const PlacementProblem& problem, int antennas, double budget) {
  if (problem.users() != 2) throw std::invalid_argument("GreedyPlacement: exactly two users required");
  const int m_total = problem.grid_size();
  if (antennas < 1 || antennas > m_total) throw InvalidPlacement("need 1 <= N <= M");

  const auto noise = problem.noise_powers();
  const Eigen::VectorXcd s1 = std::sqrt(budget / noise[0]) * problem.gains().col(0);
  const Eigen::VectorXcd s2 = std::sqrt(budget / noise[1]) * problem.gains().col(1);

  std::vector<char> selected(static_cast<std::size_t>(m_total), 0);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(antennas));
  double a1 = 0.0;
  double a2 = 0.0;
  Complex a12{0.0, 0.0};
  double current_rate = 0.0;
  std::int64_t evaluations = 0;

  for (int step = 0; step < antennas; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_rate = 0.0;
    for (int m = 0; m < m_total; ++m) {
      if (selected[static_cast<std::size_t>(m)]) continue;
      ++evaluations;
      const double rate = TwoUserRate(a1 + std::norm(s1(m)), a2 + std::norm(s2(m)),
                                      std::abs(a12 + std::conj(s1(m)) * s2(m)));
      const double gain = rate - current_rate;
      if (gain > best_gain) {
        best_gain = gain;
        best = m;
        best_rate = rate;
      }
    }
    selected[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    a1 += std::norm(s1(best));
    a2 += std::norm(s2(best));
    a12 += std::conj(s1(best)) * s2(best);
    current_rate = best_rate;
  }

  PlacementSet placement(std::move(order), m_total);
  const Eigen::MatrixXcd h = problem.Channels(placement);
  const TwoUserGeometry geometry = MakeTwoUserGeometry(h.col(0), h.col(1), noise[0], noise[1], budget);
  TwoUserBeamformResult bf = OptimalBeamformerTwoUser(geometry, budget);
  return GreedyResult{std::move(placement), std::move(bf.beamformer), bf.rate, evaluations};
}

}  // namespace macast
