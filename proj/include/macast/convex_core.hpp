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

// Multicast objective and fixed-placement beamforming via successive convex
// approximation.
//
// Channels are passed as an N x K matrix whose column k is h_k(T). All
// SNRs are linear (not dB); rates are in bits/s/Hz.

#ifndef MACAST_CONVEX_CORE_HPP_
#define MACAST_CONVEX_CORE_HPP_

#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace macast {

// Transmit weights with their power budget. Construction enforces
// ||w||^2 <= P (1 + 1e-9).
class Beamformer {
 public:
  Beamformer(Eigen::VectorXcd weights, double budget);

  const Eigen::VectorXcd& weights() const { return weights_; }
  double budget() const { return budget_; }
  double power() const { return weights_.squaredNorm(); }

 private:
  Eigen::VectorXcd weights_;
  double budget_;
};

inline constexpr double kPowerSlack = 1e-9;

// Per-user SNR sigma_k^-2 |h_k^H w|^2.
Eigen::VectorXd UserSnrs(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                         const Eigen::VectorXcd& w);

double MinSnr(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
              const Eigen::VectorXcd& w);

double RateFromSnr(double snr);

double MulticastRate(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                     const Eigen::VectorXcd& w);

// Solution of one convexified subproblem
//
//   max r  s.t.  2 Re{w_q^H H_k w} - |h_k^H w_q|^2 >= r sigma_k^2,  ||w||^2 <= P.
//
// `surrogate` is the optimal r. `multipliers` are the simplex weights on
// the K linearized constraints and `ball_multiplier` the multiplier of the
// power constraint; together they certify optimality:
//   sum_k mu_k grad f_k(w) = 2 nu w   with f_k the normalized constraint.
// `duality_gap` is the gap between the certificate's dual value and the
// primal value of w (zero at exact optimality).
struct ScaSubproblemSolution {
  Eigen::VectorXcd w;
  double surrogate = 0.0;
  Eigen::VectorXd multipliers;
  double ball_multiplier = 0.0;
  double duality_gap = 0.0;
};

// Exact solver: enumerates active sets of the dual simplex problem, which
// has a closed-form solution per support. Falls back to
// SolveScaSubproblemBisection when K exceeds kMaxEnumeratedUsers.
ScaSubproblemSolution SolveScaSubproblem(const Eigen::MatrixXcd& channels,
                                         std::span<const double> noise_powers,
                                         const Eigen::VectorXcd& w_q, double budget);

inline constexpr int kMaxEnumeratedUsers = 12;

struct BisectionOptions {
  double relative_interval = 1e-8;
  int max_sweeps = 200000;  // Hildreth sweeps per feasibility test
};

// Bisection on r. Each level is tested by computing the minimum-norm point of
// the K half-spaces with Hildreth's cyclic dual ascent: the level is feasible
// once that point lies in the ball and certified infeasible once the dual
// value exceeds P / 2. Used as an independent check of the exact solver and
// as its fallback when K exceeds kMaxEnumeratedUsers.
ScaSubproblemSolution SolveScaSubproblemBisection(const Eigen::MatrixXcd& channels,
                                                  std::span<const double> noise_powers,
                                                  const Eigen::VectorXcd& w_q, double budget,
                                                  const BisectionOptions& options = {});

struct ScaOptions {
  double tolerance = 1e-4;  // fractional objective increase
  int max_iterations = 50;
};

struct ScaResult {
  Beamformer beamformer;
  // min-SNR at w_0, w_1, ...; non-decreasing.
  std::vector<double> objective_trace;
  int iterations = 0;
  // Certificate of the last subproblem solve.
  ScaSubproblemSolution last_subproblem;
};

// Matched filter to the user with the smallest ||h_k||^2 / sigma_k^2,
// scaled to sqrt(P). Falls back to the strongest user if that channel is
// zero; throws ZeroChannel if every channel is zero.
Eigen::VectorXcd WeakestUserMatchedFilter(const Eigen::MatrixXcd& channels,
                                          std::span<const double> noise_powers, double budget);

ScaResult ScaBeamform(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                      double budget, const Eigen::VectorXcd& w0, const ScaOptions& options = {});

struct SubspaceScaResult {
  Beamformer beamformer;
  Eigen::VectorXcd coefficients;  // eta, w = H eta
  std::vector<double> objective_trace;
  int iterations = 0;
};

inline constexpr double kGramRidge = 1e-12;

// Runs the same SCA over eta in C^K with w = sum_k eta_k h_k. The K x K
// Gram matrix (plus a 1e-12 trace ridge) is factored once and the problem
// is solved on K-dimensional effective channels.
SubspaceScaResult ScaBeamformSubspace(const Eigen::MatrixXcd& channels,
                                      std::span<const double> noise_powers, double budget,
                                      const ScaOptions& options = {});

// CSV with header "iteration,r,rate".
void WriteScaTraceCsv(std::ostream& out, std::span<const double> objective_trace);

}  // namespace macast

#endif  // MACAST_CONVEX_CORE_HPP_
