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

#include "macast/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "macast/errors.hpp"

namespace macast {

namespace {

void CheckDimensions(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                     const Eigen::VectorXcd& w) {
  if (channels.cols() != static_cast<Eigen::Index>(noise_powers.size()))
    throw DimensionMismatch("one noise power per user required");
  if (channels.rows() != w.size()) throw DimensionMismatch("beamformer length differs from channel length");
  if (channels.cols() == 0) throw DimensionMismatch("at least one user required");
}

// The linearized constraints in normalized form: f_k(w) = Re{g_k^H w} - e_k.
struct Linearization {
  Eigen::MatrixXcd g;        // N x K
  Eigen::VectorXd offset;    // e_k
  Eigen::MatrixXd gram;      // Re{g_i^H g_j}

  Eigen::VectorXd Evaluate(const Eigen::VectorXcd& w) const {
    return (g.adjoint() * w).real() - offset;
  }
};

Linearization Linearize(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                        const Eigen::VectorXcd& w_q) {
  const Eigen::Index k_users = channels.cols();
  Linearization lin;
  lin.g.resize(channels.rows(), k_users);
  lin.offset.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const std::complex<double> s = channels.col(k).dot(w_q);  // h_k^H w_q
    const double sigma2 = noise_powers[static_cast<std::size_t>(k)];
    lin.g.col(k) = (2.0 * s / sigma2) * channels.col(k);
    lin.offset(k) = std::norm(s) / sigma2;
  }
  lin.gram = (lin.g.adjoint() * lin.g).real();
  return lin;
}

Eigen::VectorXcd ClampToBall(Eigen::VectorXcd w, double radius) {
  const double norm = w.norm();
  if (norm > radius) w *= radius / norm;
  return w;
}

double DualValue(const Linearization& lin, const Eigen::VectorXd& mu, double radius) {
  return radius * (lin.g * mu.cast<std::complex<double>>()).norm() - lin.offset.dot(mu);
}

}  // namespace

Beamformer::Beamformer(Eigen::VectorXcd weights, double budget)
    : weights_(std::move(weights)), budget_(budget) {
  if (!(budget_ > 0.0)) throw std::invalid_argument("Beamformer: budget must be positive");
  if (weights_.squaredNorm() > budget_ * (1.0 + kPowerSlack))
    throw std::invalid_argument("Beamformer: power budget exceeded");
}

Eigen::VectorXd UserSnrs(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                         const Eigen::VectorXcd& w) {
  CheckDimensions(channels, noise_powers, w);
  const Eigen::VectorXcd y = channels.adjoint() * w;
  Eigen::VectorXd snr(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    snr(k) = std::norm(y(k)) / noise_powers[static_cast<std::size_t>(k)];
  }
  return snr;
}

double MinSnr(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
              const Eigen::VectorXcd& w) {
  return UserSnrs(channels, noise_powers, w).minCoeff();
}

double RateFromSnr(double snr) { return std::log2(1.0 + snr); }

double MulticastRate(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                     const Eigen::VectorXcd& w) {
  return RateFromSnr(MinSnr(channels, noise_powers, w));
}

ScaSubproblemSolution SolveScaSubproblem(const Eigen::MatrixXcd& channels,
                                         std::span<const double> noise_powers,
                                         const Eigen::VectorXcd& w_q, double budget) {
  CheckDimensions(channels, noise_powers, w_q);
  const int k_users = static_cast<int>(channels.cols());
  if (k_users > kMaxEnumeratedUsers) {
    return SolveScaSubproblemBisection(channels, noise_powers, w_q, budget);
  }
  if (w_q.squaredNorm() > budget * (1.0 + kPowerSlack))
    throw std::invalid_argument("SolveScaSubproblem: local point violates the power budget");

  const double radius = std::sqrt(budget);
  const Linearization lin = Linearize(channels, noise_powers, w_q);

  // The local point is always feasible with r = min_k SNR_k(w_q).
  ScaSubproblemSolution best;
  best.w = w_q;
  best.surrogate = lin.Evaluate(w_q).minCoeff();
  best.multipliers = Eigen::VectorXd::Zero(k_users);
  double best_dual = std::numeric_limits<double>::infinity();

  // By minimax duality the optimum equals
  //   min_{mu in simplex} sqrt(P) ||G mu|| - e^T mu.
  // On a support S with linearly independent g's, all constraints in S are
  // tight at w = G_S beta with beta = r M^-1 1 + M^-1 e, and ||w||^2 = P
  // fixes r through a scalar quadratic.
  std::vector<int> support;
  support.reserve(k_users);
  for (unsigned mask = 1; mask < (1u << k_users); ++mask) {
    support.clear();
    for (int k = 0; k < k_users; ++k) {
      if (mask & (1u << k)) support.push_back(k);
    }
    const int s = static_cast<int>(support.size());
    Eigen::MatrixXd gram_s(s, s);
    Eigen::VectorXd offset_s(s);
    for (int i = 0; i < s; ++i) {
      offset_s(i) = lin.offset(support[i]);
      for (int j = 0; j < s; ++j) gram_s(i, j) = lin.gram(support[i], support[j]);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(gram_s);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) continue;
    const Eigen::VectorXd u = llt.solve(Eigen::VectorXd::Ones(s));
    const Eigen::VectorXd v = llt.solve(offset_s);
    const double qa = u.sum();
    const double qb = v.sum();
    const double qc = offset_s.dot(v) - budget;
    const double disc = qb * qb - qa * qc;
    if (disc < 0.0 || !(qa > 0.0)) continue;

    for (const double r : {(-qb + std::sqrt(disc)) / qa, (-qb - std::sqrt(disc)) / qa}) {
      const Eigen::VectorXd beta = r * u + v;
      const double beta_sum = beta.sum();
      if (!(beta_sum > 0.0) || beta.minCoeff() < -1e-12 * beta.cwiseAbs().maxCoeff()) continue;

      Eigen::VectorXd mu = Eigen::VectorXd::Zero(k_users);
      Eigen::VectorXcd w = Eigen::VectorXcd::Zero(channels.rows());
      for (int i = 0; i < s; ++i) {
        const double b = std::max(beta(i), 0.0);
        mu(support[i]) = b / beta_sum;
        w += b * lin.g.col(support[i]);
      }
      const double norm = w.norm();
      if (!(norm > 0.0)) continue;
      w *= radius / norm;

      const double dual = DualValue(lin, mu, radius);
      if (dual < best_dual) {
        best_dual = dual;
        best.multipliers = mu;
      }
      const double primal = lin.Evaluate(w).minCoeff();
      if (primal > best.surrogate) {
        best.w = w;
        best.surrogate = primal;
      }
    }
  }

  const double combined = (lin.g * best.multipliers.cast<std::complex<double>>()).norm();
  best.ball_multiplier = combined / (2.0 * radius);
  best.duality_gap = std::isfinite(best_dual) ? best_dual - best.surrogate : 0.0;
  return best;
}

ScaSubproblemSolution SolveScaSubproblemBisection(const Eigen::MatrixXcd& channels,
                                                  std::span<const double> noise_powers,
                                                  const Eigen::VectorXcd& w_q, double budget,
                                                  const BisectionOptions& options) {
  CheckDimensions(channels, noise_powers, w_q);
  if (w_q.squaredNorm() > budget * (1.0 + kPowerSlack))
    throw std::invalid_argument("SolveScaSubproblemBisection: local point violates the power budget");
  const double radius = std::sqrt(budget);
  const Linearization lin = Linearize(channels, noise_powers, w_q);
  const Eigen::Index k_users = channels.cols();

  Eigen::VectorXcd feasible = ClampToBall(w_q, radius);
  double lo = lin.Evaluate(feasible).minCoeff();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < k_users; ++k) {
    hi = std::min(hi, radius * lin.g.col(k).norm() - lin.offset(k));
  }

  // +1: feasible (w set to a point in the ball), -1: certified infeasible,
  // 0: undecided within the sweep budget.
  auto test_level = [&](double level, Eigen::VectorXcd& w) {
    const Eigen::VectorXd b = lin.offset.array() + level;
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(k_users);
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(channels.rows());
    const double slack = 1e-13 * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      for (Eigen::Index k = 0; k < k_users; ++k) {
        const double g2 = lin.gram(k, k);
        if (!(g2 > 0.0)) continue;
        const double delta = std::max(-nu(k), (b(k) - lin.g.col(k).dot(x).real()) / g2);
        nu(k) += delta;
        x += delta * lin.g.col(k);
      }
      const double norm2 = x.squaredNorm();
      if (nu.dot(b) - 0.5 * norm2 > 0.5 * budget) return -1;
      const Eigen::VectorXd residual = b - (lin.g.adjoint() * x).real();
      if (residual.maxCoeff() <= slack && norm2 <= budget) {
        w = x;
        return 1;
      }
    }
    return 0;
  };

  while (hi - lo > options.relative_interval * std::max({std::abs(lo), std::abs(hi), 1e-300})) {
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd trial;
    const int verdict = test_level(mid, trial);
    if (verdict == 0) break;
    if (verdict < 0) {
      hi = mid;
      continue;
    }
    // Push the min-norm point to the sphere; the surrogate is nondecreasing
    // along that ray when the level is positive, so keep the better one.
    const double n = trial.norm();
    if (n > 0.0) {
      const Eigen::VectorXcd scaled = (radius / n) * trial;
      if (lin.Evaluate(scaled).minCoeff() > lin.Evaluate(trial).minCoeff()) trial = scaled;
    }
    const double value = lin.Evaluate(trial).minCoeff();
    if (value > lin.Evaluate(feasible).minCoeff()) feasible = trial;
    lo = std::max(lo, std::min(mid, value));
    lo = std::max(lo, lin.Evaluate(feasible).minCoeff());
  }

  ScaSubproblemSolution out;
  out.w = feasible;
  out.surrogate = lin.Evaluate(feasible).minCoeff();
  out.multipliers = Eigen::VectorXd::Zero(k_users);
  out.duality_gap = std::max(0.0, hi - out.surrogate);
  return out;
}

Eigen::VectorXcd WeakestUserMatchedFilter(const Eigen::MatrixXcd& channels,
                                          std::span<const double> noise_powers, double budget) {
  if (channels.cols() != static_cast<Eigen::Index>(noise_powers.size()) || channels.cols() == 0)
    throw DimensionMismatch("one noise power per user required");
  Eigen::Index weakest = -1;
  Eigen::Index strongest = -1;
  double weakest_gain = std::numeric_limits<double>::infinity();
  double strongest_gain = 0.0;
  for (Eigen::Index k = 0; k < channels.cols(); ++k) {
    const double gain = channels.col(k).squaredNorm() / noise_powers[static_cast<std::size_t>(k)];
    if (gain > 0.0 && gain < weakest_gain) {
      weakest_gain = gain;
      weakest = k;
    }
    if (gain > strongest_gain) {
      strongest_gain = gain;
      strongest = k;
    }
  }
  if (strongest < 0) throw ZeroChannel("all user channels are zero");
  // A zero channel can never be served; match the weakest nonzero one.
  const Eigen::Index chosen = weakest >= 0 ? weakest : strongest;
  return std::sqrt(budget) * channels.col(chosen).normalized();
}

ScaResult ScaBeamform(const Eigen::MatrixXcd& channels, std::span<const double> noise_powers,
                      double budget, const Eigen::VectorXcd& w0, const ScaOptions& options) {
  CheckDimensions(channels, noise_powers, w0);
  if (!(w0.squaredNorm() > 0.0)) throw std::invalid_argument("ScaBeamform: zero initial vector");
  if (w0.squaredNorm() > budget * (1.0 + kPowerSlack))
    throw std::invalid_argument("ScaBeamform: initial vector violates the power budget");

  Eigen::VectorXcd w = w0;
  std::vector<double> trace{MinSnr(channels, noise_powers, w)};
  ScaSubproblemSolution last;
  int iterations = 0;
  for (int q = 1; q <= options.max_iterations; ++q) {
    ScaSubproblemSolution sol = SolveScaSubproblem(channels, noise_powers, w, budget);
    const double previous = trace.back();
    const double current = MinSnr(channels, noise_powers, sol.w);
    iterations = q;
    // The surrogate is a global lower bound tight at w, so a drop can only
    // come from rounding; keep the previous iterate in that case.
    if (current < previous) {
      trace.push_back(previous);
      last = std::move(sol);
      break;
    }
    w = sol.w;
    last = std::move(sol);
    trace.push_back(current);
    if (current - previous <= options.tolerance * previous) break;
  }
  return ScaResult{Beamformer(ClampToBall(w, std::sqrt(budget)), budget), std::move(trace),
                   iterations, std::move(last)};
}

SubspaceScaResult ScaBeamformSubspace(const Eigen::MatrixXcd& channels,
                                      std::span<const double> noise_powers, double budget,
                                      const ScaOptions& options) {
  if (channels.cols() != static_cast<Eigen::Index>(noise_powers.size()) || channels.cols() == 0)
    throw DimensionMismatch("one noise power per user required");
  if (!(channels.squaredNorm() > 0.0)) throw ZeroChannel("all user channels are zero");

  Eigen::MatrixXcd gram = channels.adjoint() * channels;
  const double ridge = kGramRidge * gram.trace().real();
  gram.diagonal().array() += ridge;
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ScaBeamformSubspace: Gram factorization failed");
  const Eigen::MatrixXcd lower = llt.matrixL();

  // (L z)_k = h_k^H w for z = L^H eta, so the columns of L^H act as
  // K-dimensional channels with ||z|| = ||w|| up to the ridge.
  const Eigen::MatrixXcd effective = lower.adjoint();
  const Eigen::VectorXcd z0 = WeakestUserMatchedFilter(effective, noise_powers, budget);
  ScaResult reduced = ScaBeamform(effective, noise_powers, budget, z0, options);

  const Eigen::VectorXcd eta =
      lower.adjoint().triangularView<Eigen::Upper>().solve(reduced.beamformer.weights());
  Eigen::VectorXcd w = channels * eta;
  w = ClampToBall(w, std::sqrt(budget));
  return SubspaceScaResult{Beamformer(std::move(w), budget), eta, std::move(reduced.objective_trace),
                           reduced.iterations};
}

void WriteScaTraceCsv(std::ostream& out, std::span<const double> objective_trace) {
  out << "iteration,r,rate\n";
  for (std::size_t q = 0; q < objective_trace.size(); ++q) {
    out << fmt::format("{},{:.10g},{:.10g}\n", q, objective_trace[q], RateFromSnr(objective_trace[q]));
  }
}

}  // namespace macast
