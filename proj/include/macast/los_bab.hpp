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

// Line-of-sight two-user placement as a cardinality-constrained binary
// quadratic program
//
//   max a^T Q a   s.t.  a in {0,1}^M,  sum(a) = N,
//
// where a^T Q a = |a_1(T)^H a_2(T)|^2 is the squared steering correlation of
// the two users. Provides the exact best-first branch-and-bound, the
// exhaustive baseline, and the closed-form LoS rate.

#ifndef MACAST_LOS_BAB_HPP_
#define MACAST_LOS_BAB_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "macast/channel.hpp"

namespace macast {

struct CouplingMatrix {
  Eigen::MatrixXd q;   // Re{g} Re{g}^T + Im{g} Im{g}^T
  Eigen::VectorXcd g;  // conj(g1) .* g2
  Eigen::VectorXcd g1;
  Eigen::VectorXcd g2;
};

CouplingMatrix BuildCoupling(const PositionGrid& grid, const Direction& rho1, const Direction& rho2);

// Binary placement vector over M candidates, stored as sorted indices.
class SelectionVector {
 public:
  SelectionVector(std::vector<int> indices, int grid_size);

  int grid_size() const { return grid_size_; }
  int cardinality() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& indices() const { return indices_; }
  Eigen::VectorXd ToBinary() const;
  PlacementSet ToPlacement() const { return PlacementSet(indices_, grid_size_); }

  friend bool operator==(const SelectionVector&, const SelectionVector&) = default;

 private:
  std::vector<int> indices_;
  int grid_size_;
};

double QuadraticForm(const Eigen::MatrixXd& q, const std::vector<int>& indices);

// Partial selection used by the recursive objective update. `qa` caches
// Q a_n so that adding index k costs O(1) for the score and O(M) for the
// cache refresh.
struct SearchNode {
  std::vector<int> selected;
  std::vector<char> in_set;
  Eigen::VectorXd qa;
  double objective = 0.0;  // f_n = a_n^T Q a_n

  static SearchNode Root(int grid_size);
};

// f_n + 2 [Q a_n]_k + Q_kk. Throws std::invalid_argument if k is already
// selected or out of range.
double ObjectiveIncrement(const Eigen::MatrixXd& q, const SearchNode& node, int k);

// Appends k to the node and refreshes the cache.
void Extend(const Eigen::MatrixXd& q, SearchNode& node, int k);

struct ShiftConstants {
  double x = 0.0;  // bound on [Q a_n]_k over reachable states
  double y = 0.0;  // max diagonal entry
};

// X = max row sum of |Q|, Y = max_k Q_kk.
ShiftConstants ComputeShiftConstants(const Eigen::MatrixXd& q);

// Tighter admissible X for cardinality-N searches: a node adding its
// (n+1)-th index has at most N-1 other ones in a_n, so [Q a_n]_k is bounded
// by the sum of the N-1 largest |Q_kj|, j != k.
ShiftConstants ComputeCardinalityShiftConstants(const Eigen::MatrixXd& q, int cardinality);

enum class ShiftRule { kRowSum, kCardinality };

struct BabOptions {
  ShiftRule shift_rule = ShiftRule::kCardinality;
  // Seeds the incumbent with the greedy solution instead of -infinity.
  bool greedy_warm_start = false;
  // Expands every pruned subtree and records whether it could have beaten
  // the incumbent. Test-only; exponential.
  bool audit_pruning = false;
};

struct BabResult {
  SelectionVector selection;
  double objective = 0.0;            // a^T Q a
  double shifted_objective = 0.0;    // objective - 2 N X - N Y
  ShiftConstants shift;
  std::int64_t visited_nodes = 0;    // one per child score evaluation
  std::int64_t pruned_subtrees = 0;
  std::int64_t unsound_prunes = 0;   // audit mode only
  double max_shift_step = 0.0;       // max over explored edges of fbar_{n+1} - fbar_n
};

BabResult BabSearch(const Eigen::MatrixXd& q, int cardinality, const BabOptions& options = {});

struct SubsetSearchResult {
  SelectionVector selection;
  double objective = 0.0;
  std::int64_t evaluations = 0;  // subsets scored (exhaustive) or increments (greedy)
};

inline constexpr std::int64_t kDefaultExhaustiveCap = 1000000;

// Lexicographic enumeration of all C(M, N) subsets; ties keep the first.
// Throws SearchCapExceeded when C(M, N) > cap.
SubsetSearchResult ExhaustiveSearch(const Eigen::MatrixXd& q, int cardinality,
                                  std::int64_t cap = kDefaultExhaustiveCap);

// Greedy selection on the quadratic form (largest increment first, ties to
// the lowest index).
SubsetSearchResult GreedyQuadratic(const Eigen::MatrixXd& q, int cardinality);

std::int64_t Binomial(int n, int k);

// Node count of the increasing-index search tree (root excluded).
std::int64_t FullTreeNodeCount(int grid_size, int cardinality);

// Closed-form two-user LoS rate with equal path loss kappa and noise sigma^2:
//   aligned (|a1^H a2| = N):  log2(1 + P N kappa / sigma^2)
//   otherwise:                log2(1 + P kappa (N + |a1^H a2|) / (2 sigma^2))
double LosRate(const SelectionVector& selection, const Eigen::MatrixXd& q, double budget,
               double kappa, double noise_power);

// Same, from the correlation magnitude directly.
double LosRateFromCorrelation(double correlation, int cardinality, double budget, double kappa,
                              double noise_power);

// Checks that a scenario is two-user, single-path, equal-gain, equal-noise
// and returns kappa; throws std::invalid_argument otherwise.
double LosKappa(const Scenario& scenario);

// Plain-text instance: first line "M N", then M rows of M values.
void WriteInstance(std::ostream& out, const Eigen::MatrixXd& q, int cardinality);
std::pair<Eigen::MatrixXd, int> ReadInstance(std::istream& in);

}  // namespace macast

#endif  // MACAST_LOS_BAB_HPP_
