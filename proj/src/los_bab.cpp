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

#include "macast/los_bab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "macast/errors.hpp"

namespace macast {

CouplingMatrix BuildCoupling(const PositionGrid& grid, const Direction& rho1, const Direction& rho2) {
  const int m_total = grid.size();
  const double wavenumber = 2.0 * kPi / grid.wavelength();
  CouplingMatrix c;
  c.g1.resize(m_total);
  c.g2.resize(m_total);
  for (int m = 0; m < m_total; ++m) {
    const Coordinate& p = grid[m];
    c.g1(m) = std::polar(1.0, wavenumber * (p.x * rho1[0] + p.y * rho1[1]));
    c.g2(m) = std::polar(1.0, wavenumber * (p.x * rho2[0] + p.y * rho2[1]));
  }
  c.g = c.g1.conjugate().cwiseProduct(c.g2);
  const Eigen::VectorXd re = c.g.real();
  const Eigen::VectorXd im = c.g.imag();
  c.q = re * re.transpose() + im * im.transpose();
  return c;
}

SelectionVector::SelectionVector(std::vector<int> indices, int grid_size)
    : indices_(std::move(indices)), grid_size_(grid_size) {
  std::sort(indices_.begin(), indices_.end());
  if (indices_.empty() || indices_.front() < 0 || indices_.back() >= grid_size_)
    throw InvalidPlacement("selection index out of range");
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw InvalidPlacement("selection indices must be distinct");
}

Eigen::VectorXd SelectionVector::ToBinary() const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(grid_size_);
  for (int i : indices_) a(i) = 1.0;
  return a;
}

double QuadraticForm(const Eigen::MatrixXd& q, const std::vector<int>& indices) {
  double sum = 0.0;
  for (int i : indices) {
    for (int j : indices) sum += q(i, j);
  }
  return sum;
}

SearchNode SearchNode::Root(int grid_size) {
  SearchNode node;
  node.in_set.assign(static_cast<std::size_t>(grid_size), 0);
  node.qa = Eigen::VectorXd::Zero(grid_size);
  return node;
}

double ObjectiveIncrement(const Eigen::MatrixXd& q, const SearchNode& node, int k) {
  if (k < 0 || k >= q.rows()) throw std::invalid_argument("candidate index out of range");
  if (node.in_set[static_cast<std::size_t>(k)]) throw std::invalid_argument("candidate already selected");
  return node.objective + 2.0 * node.qa(k) + q(k, k);
}

void Extend(const Eigen::MatrixXd& q, SearchNode& node, int k) {
  node.objective = ObjectiveIncrement(q, node, k);
  node.selected.push_back(k);
  node.in_set[static_cast<std::size_t>(k)] = 1;
  node.qa += q.col(k);
}

namespace {

void Retract(const Eigen::MatrixXd& q, SearchNode& node, double previous_objective) {
  const int k = node.selected.back();
  node.selected.pop_back();
  node.in_set[static_cast<std::size_t>(k)] = 0;
  node.qa -= q.col(k);
  node.objective = previous_objective;
}

void CheckCardinality(const Eigen::MatrixXd& q, int cardinality) {
  if (q.rows() != q.cols() || q.rows() == 0) throw std::invalid_argument("Q must be a nonempty square matrix");
  if (cardinality < 1 || cardinality > q.rows()) throw InvalidPlacement("need 1 <= N <= M");
}

}  // namespace

ShiftConstants ComputeShiftConstants(const Eigen::MatrixXd& q) {
  return {q.cwiseAbs().rowwise().sum().maxCoeff(), q.diagonal().maxCoeff()};
}

ShiftConstants ComputeCardinalityShiftConstants(const Eigen::MatrixXd& q, int cardinality) {
  CheckCardinality(q, cardinality);
  const int m_total = static_cast<int>(q.rows());
  const int others = cardinality - 1;
  double x = 0.0;
  std::vector<double> row;
  for (int k = 0; k < m_total; ++k) {
    row.clear();
    for (int j = 0; j < m_total; ++j) {
      if (j != k) row.push_back(std::abs(q(k, j)));
    }
    std::partial_sort(row.begin(), row.begin() + others, row.end(), std::greater<>());
    x = std::max(x, std::accumulate(row.begin(), row.begin() + others, 0.0));
  }
  return {x, q.diagonal().maxCoeff()};
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Eigen::MatrixXd& q, int cardinality, const ShiftConstants& shift,
                 const BabOptions& options)
      : q_(q), cardinality_(cardinality), m_total_(static_cast<int>(q.rows())), shift_(shift),
        options_(options) {}

  void SeedIncumbent(const std::vector<int>& selection) {
    best_ = selection;
    const double n = cardinality_;
    incumbent_ = QuadraticForm(q_, selection) - 2.0 * n * shift_.x - n * shift_.y;
  }

  void Run() {
    SearchNode root = SearchNode::Root(m_total_);
    Visit(root, 0.0, -1);
  }

  const std::vector<int>& best() const { return best_; }
  double incumbent() const { return incumbent_; }
  std::int64_t visited() const { return visited_; }
  std::int64_t pruned() const { return pruned_; }
  std::int64_t unsound() const { return unsound_; }
  double max_step() const { return max_step_; }

 private:
  double ChildScore(const SearchNode& node, double shifted, int k) const {
    return shifted + 2.0 * node.qa(k) - 2.0 * shift_.x + q_(k, k) - shift_.y;
  }

  void Visit(SearchNode& node, double shifted, int last) {
    const int depth = static_cast<int>(node.selected.size());
    const int first_child = last + 1;
    const int last_child = m_total_ - cardinality_ + depth;

    std::vector<std::pair<double, int>> children;
    children.reserve(static_cast<std::size_t>(std::max(0, last_child - first_child + 1)));
    for (int k = first_child; k <= last_child; ++k) {
      const double score = ChildScore(node, shifted, k);
      max_step_ = std::max(max_step_, score - shifted);
      children.emplace_back(score, k);
      ++visited_;
    }

    if (depth == cardinality_ - 1) {
      // Leaf level: only the best child can update the incumbent.
      auto best = children.begin();
      for (auto it = children.begin(); it != children.end(); ++it) {
        if (it->first > best->first) best = it;
      }
      if (best != children.end() && best->first > incumbent_) {
        incumbent_ = best->first;
        best_ = node.selected;
        best_.push_back(best->second);
      }
      return;
    }

    std::stable_sort(children.begin(), children.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const auto& ordered = children;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const auto [score, k] = ordered[i];
      if (!(score > incumbent_)) {
        pruned_ += static_cast<std::int64_t>(ordered.size() - i);
        if (options_.audit_pruning) AuditPruned(node, ordered, i);
        break;
      }
      const double previous = node.objective;
      Extend(q_, node, k);
      Visit(node, score, k);
      Retract(q_, node, previous);
    }
  }

  // Expands every pruned child completely and counts those whose best leaf
  // beats the incumbent at prune time.
  void AuditPruned(SearchNode& node, const std::vector<std::pair<double, int>>& ordered,
                   std::size_t from) {
    const double bound = incumbent_;
    for (std::size_t i = from; i < ordered.size(); ++i) {
      const int k = ordered[i].second;
      const double previous = node.objective;
      Extend(q_, node, k);
      const double best_leaf = BestCompletion(node, ordered[i].first, k);
      Retract(q_, node, previous);
      if (best_leaf > bound + 1e-9 * std::max(1.0, std::abs(bound))) ++unsound_;
    }
  }

  double BestCompletion(SearchNode& node, double shifted, int last) {
    const int depth = static_cast<int>(node.selected.size());
    if (depth == cardinality_) return shifted;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = last + 1; k <= m_total_ - cardinality_ + depth; ++k) {
      const double score = ChildScore(node, shifted, k);
      const double previous = node.objective;
      Extend(q_, node, k);
      best = std::max(best, BestCompletion(node, score, k));
      Retract(q_, node, previous);
    }
    return best;
  }

  const Eigen::MatrixXd& q_;
  int cardinality_;
  int m_total_;
  ShiftConstants shift_;
  BabOptions options_;
  double incumbent_ = -std::numeric_limits<double>::infinity();
  std::vector<int> best_;
  std::int64_t visited_ = 0;
  std::int64_t pruned_ = 0;
  std::int64_t unsound_ = 0;
  double max_step_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

BabResult BabSearch(const Eigen::MatrixXd& q, int cardinality, const BabOptions& options) {
  CheckCardinality(q, cardinality);
  const ShiftConstants shift = options.shift_rule == ShiftRule::kRowSum
                                   ? ComputeShiftConstants(q)
                                   : ComputeCardinalityShiftConstants(q, cardinality);
  BranchAndBound search(q, cardinality, shift, options);
  if (options.greedy_warm_start) search.SeedIncumbent(GreedyQuadratic(q, cardinality).selection.indices());
  search.Run();

  SelectionVector selection(search.best(), static_cast<int>(q.rows()));
  const double objective = QuadraticForm(q, selection.indices());
  const double n = cardinality;
  return BabResult{std::move(selection),
                   objective,
                   objective - 2.0 * n * shift.x - n * shift.y,
                   shift,
                   search.visited(),
                   search.pruned(),
                   search.unsound(),
                   search.max_step()};
}

std::int64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::int64_t factor = n - k + i;
    if (result > std::numeric_limits<std::int64_t>::max() / factor) return std::numeric_limits<std::int64_t>::max();
    result = result * factor / i;
  }
  return result;
}

std::int64_t FullTreeNodeCount(int grid_size, int cardinality) {
  std::int64_t total = 0;
  for (int n = 1; n <= cardinality; ++n) total += Binomial(grid_size - cardinality + n, n);
  return total;
}

SubsetSearchResult ExhaustiveSearch(const Eigen::MatrixXd& q, int cardinality, std::int64_t cap) {
  CheckCardinality(q, cardinality);
  const int m_total = static_cast<int>(q.rows());
  const std::int64_t count = Binomial(m_total, cardinality);
  if (count > cap) {
    throw SearchCapExceeded(fmt::format("C({}, {}) = {} subsets exceeds the cap of {}", m_total, cardinality,
                                        count, cap));
  }

  std::vector<int> current(static_cast<std::size_t>(cardinality));
  std::iota(current.begin(), current.end(), 0);
  std::vector<int> best = current;
  double best_value = -std::numeric_limits<double>::infinity();
  std::int64_t subsets = 0;
  for (;;) {
    ++subsets;
    const double value = QuadraticForm(q, current);
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    int i = cardinality - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == m_total - cardinality + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < cardinality; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j) - 1] + 1;
    }
  }
  return SubsetSearchResult{SelectionVector(std::move(best), m_total), best_value, subsets};
}

SubsetSearchResult GreedyQuadratic(const Eigen::MatrixXd& q, int cardinality) {
  CheckCardinality(q, cardinality);
  const int m_total = static_cast<int>(q.rows());
  SearchNode node = SearchNode::Root(m_total);
  std::int64_t evaluations = 0;
  for (int step = 0; step < cardinality; ++step) {
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < m_total; ++k) {
      if (node.in_set[static_cast<std::size_t>(k)]) continue;
      ++evaluations;
      const double value = ObjectiveIncrement(q, node, k);
      if (value > best_value) {
        best_value = value;
        best = k;
      }
    }
    Extend(q, node, best);
  }
  const double objective = node.objective;
  return SubsetSearchResult{SelectionVector(node.selected, m_total), objective, evaluations};
}

double LosRateFromCorrelation(double correlation, int cardinality, double budget, double kappa,
                              double noise_power) {
  const double n = cardinality;
  if (correlation >= n * (1.0 - 1e-9)) return std::log2(1.0 + budget * n * kappa / noise_power);
  return std::log2(1.0 + budget * kappa * (n + correlation) / (2.0 * noise_power));
}

double LosRate(const SelectionVector& selection, const Eigen::MatrixXd& q, double budget, double kappa,
               double noise_power) {
  if (selection.grid_size() != q.rows()) throw DimensionMismatch("selection and Q differ in size");
  const double correlation = std::sqrt(std::max(0.0, QuadraticForm(q, selection.indices())));
  return LosRateFromCorrelation(correlation, selection.cardinality(), budget, kappa, noise_power);
}

double LosKappa(const Scenario& scenario) {
  if (scenario.users.size() != 2) throw std::invalid_argument("LoS model needs exactly two users");
  const auto& u1 = scenario.users[0];
  const auto& u2 = scenario.users[1];
  if (u1.path_count() != 1 || u2.path_count() != 1) throw std::invalid_argument("LoS model needs single-path users");
  const double k1 = std::norm(u1.paths()[0].gain);
  const double k2 = std::norm(u2.paths()[0].gain);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
  if (!close(k1, k2)) throw std::invalid_argument("LoS model needs equal path gains");
  if (!close(u1.noise_power(), u2.noise_power())) throw std::invalid_argument("LoS model needs equal noise powers");
  return k1;
}

void WriteInstance(std::ostream& out, const Eigen::MatrixXd& q, int cardinality) {
  out << q.rows() << ' ' << cardinality << '\n';
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      out << (j ? " " : "") << fmt::format("{:.17g}", q(i, j));
    }
    out << '\n';
  }
}

std::pair<Eigen::MatrixXd, int> ReadInstance(std::istream& in) {
  int m_total = 0;
  int cardinality = 0;
  if (!(in >> m_total >> cardinality) || m_total < 1)
    throw std::invalid_argument("instance header must be \"M N\"");
  Eigen::MatrixXd q(m_total, m_total);
  for (int i = 0; i < m_total; ++i) {
    for (int j = 0; j < m_total; ++j) {
      if (!(in >> q(i, j))) throw std::invalid_argument("instance matrix truncated");
    }
  }
  CheckCardinality(q, cardinality);
  return {std::move(q), cardinality};
}

}  // namespace macast
