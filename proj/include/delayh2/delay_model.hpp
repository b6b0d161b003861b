/*
 Copyright 2026 The delayh2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef DELAYH2_DELAY_MODEL_HPP
#define DELAYH2_DELAY_MODEL_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "delayh2/linalg.hpp"
#include "delayh2/state_space.hpp"

namespace delayh2 {

using IntMatrix = Eigen::MatrixXi;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Directed communication link; information sent at `from` reaches `to`
/// after `delay` steps.
struct DelayEdge {
  int from = 0;
  int to = 0;
  int delay = 0;
};

/// Communication network among controller subsystems. Node i has
/// computational delay comp_delays[i] >= 1.
struct DelayGraph {
  std::vector<int> comp_delays;
  std::vector<DelayEdge> edges;

  int node_count() const { return static_cast<int>(comp_delays.size()); }
};

/**
 * Entry (i, j) is the number of steps before controller i can use
 * measurement j: the computational delay at i plus the shortest
 * communication delay along a path j -> i.
 */
class DelayMatrix {
 public:
  explicit DelayMatrix(IntMatrix d);

  const IntMatrix& values() const { return d_; }
  int size() const { return static_cast<int>(d_.rows()); }
  int operator()(int i, int j) const { return d_(i, j); }
  int max_delay() const { return d_.maxCoeff(); }

 private:
  IntMatrix d_;
};

DelayMatrix delay_matrix(const DelayGraph& g);

/**
 * FIR sparsity constraint S = Y_1/z + ... + Y_N/z^N + (unconstrained tail).
 *
 * Patterns are stored at block granularity; pattern k-1 is the lag-k
 * pattern. Block (i, j) has block_rows[i] controller outputs and
 * block_cols[j] measurements. Patterns are monotone in the lag.
 */
class ConstraintSpace {
 public:
  ConstraintSpace(std::vector<int> block_rows, std::vector<int> block_cols,
                  std::vector<BoolMatrix> patterns);

  /// The same pattern repeated at lags 1..horizon.
  static ConstraintSpace repeated(std::vector<int> block_rows, std::vector<int> block_cols,
                                  const BoolMatrix& pattern, int horizon);

  int horizon() const { return static_cast<int>(patterns_.size()); }
  const std::vector<int>& block_rows() const { return block_rows_; }
  const std::vector<int>& block_cols() const { return block_cols_; }
  const std::vector<BoolMatrix>& patterns() const { return patterns_; }
  /// Block pattern at lag k, 1 <= k <= horizon.
  const BoolMatrix& pattern(int lag) const { return patterns_.at(lag - 1); }

  int total_rows() const;
  int total_cols() const;
  /// Pattern at lag k expanded to entry granularity.
  BoolMatrix entry_mask(int lag) const;
  /// Whether block (i, j) may be nonzero at lag k; always true past the horizon.
  bool allowed(int lag, int i, int j) const;

  /**
   * First lag at which each block is allowed (horizon + 1 if never within
   * the horizon). Reproduces the delay matrix a graph-derived space was
   * built from.
   */
  DelayMatrix implied_delays() const;

 private:
  std::vector<int> block_rows_;
  std::vector<int> block_cols_;
  std::vector<BoolMatrix> patterns_;
};

ConstraintSpace constraint_space(const DelayMatrix& d, std::vector<int> block_rows,
                                 std::vector<int> block_cols);

/// Violating indices (k, i, j, l), zero based, of d_ki + p_ij + d_jl >= d_kl.
struct QiResult {
  bool holds = true;
  std::optional<std::array<int, 4>> witness;
};

QiResult check_qi(const DelayMatrix& d, const IntMatrix& plant_delays);

inline constexpr double kZeroBlockTol = 1e-9;

/**
 * Smallest lag k <= horizon at which block (i, j) of g's Markov parameters
 * has Frobenius norm above tol_zero; horizon + 1 if there is none.
 * `row_blocks` partitions g's outputs and `col_blocks` its inputs. For G22
 * that means measurement blocks first, then control blocks.
 */
IntMatrix plant_block_delays(const StateSpaceModel& g, const std::vector<int>& row_blocks,
                             const std::vector<int>& col_blocks, std::size_t horizon,
                             double tol_zero = kZeroBlockTol);

/// Offsets of each block in a partition: {0, b0, b0+b1, ...}.
std::vector<int> block_offsets(const std::vector<int>& blocks);

}  // namespace delayh2

#endif  // DELAYH2_DELAY_MODEL_HPP
