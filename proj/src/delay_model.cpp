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

#include "delayh2/delay_model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "delayh2/errors.hpp"

namespace delayh2 {

namespace {

void check_blocks(const std::vector<int>& blocks, const char* what) {
  for (int b : blocks) {
    if (b <= 0) {
      throw DimensionMismatch(std::string(what) + ": block sizes must be positive");
    }
  }
}

}  // namespace

std::vector<int> block_offsets(const std::vector<int>& blocks) {
  std::vector<int> out(blocks.size() + 1, 0);
  std::partial_sum(blocks.begin(), blocks.end(), out.begin() + 1);
  return out;
}

DelayMatrix::DelayMatrix(IntMatrix d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols() || d_.rows() == 0) {
    throw DimensionMismatch("DelayMatrix: must be square and non-empty");
  }
  if (d_.minCoeff() < 1) {
    throw DimensionMismatch("DelayMatrix: entries must be positive");
  }
}

DelayMatrix delay_matrix(const DelayGraph& g) {
  const int n = g.node_count();
  if (n == 0) throw DimensionMismatch("delay_matrix: graph has no nodes");
  for (int c : g.comp_delays) {
    if (c < 1) throw DimensionMismatch("delay_matrix: computational delays must be >= 1");
  }

  constexpr long kInf = std::numeric_limits<int>::max();
  // path(u, v) = shortest communication delay from u to v.
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> path =
      Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, kInf);
  for (int i = 0; i < n; ++i) path(i, i) = 0;
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw DimensionMismatch("delay_matrix: edge endpoint out of range");
    }
    if (e.delay < 0) throw DimensionMismatch("delay_matrix: edge delays must be >= 0");
    if (e.from == e.to) continue;  // self loops carry computational delay only
    path(e.from, e.to) = std::min<long>(path(e.from, e.to), e.delay);
  }
  for (int k = 0; k < n; ++k) {
    for (int u = 0; u < n; ++u) {
      if (path(u, k) == kInf) continue;
      for (int v = 0; v < n; ++v) {
        if (path(k, v) == kInf) continue;
        path(u, v) = std::min(path(u, v), path(u, k) + path(k, v));
      }
    }
  }

  IntMatrix d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (path(j, i) == kInf) {
        throw NotStronglyConnected("delay_matrix: node " + std::to_string(i) +
                                   " is unreachable from node " + std::to_string(j));
      }
      d(i, j) = g.comp_delays[i] + static_cast<int>(path(j, i));
    }
  }
  return DelayMatrix(std::move(d));
}

ConstraintSpace::ConstraintSpace(std::vector<int> block_rows, std::vector<int> block_cols,
                                 std::vector<BoolMatrix> patterns)
    : block_rows_(std::move(block_rows)),
      block_cols_(std::move(block_cols)),
      patterns_(std::move(patterns)) {
  check_blocks(block_rows_, "ConstraintSpace");
  check_blocks(block_cols_, "ConstraintSpace");
  const auto r = static_cast<Eigen::Index>(block_rows_.size());
  const auto c = static_cast<Eigen::Index>(block_cols_.size());
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    if (patterns_[k].rows() != r || patterns_[k].cols() != c) {
      throw DimensionMismatch("ConstraintSpace: pattern at lag " + std::to_string(k + 1) +
                              " does not match the block grid");
    }
    if (k > 0) {
      // allowed at lag k implies allowed at lag k+1
      const bool monotone = (patterns_[k - 1].array() <= patterns_[k].array()).all();
      if (!monotone) {
        throw DimensionMismatch("ConstraintSpace: pattern at lag " + std::to_string(k + 1) +
                                " forbids a block allowed at an earlier lag");
      }
    }
  }
}

ConstraintSpace ConstraintSpace::repeated(std::vector<int> block_rows,
                                          std::vector<int> block_cols, const BoolMatrix& pattern,
                                          int horizon) {
  if (horizon < 0) throw DimensionMismatch("ConstraintSpace: negative horizon");
  return {std::move(block_rows), std::move(block_cols),
          std::vector<BoolMatrix>(static_cast<std::size_t>(horizon), pattern)};
}

int ConstraintSpace::total_rows() const {
  return std::accumulate(block_rows_.begin(), block_rows_.end(), 0);
}

int ConstraintSpace::total_cols() const {
  return std::accumulate(block_cols_.begin(), block_cols_.end(), 0);
}

BoolMatrix ConstraintSpace::entry_mask(int lag) const {
  const auto& p = pattern(lag);
  const auto ro = block_offsets(block_rows_);
  const auto co = block_offsets(block_cols_);
  BoolMatrix mask(total_rows(), total_cols());
  for (std::size_t i = 0; i < block_rows_.size(); ++i) {
    for (std::size_t j = 0; j < block_cols_.size(); ++j) {
      mask.block(ro[i], co[j], block_rows_[i], block_cols_[j])
          .setConstant(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return mask;
}

bool ConstraintSpace::allowed(int lag, int i, int j) const {
  if (lag < 1) return false;
  if (lag > horizon()) return true;
  return pattern(lag)(i, j);
}

DelayMatrix ConstraintSpace::implied_delays() const {
  if (block_rows_.size() != block_cols_.size()) {
    throw DimensionMismatch("implied_delays: block grid is not square");
  }
  const auto nb = static_cast<Eigen::Index>(block_rows_.size());
  IntMatrix d = IntMatrix::Constant(nb, nb, horizon() + 1);
  for (int k = horizon(); k >= 1; --k) {
    for (Eigen::Index i = 0; i < nb; ++i) {
      for (Eigen::Index j = 0; j < nb; ++j) {
        if (pattern(k)(i, j)) d(i, j) = k;
      }
    }
  }
  return DelayMatrix(std::move(d));
}

ConstraintSpace constraint_space(const DelayMatrix& d, std::vector<int> block_rows,
                                 std::vector<int> block_cols) {
  const int nb = d.size();
  if (static_cast<int>(block_rows.size()) != nb || static_cast<int>(block_cols.size()) != nb) {
    throw DimensionMismatch("constraint_space: block lists must match the delay matrix size");
  }
  const int horizon = d.max_delay() - 1;
  std::vector<BoolMatrix> patterns;
  patterns.reserve(static_cast<std::size_t>(horizon));
  for (int k = 1; k <= horizon; ++k) {
    patterns.push_back((d.values().array() <= k).matrix());
  }
  return {std::move(block_rows), std::move(block_cols), std::move(patterns)};
}

QiResult check_qi(const DelayMatrix& d, const IntMatrix& plant_delays) {
  const int n = d.size();
  if (plant_delays.rows() != n || plant_delays.cols() != n) {
    throw DimensionMismatch("check_qi: plant delay matrix must match the delay matrix size");
  }
  if (plant_delays.size() > 0 && plant_delays.minCoeff() < 0) {
    throw DimensionMismatch("check_qi: plant delays must be non-negative");
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
          const long lhs = static_cast<long>(d(k, i)) + plant_delays(i, j) + d(j, l);
          if (lhs < d(k, l)) {
            return {false, std::array<int, 4>{k, i, j, l}};
          }
        }
      }
    }
  }
  return {true, std::nullopt};
}

IntMatrix plant_block_delays(const StateSpaceModel& g, const std::vector<int>& row_blocks,
                             const std::vector<int>& col_blocks, std::size_t horizon,
                             double tol_zero) {
  check_blocks(row_blocks, "plant_block_delays");
  check_blocks(col_blocks, "plant_block_delays");
  const auto ro = block_offsets(row_blocks);
  const auto co = block_offsets(col_blocks);
  if (ro.back() != g.outputs() || co.back() != g.inputs()) {
    throw DimensionMismatch("plant_block_delays: block partition does not match the system");
  }
  const auto ir = impulse_response(g, horizon);
  const auto nr = static_cast<Eigen::Index>(row_blocks.size());
  const auto nc = static_cast<Eigen::Index>(col_blocks.size());
  IntMatrix p = IntMatrix::Constant(nr, nc, static_cast<int>(horizon) + 1);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      for (std::size_t k = 0; k <= horizon; ++k) {
        if (ir[k].block(ro[i], co[j], row_blocks[i], col_blocks[j]).norm() > tol_zero) {
          p(i, j) = static_cast<int>(k);
          break;
        }
      }
    }
  }
  return p;
}

}  // namespace delayh2
