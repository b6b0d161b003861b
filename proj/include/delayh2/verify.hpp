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

#ifndef DELAYH2_VERIFY_HPP
#define DELAYH2_VERIFY_HPP

#include <string>
#include <vector>

#include "delayh2/delay_model.hpp"
#include "delayh2/state_space.hpp"
#include "delayh2/synthesis.hpp"

namespace delayh2 {

/// Lower LFT of the plant and a strictly proper controller, mapping w -> z.
struct ClosedLoop {
  StateSpaceModel model;

  bool internally_stable(double tol = kStabilityTol) const { return model.is_stable(tol); }
};

/// Throws IllPosed when the controller has nonzero feedthrough.
ClosedLoop closed_loop(const GeneralizedPlant& plant, const StateSpaceModel& k);

struct ConformanceViolation {
  int lag = 0;
  int block_row = 0;
  int block_col = 0;
  double magnitude = 0.0;
};

struct ConformanceReport {
  bool conforms = true;
  std::vector<ConformanceViolation> violations;

  std::string summary() const;
};

/**
 * Checks that k lies in the constraint space: zero feedthrough, and every
 * block forbidden at lag 1..N has Frobenius norm below
 * rel_tol * (1 + largest Markov parameter norm over those lags).
 */
ConformanceReport conformance(const StateSpaceModel& k, const ConstraintSpace& cs,
                              double rel_tol = 1e-7);

/**
 * Solves the FIR quadratic program by assembling it explicitly.
 *
 * Decision variable is [vec(V_1); ...; vec(V_N)]. The recursion for J_i is
 * unrolled into dense equality constraints F_i^T vec(J_i) = 0, and the KKT
 * system is solved in one shot with a rank-revealing least-squares solve.
 * Independent of the Riccati recursion in solve_constrained_qp.
 */
QpSolution kkt_oracle(const VectorizedSystem& vsys, const ConstraintSpace& cs,
                      const Matrix& omega, const Matrix& psi);

}  // namespace delayh2

#endif  // DELAYH2_VERIFY_HPP
