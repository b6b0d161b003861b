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

#ifndef DELAYH2_STATE_SPACE_HPP
#define DELAYH2_STATE_SPACE_HPP

#include <cstddef>
#include <vector>

#include "delayh2/linalg.hpp"

namespace delayh2 {

/// Stability margin on the spectral radius shared by every stability test.
inline constexpr double kStabilityTol = 1e-9;

/**
 * @brief Discrete-time realization G(z) = C (zI - A)^{-1} B + D.
 *
 * Immutable value type. The state dimension may be zero, in which case the
 * model is the static gain D.
 */
class StateSpaceModel {
 public:
  StateSpaceModel() = default;
  StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d);

  /// Static gain with no states.
  static StateSpaceModel gain(const Matrix& d);
  static StateSpaceModel zero(Eigen::Index outputs, Eigen::Index inputs);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }

  Eigen::Index states() const { return a_.rows(); }
  Eigen::Index inputs() const { return b_.cols(); }
  Eigen::Index outputs() const { return c_.rows(); }

  bool is_stable(double tol = kStabilityTol) const;

  /// Realization of G(z)^T.
  StateSpaceModel transpose() const;

 private:
  Matrix a_ = Matrix(0, 0);
  Matrix b_ = Matrix(0, 0);
  Matrix c_ = Matrix(0, 0);
  Matrix d_ = Matrix(0, 0);
};

/// Markov parameters G_0 = D, G_k = C A^{k-1} B for k = 1..horizon.
struct ImpulseResponse {
  std::vector<Matrix> terms;

  std::size_t horizon() const { return terms.empty() ? 0 : terms.size() - 1; }
  const Matrix& operator[](std::size_t k) const { return terms[k]; }
};

ImpulseResponse impulse_response(const StateSpaceModel& g, std::size_t horizon);

/// left * right, i.e. right is applied first.
StateSpaceModel multiply(const StateSpaceModel& left, const StateSpaceModel& right);
StateSpaceModel add(const StateSpaceModel& g, const StateSpaceModel& h);
StateSpaceModel negate(const StateSpaceModel& g);
/// System inverse; requires a square invertible feedthrough.
StateSpaceModel inverse(const StateSpaceModel& g);
/// [g h] sharing the output.
StateSpaceModel hstack(const StateSpaceModel& g, const StateSpaceModel& h);
/// [g; h] sharing the input.
StateSpaceModel vstack(const StateSpaceModel& g, const StateSpaceModel& h);

/**
 * Solves Gamma = A_g^T Gamma A_h + C_g^T C_h by vectorization.
 *
 * The dense system (I - A_h^T (x) A_g^T) vec(Gamma) = vec(C_g^T C_h) is
 * solved directly, which is O((n_g n_h)^3).
 */
Matrix dlyap_cross(const Matrix& a_g, const Matrix& c_g, const Matrix& a_h,
                   const Matrix& c_h);

/// Squared H2 norm via the observability Gramian. Throws UnstableSystem.
double h2_norm_sq(const StateSpaceModel& g);

/**
 * Splits G~H into a causal part and a strictly anticausal part.
 *
 * G~H = causal + anticausal~, where anticausal is itself returned as a
 * causal model with zero feedthrough.
 */
struct ConjugateProduct {
  StateSpaceModel causal;
  StateSpaceModel anticausal;
};

ConjugateProduct conjugate_product(const StateSpaceModel& g, const StateSpaceModel& h);

struct DareOptions {
  std::size_t max_iter = 10000;
  double tol = 1e-12;
  /// Step size of the fixed-point update; 1 is the plain Riccati iteration.
  double damping = 1.0;
};

/**
 * Stabilizing solution of X = Q + A^T X A - A^T X B (I + B^T X B)^{-1} B^T X A.
 *
 * Fixed-point iteration started from X = Q. Throws SolverFailure on
 * non-convergence and AssumptionViolated when A + BK is not stable.
 */
Matrix dare_solve(const Matrix& a, const Matrix& b, const Matrix& q,
                  const DareOptions& options = {});

/// Right-hand side of the Riccati map above evaluated at x.
Matrix riccati_map(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& x);

}  // namespace delayh2

#endif  // DELAYH2_STATE_SPACE_HPP
