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

#ifndef DELAYH2_SYNTHESIS_HPP
#define DELAYH2_SYNTHESIS_HPP

#include <vector>

#include "delayh2/delay_model.hpp"
#include "delayh2/linalg.hpp"
#include "delayh2/state_space.hpp"

namespace delayh2 {

/**
 * @brief Four-block plant
 *
 *   x+ = A x + B1 w + B2 u
 *   z  = C1 x        + D12 u
 *   y  = C2 x + D21 w
 *
 * with the normalization D12^T [C1 D12] = [0 I] and D21 [B1^T D21^T] = [0 I].
 * block_rows partitions u (controller outputs), block_cols partitions y.
 */
struct GeneralizedPlant {
  Matrix a, b1, b2, c1, c2, d12, d21;
  std::vector<int> block_rows;
  std::vector<int> block_cols;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index disturbances() const { return b1.cols(); }
  Eigen::Index controls() const { return b2.cols(); }
  Eigen::Index performance() const { return c1.rows(); }
  Eigen::Index measurements() const { return c2.rows(); }

  /// Throws DimensionMismatch or AssumptionViolated.
  void validate(double tol = 1e-9) const;

  StateSpaceModel g11() const;
  StateSpaceModel g22() const;
};

struct RiccatiGains {
  Matrix x_ctrl;  ///< control Riccati solution X
  Matrix y_filt;  ///< filtering Riccati solution Y
  Matrix k_gain;  ///< K = -Omega^{-1} B2^T X A
  Matrix l_gain;  ///< L = -A Y C2^T Psi^{-1}
  Matrix omega;   ///< I + B2^T X B2
  Matrix psi;     ///< I + C2 Y C2^T
};

RiccatiGains riccati_gains(const GeneralizedPlant& plant, const DareOptions& options = {});

/// LQR/Kalman based doubly coprime factorization of G22.
struct CoprimeFactors {
  StateSpaceModel m_hat, n_hat, x_hat, y_hat;
  StateSpaceModel m_tilde, n_tilde, x_tilde, y_tilde;
  /// [M^ Y^; N^ X^]
  StateSpaceModel right;
  /// [X~ -Y~; -N~ M~]
  StateSpaceModel left;
};

/// Largest deviation of left*right from the identity over lags 0..max_lag.
double bezout_residual(const CoprimeFactors& f, std::size_t max_lag);

/// Throws BezoutCheckFailed when the residual over lags 0..2n+2 exceeds 1e-6.
CoprimeFactors coprime_factorization(const GeneralizedPlant& plant, const RiccatiGains& gains);

struct ModelMatching {
  StateSpaceModel p11, p12, p21;
};

ModelMatching model_matching_matrices(const GeneralizedPlant& plant, const RiccatiGains& gains);

/**
 * State-space recursion generating J_i = coefficients of (-Y^ + M^ V) M~:
 *
 *   x_{i+1} = a_v x_i + b_v vec(V_i),  vec(J_i) = c_v x_i + vec(V_i),
 *
 * started from x1 = [vec(L); 0].
 */
struct VectorizedSystem {
  Matrix a_v, b_v, c_v, d_v;
  Vector x1;
  Eigen::Index controls = 0;      ///< rows of V
  Eigen::Index measurements = 0;  ///< columns of V
};

VectorizedSystem vectorized_system(const GeneralizedPlant& plant, const RiccatiGains& gains);

/// Strictly proper FIR matrix V_1/z + ... + V_N/z^N. blocks[i] holds V_{i+1}.
struct FirMatrix {
  std::vector<Matrix> blocks;

  int horizon() const { return static_cast<int>(blocks.size()); }
};

/// 0/1 selection matrices whose columns span vec(Y) and vec(Y^perp).
struct BasisMatrices {
  Matrix e;
  Matrix f;
};

BasisMatrices basis_matrices(const BoolMatrix& pattern, const std::vector<int>& block_rows,
                             const std::vector<int>& block_cols);

struct QpSolution {
  FirMatrix v_star;
  double cost = 0.0;
};

/**
 * Minimizes sum_i Tr(Omega V_i Psi V_i^T) subject to J_i in Y_i by a
 * backward time-varying Riccati recursion over i = N..1.
 */
QpSolution solve_constrained_qp(const VectorizedSystem& vsys, const ConstraintSpace& cs,
                                const Matrix& omega, const Matrix& psi);

/// Controller (Y^ - M^ V)(X^ - N^ V)^{-1}, of order n + q2 N, zero feedthrough.
StateSpaceModel realize_controller(const FirMatrix& v, const RiccatiGains& gains,
                                   const GeneralizedPlant& plant);

struct SynthesisResult {
  StateSpaceModel controller;
  FirMatrix v_star;
  double p11_norm_sq = 0.0;
  double qp_cost = 0.0;
  double total_norm_sq = 0.0;
};

struct SynthesisOptions {
  /// Run check_qi on the implied delays and throw QIViolation on failure.
  bool check_qi = false;
  double normalization_tol = 1e-9;
  DareOptions dare;
};

SynthesisResult synthesize(const GeneralizedPlant& plant, const ConstraintSpace& cs,
                           const SynthesisOptions& options = {});

/// Plant block delays of G22 for the QI test, measurement blocks by control blocks.
IntMatrix plant_delays_for_qi(const GeneralizedPlant& plant, const ConstraintSpace& cs,
                              double tol_zero = kZeroBlockTol);

}  // namespace delayh2

#endif  // DELAYH2_SYNTHESIS_HPP
