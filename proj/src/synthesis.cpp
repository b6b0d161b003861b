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

#include "delayh2/synthesis.hpp"

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "delayh2/errors.hpp"

namespace delayh2 {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

// PBH test on every eigenvalue outside the open unit disc.
bool pbh_stabilizable(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  if (n == 0) return true;
  Eigen::EigenSolver<Matrix> es(a, false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> lambda = es.eigenvalues()(k);
    if (std::abs(lambda) < 1.0 - kStabilityTol) continue;
    ComplexMatrix pencil(n, n + b.cols());
    pencil << a.cast<std::complex<double>>() - lambda * ComplexMatrix::Identity(n, n),
        b.cast<std::complex<double>>();
    Eigen::JacobiSVD<ComplexMatrix> svd(pencil);
    const double smin = svd.singularValues()(n - 1);
    if (smin <= 1e-9 * (1.0 + svd.singularValues()(0))) return false;
  }
  return true;
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionMismatch(std::string("GeneralizedPlant: ") + name + " must be " +
                            std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

int sum(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

}  // namespace

void GeneralizedPlant::validate(double tol) const {
  const auto n = a.rows();
  require_shape(a, n, n, "A");
  require_shape(b1, n, b1.cols(), "B1");
  require_shape(b2, n, b2.cols(), "B2");
  require_shape(c1, c1.rows(), n, "C1");
  require_shape(c2, c2.rows(), n, "C2");
  require_shape(d12, performance(), controls(), "D12");
  require_shape(d21, measurements(), disturbances(), "D21");
  if (sum(block_rows) != controls() || sum(block_cols) != measurements()) {
    throw DimensionMismatch("GeneralizedPlant: block sizes must sum to the control and "
                            "measurement dimensions");
  }
  for (int b : block_rows) {
    if (b <= 0) throw DimensionMismatch("GeneralizedPlant: block sizes must be positive");
  }
  for (int b : block_cols) {
    if (b <= 0) throw DimensionMismatch("GeneralizedPlant: block sizes must be positive");
  }

  const auto m2 = controls();
  const auto q2 = measurements();
  if ((d12.transpose() * c1).norm() > tol ||
      (d12.transpose() * d12 - Matrix::Identity(m2, m2)).norm() > tol) {
    throw AssumptionViolated("GeneralizedPlant: D12^T [C1 D12] must equal [0 I]");
  }
  if ((d21 * b1.transpose()).norm() > tol ||
      (d21 * d21.transpose() - Matrix::Identity(q2, q2)).norm() > tol) {
    throw AssumptionViolated("GeneralizedPlant: D21 [B1^T D21^T] must equal [0 I]");
  }
  if (!pbh_stabilizable(a, b2)) {
    throw AssumptionViolated("GeneralizedPlant: (A, B2) is not stabilizable");
  }
  if (!pbh_stabilizable(a.transpose(), c2.transpose())) {
    throw AssumptionViolated("GeneralizedPlant: (A, C2) is not detectable");
  }
}

StateSpaceModel GeneralizedPlant::g11() const {
  return {a, b1, c1, Matrix::Zero(performance(), disturbances())};
}

StateSpaceModel GeneralizedPlant::g22() const {
  return {a, b2, c2, Matrix::Zero(measurements(), controls())};
}

RiccatiGains riccati_gains(const GeneralizedPlant& plant, const DareOptions& options) {
  const auto& a = plant.a;
  RiccatiGains g;
  g.x_ctrl = dare_solve(a, plant.b2, plant.c1.transpose() * plant.c1, options);
  g.y_filt = dare_solve(a.transpose(), plant.c2.transpose(), plant.b1 * plant.b1.transpose(),
                        options);
  const auto m2 = plant.controls();
  const auto q2 = plant.measurements();
  g.omega = symmetrize(Matrix::Identity(m2, m2) + plant.b2.transpose() * g.x_ctrl * plant.b2);
  g.psi = symmetrize(Matrix::Identity(q2, q2) + plant.c2 * g.y_filt * plant.c2.transpose());
  g.k_gain = -g.omega.ldlt().solve(plant.b2.transpose() * g.x_ctrl * a);
  // L = -A Y C2^T Psi^{-1}, Psi symmetric
  g.l_gain = -g.psi.ldlt().solve(plant.c2 * g.y_filt * a.transpose()).transpose();
  return g;
}

double bezout_residual(const CoprimeFactors& f, std::size_t max_lag) {
  const auto prod = impulse_response(multiply(f.left, f.right), max_lag);
  const auto dim = prod[0].rows();
  double worst = (prod[0] - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  for (std::size_t k = 1; k <= max_lag; ++k) {
    worst = std::max(worst, prod[k].cwiseAbs().maxCoeff());
  }
  return worst;
}

CoprimeFactors coprime_factorization(const GeneralizedPlant& plant, const RiccatiGains& gains) {
  const auto n = plant.states();
  const auto m2 = plant.controls();
  const auto q2 = plant.measurements();
  const Matrix& k = gains.k_gain;
  const Matrix& l = gains.l_gain;
  const Matrix a_k = plant.a + plant.b2 * k;
  const Matrix a_l = plant.a + l * plant.c2;
  const Matrix i_m = Matrix::Identity(m2, m2);
  const Matrix i_q = Matrix::Identity(q2, q2);

  CoprimeFactors f;
  f.m_hat = {a_k, plant.b2, k, i_m};
  f.y_hat = {a_k, -l, k, Matrix::Zero(m2, q2)};
  f.n_hat = {a_k, plant.b2, plant.c2, Matrix::Zero(q2, m2)};
  f.x_hat = {a_k, -l, plant.c2, i_q};

  f.x_tilde = {a_l, plant.b2, -k, i_m};
  f.y_tilde = {a_l, -l, k, Matrix::Zero(m2, q2)};
  f.n_tilde = {a_l, plant.b2, plant.c2, Matrix::Zero(q2, m2)};
  f.m_tilde = {a_l, -l, -plant.c2, i_q};

  Matrix b(n, m2 + q2);
  b << plant.b2, -l;
  Matrix c_right(m2 + q2, n);
  c_right << k, plant.c2;
  Matrix c_left(m2 + q2, n);
  c_left << -k, -plant.c2;
  const Matrix eye = Matrix::Identity(m2 + q2, m2 + q2);
  f.right = {a_k, b, c_right, eye};
  f.left = {a_l, b, c_left, eye};

  const double resid = bezout_residual(f, static_cast<std::size_t>(2 * n + 2));
  if (resid > 1e-6) {
    throw BezoutCheckFailed("coprime_factorization: Bezout residual " + std::to_string(resid));
  }
  return f;
}

ModelMatching model_matching_matrices(const GeneralizedPlant& plant, const RiccatiGains& gains) {
  const auto n = plant.states();
  const Matrix& k = gains.k_gain;
  const Matrix& l = gains.l_gain;
  const Matrix a_k = plant.a + plant.b2 * k;
  const Matrix a_l = plant.a + l * plant.c2;
  const Matrix c_k = plant.c1 + plant.d12 * k;
  const Matrix b_l = plant.b1 + l * plant.d21;

  Matrix a11 = Matrix::Zero(2 * n, 2 * n);
  a11.topLeftCorner(n, n) = a_k;
  a11.topRightCorner(n, n) = -plant.b2 * k;
  a11.bottomRightCorner(n, n) = a_l;
  Matrix b11(2 * n, plant.disturbances());
  b11 << plant.b1, b_l;
  Matrix c11(plant.performance(), 2 * n);
  c11 << c_k, -plant.d12 * k;

  ModelMatching mm;
  mm.p11 = {a11, b11, c11, Matrix::Zero(plant.performance(), plant.disturbances())};
  mm.p12 = {a_k, plant.b2, -c_k, -plant.d12};
  mm.p21 = {a_l, b_l, plant.c2, plant.d21};
  return mm;
}

VectorizedSystem vectorized_system(const GeneralizedPlant& plant, const RiccatiGains& gains) {
  const auto n = plant.states();
  const auto p2 = plant.controls();
  const auto q2 = plant.measurements();
  const Matrix& k = gains.k_gain;
  const Matrix& l = gains.l_gain;
  const Matrix a_k = plant.a + plant.b2 * k;
  const Matrix a_l = plant.a + l * plant.c2;
  const Matrix i_p = Matrix::Identity(p2, p2);
  const Matrix i_q = Matrix::Identity(q2, q2);

  const auto nq = n * q2;
  const auto np = n * p2;
  VectorizedSystem v;
  v.controls = p2;
  v.measurements = q2;
  v.a_v = Matrix::Zero(nq + np, nq + np);
  v.a_v.topLeftCorner(nq, nq) = kron(i_q, a_k);
  v.a_v.bottomLeftCorner(np, nq) = kron(plant.c2.transpose(), k);
  v.a_v.bottomRightCorner(np, np) = kron(a_l.transpose(), i_p);
  v.b_v = Matrix(nq + np, p2 * q2);
  v.b_v << kron(i_q, plant.b2), kron(plant.c2.transpose(), i_p);
  v.c_v = Matrix(p2 * q2, nq + np);
  v.c_v << kron(i_q, k), kron(l.transpose(), i_p);
  v.d_v = Matrix::Identity(p2 * q2, p2 * q2);
  v.x1 = Vector::Zero(nq + np);
  v.x1.head(nq) = vec(l);
  return v;
}

BasisMatrices basis_matrices(const BoolMatrix& pattern, const std::vector<int>& block_rows,
                             const std::vector<int>& block_cols) {
  if (pattern.rows() != static_cast<Eigen::Index>(block_rows.size()) ||
      pattern.cols() != static_cast<Eigen::Index>(block_cols.size())) {
    throw DimensionMismatch("basis_matrices: pattern does not match the block grid");
  }
  const auto ro = block_offsets(block_rows);
  const auto co = block_offsets(block_cols);
  const int rows = ro.back();
  const int cols = co.back();

  // Walk entries in column-stacked order.
  std::vector<Eigen::Index> allowed;
  std::vector<Eigen::Index> forbidden;
  std::size_t jb = 0;
  for (int c = 0; c < cols; ++c) {
    while (c >= co[jb + 1]) ++jb;
    std::size_t ib = 0;
    for (int r = 0; r < rows; ++r) {
      while (r >= ro[ib + 1]) ++ib;
      const Eigen::Index idx = r + static_cast<Eigen::Index>(c) * rows;
      if (pattern(static_cast<Eigen::Index>(ib), static_cast<Eigen::Index>(jb))) {
        allowed.push_back(idx);
      } else {
        forbidden.push_back(idx);
      }
    }
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(rows) * cols;
  BasisMatrices out{Matrix::Zero(dim, static_cast<Eigen::Index>(allowed.size())),
                    Matrix::Zero(dim, static_cast<Eigen::Index>(forbidden.size()))};
  for (std::size_t k = 0; k < allowed.size(); ++k) out.e(allowed[k], k) = 1.0;
  for (std::size_t k = 0; k < forbidden.size(); ++k) out.f(forbidden[k], k) = 1.0;
  return out;
}

QpSolution solve_constrained_qp(const VectorizedSystem& vsys, const ConstraintSpace& cs,
                                const Matrix& omega, const Matrix& psi) {
  const int horizon = cs.horizon();
  QpSolution sol;
  if (horizon == 0) return sol;
  if (cs.total_rows() != vsys.controls || cs.total_cols() != vsys.measurements) {
    throw DimensionMismatch("solve_constrained_qp: constraint space does not match the plant");
  }

  const Matrix r_half = kron(sqrtm_psd(psi), sqrtm_psd(omega));
  const auto nx = vsys.a_v.rows();

  struct Stage {
    Matrix e, ffc, a, b, gain;
  };
  std::vector<Stage> stages(static_cast<std::size_t>(horizon));
  for (int i = 1; i <= horizon; ++i) {
    auto& s = stages[static_cast<std::size_t>(i - 1)];
    const auto basis = basis_matrices(cs.pattern(i), cs.block_rows(), cs.block_cols());
    s.e = basis.e;
    s.ffc = basis.f * (basis.f.transpose() * vsys.c_v);
    s.a = vsys.a_v - vsys.b_v * s.ffc;
    s.b = vsys.b_v * s.e;
  }

  // Backward recursion with Q_i = C_i^T C_i, R_i = D_i^T D_i, S_i = C_i^T D_i.
  Matrix x_next = Matrix::Zero(nx, nx);
  for (int i = horizon; i >= 1; --i) {
    auto& s = stages[static_cast<std::size_t>(i - 1)];
    const Matrix c_i = -r_half * s.ffc;
    const Matrix d_i = r_half * s.e;
    const Matrix coupling = s.b.transpose() * x_next * s.a + d_i.transpose() * c_i;
    if (s.e.cols() > 0) {
      const Matrix gram = symmetrize(d_i.transpose() * d_i + s.b.transpose() * x_next * s.b);
      Eigen::LLT<Matrix> llt(gram);
      if (llt.info() != Eigen::Success) {
        throw SolverFailure("solve_constrained_qp: stage " + std::to_string(i) +
                            " weighting is not positive definite");
      }
      s.gain = -llt.solve(coupling);
    } else {
      s.gain = Matrix::Zero(0, nx);
    }
    x_next = symmetrize(c_i.transpose() * c_i + s.a.transpose() * x_next * s.a +
                        coupling.transpose() * s.gain);
  }
  sol.cost = vsys.x1.dot(x_next * vsys.x1);

  Vector x = vsys.x1;
  sol.v_star.blocks.reserve(static_cast<std::size_t>(horizon));
  for (const auto& s : stages) {
    const Vector u = s.gain * x;
    const Vector v = s.e * u - s.ffc * x;
    sol.v_star.blocks.push_back(unvec(v, vsys.controls, vsys.measurements));
    x = s.a * x + s.b * u;
  }
  return sol;
}

StateSpaceModel realize_controller(const FirMatrix& v, const RiccatiGains& gains,
                                   const GeneralizedPlant& plant) {
  const auto n = plant.states();
  const auto p2 = plant.controls();
  const auto q2 = plant.measurements();
  const auto horizon = static_cast<Eigen::Index>(v.horizon());
  const auto nv = q2 * horizon;

  // Shift register: state k holds y delayed by k+1 steps.
  Matrix a_v = Matrix::Zero(nv, nv);
  for (Eigen::Index k = 1; k < horizon; ++k) {
    a_v.block(k * q2, (k - 1) * q2, q2, q2).setIdentity();
  }
  Matrix b_v = Matrix::Zero(nv, q2);
  if (horizon > 0) b_v.topRows(q2).setIdentity();
  Matrix c_v(p2, nv);
  for (Eigen::Index k = 0; k < horizon; ++k) {
    const auto& blk = v.blocks[static_cast<std::size_t>(k)];
    if (blk.rows() != p2 || blk.cols() != q2) {
      throw DimensionMismatch("realize_controller: FIR coefficient has the wrong shape");
    }
    c_v.middleCols(k * q2, q2) = blk;
  }

  Matrix a = Matrix::Zero(n + nv, n + nv);
  a.topLeftCorner(n, n) = plant.a + plant.b2 * gains.k_gain + gains.l_gain * plant.c2;
  a.topRightCorner(n, nv) = plant.b2 * c_v;
  a.bottomLeftCorner(nv, n) = b_v * plant.c2;
  a.bottomRightCorner(nv, nv) = a_v;
  Matrix b(n + nv, q2);
  b << -gains.l_gain, -b_v;
  Matrix c(p2, n + nv);
  c << gains.k_gain, c_v;
  return {a, b, c, Matrix::Zero(p2, q2)};
}

IntMatrix plant_delays_for_qi(const GeneralizedPlant& plant, const ConstraintSpace& cs,
                              double tol_zero) {
  const auto d = cs.implied_delays();
  return plant_block_delays(plant.g22(), cs.block_cols(), cs.block_rows(),
                            static_cast<std::size_t>(d.max_delay()), tol_zero);
}

SynthesisResult synthesize(const GeneralizedPlant& plant, const ConstraintSpace& cs,
                           const SynthesisOptions& options) {
  plant.validate(options.normalization_tol);
  if (cs.total_rows() != plant.controls() || cs.total_cols() != plant.measurements()) {
    throw DimensionMismatch("synthesize: constraint space does not match the plant dimensions");
  }
  if (options.check_qi) {
    const auto qi = check_qi(cs.implied_delays(), plant_delays_for_qi(plant, cs));
    if (!qi.holds) {
      const auto& w = *qi.witness;
      throw QIViolation("synthesize: constraint is not quadratically invariant (k=" +
                        std::to_string(w[0]) + ", i=" + std::to_string(w[1]) +
                        ", j=" + std::to_string(w[2]) + ", l=" + std::to_string(w[3]) + ")");
    }
  }

  const auto gains = riccati_gains(plant, options.dare);
  coprime_factorization(plant, gains);  // Bezout guard
  const auto mm = model_matching_matrices(plant, gains);

  SynthesisResult result;
  result.p11_norm_sq = h2_norm_sq(mm.p11);
  if (cs.horizon() > 0) {
    auto qp = solve_constrained_qp(vectorized_system(plant, gains), cs, gains.omega, gains.psi);
    result.v_star = std::move(qp.v_star);
    result.qp_cost = qp.cost;
  }
  result.total_norm_sq = result.p11_norm_sq + result.qp_cost;
  result.controller = realize_controller(result.v_star, gains, plant);
  return result;
}

}  // namespace delayh2
