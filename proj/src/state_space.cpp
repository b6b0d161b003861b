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

#include "delayh2/state_space.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "delayh2/errors.hpp"

namespace delayh2 {

namespace {

Matrix block_diag(const Matrix& x, const Matrix& y) {
  Matrix out = Matrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
  out.topLeftCorner(x.rows(), x.cols()) = x;
  out.bottomRightCorner(y.rows(), y.cols()) = y;
  return out;
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

StateSpaceModel::StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const auto n = a_.rows();
  if (a_.cols() != n || b_.rows() != n || c_.cols() != n || d_.rows() != c_.rows() ||
      d_.cols() != b_.cols()) {
    throw DimensionMismatch("StateSpaceModel: incompatible shapes A " + shape(a_) + ", B " +
                            shape(b_) + ", C " + shape(c_) + ", D " + shape(d_));
  }
}

StateSpaceModel StateSpaceModel::gain(const Matrix& d) {
  return {Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d};
}

StateSpaceModel StateSpaceModel::zero(Eigen::Index outputs, Eigen::Index inputs) {
  return gain(Matrix::Zero(outputs, inputs));
}

bool StateSpaceModel::is_stable(double tol) const {
  return spectral_radius(a_) < 1.0 - tol;
}

StateSpaceModel StateSpaceModel::transpose() const {
  return {a_.transpose(), c_.transpose(), b_.transpose(), d_.transpose()};
}

ImpulseResponse impulse_response(const StateSpaceModel& g, std::size_t horizon) {
  ImpulseResponse out;
  out.terms.reserve(horizon + 1);
  out.terms.push_back(g.d());
  Matrix ak_b = g.b();  // A^{k-1} B
  for (std::size_t k = 1; k <= horizon; ++k) {
    out.terms.push_back(g.c() * ak_b);
    ak_b = g.a() * ak_b;
  }
  return out;
}

StateSpaceModel multiply(const StateSpaceModel& left, const StateSpaceModel& right) {
  if (left.inputs() != right.outputs()) {
    throw DimensionMismatch("multiply: inner dimensions differ");
  }
  const auto n2 = right.states();
  const auto n1 = left.states();
  Matrix a = Matrix::Zero(n2 + n1, n2 + n1);
  a.topLeftCorner(n2, n2) = right.a();
  a.bottomLeftCorner(n1, n2) = left.b() * right.c();
  a.bottomRightCorner(n1, n1) = left.a();
  Matrix b(n2 + n1, right.inputs());
  b << right.b(), left.b() * right.d();
  Matrix c(left.outputs(), n2 + n1);
  c << left.d() * right.c(), left.c();
  return {a, b, c, left.d() * right.d()};
}

StateSpaceModel add(const StateSpaceModel& g, const StateSpaceModel& h) {
  if (g.inputs() != h.inputs() || g.outputs() != h.outputs()) {
    throw DimensionMismatch("add: operand shapes differ");
  }
  Matrix b(g.states() + h.states(), g.inputs());
  b << g.b(), h.b();
  Matrix c(g.outputs(), g.states() + h.states());
  c << g.c(), h.c();
  return {block_diag(g.a(), h.a()), b, c, g.d() + h.d()};
}

StateSpaceModel negate(const StateSpaceModel& g) {
  return {g.a(), g.b(), -g.c(), -g.d()};
}

StateSpaceModel inverse(const StateSpaceModel& g) {
  if (g.inputs() != g.outputs()) {
    throw DimensionMismatch("inverse: system is not square");
  }
  Eigen::FullPivLU<Matrix> lu(g.d());
  if (!lu.isInvertible()) {
    throw SolverFailure("inverse: feedthrough is singular");
  }
  const Matrix d_inv = lu.inverse();
  return {g.a() - g.b() * d_inv * g.c(), g.b() * d_inv, -d_inv * g.c(), d_inv};
}

StateSpaceModel hstack(const StateSpaceModel& g, const StateSpaceModel& h) {
  if (g.outputs() != h.outputs()) {
    throw DimensionMismatch("hstack: output dimensions differ");
  }
  Matrix c(g.outputs(), g.states() + h.states());
  c << g.c(), h.c();
  Matrix d(g.outputs(), g.inputs() + h.inputs());
  d << g.d(), h.d();
  return {block_diag(g.a(), h.a()), block_diag(g.b(), h.b()), c, d};
}

StateSpaceModel vstack(const StateSpaceModel& g, const StateSpaceModel& h) {
  if (g.inputs() != h.inputs()) {
    throw DimensionMismatch("vstack: input dimensions differ");
  }
  Matrix b(g.states() + h.states(), g.inputs());
  b << g.b(), h.b();
  Matrix d(g.outputs() + h.outputs(), g.inputs());
  d << g.d(), h.d();
  return {block_diag(g.a(), h.a()), b, block_diag(g.c(), h.c()), d};
}

Matrix dlyap_cross(const Matrix& a_g, const Matrix& c_g, const Matrix& a_h,
                   const Matrix& c_h) {
  if (a_g.rows() != a_g.cols() || a_h.rows() != a_h.cols() || c_g.cols() != a_g.rows() ||
      c_h.cols() != a_h.rows() || c_g.rows() != c_h.rows()) {
    throw DimensionMismatch("dlyap_cross: incompatible shapes");
  }
  if (spectral_radius(a_g) >= 1.0 - kStabilityTol || spectral_radius(a_h) >= 1.0 - kStabilityTol) {
    throw UnstableSystem("dlyap_cross: state matrix is not Schur stable");
  }
  const auto ng = a_g.rows();
  const auto nh = a_h.rows();
  const Matrix rhs = c_g.transpose() * c_h;
  if (ng == 0 || nh == 0) return Matrix::Zero(ng, nh);

  const Matrix lhs =
      Matrix::Identity(ng * nh, ng * nh) - kron(a_h.transpose(), a_g.transpose());
  Eigen::PartialPivLU<Matrix> lu(lhs);
  const Vector sol = lu.solve(vec(rhs));
  const double resid = (lhs * sol - vec(rhs)).norm();
  if (!sol.allFinite() || resid > 1e-8 * (1.0 + vec(rhs).norm())) {
    throw SolverFailure("dlyap_cross: linear solve is singular");
  }
  return unvec(sol, ng, nh);
}

double h2_norm_sq(const StateSpaceModel& g) {
  if (!g.is_stable()) {
    throw UnstableSystem("h2_norm_sq: system is not stable");
  }
  const Matrix wo = dlyap_cross(g.a(), g.c(), g.a(), g.c());
  return (g.d().transpose() * g.d()).trace() + (g.b().transpose() * wo * g.b()).trace();
}

ConjugateProduct conjugate_product(const StateSpaceModel& g, const StateSpaceModel& h) {
  if (g.outputs() != h.outputs()) {
    throw DimensionMismatch("conjugate_product: G and H need equal output dimensions");
  }
  const Matrix gamma = dlyap_cross(g.a(), g.c(), h.a(), h.c());
  StateSpaceModel causal(
      h.a(), h.b(), g.b().transpose() * gamma * h.a() + g.d().transpose() * h.c(),
      g.d().transpose() * h.d() + g.b().transpose() * gamma * h.b());
  StateSpaceModel anticausal(
      g.a(), g.b(), h.b().transpose() * gamma.transpose() * g.a() + h.d().transpose() * g.c(),
      Matrix::Zero(h.inputs(), g.inputs()));
  return {std::move(causal), std::move(anticausal)};
}

Matrix riccati_map(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& x) {
  const Matrix btxa = b.transpose() * x * a;
  const Matrix s = Matrix::Identity(b.cols(), b.cols()) + b.transpose() * x * b;
  return q + a.transpose() * x * a - btxa.transpose() * s.ldlt().solve(btxa);
}

Matrix dare_solve(const Matrix& a, const Matrix& b, const Matrix& q, const DareOptions& options) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || q.rows() != a.rows() ||
      q.cols() != a.cols()) {
    throw DimensionMismatch("dare_solve: incompatible shapes");
  }
  Matrix x = symmetrize(q);
  bool converged = false;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const Matrix next = symmetrize(riccati_map(a, b, q, x));
    const Matrix step = next - x;
    x += options.damping * step;
    const double step_norm = step.stableNorm();
    const double x_norm = x.stableNorm();
    if (!x.allFinite() || !std::isfinite(step_norm) || !std::isfinite(x_norm)) break;
    if (step_norm <= options.tol * (1.0 + x_norm)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SolverFailure("dare_solve: Riccati iteration did not converge");
  }
  const Matrix s = Matrix::Identity(b.cols(), b.cols()) + b.transpose() * x * b;
  const Matrix k = -s.ldlt().solve(b.transpose() * x * a);
  if (spectral_radius(a + b * k) >= 1.0 - kStabilityTol) {
    throw AssumptionViolated("dare_solve: closed loop A + BK is not stable");
  }
  return x;
}

}  // namespace delayh2
