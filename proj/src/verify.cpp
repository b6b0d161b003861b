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

#include "delayh2/verify.hpp"

#include <sstream>

#include "delayh2/errors.hpp"

namespace delayh2 {

ClosedLoop closed_loop(const GeneralizedPlant& plant, const StateSpaceModel& k) {
  if (k.inputs() != plant.measurements() || k.outputs() != plant.controls()) {
    throw DimensionMismatch("closed_loop: controller dimensions do not match the plant");
  }
  if (k.d().size() > 0 && k.d().cwiseAbs().maxCoeff() > 0.0) {
    throw IllPosed("closed_loop: controller must be strictly proper");
  }
  const auto n = plant.states();
  const auto nk = k.states();
  Matrix a(n + nk, n + nk);
  a << plant.a, plant.b2 * k.c(), k.b() * plant.c2, k.a();
  Matrix b(n + nk, plant.disturbances());
  b << plant.b1, k.b() * plant.d21;
  Matrix c(plant.performance(), n + nk);
  c << plant.c1, plant.d12 * k.c();
  return {StateSpaceModel(a, b, c, Matrix::Zero(plant.performance(), plant.disturbances()))};
}

std::string ConformanceReport::summary() const {
  std::ostringstream os;
  if (conforms) {
    os << "conforms";
    return os.str();
  }
  os << violations.size() << " violation(s)";
  for (const auto& v : violations) {
    os << "; lag " << v.lag << " block (" << v.block_row << "," << v.block_col
       << ") norm " << v.magnitude;
  }
  return os.str();
}

ConformanceReport conformance(const StateSpaceModel& k, const ConstraintSpace& cs,
                              double rel_tol) {
  if (k.outputs() != cs.total_rows() || k.inputs() != cs.total_cols()) {
    throw DimensionMismatch("conformance: controller does not match the constraint space");
  }
  const int horizon = cs.horizon();
  const auto ir = impulse_response(k, static_cast<std::size_t>(horizon));
  ConformanceReport report;

  const double d_norm = k.d().norm();
  if (d_norm > 0.0) {
    report.violations.push_back({0, -1, -1, d_norm});
  }

  double scale = 0.0;
  for (int lag = 1; lag <= horizon; ++lag) scale = std::max(scale, ir[lag].norm());
  const double threshold = rel_tol * (1.0 + scale);

  const auto ro = block_offsets(cs.block_rows());
  const auto co = block_offsets(cs.block_cols());
  for (int lag = 1; lag <= horizon; ++lag) {
    const auto& pattern = cs.pattern(lag);
    for (Eigen::Index i = 0; i < pattern.rows(); ++i) {
      for (Eigen::Index j = 0; j < pattern.cols(); ++j) {
        if (pattern(i, j)) continue;
        const double mag =
            ir[lag].block(ro[i], co[j], cs.block_rows()[i], cs.block_cols()[j]).norm();
        if (mag >= threshold) {
          report.violations.push_back({lag, static_cast<int>(i), static_cast<int>(j), mag});
        }
      }
    }
  }
  report.conforms = report.violations.empty();
  return report;
}

QpSolution kkt_oracle(const VectorizedSystem& vsys, const ConstraintSpace& cs,
                      const Matrix& omega, const Matrix& psi) {
  const int horizon = cs.horizon();
  QpSolution sol;
  if (horizon == 0) return sol;
  const auto p2 = vsys.controls;
  const auto q2 = vsys.measurements;
  const auto m = p2 * q2;
  const auto nx = vsys.a_v.rows();
  const auto nz = m * horizon;

  // Influence of vec(V_j) on x_i is A_v^{i-1-j} B_v for j < i; powers[k] = A_v^k.
  std::vector<Matrix> powers(static_cast<std::size_t>(horizon));
  powers[0] = Matrix::Identity(nx, nx);
  for (int k = 1; k < horizon; ++k) powers[k] = vsys.a_v * powers[k - 1];

  std::vector<Matrix> f_blocks;
  Eigen::Index n_con = 0;
  for (int i = 1; i <= horizon; ++i) {
    f_blocks.push_back(basis_matrices(cs.pattern(i), cs.block_rows(), cs.block_cols()).f);
    n_con += f_blocks.back().cols();
  }

  Matrix g = Matrix::Zero(n_con, nz);
  Vector h = Vector::Zero(n_con);
  Eigen::Index row = 0;
  for (int i = 1; i <= horizon; ++i) {
    const Matrix& f = f_blocks[static_cast<std::size_t>(i - 1)];
    const auto nf = f.cols();
    if (nf == 0) continue;
    const Matrix ftc = f.transpose() * vsys.c_v;
    for (int j = 1; j < i; ++j) {
      g.block(row, (j - 1) * m, nf, m) = ftc * powers[i - 1 - j] * vsys.b_v;
    }
    g.block(row, (i - 1) * m, nf, m) = f.transpose();
    h.segment(row, nf) = -ftc * powers[i - 1] * vsys.x1;
    row += nf;
  }

  const Matrix r = kron(psi, omega);
  Matrix hess = Matrix::Zero(nz, nz);
  for (int i = 0; i < horizon; ++i) hess.block(i * m, i * m, m, m) = r;

  Matrix kkt = Matrix::Zero(nz + n_con, nz + n_con);
  kkt.topLeftCorner(nz, nz) = hess;
  kkt.topRightCorner(nz, n_con) = g.transpose();
  kkt.bottomLeftCorner(n_con, nz) = g;
  Vector rhs = Vector::Zero(nz + n_con);
  rhs.tail(n_con) = h;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
  const Vector z = cod.solve(rhs).head(nz);
  if (!z.allFinite()) {
    throw SolverFailure("kkt_oracle: KKT solve produced non-finite values");
  }

  sol.cost = z.dot(hess * z);
  for (int i = 0; i < horizon; ++i) {
    sol.v_star.blocks.push_back(unvec(z.segment(i * m, m), p2, q2));
  }
  return sol;
}

}  // namespace delayh2
