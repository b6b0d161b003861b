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

#ifndef DELAYH2_LINALG_HPP
#define DELAYH2_LINALG_HPP

#include <Eigen/Dense>

namespace delayh2 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization, so that vec(a x b) = (b^T (x) a) vec(x).
Vector vec(const Matrix& m);

/// Inverse of vec for a rows x cols matrix.
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Largest eigenvalue modulus; 0 for an empty matrix.
double spectral_radius(const Matrix& a);

/// Symmetric PSD square root via eigendecomposition. Negative eigenvalues
/// produced by roundoff are clamped to zero.
Matrix sqrtm_psd(const Matrix& m);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace delayh2

#endif  // DELAYH2_LINALG_HPP
