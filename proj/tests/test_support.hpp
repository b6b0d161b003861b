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

#ifndef DELAYH2_TESTS_TEST_SUPPORT_HPP
#define DELAYH2_TESTS_TEST_SUPPORT_HPP

// Shared fixtures and independent oracles for the test suites. Nothing in
// here calls into the synthesis pipeline; oracles work on truncated Markov
// parameter sequences only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "delayh2/delay_model.hpp"
#include "delayh2/linalg.hpp"
#include "delayh2/state_space.hpp"
#include "delayh2/synthesis.hpp"

namespace delayh2::testing {

using Rng = std::mt19937_64;
using Series = std::vector<Matrix>;

inline Matrix randn(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(rng);
  return m;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(randn(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Random matrix rescaled to the given spectral radius.
inline Matrix random_with_radius(Rng& rng, Eigen::Index n, double radius) {
  Matrix a = randn(rng, n, n);
  const double rho = spectral_radius(a);
  return rho > 1e-12 ? Matrix(a * (radius / rho)) : Matrix(Matrix::Identity(n, n) * radius);
}

inline StateSpaceModel random_stable(Rng& rng, Eigen::Index n, Eigen::Index outputs,
                                     Eigen::Index inputs, double max_radius = 0.9) {
  return {random_with_radius(rng, n, uniform(rng, 0.1, max_radius)), randn(rng, n, inputs),
          randn(rng, outputs, n), randn(rng, outputs, inputs)};
}

inline Matrix block_diag(const std::vector<Matrix>& parts) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    r += p.rows();
    c += p.cols();
  }
  Matrix out = Matrix::Zero(r, c);
  r = c = 0;
  for (const auto& p : parts) {
    out.block(r, c, p.rows(), p.cols()) = p;
    r += p.rows();
    c += p.cols();
  }
  return out;
}

/**
 * Smallest singular value of [A - lambda I, B] over the eigenvalues of A with
 * modulus at least 0.95. Large values keep random plants away from the
 * boundary of stabilizability, where the factorization loses digits.
 */
inline double pbh_margin(const Matrix& a, const Matrix& b) {
  using CMatrix = Eigen::MatrixXcd;
  Eigen::ComplexEigenSolver<CMatrix> es(a.cast<std::complex<double>>());
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const auto lambda = es.eigenvalues()(k);
    if (std::abs(lambda) < 0.95) continue;
    CMatrix m(a.rows(), a.cols() + b.cols());
    m << a.cast<std::complex<double>>() - lambda * CMatrix::Identity(a.rows(), a.rows()),
        b.cast<std::complex<double>>();
    Eigen::JacobiSVD<CMatrix> svd(m);
    margin = std::min(margin, svd.singularValues().minCoeff());
  }
  return margin;
}

/**
 * Random plant satisfying the normalization assumptions. When
 * `decoupled` is set, A, B2 and C2 are block diagonal across the
 * subsystems so that G22 is block diagonal; the state is split evenly.
 */
inline GeneralizedPlant random_plant(Rng& rng, int n, std::vector<int> block_rows,
                                     std::vector<int> block_cols, bool decoupled = false) {
  const int m2 = std::accumulate(block_rows.begin(), block_rows.end(), 0);
  const int q2 = std::accumulate(block_cols.begin(), block_cols.end(), 0);
  const int m1a = uniform_int(rng, 1, 2);
  const int p1a = uniform_int(rng, 1, 2);
  GeneralizedPlant p;
  auto draw_dynamics = [&] {
    if (!decoupled) {
      p.a = random_with_radius(rng, n, uniform(rng, 0.5, 1.2));
      p.b2 = randn(rng, n, m2);
      p.c2 = randn(rng, q2, n);
      return;
    }
    const int nb = static_cast<int>(block_rows.size());
    std::vector<Matrix> as, bs, cs;
    for (int b = 0; b < nb; ++b) {
      const int nsub = n / nb + (b < n % nb ? 1 : 0);
      as.push_back(random_with_radius(rng, nsub, uniform(rng, 0.5, 1.2)));
      bs.push_back(randn(rng, nsub, block_rows[b]));
      cs.push_back(randn(rng, block_cols[b], nsub));
    }
    p.a = block_diag(as);
    p.b2 = block_diag(bs);
    p.c2 = block_diag(cs);
  };
  do {
    draw_dynamics();
  } while (pbh_margin(p.a, p.b2) < 0.1 || pbh_margin(p.a.transpose(), p.c2.transpose()) < 0.1);
  const Matrix u1 = random_orthogonal(rng, p1a + m2);
  Matrix c1(p1a + m2, n);
  c1 << randn(rng, p1a, n), Matrix::Zero(m2, n);
  Matrix d12(p1a + m2, m2);
  d12 << Matrix::Zero(p1a, m2), Matrix::Identity(m2, m2);
  p.c1 = u1 * c1;
  p.d12 = u1 * d12;

  const Matrix v1 = random_orthogonal(rng, m1a + q2);
  Matrix b1(n, m1a + q2);
  b1 << randn(rng, n, m1a), Matrix::Zero(n, q2);
  Matrix d21(q2, m1a + q2);
  d21 << Matrix::Zero(q2, m1a), Matrix::Identity(q2, q2);
  p.b1 = b1 * v1.transpose();
  p.d21 = d21 * v1.transpose();
  p.block_rows = std::move(block_rows);
  p.block_cols = std::move(block_cols);
  return p;
}

/// Plant of the three-player chain example.
inline GeneralizedPlant chain_plant() {
  const Matrix i3 = Matrix::Identity(3, 3);
  const Matrix z3 = Matrix::Zero(3, 3);
  GeneralizedPlant p;
  p.a.resize(3, 3);
  p.a << 1.5, 1, 0, 1, 1.5, 1, 0, 1, 1.5;
  p.b1.resize(3, 6);
  p.b1 << i3, z3;
  p.b2 = i3;
  p.c1.resize(6, 3);
  p.c1 << i3, z3;
  p.c2 = i3;
  p.d12.resize(6, 3);
  p.d12 << z3, i3;
  p.d21.resize(3, 6);
  p.d21 << z3, i3;
  p.block_rows = {1, 1, 1};
  p.block_cols = {1, 1, 1};
  return p;
}

inline DelayGraph chain_graph() {
  return {{1, 1, 1}, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}}};
}

/// Two-state plant of the increasing-delay example.
inline GeneralizedPlant increasing_delay_plant() {
  GeneralizedPlant p;
  p.a.resize(2, 2);
  p.a << 0.9, 0, 0, 1.1;
  p.b1.resize(2, 3);
  p.b1 << 1, 0, 0, 1, 0, 0;
  p.b2 = 0.1 * Matrix::Identity(2, 2);
  p.c1.resize(3, 2);
  p.c1 << 1, 1, 0, 0, 0, 0;
  p.c2 = 0.1 * Matrix::Identity(2, 2);
  p.d12.resize(3, 2);
  p.d12 << 0, 0, 1, 0, 0, 1;
  p.d21.resize(2, 3);
  p.d21 << 0, 1, 0, 0, 0, 1;
  p.block_rows = {1, 1};
  p.block_cols = {1, 1};
  return p;
}

inline BoolMatrix pattern(std::initializer_list<std::initializer_list<int>> rows) {
  BoolMatrix m(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (int v : r) m(i, j++) = v != 0;
    ++i;
  }
  return m;
}

inline BoolMatrix tri_pattern() { return pattern({{1, 0}, {1, 1}}); }
inline BoolMatrix di_pattern() { return pattern({{1, 0}, {0, 1}}); }
inline BoolMatrix low_pattern() { return pattern({{0, 0}, {0, 1}}); }

/// Markov parameters G_0..G_T computed by repeated multiplication; independent
/// of impulse_response so it can cross-check it.
inline Series markov(const StateSpaceModel& g, int horizon) {
  Series s;
  s.push_back(g.d());
  Matrix power = Matrix::Identity(g.states(), g.states());
  for (int k = 1; k <= horizon; ++k) {
    s.push_back(g.c() * power * g.b());
    power = power * g.a();
  }
  return s;
}

/// Truncated product of two causal series.
inline Series convolve(const Series& x, const Series& y) {
  const std::size_t len = std::min(x.size(), y.size());
  Series out;
  for (std::size_t k = 0; k < len; ++k) {
    Matrix acc = Matrix::Zero(x[0].rows(), y[0].cols());
    for (std::size_t i = 0; i <= k; ++i) acc += x[i] * y[k - i];
    out.push_back(acc);
  }
  return out;
}

inline Series add(const Series& x, const Series& y, double scale_y = 1.0) {
  Series out;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) out.push_back(x[k] + scale_y * y[k]);
  return out;
}

/// FIR V as a series of the given length (V_0 = 0).
inline Series fir_series(const FirMatrix& v, Eigen::Index rows, Eigen::Index cols, int horizon) {
  Series s(static_cast<std::size_t>(horizon + 1), Matrix::Zero(rows, cols));
  for (int k = 1; k <= std::min(horizon, v.horizon()); ++k) s[k] = v.blocks[k - 1];
  return s;
}

/// Coefficient of z^{-lag} in G~H from truncated series, lag may be negative.
inline Matrix conjugate_product_lag(const Series& g, const Series& h, int lag) {
  Matrix acc = Matrix::Zero(g[0].cols(), h[0].cols());
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    const int j = i + lag;
    if (j < 0 || j >= static_cast<int>(h.size())) continue;
    acc += g[i].transpose() * h[j];
  }
  return acc;
}

/// Truncated sum of squared Frobenius norms of Markov parameters.
inline double series_norm_sq(const Series& s) {
  double acc = 0.0;
  for (const auto& m : s) acc += m.squaredNorm();
  return acc;
}

inline double max_abs_diff(const FirMatrix& x, const FirMatrix& y) {
  double worst = 0.0;
  for (std::size_t k = 0; k < x.blocks.size(); ++k) {
    worst = std::max(worst, (x.blocks[k] - y.blocks[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double rel_diff(double x, double y) {
  return std::abs(x - y) / std::max({1e-12, std::abs(x), std::abs(y)});
}

/// Truncation length so that radius^T falls below eps, plus a margin.
inline int truncation_for(double radius, int margin = 20, double eps = 1e-16) {
  if (radius < 1e-3) return margin + 2;
  const int t = static_cast<int>(std::ceil(std::log(eps) / std::log(radius)));
  return std::clamp(t + margin, margin + 2, 20000);
}

struct LemmaResiduals {
  double omega = 0.0;   ///< worst entry of P12~P12 - Omega over all lags
  double psi = 0.0;     ///< worst entry of P21 P21~ - Psi over all lags
  double causal = 0.0;  ///< worst entry of the strictly causal part of P12~P11P21~
};

/// Checks the model-matching identities on truncated Markov series only.
inline LemmaResiduals lemma_residuals(const ModelMatching& mm, const Matrix& omega,
                                      const Matrix& psi, int lags = 20) {
  const double rho = std::max({spectral_radius(mm.p11.a()), spectral_radius(mm.p12.a()),
                               spectral_radius(mm.p21.a())});
  const int trunc = truncation_for(rho, 2 * lags);
  const auto p11 = markov(mm.p11, trunc);
  const auto p12 = markov(mm.p12, trunc);
  const auto p21 = markov(mm.p21, trunc);
  Series p21t;
  for (const auto& m : p21) p21t.push_back(m.transpose());

  LemmaResiduals r;
  for (int lag = -lags; lag <= lags; ++lag) {
    Matrix a = conjugate_product_lag(p12, p12, lag);
    Matrix b = conjugate_product_lag(p21t, p21t, lag);
    if (lag == 0) {
      a -= omega;
      b -= psi;
    }
    r.omega = std::max(r.omega, a.cwiseAbs().maxCoeff());
    r.psi = std::max(r.psi, b.cwiseAbs().maxCoeff());
  }
  // H(s) = sum_c P11_{s+c} P21_c^T, then coefficient t of P12~ H is sum_a P12_a^T H(t+a).
  Series h(static_cast<std::size_t>(trunc + 1));
  for (int s = 0; s <= trunc; ++s) {
    Matrix acc = Matrix::Zero(p11[0].rows(), p21[0].rows());
    for (int c = 0; s + c <= trunc; ++c) acc += p11[s + c] * p21t[c];
    h[s] = acc;
  }
  for (int t = 1; t <= lags; ++t) {
    Matrix acc = Matrix::Zero(p12[0].cols(), p21[0].rows());
    for (int a = 0; t + a <= trunc; ++a) acc += p12[a].transpose() * h[t + a];
    r.causal = std::max(r.causal, acc.cwiseAbs().maxCoeff());
  }
  return r;
}

/// Markov series of [X~ -Y~; -N~ M~][M^ Y^; N^ X^] assembled from the eight
/// individual factors, lags 0..horizon.
inline Series bezout_product(const CoprimeFactors& f, int horizon) {
  const auto xt = markov(f.x_tilde, horizon), yt = markov(f.y_tilde, horizon);
  const auto nt = markov(f.n_tilde, horizon), mt = markov(f.m_tilde, horizon);
  const auto mh = markov(f.m_hat, horizon), yh = markov(f.y_hat, horizon);
  const auto nh = markov(f.n_hat, horizon), xh = markov(f.x_hat, horizon);
  const auto m2 = f.m_hat.outputs();
  const auto q2 = f.x_hat.outputs();
  Series out;
  for (int k = 0; k <= horizon; ++k) {
    Matrix left(m2 + q2, m2 + q2);
    Matrix blk = Matrix::Zero(m2 + q2, m2 + q2);
    for (int i = 0; i <= k; ++i) {
      const int j = k - i;
      left << xt[i], -yt[i], -nt[i], mt[i];
      Matrix right(m2 + q2, m2 + q2);
      right << mh[j], yh[j], nh[j], xh[j];
      blk += left * right;
    }
    out.push_back(blk);
  }
  return out;
}

/// Worst deviation of a Bezout product series from the identity.
inline double identity_residual(const Series& s) {
  const auto dim = s[0].rows();
  double worst = (s[0] - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  for (std::size_t k = 1; k < s.size(); ++k) worst = std::max(worst, s[k].cwiseAbs().maxCoeff());
  return worst;
}

/// FIR terms 1..horizon of (-Y^ + M^ V) M~ by series arithmetic.
inline Series youla_fir_terms(const CoprimeFactors& f, const FirMatrix& v) {
  const int horizon = v.horizon();
  const auto p2 = f.m_hat.outputs();
  const auto q2 = f.m_tilde.outputs();
  const auto mv = convolve(markov(f.m_hat, horizon), fir_series(v, p2, q2, horizon));
  const auto inner = add(mv, markov(f.y_hat, horizon), -1.0);
  return convolve(inner, markov(f.m_tilde, horizon));
}

/// A random problem instance for which quadratic invariance is guaranteed.
struct Instance {
  GeneralizedPlant plant;
  ConstraintSpace cs;
};

/**
 * Two flavours, alternated by the caller through `graph_based`:
 * a coupled plant with delays in {1,2,3} (every plant delay is at least one,
 * which dominates any delay pattern of depth three), or a graph-derived delay
 * matrix with decoupled subsystems, where the communication graph itself
 * supplies the required triangle inequality.
 */
inline Instance random_instance(Rng& rng, bool graph_based) {
  const int nodes = uniform_int(rng, 2, 3);
  std::vector<int> rows(nodes), cols(nodes);
  for (int i = 0; i < nodes; ++i) {
    rows[i] = uniform_int(rng, 1, 2);
    cols[i] = uniform_int(rng, 1, 2);
  }
  IntMatrix d(nodes, nodes);
  if (graph_based) {
    std::vector<int> comp(nodes, 1);
    std::vector<DelayEdge> edges;
    for (int i = 0; i < nodes; ++i) {
      edges.push_back({i, (i + 1) % nodes, uniform_int(rng, 0, 1)});
      edges.push_back({(i + 1) % nodes, i, uniform_int(rng, 0, 2)});
    }
    d = delay_matrix(DelayGraph{comp, edges}).values();
  } else {
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = uniform_int(rng, 1, 3);
  }
  const int n = uniform_int(rng, nodes, 4);
  auto plant = random_plant(rng, n, rows, cols, graph_based);
  auto cs = constraint_space(DelayMatrix(d), rows, cols);
  return {std::move(plant), std::move(cs)};
}

}  // namespace delayh2::testing

#endif  // DELAYH2_TESTS_TEST_SUPPORT_HPP
