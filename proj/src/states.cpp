// Copyright 2026 The pptkey Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pptkey/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace pptkey {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

int shield_dim_of(const Matrix& x) {
  const long n = x.rows();
  if (x.cols() != n) throw Error("shield operator must be square");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (static_cast<long>(d) * d != n) throw Error("shield operator must act on C^d (x) C^d");
  return d;
}

}  // namespace

Vector BellBasis::psi(int k) {
  Vector v = Vector::Zero(4);
  switch (k) {
    case 0: v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;
    case 1: v(0) = kInvSqrt2; v(3) = -kInvSqrt2; break;
    case 2: v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;
    case 3: v(1) = kInvSqrt2; v(2) = -kInvSqrt2; break;
    default: throw Error("Bell index must be 0..3");
  }
  return v;
}

Vector BellBasis::tilde(int k) {
  const cplx i(0.0, 1.0);
  Vector v = Vector::Zero(4);
  switch (k) {
    case 0: v(0) = kInvSqrt2; v(3) = i * kInvSqrt2; break;
    case 1: v(0) = kInvSqrt2; v(3) = -i * kInvSqrt2; break;
    case 2: v(1) = kInvSqrt2; v(2) = i * kInvSqrt2; break;
    case 3: v(1) = kInvSqrt2; v(2) = -i * kInvSqrt2; break;
    default: throw Error("Bell index must be 0..3");
  }
  return v;
}

Matrix BellBasis::projector(int k) {
  const Vector v = psi(k);
  return v * v.adjoint();
}

Matrix BellBasis::tilde_projector(int k) {
  const Vector v = tilde(k);
  return v * v.adjoint();
}

MultipartiteOperator wu_operator(const Matrix& u) {
  if (u.rows() != u.cols()) throw Error("wu_operator: U must be square");
  if (!is_unitary(u)) throw Error("wu_operator: U is not unitary within 1e-9");
  const int d = static_cast<int>(u.rows());
  Matrix w = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) w(i * d + j, j * d + i) = u(i, j);
  return {std::move(w), {d, d}, {"A'", "B'"}};
}

double key_ratio(const Matrix& u) {
  if (u.rows() != u.cols()) throw Error("key_ratio: U must be square");
  if (!is_unitary(u)) throw Error("key_ratio: U is not unitary within 1e-9");
  return u.cwiseAbs().sum() / static_cast<double>(u.rows());
}

DensityOperator pbit_from_X(const Matrix& x) {
  const int d = shield_dim_of(x);
  const double norm = trace_norm(x);
  if (std::abs(norm - 1.0) > tol::kTraceNormUnit) {
    std::ostringstream os;
    os << "pbit_from_X: trace norm of X is " << norm << ", expected 1";
    throw Error(os.str());
  }
  const long n = x.rows();
  Matrix g = Matrix::Zero(4 * n, 4 * n);
  g.block(0, 0, n, n) = 0.5 * matrix_sqrt_psd(Matrix(x * x.adjoint()));
  g.block(0, 3 * n, n, n) = 0.5 * x;
  g.block(3 * n, 0, n, n) = 0.5 * x.adjoint();
  g.block(3 * n, 3 * n, n, n) = 0.5 * matrix_sqrt_psd(Matrix(x.adjoint() * x));
  return DensityOperator(g, {2, 2, d, d});
}

KeyMixture::KeyMixture(Matrix x1_in, Matrix x2_in, double p1_in, double p2_in)
    : x1(std::move(x1_in)), x2(std::move(x2_in)), p1(p1_in), p2(p2_in) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols())
    throw Error("KeyMixture: X1 and X2 must have equal shape");
  shield_dim_of(x1);
  if (std::abs(p1 + p2 - 1.0) > 1e-12) throw Error("KeyMixture: p1 + p2 must equal 1");
  if (p2 < 0.0 || p1 < p2) throw Error("KeyMixture: requires p1 >= p2 >= 0");
  const double n1 = trace_norm(x1);
  const double n2 = trace_norm(x2);
  if (n1 == 0.0 || n2 == 0.0) throw Error("KeyMixture: X1, X2 must be nonzero");
  x1 /= n1;
  x2 /= n2;
}

int KeyMixture::shield_dim() const { return shield_dim_of(x1); }

namespace {

// |X^dag| = sqrt(X X^dag) and |X| = sqrt(X^dag X) from one SVD, which keeps
// small singular values accurate.
std::pair<Matrix, Matrix> polar_moduli(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto s = svd.singularValues().cast<cplx>().asDiagonal();
  return {svd.matrixU() * s * svd.matrixU().adjoint(), svd.matrixV() * s * svd.matrixV().adjoint()};
}

}  // namespace

Matrix assemble_standard_form(const Matrix& x1_in, const Matrix& x2_in, double q) {
  const Matrix x1 = x1_in / trace_norm(x1_in);
  const Matrix x2 = x2_in / trace_norm(x2_in);
  const double p1 = q;
  const double p2 = 1.0 - q;
  const long n = x1.rows();
  const auto [l1, r1] = polar_moduli(x1);
  const auto [l2, r2] = polar_moduli(x2);
  Matrix r = Matrix::Zero(4 * n, 4 * n);
  // Outer corners: AB in {00, 11}.
  r.block(0, 0, n, n) = p1 * l1;
  r.block(0, 3 * n, n, n) = p1 * x1;
  r.block(3 * n, 0, n, n) = p1 * x1.adjoint();
  r.block(3 * n, 3 * n, n, n) = p1 * r1;
  // Inner blocks: AB in {01, 10}.
  r.block(n, n, n, n) = p2 * l2;
  r.block(n, 2 * n, n, n) = p2 * x2;
  r.block(2 * n, n, n, n) = p2 * x2.adjoint();
  r.block(2 * n, 2 * n, n, n) = p2 * r2;
  // Exact Hermitian symmetry on the diagonal blocks.
  const Matrix h = 0.5 * (r + r.adjoint());
  return 0.5 * h;
}

DensityOperator rho_from_mixture(const KeyMixture& m) {
  const int d = m.shield_dim();
  return DensityOperator(assemble_standard_form(m.x1, m.x2, m.p1), {2, 2, d, d});
}

RhoU rho_u(const Matrix& u) {
  const MultipartiteOperator w = wu_operator(u);
  const MultipartiteOperator wg = partial_transpose(w, {1});
  const double nw = trace_norm(w);
  const double nwg = trace_norm(wg);
  const double p1 = nw / (nw + nwg);
  const double p2 = nwg / (nw + nwg);
  KeyMixture mix(w.data(), wg.data(), p1, p2);
  DensityOperator rho = rho_from_mixture(mix);
  return {std::move(rho), std::move(mix), p1, p2};
}

DensityOperator rho_h() { return rho_u(presets::hadamard()).rho; }

Vector chi_state(bool plus) {
  const double s2 = std::numbers::sqrt2;
  Vector v = Vector::Zero(4);
  if (plus) {
    v(0) = std::sqrt(2.0 + s2) / 2.0;
    v(3) = std::sqrt(2.0 - s2) / 2.0;
  } else {
    v(0) = std::sqrt(2.0 - s2) / 2.0;
    v(3) = -std::sqrt(2.0 + s2) / 2.0;
  }
  return v;
}

std::vector<MixtureComponent> rho_h_components() {
  const double p1 = std::numbers::sqrt2 / (1.0 + std::numbers::sqrt2);
  const double p2 = 1.0 - p1;
  const Vector k00 = basis_ket({0, 0}, {2, 2});
  const Vector k11 = basis_ket({1, 1}, {2, 2});
  const Matrix shield[4] = {
      0.5 * (k00 * k00.adjoint() + BellBasis::projector(2)),
      0.5 * (k11 * k11.adjoint() + BellBasis::projector(3)),
      chi_state(true) * chi_state(true).adjoint(),
      chi_state(false) * chi_state(false).adjoint(),
  };
  const double q[4] = {p1 / 2, p1 / 2, p2 / 2, p2 / 2};
  std::vector<MixtureComponent> out;
  for (int i = 0; i < 4; ++i) out.push_back({q[i], BellBasis::projector(i), shield[i]});
  return out;
}

DensityOperator rho_h_mixture_form() {
  Matrix rho = Matrix::Zero(16, 16);
  for (const auto& c : rho_h_components()) {
    const MultipartiteOperator key(c.key, {2, 2});
    const MultipartiteOperator sh(c.shield, {2, 2});
    rho += c.weight * tensor({key, sh}).data();
  }
  return DensityOperator(rho, {2, 2, 2, 2});
}

DensityOperator depolarize(const DensityOperator& rho, double p_mix) {
  if (!(p_mix >= 0.0 && p_mix <= 1.0)) throw Error("depolarize: p_mix must lie in [0,1]");
  const long n = rho.dim();
  Matrix m = p_mix * rho.matrix() +
             ((1.0 - p_mix) / static_cast<double>(n)) * Matrix::Identity(n, n);
  return DensityOperator(std::move(m), rho.dims());
}

namespace presets {

Matrix hadamard() {
  Matrix h(2, 2);
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return h;
}

Matrix fourier(int d) {
  if (d < 1) throw Error("fourier: d must be positive");
  Matrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      f(j, k) = scale * std::polar(1.0, 2.0 * std::numbers::pi * j * k / d);
  return f;
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(n01(rng), n01(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

}  // namespace presets

Matrix random_hermitian(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix g(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) g(i, j) = cplx(n01(rng), n01(rng));
  return 0.5 * (g + g.adjoint());
}

DensityOperator random_density(std::vector<int> dims, std::mt19937_64& rng) {
  long n = 1;
  for (int d : dims) n *= d;
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix g(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) g(i, j) = cplx(n01(rng), n01(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityOperator(std::move(rho), std::move(dims));
}

}  // namespace pptkey
