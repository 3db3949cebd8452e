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


#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pptkey/ppt.hpp"
#include "pptkey/states.hpp"

using namespace pptkey;

namespace {
const double kSqrt2 = std::numbers::sqrt2;
}

TEST_CASE("Bell basis conventions") {
  const double r = 1.0 / kSqrt2;
  CHECK(std::abs(BellBasis::psi(0)(0) - cplx(r)) < 1e-15);
  CHECK(std::abs(BellBasis::psi(1)(3) - cplx(-r)) < 1e-15);
  CHECK(std::abs(BellBasis::psi(2)(1) - cplx(r)) < 1e-15);
  CHECK(std::abs(BellBasis::psi(2)(2) - cplx(r)) < 1e-15);
  CHECK(std::abs(BellBasis::psi(3)(2) - cplx(-r)) < 1e-15);
  CHECK(std::abs(BellBasis::tilde(0)(3) - cplx(0, r)) < 1e-15);
  CHECK(std::abs(BellBasis::tilde(3)(2) - cplx(0, -r)) < 1e-15);
  Matrix gram(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gram(i, j) = BellBasis::psi(i).dot(BellBasis::psi(j));
  CHECK(max_abs_diff(gram, Matrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("rho_H weights") {
  const RhoU r = rho_u(presets::hadamard());
  CHECK(std::abs(r.p1 - (2.0 - kSqrt2)) < 1e-12);
  CHECK(std::abs(r.p1 - kSqrt2 / (1.0 + kSqrt2)) < 1e-12);
  CHECK(std::abs(r.p1 / r.p2 - kSqrt2) < 1e-12);
  CHECK(std::abs(key_ratio(presets::hadamard()) - kSqrt2) < 1e-12);
}

TEST_CASE("rho_H agrees with its mixture form") {
  const DensityOperator a = rho_h();
  const DensityOperator b = rho_h_mixture_form();
  CHECK(max_abs_diff(a.op(), b.op()) <= 1e-12);
  CHECK(std::abs(a.op().trace() - cplx(1.0)) < 1e-12);
  const double p1 = 2.0 - kSqrt2, p2 = kSqrt2 - 1.0;
  const EigenSystem es = eig_hermitian(a.matrix());
  int zero = 0;
  std::vector<double> nonzero;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (std::abs(es.values(i)) < 1e-10) ++zero;
    else nonzero.push_back(es.values(i));
  }
  CHECK(zero == 10);
  REQUIRE(nonzero.size() == 6);
  std::sort(nonzero.begin(), nonzero.end());
  // p2/2 ~ 0.2071 > p1/4 ~ 0.1464
  for (int i = 0; i < 4; ++i) CHECK(std::abs(nonzero[i] - p1 / 4) < 1e-10);
  for (int i = 4; i < 6; ++i) CHECK(std::abs(nonzero[i] - p2 / 2) < 1e-10);
}

TEST_CASE("chi states are orthonormal") {
  const Vector a = chi_state(true), b = chi_state(false);
  CHECK(std::abs(a.norm() - 1.0) < 1e-15);
  CHECK(std::abs(b.norm() - 1.0) < 1e-15);
  CHECK(std::abs(a.dot(b)) < 1e-15);
}

TEST_CASE("W_U operator") {
  const MultipartiteOperator w = wu_operator(presets::hadamard());
  const double r = 1.0 / kSqrt2;
  // W_U(ij, ji) = u_ij
  CHECK(std::abs(w(0 * 2 + 1, 1 * 2 + 0) - cplx(r)) < 1e-15);
  CHECK(std::abs(w(3, 3) - cplx(-r)) < 1e-15);
  CHECK(trace_norm(w) == doctest::Approx(2.0 * kSqrt2).epsilon(1e-12));
  CHECK_THROWS_AS(wu_operator(2.0 * presets::hadamard()), Error);
  CHECK_THROWS_AS(wu_operator(Matrix::Ones(2, 3)), Error);
}

TEST_CASE("key ratio bounded by sqrt d with equality for unimodular unitaries") {
  CHECK(std::abs(key_ratio(presets::fourier(3)) - std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(key_ratio(presets::identity(3)) - 1.0) < 1e-12);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 2;
    CHECK(key_ratio(presets::random_unitary(d, rng)) <= std::sqrt(d) + 1e-9);
  }
}

TEST_CASE("pbit requires unit trace norm") {
  Matrix x = Matrix::Identity(4, 4) / 4.0;
  const DensityOperator g = pbit_from_X(x);
  CHECK(g.dims() == std::vector<int>{2, 2, 2, 2});
  CHECK_THROWS_AS(pbit_from_X(Matrix(2.0 * x)), Error);
}

TEST_CASE("key mixture validation") {
  const Matrix x = Matrix::Identity(4, 4) / 4.0;
  CHECK_THROWS_AS(KeyMixture(x, x, 0.3, 0.7), Error);
  CHECK_THROWS_AS(KeyMixture(x, x, 0.6, 0.6), Error);
  CHECK_NOTHROW(KeyMixture(x, x, 1.0, 0.0));
}

TEST_CASE("property: rho_U is a PPT-invariant state for random U") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 2;
    const RhoU r = rho_u(presets::random_unitary(d, rng));
    CHECK(std::abs(r.rho.op().trace() - cplx(1.0)) < 1e-12);
    CHECK(lambda_min(r.rho.matrix()) > -1e-10);
    CHECK(ppt_invariance(r.rho) <= 1e-10);
    CHECK(r.p1 >= r.p2);
  }
}

TEST_CASE("depolarize") {
  const DensityOperator rho = rho_h();
  const DensityOperator n = depolarize(rho, 0.0);
  CHECK(max_abs_diff(n.matrix(), Matrix(Matrix::Identity(16, 16) / 16.0)) < 1e-15);
  CHECK(max_abs_diff(depolarize(rho, 1.0).matrix(), rho.matrix()) < 1e-15);
  CHECK_THROWS_AS(depolarize(rho, 1.5), Error);
}
