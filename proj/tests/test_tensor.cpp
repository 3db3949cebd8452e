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
#include <random>

#include "doctest.h"
#include "pptkey/states.hpp"
#include "pptkey/tensor.hpp"

using namespace pptkey;

namespace {

// Reference partial trace over the second factor of a d1 x d2 system,
// written directly from the index formula.
Matrix trace_second(const Matrix& m, int d1, int d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
  return out;
}

Matrix transpose_second(const Matrix& m, int d1, int d2) {
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < d1; ++i)
    for (int k = 0; k < d2; ++k)
      for (int j = 0; j < d1; ++j)
        for (int l = 0; l < d2; ++l) out(i * d2 + k, j * d2 + l) = m(i * d2 + l, j * d2 + k);
  return out;
}

}  // namespace

TEST_CASE("construction validates shape and dims") {
  CHECK_THROWS_AS(MultipartiteOperator(Matrix::Zero(4, 4), {2, 3}), Error);
  CHECK_THROWS_AS(MultipartiteOperator(Matrix::Zero(4, 3), {2, 2}), Error);
  CHECK_NOTHROW(MultipartiteOperator(Matrix::Zero(6, 6), {2, 3}));
}

TEST_CASE("partial trace matches the index formula") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_hermitian(6, rng);
    const MultipartiteOperator op(m, {2, 3});
    CHECK(max_abs_diff(partial_trace(op, {1}).data(), trace_second(m, 2, 3)) < 1e-13);
    // Tracing the first factor equals tracing the second after swapping.
    const int swap[] = {1, 0};
    const MultipartiteOperator sw = permute_subsystems(op, swap);
    CHECK(max_abs_diff(partial_trace(op, {0}).data(), trace_second(sw.data(), 3, 2)) < 1e-13);
  }
}

TEST_CASE("partial trace of a product returns the factor") {
  std::mt19937_64 rng(3);
  const DensityOperator a = random_density({2}, rng);
  const DensityOperator b = random_density({3}, rng);
  const DensityOperator c = random_density({2}, rng);
  const MultipartiteOperator abc = tensor({a.op(), b.op(), c.op()});
  CHECK(max_abs_diff(partial_trace(abc, {0, 2}).data(), b.matrix()) < 1e-13);
  CHECK(max_abs_diff(partial_trace(abc, {1}).data(), tensor({a.op(), c.op()}).data()) < 1e-13);
  const MultipartiteOperator all = partial_trace(abc, {0, 1, 2});
  CHECK(all.dim() == 1);
  CHECK(std::abs(all(0, 0) - cplx(1.0)) < 1e-13);
}

TEST_CASE("partial transpose matches the index formula and is involutive") {
  std::mt19937_64 rng(5);
  const Matrix m = random_hermitian(6, rng);
  const MultipartiteOperator op(m, {2, 3});
  const MultipartiteOperator pt = partial_transpose(op, {1});
  CHECK(max_abs_diff(pt.data(), transpose_second(m, 2, 3)) == 0.0);
  CHECK(max_abs_diff(partial_transpose(pt, {1}), op) == 0.0);
  // Full transpose.
  CHECK(max_abs_diff(partial_transpose(op, {0, 1}).data(), Matrix(m.transpose())) == 0.0);
}

TEST_CASE("partial transpose of a Bell state has eigenvalue -1/2") {
  const Vector psi = BellBasis::psi(0);
  const MultipartiteOperator p = projector(psi, {2, 2});
  const EigenSystem es = eig_hermitian(partial_transpose(p, {1}));
  CHECK(es.values(0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(es.values(3) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("permute_subsystems round trip") {
  std::mt19937_64 rng(8);
  const MultipartiteOperator op(random_hermitian(12, rng), {2, 3, 2});
  const int order[] = {2, 0, 1};
  const int inverse[] = {1, 2, 0};
  const MultipartiteOperator p = permute_subsystems(op, order);
  CHECK(p.dims() == std::vector<int>{2, 2, 3});
  CHECK(max_abs_diff(permute_subsystems(p, inverse), op) == 0.0);
}

TEST_CASE("eigendecomposition reconstructs and rejects non-Hermitian input") {
  std::mt19937_64 rng(9);
  const Matrix m = random_hermitian(16, rng);
  const EigenSystem es = eig_hermitian(m);
  const Matrix back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  CHECK(max_abs_diff(back, m) < 1e-12);
  for (Eigen::Index i = 1; i < es.values.size(); ++i) CHECK(es.values(i - 1) <= es.values(i));
  Matrix bad = m;
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(eig_hermitian(bad), Error);
}

TEST_CASE("operator functions") {
  std::mt19937_64 rng(10);
  const DensityOperator rho = random_density({4}, rng);
  const Matrix s = matrix_sqrt_psd(rho.matrix());
  CHECK(max_abs_diff(Matrix(s * s), rho.matrix()) < 1e-12);
  const Matrix l = matrix_log2_pd(rho.matrix());
  const Matrix back = apply_hermitian(eig_hermitian(l), [](double x) { return std::exp2(x); });
  CHECK(max_abs_diff(back, rho.matrix()) < 1e-12);
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1e-6;
  CHECK_THROWS_AS(matrix_sqrt_psd(neg), Error);
  CHECK(trace_norm(pauli::X()) == doctest::Approx(2.0));
  CHECK(is_unitary(pauli::Y()));
  CHECK_FALSE(is_unitary(2.0 * pauli::Y()));
}

TEST_CASE("entropies") {
  CHECK(von_neumann_entropy(Matrix(Matrix::Identity(4, 4) / 4.0)) == doctest::Approx(2.0).epsilon(1e-12));
  const MultipartiteOperator bell = projector(BellBasis::psi(2), {2, 2});
  CHECK(std::abs(von_neumann_entropy(bell.data())) < 1e-12);
  CHECK(von_neumann_entropy(partial_trace(bell, {1}).data()) == doctest::Approx(1.0).epsilon(1e-12));
  const double p[] = {0.5, 0.25, 0.25, 0.0};
  CHECK(shannon_entropy(p) == doctest::Approx(1.5));
}

TEST_CASE("density operator validation") {
  Matrix m = Matrix::Identity(2, 2) / 2.0;
  CHECK_NOTHROW(DensityOperator(m, {2}));
  CHECK_THROWS_AS(DensityOperator(Matrix(2.0 * m), {2}), Error);
  Matrix herm = m;
  herm(0, 1) = cplx(0.0, 0.1);
  CHECK_THROWS_AS(DensityOperator(herm, {2}), Error);
  Matrix neg = m;
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityOperator(neg, {2}), Error);
}

TEST_CASE("property: partial trace preserves trace and positivity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator rho = random_density({2, 2, 2, 2}, rng);
    for (int k = 0; k < 4; ++k) {
      const MultipartiteOperator r = partial_trace(rho.op(), {k});
      CHECK(std::abs(r.trace() - cplx(1.0)) < 1e-12);
      CHECK(lambda_min(r.data()) > -1e-12);
    }
  }
}
