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
#include "pptkey/observables.hpp"
#include "pptkey/states.hpp"

using namespace pptkey;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

VerificationObservables hadamard_observables() {
  return build_observables(twisting_from_state(rho_h().matrix(), 2));
}

Matrix zz_ii() { return PauliString::parse("ZZII").matrix(); }

}  // namespace

TEST_CASE("Pauli strings") {
  const PauliString p = PauliString::parse("XYZI");
  CHECK(p.str() == "XYZI");
  CHECK(PauliString::from_index(p.index()) == p);
  CHECK(PauliString::parse("IIII").index() == 0);
  CHECK_THROWS_AS(PauliString::parse("XYZ"), Error);
  CHECK_THROWS_AS(PauliString::parse("XYZQ"), Error);
  // Orthogonality under the normalized Hilbert-Schmidt product.
  const Matrix a = PauliString::parse("XXYZ").matrix(), b = PauliString::parse("XXYI").matrix();
  CHECK(std::abs((a.adjoint() * b).trace()) < 1e-12);
  CHECK(std::abs((a.adjoint() * a).trace() / 16.0 - cplx(1.0)) < 1e-12);
}

TEST_CASE("decomposition of simple operators") {
  const PauliDecomposition zz = pauli_decompose(zz_ii());
  CHECK(zz.terms().size() == 1);
  CHECK(std::abs(zz.coeff("ZZII") - cplx(1.0)) < 1e-12);
  const Matrix bell = tensor({MultipartiteOperator(BellBasis::projector(0), {2, 2}), identity({2, 2})}).data();
  const PauliDecomposition d = pauli_decompose(bell);
  CHECK(d.terms().size() == 4);
  CHECK(std::abs(d.coeff("IIII") - cplx(0.25)) < 1e-12);
  CHECK(std::abs(d.coeff("XXII") - cplx(0.25)) < 1e-12);
  CHECK(std::abs(d.coeff("YYII") - cplx(-0.25)) < 1e-12);
  CHECK(std::abs(d.coeff("ZZII") - cplx(0.25)) < 1e-12);
}

TEST_CASE("property: decompose then reconstruct is the identity") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const Matrix h = random_hermitian(16, rng);
    const PauliDecomposition d = pauli_decompose(h);
    CHECK(max_abs_diff(d.reconstruct(), h) <= 1e-12);
    for (int k = 0; k < kPauliStrings; ++k) CHECK(std::abs(d.coeff(k).imag()) < 1e-12);
  }
}

TEST_CASE("O1 is the bare key measurement") {
  const VerificationObservables obs = hadamard_observables();
  CHECK(max_abs_diff(obs.o1, zz_ii()) <= 1e-12);
  for (const Matrix* m : {&obs.o1, &obs.r1, &obs.i1, &obs.r2, &obs.i2}) {
    CHECK(is_hermitian(*m));
    // Differences of orthogonal projectors: spectrum inside [-1, 1].
    const EigenSystem es = eig_hermitian(*m);
    CHECK(es.values(0) >= -1.0 - 1e-12);
    CHECK(es.values(15) <= 1.0 + 1e-12);
  }
}

TEST_CASE("expectations on rho_H") {
  const VerificationObservables obs = hadamard_observables();
  const Matrix rho = rho_h().matrix();
  CHECK(std::abs(expectation(obs.o1, rho) - (3.0 - 2.0 * kSqrt2)) <= 1e-10);
  CHECK(std::abs(expectation(obs.r1, rho) - (2.0 - kSqrt2)) <= 1e-10);
  CHECK(std::abs(expectation(obs.r2, rho) - (kSqrt2 - 1.0)) <= 1e-10);
  CHECK(std::abs(expectation(obs.i1, rho)) <= 1e-10);
  CHECK(std::abs(expectation(obs.i2, rho)) <= 1e-10);
  CHECK(std::abs(expectation(Matrix(Matrix::Identity(16, 16)), rho) - 1.0) < 1e-12);
  for (double p : {0.0, 0.3, 0.9}) {
    const Matrix noisy = depolarize(rho_h(), p).matrix();
    CHECK(std::abs(expectation(obs.r1, noisy) - p * (2.0 - kSqrt2)) <= 1e-10);
  }
  const Matrix mixed = Matrix::Identity(16, 16) / 16.0;
  CHECK_THROWS_AS(expectation(Matrix(cplx(0, 1) * Matrix::Identity(16, 16)), mixed), Error);
  CHECK_THROWS_AS(expectation(Matrix(Matrix::Identity(4, 4)), mixed), Error);
}

TEST_CASE("property: trace chain identity on random states") {
  const TwistingUnitary tau = twisting_from_state(rho_h().matrix(), 2);
  const VerificationObservables obs = build_observables(tau);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const DensityOperator rho = random_density({2, 2, 2, 2}, rng);
    const Matrix sigma = privacy_squeeze(rho, tau).matrix();
    const cplx a = sigma(0, 3), b = sigma(1, 2);
    CHECK(std::abs(expectation(obs.r1, rho.matrix()) - 2.0 * a.real()) <= 1e-10);
    CHECK(std::abs(expectation(obs.r2, rho.matrix()) - 2.0 * b.real()) <= 1e-10);
    // Sign fixed by the (|00> + i|11>)/sqrt2 convention.
    CHECK(std::abs(expectation(obs.i1, rho.matrix()) + 2.0 * a.imag()) <= 1e-10);
    CHECK(std::abs(expectation(obs.i2, rho.matrix()) + 2.0 * b.imag()) <= 1e-10);
  }
}

TEST_CASE("comparison with the printed expansions") {
  const VerificationObservables obs = hadamard_observables();
  const PrintedExpansions printed = printed_expansions();
  CHECK(compare_decompositions(pauli_decompose(obs.r1), printed.r1).empty());
  // Remaining mismatches are sign flips of individual coefficients.
  for (auto [ours, ref] : {std::pair{&obs.i1, &printed.i1}, {&obs.r2, &printed.r2}, {&obs.i2, &printed.i2}}) {
    const auto diffs = compare_decompositions(pauli_decompose(*ours), *ref);
    CHECK_FALSE(diffs.empty());
    for (const auto& d : diffs) CHECK(std::abs(d.ours + d.reference) <= 1e-10);
  }
}

TEST_CASE("observables need a qubit shield") {
  CHECK_THROWS_AS(build_observables(TwistingUnitary::identity(3)), Error);
}
