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

#include "pptkey/observables.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "pptkey/states.hpp"

namespace pptkey {

namespace {

constexpr const char* kLetters = "IXYZ";

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

PauliString PauliString::from_index(int index) {
  if (index < 0 || index >= kPauliStrings) throw Error("Pauli string index out of range");
  PauliString p;
  for (int q = kQubits - 1; q >= 0; --q) {
    p.letters[q] = index % 4;
    index /= 4;
  }
  return p;
}

PauliString PauliString::parse(const std::string& text) {
  if (text.size() != kQubits) throw Error("Pauli string must have four letters: " + text);
  PauliString p;
  for (int q = 0; q < kQubits; ++q) {
    const char* pos = std::strchr(kLetters, text[q]);
    if (pos == nullptr || *pos == '\0') throw Error("bad Pauli letter in " + text);
    p.letters[q] = static_cast<int>(pos - kLetters);
  }
  return p;
}

int PauliString::index() const {
  int idx = 0;
  for (int l : letters) idx = idx * 4 + l;
  return idx;
}

std::string PauliString::str() const {
  std::string s;
  for (int l : letters) s += kLetters[l];
  return s;
}

Matrix PauliString::matrix() const {
  Matrix m = pauli::by_index(letters[0]);
  for (int q = 1; q < kQubits; ++q) m = kron(m, pauli::by_index(letters[q]));
  return m;
}

RealVector PauliDecomposition::real_vector() const {
  RealVector v(kPauliStrings);
  for (int k = 0; k < kPauliStrings; ++k) {
    if (std::abs(coeffs_[k].imag()) > 1e-10) throw Error("decomposition of a non-Hermitian operator");
    v(k) = coeffs_[k].real();
  }
  return v;
}

Matrix PauliDecomposition::reconstruct() const {
  Matrix m = Matrix::Zero(16, 16);
  for (int k = 0; k < kPauliStrings; ++k)
    if (coeffs_[k] != cplx(0.0)) m += coeffs_[k] * PauliString::from_index(k).matrix();
  return m;
}

std::vector<std::pair<std::string, cplx>> PauliDecomposition::terms(double tol) const {
  std::vector<std::pair<std::string, cplx>> out;
  for (int k = 0; k < kPauliStrings; ++k)
    if (std::abs(coeffs_[k]) > tol) out.emplace_back(PauliString::from_index(k).str(), coeffs_[k]);
  return out;
}

std::string PauliDecomposition::str(double tol) const {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [s, c] : terms(tol)) {
    if (!first) os << " ";
    first = false;
    if (std::abs(c.imag()) > tol) {
      os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)" << s;
    } else {
      os << (c.real() < 0 ? "" : "+") << c.real() << "*" << s;
    }
  }
  return first ? std::string("0") : os.str();
}

PauliDecomposition pauli_decompose(const Matrix& op) {
  if (op.rows() != 16 || op.cols() != 16) throw Error("pauli_decompose: four-qubit operator required");
  std::array<cplx, kPauliStrings> c{};
  const Matrix opt = op.transpose();
  for (int k = 0; k < kPauliStrings; ++k) {
    const Matrix p = PauliString::from_index(k).matrix();
    c[k] = p.cwiseProduct(opt).sum() / 16.0;
  }
  return PauliDecomposition(c);
}

PauliDecomposition pauli_decompose(const MultipartiteOperator& op) {
  for (int d : op.dims())
    if (d != 2) throw Error("pauli_decompose: qubit subsystems required");
  return pauli_decompose(op.data());
}

std::vector<CoefficientDifference> compare_decompositions(const PauliDecomposition& ours,
                                                          const PauliDecomposition& reference,
                                                          double tol) {
  std::vector<CoefficientDifference> out;
  for (int k = 0; k < kPauliStrings; ++k) {
    const double a = ours.coeff(k).real();
    const double b = reference.coeff(k).real();
    if (std::abs(a - b) > tol) out.push_back({PauliString::from_index(k).str(), a, b});
  }
  return out;
}

VerificationObservables build_observables(const TwistingUnitary& tau) {
  if (tau.shield_dim() != 2) throw Error("build_observables: four-qubit twisting required");
  const Matrix u = tau.assembled();
  if (!is_unitary(u)) throw Error("build_observables: twisting is not unitary");
  const MultipartiteOperator shield_id = identity({2, 2});
  auto conj = [&](const Matrix& ab) {
    const Matrix lifted = tensor({MultipartiteOperator(ab, {2, 2}), shield_id}).data();
    return Matrix(u.adjoint() * lifted * u);
  };
  VerificationObservables obs;
  const Matrix zz = kron(pauli::Z(), pauli::Z());
  obs.o1 = conj(zz);
  const Matrix plain = tensor({MultipartiteOperator(zz, {2, 2}), shield_id}).data();
  if (max_abs_diff(obs.o1, plain) > 1e-10)
    throw Error("build_observables: twisting does not commute with the key measurement");
  obs.r1 = conj(BellBasis::projector(0) - BellBasis::projector(1));
  obs.r2 = conj(BellBasis::projector(2) - BellBasis::projector(3));
  obs.i1 = conj(BellBasis::tilde_projector(0) - BellBasis::tilde_projector(1));
  obs.i2 = conj(BellBasis::tilde_projector(2) - BellBasis::tilde_projector(3));
  return obs;
}

namespace {

// (sum_k a_k A_k) (x) (sum_l b_l B_l) with two-letter strings on each side.
PauliDecomposition outer(const std::vector<std::pair<std::string, double>>& ab,
                         const std::vector<std::pair<std::string, double>>& shield) {
  PauliDecomposition d;
  for (const auto& [sa, ca] : ab)
    for (const auto& [sb, cb] : shield) d.add(sa + sb, ca * cb);
  return d;
}

}  // namespace

PrintedExpansions printed_expansions() {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::vector<std::pair<std::string, double>> shield1 = {
      {"IZ", 1.0}, {"ZI", 1.0}, {"XX", 1.0}, {"YY", 1.0}};
  const std::vector<std::pair<std::string, double>> shield2 = {
      {"II", 1.0}, {"ZZ", -1.0}, {"IZ", r}, {"ZI", r}, {"XX", r}, {"YY", r}};
  PrintedExpansions p;
  p.r1 = outer({{"XX", 0.25}, {"YY", -0.25}}, shield1);
  p.i1 = outer({{"XY", -0.25}, {"YX", -0.25}}, shield1);
  p.r2 = outer({{"XX", 0.25}, {"YY", 0.25}}, shield2);
  p.i2 = outer({{"YX", -0.25}, {"XY", 0.25}}, shield2);
  return p;
}

double expectation(const Matrix& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols()) throw Error("expectation: shape mismatch");
  const cplx v = (op * rho).trace();
  if (std::abs(v.imag()) > 1e-10) throw Error("expectation: value has an imaginary part");
  return v.real();
}

}  // namespace pptkey
