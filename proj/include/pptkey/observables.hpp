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

#pragma once

#include <array>
#include <string>
#include <vector>

#include "pptkey/key.hpp"
#include "pptkey/tensor.hpp"

namespace pptkey {

inline constexpr int kQubits = 4;
inline constexpr int kPauliStrings = 256;

/// Four-letter Pauli string over qubits A,B,A',B'. Letter codes 0..3 = I,X,Y,Z.
/// The string index is base 4 with qubit A most significant.
struct PauliString {
  std::array<int, kQubits> letters{};

  static PauliString from_index(int index);
  static PauliString parse(const std::string& text);  // e.g. "XXIZ"
  int index() const;
  std::string str() const;
  Matrix matrix() const;
  bool operator==(const PauliString&) const = default;
};

/// Coefficients c_s with M = sum_s c_s P_s, c_s = Tr(P_s M)/16.
class PauliDecomposition {
 public:
  PauliDecomposition() { coeffs_.fill(0.0); }
  explicit PauliDecomposition(const std::array<cplx, kPauliStrings>& c) : coeffs_(c) {}

  cplx coeff(int index) const { return coeffs_.at(index); }
  cplx coeff(const std::string& s) const { return coeffs_.at(PauliString::parse(s).index()); }
  void set(const std::string& s, cplx value) { coeffs_.at(PauliString::parse(s).index()) = value; }
  void add(const std::string& s, cplx value) { coeffs_.at(PauliString::parse(s).index()) += value; }

  /// Real coefficient vector; throws if any coefficient is complex.
  RealVector real_vector() const;
  Matrix reconstruct() const;
  std::vector<std::pair<std::string, cplx>> terms(double tol = 1e-12) const;
  std::string str(double tol = 1e-12) const;

 private:
  std::array<cplx, kPauliStrings> coeffs_;
};

PauliDecomposition pauli_decompose(const Matrix& op);
PauliDecomposition pauli_decompose(const MultipartiteOperator& op);

struct CoefficientDifference {
  std::string string;
  double ours = 0.0;
  double reference = 0.0;
};

/// Itemized differences |ours - reference| > tol.
std::vector<CoefficientDifference> compare_decompositions(const PauliDecomposition& ours,
                                                          const PauliDecomposition& reference,
                                                          double tol = 1e-10);

struct VerificationObservables {
  Matrix o1, r1, i1, r2, i2;  // on [2,2,2,2]
};

/// O1 = U^dag (ZZ (x) I) U, R_k = U^dag ((P_psi{0,2} - P_psi{1,3}) (x) I) U,
/// I_k with the tilde Bell projectors. Throws if O1 differs from ZZ (x) I by
/// more than 1e-10.
VerificationObservables build_observables(const TwistingUnitary& tau);

/// Expansions of R1, I1, R2, I2 for the Hadamard instance as printed in the
/// construction's original presentation.
struct PrintedExpansions {
  PauliDecomposition r1, i1, r2, i2;
};
PrintedExpansions printed_expansions();

/// Tr(op rho); throws if the imaginary part exceeds 1e-10.
double expectation(const Matrix& op, const Matrix& rho);

}  // namespace pptkey
