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

#include "pptkey/tensor.hpp"

namespace pptkey {

/// Unitary controlled by the AB computational basis:
///   U_tau = sum_ij |ij><ij|_AB (x) U^{ij}_{A'B'}.
/// Blocks are indexed 00, 01, 10, 11.
class TwistingUnitary {
 public:
  explicit TwistingUnitary(std::array<Matrix, 4> blocks);

  const Matrix& block(int ab) const { return blocks_.at(ab); }
  int shield_dim() const;
  /// Full operator on [2,2,d,d].
  Matrix assembled() const;

  static TwistingUnitary identity(int d);

 private:
  std::array<Matrix, 4> blocks_;
};

/// Unitary V with X = V |X|. Directions in the kernel of X are completed with
/// the identity when ker X = ker X^dag, otherwise by pairing the two kernels.
Matrix polar_unitary(const Matrix& x);

/// U^{10} = U^{11} = I, U^{00} = V1^dag, U^{01} = V2^dag, where Vk is the
/// polar unitary of Xk. Afterwards U^{00} X1 and U^{01} X2 are PSD.
TwistingUnitary canonical_twisting(const Matrix& x1, const Matrix& x2);

/// Canonical twisting read off a standard-form state: X1 from the (00,11)
/// block and X2 from the (01,10) block.
TwistingUnitary twisting_from_state(const Matrix& rho, int d);

/// sigma_AB = Tr_{A'B'} U_tau rho U_tau^dag.
DensityOperator privacy_squeeze(const DensityOperator& rho, const TwistingUnitary& tau);

/// What Eve holds when the AB key bits are measured.
enum class EveView {
  kPurification,           // the purifying system of the full state only
  kPurificationAndShield,  // purifying system plus the A'B' shield
};

/// Classical-classical-quantum state: outcome distribution p over AB in
/// {00,01,10,11} and Eve's normalized conditional states (zero matrix when the
/// outcome has probability zero).
struct CcqState {
  std::array<double, 4> p{};
  std::array<Matrix, 4> eve;

  void validate() const;
  Matrix eve_marginal() const;
};

CcqState ccq_from_state(const DensityOperator& rho, EveView view);

double binary_entropy(double p);
double classical_mutual_information(const std::array<double, 4>& p);

/// I(A:B) - I(A:E), with I(A:E) the Holevo quantity of Alice's ensemble.
double dw_rate(const CcqState& c);
/// I(A:B) - S(E).
double holevo_rate(const CcqState& c);

struct TwirlSpectrum {
  std::array<double, 4> lambda{};
  double entropy() const;
};

/// Bell-basis weights lambda_i = <psi_i|sigma|psi_i>.
TwirlSpectrum bell_twirl(const Matrix& sigma_ab);

/// Diagonal (00,01,10,11) and antidiagonal entries of a two-qubit state:
/// a = <00|sigma|11>, b = <01|sigma|10>.
struct SqueezedParameters {
  std::array<double, 4> diag{};
  double re_a = 0.0;
  double im_a = 0.0;
  double re_b = 0.0;
  double im_b = 0.0;
};

SqueezedParameters squeezed_parameters(const Matrix& sigma_ab);
TwirlSpectrum twirl_from_parameters(const SqueezedParameters& s);
/// True when some PSD two-qubit state has exactly these entries.
bool has_psd_completion(const SqueezedParameters& s, double slack = 1e-10);

struct CertifiedBounds {
  TwirlSpectrum twirl;
  double twirl_hashing = 0.0;  // 1 - S(lambda)
  double paper_literal = 0.0;  // I_cl(A:B) - S(lambda)
  double two_way_rate = 0.0;   // per-copy hashing rate after one recurrence step
  bool two_way_flag = false;   // hashing bound positive after one recurrence step
};

CertifiedBounds certified_bounds(const SqueezedParameters& s);

/// One recurrence step on a Bell-diagonal spectrum (bilateral CNOT,
/// post-select on agreeing target parities). Returns new spectrum and the
/// success probability.
std::pair<TwirlSpectrum, double> bell_recurrence(const TwirlSpectrum& t);

struct RecurrenceResult {
  CcqState state;
  double acceptance = 0.0;
  double error_weight = 0.0;  // P(a != b) after the step
  double per_copy_rate = 0.0;
};

/// Two-copy advantage distillation: Alice and Bob announce the XOR of their
/// bits, keep the first pair iff the XORs agree. Eve additionally learns the
/// announced parity.
RecurrenceResult recurrence_step(const CcqState& c);

}  // namespace pptkey
