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

#include <cstdint>
#include <random>

#include "pptkey/tensor.hpp"

namespace pptkey {

/// Subsystem indices in the global A,B,A',B' ordering.
enum Subsystem : int { kA = 0, kB = 1, kAp = 2, kBp = 3 };

/// Bell basis on two qubits:
///   psi0,1 = (|00> +- |11>)/sqrt2,   psi2,3 = (|01> +- |10>)/sqrt2.
/// The "tilde" variants carry a relative phase +-i:
///   (|00> +- i|11>)/sqrt2,  (|01> +- i|10>)/sqrt2.
struct BellBasis {
  static Vector psi(int k);
  static Vector tilde(int k);
  static Matrix projector(int k);
  static Matrix tilde_projector(int k);
};

/// W_U = sum_ij u_ij |ij><ji| on C^d (x) C^d. Throws unless U is square and
/// unitary within 1e-9.
MultipartiteOperator wu_operator(const Matrix& u);

/// Sum |u_ij| / d, the bias ratio p1/p2 of the rho_U construction.
double key_ratio(const Matrix& u);

/// Private bit in X-form, dims [2,2,d,d]:
///   gamma = 1/2 [[sqrt(XX^dag),0,0,X],[0,0,0,0],[0,0,0,0],[X^dag,0,0,sqrt(X^dag X)]]
/// Requires ||X||_1 = 1 within 1e-10.
DensityOperator pbit_from_X(const Matrix& x);

/// Two-pbit mixture in standard form. X1 and X2 are rescaled to unit trace
/// norm before assembly.
struct KeyMixture {
  Matrix x1;
  Matrix x2;
  double p1 = 1.0;
  double p2 = 0.0;

  KeyMixture(Matrix x1, Matrix x2, double p1, double p2);
  int shield_dim() const;  // d
};

/// Assembles the standard-form block matrix for weights (q, 1-q) without
/// validating positivity or bias. Used by scans that leave the PPT set.
Matrix assemble_standard_form(const Matrix& x1, const Matrix& x2, double q);

DensityOperator rho_from_mixture(const KeyMixture& m);

struct RhoU {
  DensityOperator rho;
  KeyMixture mixture;  // normalized X1, X2 and the weights
  double p1;
  double p2;
};

/// X1 = W_U/||W_U||, X2 = W_U^Gamma/||W_U^Gamma||, p1 = ||W_U||/(||W_U|| + d).
RhoU rho_u(const Matrix& u);

DensityOperator rho_h();
/// Independent assembly as sum_i q_i |psi_i><psi_i| (x) rho^(i) with the chi
/// states on the shield.
DensityOperator rho_h_mixture_form();

/// One term q_i |psi_i><psi_i|_AB (x) rho^(i)_A'B' of the mixture form.
struct MixtureComponent {
  double weight = 0.0;
  Matrix key;     // 4x4 on AB
  Matrix shield;  // 4x4 on A'B'
};
std::vector<MixtureComponent> rho_h_components();
Vector chi_state(bool plus);

/// p_mix * rho + (1 - p_mix) * I/D.
DensityOperator depolarize(const DensityOperator& rho, double p_mix);

namespace presets {
Matrix hadamard();
Matrix fourier(int d);
Matrix identity(int d);
/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
Matrix random_unitary(int d, std::mt19937_64& rng);
}  // namespace presets

/// Random density operator on dims (Ginibre ensemble, full rank).
DensityOperator random_density(std::vector<int> dims, std::mt19937_64& rng);
/// Random Hermitian matrix with i.i.d. Gaussian entries.
Matrix random_hermitian(long n, std::mt19937_64& rng);

}  // namespace pptkey
