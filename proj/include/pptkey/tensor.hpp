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

#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pptkey {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised for violated preconditions (bad dimensions, non-Hermitian input,
/// invalid states). Carries a human-readable message only.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr double kEigHermitian = 1e-10;
inline constexpr double kUnitary = 1e-9;
inline constexpr double kTraceNormUnit = 1e-10;
}  // namespace tol

/// Square operator on a tensor product of subsystems. Basis order is the
/// lexicographic order of the subsystem bases, first subsystem most
/// significant. Labels are informational; every partial operation addresses
/// subsystems by index.
class MultipartiteOperator {
 public:
  MultipartiteOperator() = default;
  MultipartiteOperator(Matrix data, std::vector<int> dims,
                       std::vector<std::string> labels = {});

  const Matrix& data() const { return data_; }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Eigen::Index dim() const { return data_.rows(); }
  std::size_t num_subsystems() const { return dims_.size(); }

  cplx operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }

  MultipartiteOperator adjoint() const;
  cplx trace() const { return data_.trace(); }

 private:
  Matrix data_;
  std::vector<int> dims_;
  std::vector<std::string> labels_;
};

/// Default labels for up to four subsystems, in the global A,B,A',B' order.
std::vector<std::string> default_labels(std::size_t n);

MultipartiteOperator operator+(const MultipartiteOperator& a,
                               const MultipartiteOperator& b);
MultipartiteOperator operator-(const MultipartiteOperator& a,
                               const MultipartiteOperator& b);
MultipartiteOperator operator*(const MultipartiteOperator& a,
                               const MultipartiteOperator& b);
MultipartiteOperator operator*(double s, const MultipartiteOperator& a);
MultipartiteOperator operator*(cplx s, const MultipartiteOperator& a);

/// Max elementwise |a - b|. Throws on shape mismatch.
double max_abs_diff(const MultipartiteOperator& a, const MultipartiteOperator& b);
double max_abs_diff(const Matrix& a, const Matrix& b);

// --- construction helpers -------------------------------------------------

MultipartiteOperator identity(std::vector<int> dims);
MultipartiteOperator projector(const Vector& psi, std::vector<int> dims);
/// Computational basis ket |digits> on the given dims.
Vector basis_ket(std::span<const int> digits, std::span<const int> dims);
Vector basis_ket(std::initializer_list<int> digits,
                 std::initializer_list<int> dims);

namespace pauli {
Matrix I();
Matrix X();
Matrix Y();
Matrix Z();
/// 0..3 -> I,X,Y,Z
Matrix by_index(int k);
}  // namespace pauli

// --- algebra ----------------------------------------------------------------

/// Kronecker product in operand order; dims are concatenated.
MultipartiteOperator tensor(std::span<const MultipartiteOperator> ops);
MultipartiteOperator tensor(std::initializer_list<MultipartiteOperator> ops);

/// Traces out the subsystems listed in `discard`.
MultipartiteOperator partial_trace(const MultipartiteOperator& op,
                                   std::span<const int> discard);
MultipartiteOperator partial_trace(const MultipartiteOperator& op,
                                   std::initializer_list<int> discard);

/// Transposes the listed subsystems. Involutive and bit-exact (pure index
/// permutation).
MultipartiteOperator partial_transpose(const MultipartiteOperator& op,
                                       std::span<const int> subset);
MultipartiteOperator partial_transpose(const MultipartiteOperator& op,
                                       std::initializer_list<int> subset);

/// Reorders subsystems: result subsystem k is input subsystem order[k].
MultipartiteOperator permute_subsystems(const MultipartiteOperator& op,
                                        std::span<const int> order);

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns orthonormal
};

/// Hermitian eigendecomposition. Throws if max|M - M^dag| > 1e-10.
EigenSystem eig_hermitian(const Matrix& m);
EigenSystem eig_hermitian(const MultipartiteOperator& op);

double hermiticity_defect(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = tol::kHermitian);

double trace_norm(const Matrix& m);
double trace_norm(const MultipartiteOperator& op);

/// Hermitian functional calculus: V f(Lambda) V^dag.
template <class F>
Matrix apply_hermitian(const EigenSystem& es, F&& f) {
  RealVector fv = es.values.unaryExpr(f);
  return es.vectors * fv.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

/// PSD square root. Eigenvalues in [-1e-10, 0) are clamped to zero; anything
/// more negative throws.
Matrix matrix_sqrt_psd(const Matrix& m);
MultipartiteOperator matrix_sqrt_psd(const MultipartiteOperator& op);

/// Base-2 matrix logarithm restricted to the support; eigenvalues <= floor
/// are mapped to log2(floor) when `floor` > 0, otherwise rejected.
Matrix matrix_log2_pd(const Matrix& m);

bool is_unitary(const Matrix& u, double tol = tol::kUnitary);

// --- states ----------------------------------------------------------------

/// Validated density operator: Hermitian (1e-12), unit trace (1e-12),
/// lambda_min >= -1e-10.
class DensityOperator {
 public:
  explicit DensityOperator(MultipartiteOperator op);
  DensityOperator(Matrix m, std::vector<int> dims);

  const MultipartiteOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.data(); }
  const std::vector<int>& dims() const { return op_.dims(); }
  Eigen::Index dim() const { return op_.dim(); }

  /// Checks the invariants and returns a descriptive reason on failure.
  static std::string validate(const MultipartiteOperator& op);

 private:
  MultipartiteOperator op_;
};

/// Shannon entropy in bits of a probability vector (0 log 0 = 0; entries in
/// [-1e-10, 0) clamped).
double shannon_entropy(std::span<const double> p);
double entropy_of_spectrum(const RealVector& eigenvalues);

/// von Neumann entropy in bits.
double von_neumann_entropy(const DensityOperator& rho);
/// Same, for a matrix already known to be a state (skips full validation but
/// still enforces the PSD window).
double von_neumann_entropy(const Matrix& rho);

double lambda_min(const Matrix& m);

}  // namespace pptkey
