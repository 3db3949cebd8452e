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

#include "pptkey/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pptkey {

namespace {

long product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1L,
                         [](long a, int b) { return a * b; });
}

void check_indices(std::span<const int> idx, std::size_t n, const char* what) {
  std::vector<bool> seen(n, false);
  for (int k : idx) {
    if (k < 0 || static_cast<std::size_t>(k) >= n) {
      std::ostringstream os;
      os << what << ": subsystem index " << k << " out of range [0," << n << ")";
      throw Error(os.str());
    }
    if (seen[k]) throw Error(std::string(what) + ": repeated subsystem index");
    seen[k] = true;
  }
}

// Mixed-radix digits of `index`, first subsystem most significant.
void to_digits(long index, std::span<const int> dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % dims[k]);
    index /= dims[k];
  }
}

long from_digits(std::span<const int> digits, std::span<const int> dims) {
  long index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

}  // namespace

std::vector<std::string> default_labels(std::size_t n) {
  static const char* kNames[] = {"A", "B", "A'", "B'"};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k)
    out.emplace_back(k < 4 ? kNames[k] : "S" + std::to_string(k));
  return out;
}

MultipartiteOperator::MultipartiteOperator(Matrix data, std::vector<int> dims,
                                           std::vector<std::string> labels)
    : data_(std::move(data)), dims_(std::move(dims)), labels_(std::move(labels)) {
  if (data_.rows() != data_.cols()) throw Error("operator must be square");
  if (dims_.empty()) throw Error("operator needs at least one subsystem");
  for (int d : dims_)
    if (d < 1) throw Error("subsystem dimensions must be positive");
  if (product(dims_) != data_.rows()) {
    std::ostringstream os;
    os << "matrix dimension " << data_.rows()
       << " does not match product of subsystem dims " << product(dims_);
    throw Error(os.str());
  }
  if (labels_.empty()) labels_ = default_labels(dims_.size());
  if (labels_.size() != dims_.size()) throw Error("one label per subsystem required");
}

MultipartiteOperator MultipartiteOperator::adjoint() const {
  return {data_.adjoint(), dims_, labels_};
}

namespace {
void require_same_shape(const MultipartiteOperator& a, const MultipartiteOperator& b) {
  if (a.dims() != b.dims()) throw Error("operand subsystem dims differ");
}
}  // namespace

MultipartiteOperator operator+(const MultipartiteOperator& a,
                               const MultipartiteOperator& b) {
  require_same_shape(a, b);
  return {a.data() + b.data(), a.dims(), a.labels()};
}

MultipartiteOperator operator-(const MultipartiteOperator& a,
                               const MultipartiteOperator& b) {
  require_same_shape(a, b);
  return {a.data() - b.data(), a.dims(), a.labels()};
}

MultipartiteOperator operator*(const MultipartiteOperator& a,
                               const MultipartiteOperator& b) {
  require_same_shape(a, b);
  return {a.data() * b.data(), a.dims(), a.labels()};
}

MultipartiteOperator operator*(double s, const MultipartiteOperator& a) {
  return {s * a.data(), a.dims(), a.labels()};
}

MultipartiteOperator operator*(cplx s, const MultipartiteOperator& a) {
  return {s * a.data(), a.dims(), a.labels()};
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const MultipartiteOperator& a, const MultipartiteOperator& b) {
  return max_abs_diff(a.data(), b.data());
}

MultipartiteOperator identity(std::vector<int> dims) {
  const long n = product(dims);
  return {Matrix::Identity(n, n), std::move(dims)};
}

MultipartiteOperator projector(const Vector& psi, std::vector<int> dims) {
  return {psi * psi.adjoint(), std::move(dims)};
}

Vector basis_ket(std::span<const int> digits, std::span<const int> dims) {
  if (digits.size() != dims.size()) throw Error("basis_ket: digit count mismatch");
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (digits[k] < 0 || digits[k] >= dims[k]) throw Error("basis_ket: digit out of range");
  Vector v = Vector::Zero(product(dims));
  v(from_digits(digits, dims)) = 1.0;
  return v;
}

Vector basis_ket(std::initializer_list<int> digits, std::initializer_list<int> dims) {
  return basis_ket(std::span<const int>(digits.begin(), digits.size()),
                   std::span<const int>(dims.begin(), dims.size()));
}

namespace pauli {
Matrix I() { return Matrix::Identity(2, 2); }
Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix Y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix by_index(int k) {
  switch (k) {
    case 0: return I();
    case 1: return X();
    case 2: return Y();
    case 3: return Z();
  }
  throw Error("pauli index must be 0..3");
}
}  // namespace pauli

MultipartiteOperator tensor(std::span<const MultipartiteOperator> ops) {
  if (ops.empty()) throw Error("tensor: empty operand list");
  Matrix acc = ops[0].data();
  std::vector<int> dims = ops[0].dims();
  std::vector<std::string> labels = ops[0].labels();
  for (std::size_t k = 1; k < ops.size(); ++k) {
    const Matrix& b = ops[k].data();
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
    acc = std::move(next);
    dims.insert(dims.end(), ops[k].dims().begin(), ops[k].dims().end());
    labels.insert(labels.end(), ops[k].labels().begin(), ops[k].labels().end());
  }
  // Concatenated default labels collide (A,A,...); renumber them.
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    labels = default_labels(dims.size());
  return {std::move(acc), std::move(dims), std::move(labels)};
}

MultipartiteOperator tensor(std::initializer_list<MultipartiteOperator> ops) {
  return tensor(std::span<const MultipartiteOperator>(ops.begin(), ops.size()));
}

MultipartiteOperator partial_trace(const MultipartiteOperator& op,
                                   std::span<const int> discard) {
  const auto& dims = op.dims();
  check_indices(discard, dims.size(), "partial_trace");
  std::vector<bool> drop(dims.size(), false);
  for (int k : discard) drop[k] = true;

  std::vector<int> kept_dims, gone_dims;
  std::vector<std::string> kept_labels;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (drop[k]) {
      gone_dims.push_back(dims[k]);
    } else {
      kept_dims.push_back(dims[k]);
      kept_labels.push_back(op.labels()[k]);
    }
  }
  if (kept_dims.empty()) {
    // Tracing out everything leaves a 1x1 scalar on a trivial subsystem.
    Matrix s(1, 1);
    s(0, 0) = op.trace();
    return {s, {1}, {"1"}};
  }

  const long nk = product(kept_dims);
  const long ng = product(gone_dims);
  Matrix out = Matrix::Zero(nk, nk);
  std::vector<int> rk, ck, g, full(dims.size());
  auto assemble = [&](const std::vector<int>& kept, const std::vector<int>& gone) {
    std::size_t ik = 0, ig = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) full[k] = drop[k] ? gone[ig++] : kept[ik++];
    return from_digits(full, dims);
  };
  for (long r = 0; r < nk; ++r) {
    to_digits(r, kept_dims, rk);
    for (long c = 0; c < nk; ++c) {
      to_digits(c, kept_dims, ck);
      cplx sum = 0.0;
      for (long t = 0; t < ng; ++t) {
        to_digits(t, gone_dims, g);
        sum += op.data()(assemble(rk, g), assemble(ck, g));
      }
      out(r, c) = sum;
    }
  }
  return {std::move(out), std::move(kept_dims), std::move(kept_labels)};
}

MultipartiteOperator partial_trace(const MultipartiteOperator& op,
                                   std::initializer_list<int> discard) {
  return partial_trace(op, std::span<const int>(discard.begin(), discard.size()));
}

MultipartiteOperator partial_transpose(const MultipartiteOperator& op,
                                       std::span<const int> subset) {
  const auto& dims = op.dims();
  check_indices(subset, dims.size(), "partial_transpose");
  const long n = op.dim();
  Matrix out(n, n);
  std::vector<int> rd, cd;
  for (long r = 0; r < n; ++r) {
    to_digits(r, dims, rd);
    for (long c = 0; c < n; ++c) {
      to_digits(c, dims, cd);
      std::vector<int> r2 = rd, c2 = cd;
      for (int k : subset) std::swap(r2[k], c2[k]);
      out(from_digits(r2, dims), from_digits(c2, dims)) = op.data()(r, c);
    }
  }
  return {std::move(out), dims, op.labels()};
}

MultipartiteOperator partial_transpose(const MultipartiteOperator& op,
                                       std::initializer_list<int> subset) {
  return partial_transpose(op, std::span<const int>(subset.begin(), subset.size()));
}

MultipartiteOperator permute_subsystems(const MultipartiteOperator& op,
                                        std::span<const int> order) {
  const auto& dims = op.dims();
  if (order.size() != dims.size()) throw Error("permute_subsystems: wrong order length");
  check_indices(order, dims.size(), "permute_subsystems");
  std::vector<int> new_dims(dims.size());
  std::vector<std::string> new_labels(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    new_dims[k] = dims[order[k]];
    new_labels[k] = op.labels()[order[k]];
  }
  const long n = op.dim();
  std::vector<long> map(n);
  std::vector<int> d, nd(dims.size());
  for (long i = 0; i < n; ++i) {
    to_digits(i, dims, d);
    for (std::size_t k = 0; k < dims.size(); ++k) nd[k] = d[order[k]];
    map[i] = from_digits(nd, new_dims);
  }
  Matrix out(n, n);
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c) out(map[r], map[c]) = op.data()(r, c);
  return {std::move(out), std::move(new_dims), std::move(new_labels)};
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("hermiticity check needs a square matrix");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) { return hermiticity_defect(m) <= tol; }

EigenSystem eig_hermitian(const Matrix& m) {
  const double defect = hermiticity_defect(m);
  if (defect > tol::kEigHermitian) {
    std::ostringstream os;
    os << "eig_hermitian: input not Hermitian (defect " << defect << ")";
    throw Error(os.str());
  }
  // Symmetrize so the solver sees an exactly Hermitian matrix.
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error("eig_hermitian: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem eig_hermitian(const MultipartiteOperator& op) { return eig_hermitian(op.data()); }

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_norm(const MultipartiteOperator& op) { return trace_norm(op.data()); }

namespace {
double clamp_psd(double x) {
  if (x < -tol::kPsdSlack) {
    std::ostringstream os;
    os << "eigenvalue " << x << " below PSD tolerance";
    throw Error(os.str());
  }
  return x < 0.0 ? 0.0 : x;
}
}  // namespace

Matrix matrix_sqrt_psd(const Matrix& m) {
  const EigenSystem es = eig_hermitian(m);
  return apply_hermitian(es, [](double x) { return std::sqrt(clamp_psd(x)); });
}

MultipartiteOperator matrix_sqrt_psd(const MultipartiteOperator& op) {
  return {matrix_sqrt_psd(op.data()), op.dims(), op.labels()};
}

Matrix matrix_log2_pd(const Matrix& m) {
  const EigenSystem es = eig_hermitian(m);
  if (es.values.size() > 0 && es.values.minCoeff() <= 0.0)
    throw Error("matrix_log2_pd: matrix not positive definite");
  return apply_hermitian(es, [](double x) { return std::log2(x); });
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs_diff(u.adjoint() * u, Matrix::Identity(u.rows(), u.cols())) <= tol;
}

double lambda_min(const Matrix& m) {
  const EigenSystem es = eig_hermitian(m);
  return es.values(0);
}

std::string DensityOperator::validate(const MultipartiteOperator& op) {
  std::ostringstream os;
  const double herm = hermiticity_defect(op.data());
  if (herm > tol::kHermitian) {
    os << "not Hermitian (defect " << herm << ")";
    return os.str();
  }
  const double tr = std::abs(op.trace() - 1.0);
  if (tr > tol::kTrace) {
    os << "trace differs from 1 by " << tr;
    return os.str();
  }
  const double lmin = lambda_min(op.data());
  if (lmin < -tol::kPsdSlack) {
    os << "not positive semidefinite (lambda_min " << lmin << ")";
    return os.str();
  }
  return {};
}

DensityOperator::DensityOperator(MultipartiteOperator op) : op_(std::move(op)) {
  if (auto why = validate(op_); !why.empty()) throw Error("invalid density operator: " + why);
}

DensityOperator::DensityOperator(Matrix m, std::vector<int> dims)
    : DensityOperator(MultipartiteOperator(std::move(m), std::move(dims))) {}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    x = clamp_psd(x);
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

double entropy_of_spectrum(const RealVector& eigenvalues) {
  return shannon_entropy(std::span<const double>(eigenvalues.data(), eigenvalues.size()));
}

double von_neumann_entropy(const Matrix& rho) {
  return entropy_of_spectrum(eig_hermitian(rho).values);
}

double von_neumann_entropy(const DensityOperator& rho) {
  return von_neumann_entropy(rho.matrix());
}

}  // namespace pptkey
