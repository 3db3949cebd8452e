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

#include "pptkey/key.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pptkey/states.hpp"

namespace pptkey {

TwistingUnitary::TwistingUnitary(std::array<Matrix, 4> blocks) : blocks_(std::move(blocks)) {
  const long n = blocks_[0].rows();
  for (const Matrix& b : blocks_) {
    if (b.rows() != n || b.cols() != n) throw Error("twisting blocks must share one square shape");
    if (!is_unitary(b)) throw Error("twisting block is not unitary within 1e-9");
  }
}

int TwistingUnitary::shield_dim() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(blocks_[0].rows()))));
}

Matrix TwistingUnitary::assembled() const {
  const long n = blocks_[0].rows();
  Matrix u = Matrix::Zero(4 * n, 4 * n);
  for (int ab = 0; ab < 4; ++ab) u.block(ab * n, ab * n, n, n) = blocks_[ab];
  return u;
}

TwistingUnitary TwistingUnitary::identity(int d) {
  const Matrix id = Matrix::Identity(d * d, d * d);
  return TwistingUnitary({id, id, id, id});
}

Matrix polar_unitary(const Matrix& x) {
  const long n = x.rows();
  if (x.cols() != n) throw Error("polar_unitary: square input required");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  long r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  const Matrix& w = svd.matrixU();
  const Matrix& y = svd.matrixV();
  Matrix v = w.leftCols(r) * y.leftCols(r).adjoint();
  if (r < n) {
    const Matrix left_null = w.rightCols(n - r) * w.rightCols(n - r).adjoint();
    const Matrix right_null = y.rightCols(n - r) * y.rightCols(n - r).adjoint();
    if (max_abs_diff(left_null, right_null) <= 1e-9) {
      v += right_null;
    } else {
      v += w.rightCols(n - r) * y.rightCols(n - r).adjoint();
    }
  }
  if (!is_unitary(v)) throw Error("polar_unitary: completion is not unitary");
  return v;
}

TwistingUnitary canonical_twisting(const Matrix& x1, const Matrix& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols())
    throw Error("canonical_twisting: X1 and X2 must share a shape");
  if (trace_norm(x1) == 0.0 || trace_norm(x2) == 0.0)
    throw Error("canonical_twisting: X1 and X2 must be nonzero");
  const Matrix id = Matrix::Identity(x1.rows(), x1.cols());
  return TwistingUnitary({polar_unitary(x1).adjoint(), polar_unitary(x2).adjoint(), id, id});
}

TwistingUnitary twisting_from_state(const Matrix& rho, int d) {
  const long n = static_cast<long>(d) * d;
  if (rho.rows() != 4 * n) throw Error("twisting_from_state: state is not on [2,2,d,d]");
  const Matrix a = rho.block(0, 3 * n, n, n);
  const Matrix b = rho.block(n, 2 * n, n, n);
  const Matrix id = Matrix::Identity(n, n);
  // A vanishing coherence block carries no key; leave that branch untwisted.
  const Matrix u00 = trace_norm(a) > 1e-14 ? Matrix(polar_unitary(a).adjoint()) : id;
  const Matrix u01 = trace_norm(b) > 1e-14 ? Matrix(polar_unitary(b).adjoint()) : id;
  return TwistingUnitary({u00, u01, id, id});
}

DensityOperator privacy_squeeze(const DensityOperator& rho, const TwistingUnitary& tau) {
  const auto& dims = rho.dims();
  const int d = tau.shield_dim();
  if (dims.size() != 4 || dims[0] != 2 || dims[1] != 2 || dims[2] != d || dims[3] != d)
    throw Error("privacy_squeeze: state dims must be [2,2,d,d] matching the twisting");
  const Matrix u = tau.assembled();
  const MultipartiteOperator twisted(u * rho.matrix() * u.adjoint(), dims);
  MultipartiteOperator sigma = partial_trace(twisted, {kAp, kBp});
  Matrix m = sigma.data();
  m = 0.5 * (m + m.adjoint());
  return DensityOperator(std::move(m), {2, 2});
}

void CcqState::validate() const {
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (p[k] < -1e-12) throw Error("ccq: negative probability");
    total += p[k];
    if (p[k] > 1e-15) {
      const std::string why = DensityOperator::validate(
          MultipartiteOperator(eve[k], {static_cast<int>(eve[k].rows())}));
      if (!why.empty()) throw Error("ccq: Eve conditional " + why);
    }
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error("ccq: probabilities do not sum to 1");
}

Matrix CcqState::eve_marginal() const {
  Matrix m = Matrix::Zero(eve[0].rows(), eve[0].cols());
  for (int k = 0; k < 4; ++k)
    if (p[k] > 0.0) m += p[k] * eve[k];
  return m;
}

CcqState ccq_from_state(const DensityOperator& rho, EveView view) {
  const auto& dims = rho.dims();
  if (dims.size() < 2 || dims[0] != 2 || dims[1] != 2)
    throw Error("ccq_from_state: first two subsystems must be qubits");
  const long shield = rho.dim() / 4;

  // Purification |Psi> = sum_k sqrt(l_k) |v_k>|k>_E over the support.
  const EigenSystem es = eig_hermitian(rho.matrix());
  const double top = es.values.maxCoeff();
  std::vector<long> support;
  for (long k = 0; k < es.values.size(); ++k)
    if (es.values(k) > 1e-14 * top) support.push_back(k);
  const long r = static_cast<long>(support.size());

  CcqState c;
  for (int ab = 0; ab < 4; ++ab) {
    // M(s, k): amplitude on |ab>|s>_{A'B'}|k>_E.
    Matrix m(shield, r);
    for (long k = 0; k < r; ++k)
      m.col(k) = std::sqrt(es.values(support[k])) *
                 es.vectors.col(support[k]).segment(ab * shield, shield);
    Matrix cond;
    if (view == EveView::kPurification) {
      cond = m.transpose() * m.conjugate();
    } else {
      Vector joint(shield * r);
      for (long s = 0; s < shield; ++s)
        for (long k = 0; k < r; ++k) joint(s * r + k) = m(s, k);
      cond = joint * joint.adjoint();
    }
    const double prob = cond.trace().real();
    c.p[ab] = std::max(prob, 0.0);
    c.eve[ab] = prob > 1e-15 ? Matrix(cond / prob) : Matrix::Zero(cond.rows(), cond.cols());
  }
  c.validate();
  return c;
}

double binary_entropy(double p) {
  const double q[2] = {p, 1.0 - p};
  return shannon_entropy(q);
}

double classical_mutual_information(const std::array<double, 4>& p) {
  const double pa[2] = {p[0] + p[1], p[2] + p[3]};
  const double pb[2] = {p[0] + p[2], p[1] + p[3]};
  return shannon_entropy(pa) + shannon_entropy(pb) - shannon_entropy(p);
}

namespace {

double eve_entropy_given_alice(const CcqState& c) {
  double sum = 0.0;
  for (int a = 0; a < 2; ++a) {
    const double pa = c.p[2 * a] + c.p[2 * a + 1];
    if (pa <= 1e-15) continue;
    Matrix cond = Matrix::Zero(c.eve[0].rows(), c.eve[0].cols());
    for (int b = 0; b < 2; ++b)
      if (c.p[2 * a + b] > 0.0) cond += c.p[2 * a + b] * c.eve[2 * a + b];
    sum += pa * von_neumann_entropy(Matrix(cond / pa));
  }
  return sum;
}

}  // namespace

double dw_rate(const CcqState& c) {
  const double s_e = von_neumann_entropy(c.eve_marginal());
  const double i_ae = s_e - eve_entropy_given_alice(c);
  return classical_mutual_information(c.p) - i_ae;
}

double holevo_rate(const CcqState& c) {
  return classical_mutual_information(c.p) - von_neumann_entropy(c.eve_marginal());
}

double TwirlSpectrum::entropy() const { return shannon_entropy(lambda); }

TwirlSpectrum bell_twirl(const Matrix& sigma_ab) {
  if (sigma_ab.rows() != 4 || sigma_ab.cols() != 4) throw Error("bell_twirl: two-qubit operator required");
  TwirlSpectrum t;
  for (int k = 0; k < 4; ++k) {
    const Vector v = BellBasis::psi(k);
    t.lambda[k] = (v.adjoint() * sigma_ab * v)(0, 0).real();
  }
  return t;
}

SqueezedParameters squeezed_parameters(const Matrix& sigma_ab) {
  if (sigma_ab.rows() != 4 || sigma_ab.cols() != 4)
    throw Error("squeezed_parameters: two-qubit operator required");
  SqueezedParameters s;
  for (int k = 0; k < 4; ++k) s.diag[k] = sigma_ab(k, k).real();
  s.re_a = sigma_ab(0, 3).real();
  s.im_a = sigma_ab(0, 3).imag();
  s.re_b = sigma_ab(1, 2).real();
  s.im_b = sigma_ab(1, 2).imag();
  return s;
}

TwirlSpectrum twirl_from_parameters(const SqueezedParameters& s) {
  const double even = 0.5 * (s.diag[0] + s.diag[3]);
  const double odd = 0.5 * (s.diag[1] + s.diag[2]);
  return TwirlSpectrum{{even + s.re_a, even - s.re_a, odd + s.re_b, odd - s.re_b}};
}

bool has_psd_completion(const SqueezedParameters& s, double slack) {
  for (double d : s.diag)
    if (d < -slack) return false;
  const double a2 = s.re_a * s.re_a + s.im_a * s.im_a;
  const double b2 = s.re_b * s.re_b + s.im_b * s.im_b;
  return a2 <= s.diag[0] * s.diag[3] + slack && b2 <= s.diag[1] * s.diag[2] + slack;
}

std::pair<TwirlSpectrum, double> bell_recurrence(const TwirlSpectrum& t) {
  const auto& l = t.lambda;
  const double even = l[0] + l[1];
  const double odd = l[2] + l[3];
  const double success = even * even + odd * odd;
  if (success <= 0.0) return {t, 0.0};
  TwirlSpectrum out{{(l[0] * l[0] + l[1] * l[1]) / success, 2.0 * l[0] * l[1] / success,
                     (l[2] * l[2] + l[3] * l[3]) / success, 2.0 * l[2] * l[3] / success}};
  return {out, success};
}

CertifiedBounds certified_bounds(const SqueezedParameters& s) {
  double total = 0.0;
  for (double d : s.diag) total += d;
  if (std::abs(total - 1.0) > 1e-9) throw Error("certified_bounds: diagonal must sum to 1");
  if (!has_psd_completion(s)) throw Error("certified_bounds: no PSD state matches the parameters");

  CertifiedBounds out;
  out.twirl = twirl_from_parameters(s);
  const double s_twirl = out.twirl.entropy();
  out.twirl_hashing = 1.0 - s_twirl;
  out.paper_literal = classical_mutual_information(s.diag) - s_twirl;
  const auto [after, success] = bell_recurrence(out.twirl);
  const double after_rate = 1.0 - after.entropy();
  out.two_way_rate = 0.5 * success * after_rate;
  out.two_way_flag = after_rate > 0.0;
  return out;
}

RecurrenceResult recurrence_step(const CcqState& c) {
  c.validate();
  const long r = c.eve[0].rows();
  const long out_dim = 2 * r * r;
  RecurrenceResult res;
  std::array<Matrix, 4> acc;
  for (auto& m : acc) m = Matrix::Zero(out_dim, out_dim);
  std::array<double, 4> mass{};

  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2) {
          if ((a1 ^ a2) != (b1 ^ b2)) continue;
          const int k1 = 2 * a1 + b1;
          const int k2 = 2 * a2 + b2;
          const double w = c.p[k1] * c.p[k2];
          if (w <= 0.0) continue;
          const MultipartiteOperator e1(c.eve[k1], {static_cast<int>(r)});
          const MultipartiteOperator e2(c.eve[k2], {static_cast<int>(r)});
          Matrix parity = Matrix::Zero(2, 2);
          parity(a1 ^ a2, a1 ^ a2) = 1.0;
          const MultipartiteOperator pub(parity, {2});
          acc[k1] += w * tensor({e1, e2, pub}).data();
          mass[k1] += w;
        }

  double accept = 0.0;
  for (double m : mass) accept += m;
  res.acceptance = accept;
  if (accept <= 0.0) throw Error("recurrence_step: acceptance probability is zero");
  for (int k = 0; k < 4; ++k) {
    res.state.p[k] = mass[k] / accept;
    res.state.eve[k] = mass[k] > 0.0 ? Matrix(acc[k] / mass[k]) : Matrix(acc[k]);
  }
  res.error_weight = res.state.p[1] + res.state.p[2];
  res.per_copy_rate = 0.5 * accept * dw_rate(res.state);
  return res;
}

}  // namespace pptkey
