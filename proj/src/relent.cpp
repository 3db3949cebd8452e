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

// Relative entropy of entanglement upper bound by pairwise Frank-Wolfe over
// explicit mixtures of pure product states. The objective -Tr rho log sigma is
// convex in sigma; the linear subproblem (best product state for the current
// gradient) is solved by alternating top-eigenvector updates with restarts.

#include "pptkey/relent.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace pptkey {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long product(const std::vector<int>& dims, const std::vector<int>& parts) {
  long n = 1;
  for (int k : parts) n *= dims[k];
  return n;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<int> inverse(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return inv;
}

// -Tr rho log2 sigma, +inf if the support condition fails.
double cross_entropy(const Matrix& rho, const Matrix& sigma) {
  const EigenSystem es = eig_hermitian(sigma);
  const double top = std::max(es.values.maxCoeff(), 0.0);
  const double cutoff = 1e-13 * std::max(top, 1e-300);
  double value = 0.0;
  double outside = 0.0;
  for (long k = 0; k < es.values.size(); ++k) {
    const Vector v = es.vectors.col(k);
    const double w = (v.adjoint() * rho * v)(0, 0).real();
    if (es.values(k) > cutoff) {
      value -= w * std::log2(es.values(k));
    } else {
      outside += w;
    }
  }
  if (outside > 1e-10) return kInf;
  return value;
}

// Frechet derivative of Tr rho log2 sigma with respect to sigma.
Matrix log_gradient(const Matrix& rho, const Matrix& sigma) {
  const EigenSystem es = eig_hermitian(sigma);
  const long n = es.values.size();
  const Matrix rt = es.vectors.adjoint() * rho * es.vectors;
  Matrix k(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const double li = std::max(es.values(i), 1e-300);
      const double lj = std::max(es.values(j), 1e-300);
      const double diff = li - lj;
      const double q = std::abs(diff) <= 1e-12 * std::max(li, lj)
                           ? 1.0 / li
                           : (std::log(li) - std::log(lj)) / diff;
      k(i, j) = rt(i, j) * q;
    }
  }
  return es.vectors * k * es.vectors.adjoint() / std::numbers::ln2;
}

struct Atom {
  Vector a;
  Vector b;
  double weight;
};

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix product_projector(const Vector& a, const Vector& b) {
  const Vector ab = kron(a, b);
  return ab * ab.adjoint();
}

// <a (x) b| G |a (x) b>
double product_expectation(const Matrix& g, const Vector& a, const Vector& b) {
  const Vector ab = kron(a, b);
  return (ab.adjoint() * g * ab)(0, 0).real();
}

class ProductSearch {
 public:
  ProductSearch(long na, long nb, int restarts, std::mt19937_64& rng)
      : na_(na), nb_(nb), restarts_(restarts), rng_(rng) {}

  // Maximizes <a (x) b|G|a (x) b> starting from each seed plus random restarts.
  std::pair<Vector, Vector> best(const Matrix& g, const std::vector<Vector>& warm_bobs,
                                 double* value) {
    double best_val = -kInf;
    Vector best_a, best_b;
    auto consider = [&](Vector b) {
      Vector a;
      double val = -kInf;
      for (int it = 0; it < 200; ++it) {
        a = top_vector(contract_bob(g, b));
        const EigenSystem eb = eig_hermitian(contract_alice(g, a));
        b = eb.vectors.col(nb_ - 1);
        const double next = eb.values(nb_ - 1);
        const bool done = next - val < 1e-13 * std::max(1.0, std::abs(next));
        val = next;
        if (done) break;
      }
      if (val > best_val) {
        best_val = val;
        best_a = a;
        best_b = b;
      }
    };
    for (const Vector& b : warm_bobs) consider(b);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int r = 0; r < restarts_; ++r) {
      Vector b(nb_);
      for (long j = 0; j < nb_; ++j) b(j) = cplx(n01(rng_), n01(rng_));
      consider(b.normalized());
    }
    *value = best_val;
    return {best_a, best_b};
  }

 private:
  static Vector top_vector(const Matrix& m) {
    const EigenSystem es = eig_hermitian(m);
    return es.vectors.col(es.values.size() - 1);
  }

  // G_A = (I (x) <b|) G (I (x) |b>)
  Matrix contract_bob(const Matrix& g, const Vector& b) const {
    Matrix out(na_, na_);
    for (long i = 0; i < na_; ++i)
      for (long k = 0; k < na_; ++k)
        out(i, k) = (b.adjoint() * g.block(i * nb_, k * nb_, nb_, nb_) * b)(0, 0);
    return 0.5 * (out + out.adjoint());
  }

  // G_B = (<a| (x) I) G (|a> (x) I)
  Matrix contract_alice(const Matrix& g, const Vector& a) const {
    Matrix out = Matrix::Zero(nb_, nb_);
    for (long i = 0; i < na_; ++i)
      for (long k = 0; k < na_; ++k) {
        const cplx c = std::conj(a(i)) * a(k);
        if (c != cplx(0.0)) out += c * g.block(i * nb_, k * nb_, nb_, nb_);
      }
    return 0.5 * (out + out.adjoint());
  }

  long na_, nb_;
  int restarts_;
  std::mt19937_64& rng_;
};

// Minimizes a convex function on [0, hi] by golden-section search.
template <class F>
double golden_minimize(F&& f, double hi, double* fmin) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double x = f1 <= f2 ? x1 : x2;
  *fmin = std::min(f1, f2);
  return x;
}

}  // namespace

double rel_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error("rel_entropy: shape mismatch");
  const double cross = cross_entropy(rho, sigma);
  if (cross == kInf) return kInf;
  return cross - von_neumann_entropy(rho);
}

Matrix SeparableWitness::assemble() const {
  const std::vector<int> order = concat(alice_parts, bob_parts);
  std::vector<int> permuted_dims;
  for (int k : order) permuted_dims.push_back(dims[k]);
  const long n = product(dims, order);
  Matrix s = Matrix::Zero(n, n);
  for (const ProductTerm& t : terms) s += t.weight * product_projector(t.alice, t.bob);
  const MultipartiteOperator op(std::move(s), permuted_dims);
  return permute_subsystems(op, inverse(order)).data();
}

bool SeparableWitness::certified(double tol) const {
  double total = 0.0;
  for (const ProductTerm& t : terms) {
    if (t.weight < 0.0) return false;
    total += t.weight;
    if (std::abs(t.alice.norm() - 1.0) > tol || std::abs(t.bob.norm() - 1.0) > tol) return false;
  }
  return std::abs(total - 1.0) <= tol;
}

ErResult er_upper_bound(const DensityOperator& rho, const ErOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  ErResult result;
  SeparableWitness& wit = result.witness;
  wit.dims = rho.dims();
  if (wit.dims.size() == 2) {
    wit.alice_parts = {0};
    wit.bob_parts = {1};
  } else if (wit.dims.size() == 4) {
    wit.alice_parts = {0, 2};
    wit.bob_parts = {1, 3};
  } else {
    throw Error("er_upper_bound: expected a state on [A,B] or [A,B,A',B']");
  }
  const std::vector<int> order = concat(wit.alice_parts, wit.bob_parts);
  const long na = product(wit.dims, wit.alice_parts);
  const long nb = product(wit.dims, wit.bob_parts);
  const Matrix r = permute_subsystems(rho.op(), order).data();

  // Start from product basis states weighted by the diagonal of rho plus a
  // uniform floor, which keeps sigma full rank.
  std::vector<Atom> atoms;
  const long n = na * nb;
  for (long i = 0; i < na; ++i)
    for (long j = 0; j < nb; ++j) {
      const double w = 0.9 * r(i * nb + j, i * nb + j).real() + 0.1 / static_cast<double>(n);
      atoms.push_back({Vector::Unit(na, i), Vector::Unit(nb, j), w});
    }
  Matrix sigma = Matrix::Zero(n, n);
  for (const Atom& at : atoms) sigma += at.weight * product_projector(at.a, at.b);

  std::mt19937_64 rng(options.seed);
  ProductSearch search(na, nb, options.restarts, rng);
  double f = cross_entropy(r, sigma);
  std::vector<double> history{f};
  Vector last_b = Vector::Unit(nb, 0);

  for (long it = 0; it < options.max_iterations; ++it) {
    if (elapsed() > options.budget_seconds) break;
    const Matrix g = log_gradient(r, sigma);

    // Linear subproblem, warm-started from the last solution and heavy atoms.
    std::vector<Vector> warm{last_b};
    std::size_t heavy = 0;
    for (std::size_t k = 1; k < atoms.size(); ++k)
      if (atoms[k].weight > atoms[heavy].weight) heavy = k;
    warm.push_back(atoms[heavy].b);
    double g_new = 0.0;
    auto [a_new, b_new] = search.best(g, warm, &g_new);
    last_b = b_new;

    // Away atom: smallest gradient value among the active set.
    std::size_t away = 0;
    double g_away = kInf;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double v = product_expectation(g, atoms[k].a, atoms[k].b);
      if (v < g_away) {
        g_away = v;
        away = k;
      }
    }
    const double g_sigma = (g * sigma).trace().real();
    result.duality_gap = g_new - g_sigma;
    result.iterations = it + 1;
    if (g_new - g_away <= 1e-14) {
      result.converged = true;
      break;
    }

    const Matrix p_new = product_projector(a_new, b_new);
    const Matrix p_away = product_projector(atoms[away].a, atoms[away].b);
    const Matrix dir = p_new - p_away;
    const double t_max = atoms[away].weight;
    double f_next = 0.0;
    const double t = golden_minimize(
        [&](double s) { return cross_entropy(r, sigma + s * dir); }, t_max, &f_next);
    if (!(f_next < f)) {
      // Fall back to a plain Frank-Wolfe step toward the new atom.
      const Matrix dir_fw = p_new - sigma;
      const double t_fw = golden_minimize(
          [&](double s) { return cross_entropy(r, sigma + s * dir_fw); }, 1.0, &f_next);
      if (!(f_next < f)) {
        result.converged = true;
        break;
      }
      for (Atom& at : atoms) at.weight *= (1.0 - t_fw);
      atoms.push_back({a_new, b_new, t_fw});
      sigma += t_fw * dir_fw;
    } else {
      atoms[away].weight -= t;
      atoms.push_back({a_new, b_new, t});
      sigma += t * dir;
    }
    std::erase_if(atoms, [](const Atom& at) { return at.weight <= 1e-15; });
    f = f_next;

    history.push_back(f);
    const std::size_t h = history.size();
    if (h > static_cast<std::size_t>(options.patience) &&
        history[h - 1 - options.patience] - f < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  double total = 0.0;
  for (const Atom& at : atoms) total += at.weight;
  for (const Atom& at : atoms)
    wit.terms.push_back({at.weight / total, at.a.normalized(), at.b.normalized()});
  result.value = rel_entropy(rho.matrix(), wit.assemble());
  result.elapsed_seconds = elapsed();
  return result;
}

}  // namespace pptkey
