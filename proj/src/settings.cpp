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

#include "pptkey/settings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pptkey {

namespace {

constexpr double kUnitNorm = 1e-12;
constexpr double kRankTol = 1e-9;

int popcount(int m) { return __builtin_popcount(static_cast<unsigned>(m)); }

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Qubits of mask in ascending order.
std::vector<int> members(int mask) {
  std::vector<int> q;
  for (int i = 0; i < kQubits; ++i)
    if (mask >> i & 1) q.push_back(i);
  return q;
}

// Components of the sector of strings supported exactly on `mask`, letters
// X,Y,Z -> 0,1,2 with the lowest qubit most significant.
RealVector sector_of(const RealVector& pauli, int mask) {
  const auto qs = members(mask);
  const int dim = ipow(3, static_cast<int>(qs.size()));
  RealVector out(dim);
  for (int k = 0; k < dim; ++k) {
    std::array<int, kQubits> letters{};
    int rem = k;
    for (int j = static_cast<int>(qs.size()) - 1; j >= 0; --j) {
      letters[qs[j]] = rem % 3 + 1;
      rem /= 3;
    }
    int idx = 0;
    for (int l : letters) idx = idx * 4 + l;
    out(k) = pauli(idx);
  }
  return out;
}

RealVector sector_vector(const CollectiveSetting& s, int mask) {
  RealVector v = RealVector::Ones(1);
  for (int q : members(mask)) {
    RealVector next(v.size() * 3);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      for (int l = 0; l < 3; ++l) next(i * 3 + l) = v(i) * s.directions[q].n(l);
    v = std::move(next);
  }
  return v;
}

int numeric_rank(const Eigen::MatrixXd& r) {
  if (r.cols() == 0) return 0;
  const Eigen::MatrixXd g = r.transpose() * r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  int k = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > kRankTol * kRankTol) ++k;
  return k;
}

struct Sector {
  int mask = 0;
  Eigen::MatrixXd basis;     // orthonormal columns spanned so far
  Eigen::MatrixXd residual;  // targets minus their projection, one column each

  void add(const RealVector& f) {
    RealVector v = f;
    // Two passes of Gram-Schmidt for stability.
    for (int pass = 0; pass < 2; ++pass)
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
    const double nv = v.norm();
    if (nv <= kRankTol) return;
    v /= nv;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    residual -= v * (v.transpose() * residual);
  }
};

class Search {
 public:
  Search(const std::vector<PauliDecomposition>& targets, const CoverOptions& opt) : opt_(opt) {
    for (const auto& d : opt.directions)
      if (std::abs(d.n.norm() - 1.0) > kUnitNorm) throw Error("direction " + d.name + " is not a unit vector");
    std::vector<RealVector> tv;
    for (const auto& t : targets) {
      for (int k = 0; k < kPauliStrings; ++k)
        if (std::abs(t.coeff(k).imag()) > 1e-12) throw Error("min_settings_cover: targets must be Hermitian");
      tv.push_back(t.real_vector());
    }
    for (int mask = 0; mask < kSubsets; ++mask) {
      Eigen::MatrixXd a(ipow(3, popcount(mask)), static_cast<Eigen::Index>(tv.size()));
      for (std::size_t t = 0; t < tv.size(); ++t) a.col(static_cast<Eigen::Index>(t)) = sector_of(tv[t], mask);
      if (a.cwiseAbs().maxCoeff() <= 1e-14) continue;
      Sector s;
      s.mask = mask;
      s.basis.resize(a.rows(), 0);
      s.residual = a;
      root_.push_back(std::move(s));
    }
    const int nd = static_cast<int>(opt.directions.size());
    const int total = ipow(nd, kQubits);
    for (int c = 0; c < total; ++c) {
      std::array<Direction, kQubits> dirs;
      int rem = c;
      for (int q = kQubits - 1; q >= 0; --q) {
        dirs[q] = opt.directions[rem % nd];
        rem /= nd;
      }
      CollectiveSetting s(dirs);
      std::vector<RealVector> vecs;
      for (const auto& sec : root_) vecs.push_back(sector_vector(s, sec.mask));
      cands_.push_back(std::move(s));
      cand_vecs_.push_back(std::move(vecs));
    }
  }

  int candidates() const { return static_cast<int>(cands_.size()); }
  long nodes() const { return nodes_; }

  std::vector<int> product_construction(const std::vector<PauliDecomposition>& targets) const {
    std::vector<int> chosen;
    for (const auto& t : targets)
      for (const auto& [str, c] : t.terms(1e-14)) {
        std::array<const char*, 4> want{"z", "x", "y", "z"};
        const PauliString p = PauliString::parse(str);
        int found = -1;
        for (int i = 0; i < candidates() && found < 0; ++i) {
          bool ok = true;
          for (int q = 0; q < kQubits; ++q)
            if (cands_[i].directions[q].name != want[p.letters[q]]) ok = false;
          if (ok) found = i;
        }
        if (found < 0) return {};
        if (std::find(chosen.begin(), chosen.end(), found) == chosen.end()) chosen.push_back(found);
      }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  std::vector<int> greedy(int limit) const {
    std::vector<Sector> st = root_;
    std::vector<int> chosen;
    while (deficit(st) > 0) {
      if (static_cast<int>(chosen.size()) >= limit) return {};
      int best = -1;
      int best_drop = 0;
      double best_norm = 0.0;
      const int before = total_rank(st);
      for (int i = 0; i < candidates(); ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
        auto trial = st;
        apply(trial, i);
        const int drop = before - total_rank(trial);
        double norm = 0.0;
        for (const auto& s : trial) norm += s.residual.squaredNorm();
        if (best < 0 || drop > best_drop || (drop == best_drop && norm < best_norm - 1e-12)) {
          best = i;
          best_drop = drop;
          best_norm = norm;
        }
      }
      if (best < 0) return {};
      apply(st, best);
      chosen.push_back(best);
    }
    return chosen;
  }

  // Returns 1 if a cover of size <= bound exists (stored in found_), 0 if not,
  // -1 if the node budget ran out.
  int exhaustive(int bound) {
    std::vector<char> excluded(cands_.size(), 0);
    std::vector<int> chosen;
    aborted_ = false;
    const bool ok = dfs(root_, chosen, excluded, bound);
    if (ok) return 1;
    return aborted_ ? -1 : 0;
  }

  const std::vector<int>& found() const { return found_; }
  const CollectiveSetting& candidate(int i) const { return cands_[i]; }
  int lower_bound() const { return deficit(root_); }

 private:
  void apply(std::vector<Sector>& st, int i) const {
    for (std::size_t k = 0; k < st.size(); ++k) st[k].add(cand_vecs_[i][k]);
  }

  static int deficit(const std::vector<Sector>& st) {
    int lb = 0;
    for (const auto& s : st) lb = std::max(lb, numeric_rank(s.residual));
    return lb;
  }

  static int total_rank(const std::vector<Sector>& st) {
    int r = 0;
    for (const auto& s : st) r += numeric_rank(s.residual);
    return r;
  }

  bool dfs(const std::vector<Sector>& st, std::vector<int>& chosen, std::vector<char>& excluded, int bound) {
    if (++nodes_ > opt_.node_budget) {
      aborted_ = true;
      return false;
    }
    int lb = 0;
    int pick = -1;
    for (std::size_t k = 0; k < st.size(); ++k) {
      const int r = numeric_rank(st[k].residual);
      if (r > lb) {
        lb = r;
        pick = static_cast<int>(k);
      }
    }
    if (lb == 0) {
      found_ = chosen;
      return true;
    }
    if (static_cast<int>(chosen.size()) + lb > bound) return false;
    const Eigen::MatrixXd& res = st[pick].residual;
    Eigen::Index col = 0;
    res.colwise().norm().maxCoeff(&col);
    const RealVector r = res.col(col);
    std::vector<int> newly;
    bool ok = false;
    for (int i = 0; i < candidates() && !ok && !aborted_; ++i) {
      if (excluded[i] || std::abs(cand_vecs_[i][pick].dot(r)) <= kRankTol) continue;
      auto next = st;
      apply(next, i);
      chosen.push_back(i);
      ok = dfs(next, chosen, excluded, bound);
      chosen.pop_back();
      excluded[i] = 1;
      newly.push_back(i);
    }
    for (int i : newly) excluded[i] = 0;
    return ok;
  }

  CoverOptions opt_;
  std::vector<Sector> root_;
  std::vector<CollectiveSetting> cands_;
  std::vector<std::vector<RealVector>> cand_vecs_;
  std::vector<int> found_;
  long nodes_ = 0;
  bool aborted_ = false;
};

Eigen::MatrixXd functional_matrix(const std::vector<CollectiveSetting>& settings) {
  Eigen::MatrixXd a(kPauliStrings, static_cast<Eigen::Index>(settings.size()) * kSubsets);
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const auto f = estimable_functionals(settings[s]);
    for (int m = 0; m < kSubsets; ++m) a.col(static_cast<Eigen::Index>(s) * kSubsets + m) = f[m];
  }
  return a;
}

}  // namespace

std::vector<Direction> default_directions() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {{"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}, {"x+y", {r, r, 0}}, {"x-y", {r, -r, 0}}};
}

std::vector<Direction> parse_directions(const std::string& text) {
  const auto known = default_directions();
  std::vector<Direction> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error("empty direction name");
    auto it = std::find_if(known.begin(), known.end(), [&](const Direction& d) { return d.name == item; });
    if (it != known.end()) {
      out.push_back(*it);
      continue;
    }
    Eigen::Vector3d v;
    std::stringstream parts(item);
    std::string p;
    int k = 0;
    try {
      while (std::getline(parts, p, ':')) {
        if (k >= 3) throw Error("too many components");
        v(k++) = std::stod(p);
      }
    } catch (const std::exception&) {
      throw Error("bad direction: " + item);
    }
    if (k != 3 || !(v.norm() > 0.0)) throw Error("bad direction: " + item);
    out.push_back({item, v.normalized()});
  }
  if (out.empty()) throw Error("no directions given");
  return out;
}

CollectiveSetting::CollectiveSetting(std::array<Direction, kQubits> dirs) : directions(std::move(dirs)) {
  for (const auto& d : directions)
    if (std::abs(d.n.norm() - 1.0) > kUnitNorm) throw Error("direction " + d.name + " is not a unit vector");
}

std::string CollectiveSetting::str() const {
  std::string s;
  for (int q = 0; q < kQubits; ++q) s += (q ? "," : "") + directions[q].name;
  return s;
}

Matrix CollectiveSetting::eigenbasis() const {
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& d : directions) {
    const Matrix m = d.n(0) * pauli::X() + d.n(1) * pauli::Y() + d.n(2) * pauli::Z();
    const EigenSystem es = eig_hermitian(m);
    Matrix v(2, 2);
    v.col(0) = es.vectors.col(1);  // +1
    v.col(1) = es.vectors.col(0);  // -1
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(i * 2, j * 2, 2, 2) = out(i, j) * v;
    out = std::move(next);
  }
  return out;
}

std::array<RealVector, kSubsets> estimable_functionals(const CollectiveSetting& s) {
  std::array<RealVector, kSubsets> out;
  for (int mask = 0; mask < kSubsets; ++mask) {
    RealVector v = RealVector::Zero(kPauliStrings);
    const auto qs = members(mask);
    const RealVector sec = sector_vector(s, mask);
    for (Eigen::Index k = 0; k < sec.size(); ++k) {
      std::array<int, kQubits> letters{};
      Eigen::Index rem = k;
      for (int j = static_cast<int>(qs.size()) - 1; j >= 0; --j) {
        letters[qs[j]] = static_cast<int>(rem % 3) + 1;
        rem /= 3;
      }
      int idx = 0;
      for (int l : letters) idx = idx * 4 + l;
      v(idx) = sec(k);
    }
    out[mask] = v;
  }
  return out;
}

std::vector<RealVector> solve_weights(const std::vector<PauliDecomposition>& targets,
                                      const std::vector<CollectiveSetting>& settings,
                                      double* max_residual) {
  const Eigen::MatrixXd a = functional_matrix(settings);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-12);
  std::vector<RealVector> w;
  double worst = 0.0;
  for (const auto& t : targets) {
    const RealVector b = t.real_vector();
    RealVector x = cod.solve(b);
    worst = std::max(worst, (a * x - b).cwiseAbs().maxCoeff());
    w.push_back(std::move(x));
  }
  if (max_residual) *max_residual = worst;
  return w;
}

double verify_scheme(const std::vector<PauliDecomposition>& targets,
                     const std::vector<CollectiveSetting>& settings) {
  if (settings.empty()) {
    double worst = 0.0;
    for (const auto& t : targets) worst = std::max(worst, t.real_vector().cwiseAbs().maxCoeff());
    return worst;
  }
  // Householder QR on the stacked functionals, independent of the search's
  // Gram-Schmidt bookkeeping.
  const Eigen::MatrixXd a = functional_matrix(settings);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  double worst = 0.0;
  for (const auto& t : targets) {
    const RealVector b = t.real_vector();
    const RealVector x = qr.solve(b);
    worst = std::max(worst, (a * x - b).cwiseAbs().maxCoeff());
  }
  return worst;
}

SettingsScheme min_settings_cover(const std::vector<PauliDecomposition>& targets, const CoverOptions& options) {
  if (targets.empty()) throw Error("min_settings_cover: no targets");
  if (options.max_size < 1) throw Error("min_settings_cover: max_size must be positive");
  Search search(targets, options);
  SettingsScheme scheme;
  scheme.candidates = search.candidates();
  if (search.lower_bound() == 0) {
    scheme.feasible = scheme.proven_minimal = true;
    scheme.weights.assign(targets.size(), RealVector());
    return scheme;
  }

  std::vector<int> best = search.product_construction(targets);
  const std::vector<int> g = search.greedy(options.max_size);
  if (!g.empty() && (best.empty() || g.size() < best.size())) best = g;
  int upper = best.empty() ? options.max_size : std::min<int>(options.max_size, static_cast<int>(best.size()) - 1);
  if (!best.empty() && static_cast<int>(best.size()) > options.max_size) best.clear();

  bool complete = true;
  scheme.searched_below = search.lower_bound() - 1;
  for (int bound = std::max(1, search.lower_bound()); bound <= upper; ++bound) {
    const int r = search.exhaustive(bound);
    if (r == 1) {
      best = search.found();
      break;
    }
    if (r == -1) {
      complete = false;
      break;
    }
    scheme.searched_below = bound;
  }
  scheme.nodes = search.nodes();
  if (best.empty()) return scheme;

  for (int i : best) scheme.settings.push_back(search.candidate(i));
  scheme.weights = solve_weights(targets, scheme.settings, &scheme.max_residual);
  scheme.feasible = scheme.max_residual <= 1e-9;
  scheme.proven_minimal = complete;
  return scheme;
}

}  // namespace pptkey
