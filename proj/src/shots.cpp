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

#include "pptkey/shots.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "pptkey/observables.hpp"

namespace pptkey {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Matrix direction_basis(const Direction& d) {
  const Matrix m = d.n(0) * pauli::X() + d.n(1) * pauli::Y() + d.n(2) * pauli::Z();
  const EigenSystem es = eig_hermitian(m);
  Matrix v(2, 2);
  v.col(0) = es.vectors.col(1);
  v.col(1) = es.vectors.col(0);
  return v;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <std::size_t N>
std::array<double, N> diagonal_in(const Matrix& rho, const Matrix& basis) {
  std::array<double, N> p{};
  for (std::size_t k = 0; k < N; ++k) {
    const auto col = basis.col(static_cast<Eigen::Index>(k));
    p[k] = std::max(0.0, (col.adjoint() * rho * col)(0, 0).real());
  }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return p;
}

// Index into p by inverting a uniform draw against the cumulative sum.
template <std::size_t N>
int draw(const std::array<double, N>& p, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    acc += p[k];
    if (u < acc) return static_cast<int>(k);
  }
  for (std::size_t k = N; k-- > 0;)
    if (p[k] > 0.0) return static_cast<int>(k);
  return 0;
}

double uniform01(CounterRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// Coefficients of each parameter in terms of the seven targets, plus a constant.
struct Linear {
  std::array<double, 7> c{};
  double constant = 0.0;
};

std::array<Linear, kParams> parameter_maps() {
  std::array<Linear, kParams> m{};
  for (int ab = 0; ab < 4; ++ab) {
    const double sa = (ab >> 1) ? -1.0 : 1.0;
    const double sb = (ab & 1) ? -1.0 : 1.0;
    m[ab].constant = 0.25;
    m[ab].c[0] = 0.25 * sa;
    m[ab].c[1] = 0.25 * sb;
    m[ab].c[2] = 0.25 * sa * sb;
  }
  m[kReA].c[3] = 0.5;
  m[kImA].c[4] = -0.5;
  m[kReB].c[5] = 0.5;
  m[kImB].c[6] = -0.5;
  return m;
}

// g(k) for one setting's 16-block of weights w.
std::array<double, kOutcomes> outcome_function(const RealVector& w, std::size_t setting) {
  std::array<double, kOutcomes> g{};
  for (int k = 0; k < kOutcomes; ++k)
    for (int mask = 0; mask < kSubsets; ++mask)
      g[k] += w(static_cast<Eigen::Index>(setting) * kSubsets + mask) * outcome_parity(k, mask);
  return g;
}

struct Frequencies {
  std::vector<std::array<double, kOutcomes>> freq;
  std::vector<double> shots;  // infinity for exact distributions
};

EstimateReport estimate_from(const Frequencies& f, const EstimationScheme& scheme, double delta) {
  if (scheme.weights.size() != 7) throw Error("estimation scheme must carry seven targets");
  const auto maps = parameter_maps();
  EstimateReport rep;
  rep.delta = delta;
  const std::size_t ns = scheme.settings.size();

  for (const auto& w : scheme.weights) {
    double v = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto g = outcome_function(w, s);
      for (int k = 0; k < kOutcomes; ++k) v += f.freq[s][k] * g[k];
    }
    rep.target_estimates.push_back(v);
  }

  const double log_term = delta > 0.0 ? std::log(2.0 * kParams / delta) : 0.0;
  std::array<double, kParams> values{};
  for (int p = 0; p < kParams; ++p) {
    RealVector w = RealVector::Zero(scheme.weights[0].size());
    for (int t = 0; t < 7; ++t) w += maps[p].c[t] * scheme.weights[t];
    values[p] = maps[p].constant;
    double spread = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto g = outcome_function(w, s);
      for (int k = 0; k < kOutcomes; ++k) values[p] += f.freq[s][k] * g[k];
      const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
      const double range = *hi - *lo;
      if (std::isfinite(f.shots[s])) spread += range * range / f.shots[s];
    }
    rep.radii[p] = std::sqrt(log_term / 2.0 * spread);
  }
  for (int ab = 0; ab < 4; ++ab) rep.estimate.diag[ab] = values[ab];
  rep.estimate.re_a = values[kReA];
  rep.estimate.im_a = values[kImA];
  rep.estimate.re_b = values[kReB];
  rep.estimate.im_b = values[kImB];
  return rep;
}

double entropy_of(double s1, double a, double b) {
  const std::array<double, 4> l = {s1 / 2 + a, s1 / 2 - a, (1 - s1) / 2 + b, (1 - s1) / 2 - b};
  double h = 0.0;
  for (double x : l)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

// Largest d_lo * d_hi with d_lo + d_hi = s and each in its interval.
double max_product(double s, double l1, double h1, double l2, double h2) {
  const double lo = std::max(l1, s - h2);
  const double hi = std::min(h1, s - l2);
  if (lo > hi + 1e-15) return -1.0;
  const double x = std::clamp(s / 2, lo, hi);
  return x * (s - x);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix64(key_ + 0x9E3779B97F4A7C15ull * counter_++); }

std::string outcome_label(int k) {
  std::string s;
  for (int q = 0; q < kQubits; ++q) s += (k >> (3 - q) & 1) ? "-1" : "+1";
  return s;
}

int parse_outcome(const std::string& label) {
  if (label.size() != 8) return -1;
  int k = 0;
  for (int q = 0; q < kQubits; ++q) {
    const char sign = label[2 * q];
    if (label[2 * q + 1] != '1' || (sign != '+' && sign != '-')) return -1;
    k = k * 2 + (sign == '-' ? 1 : 0);
  }
  return k;
}

int outcome_parity(int k, int mask) {
  int neg = 0;
  for (int q = 0; q < kQubits; ++q)
    if ((mask >> q & 1) && (k >> (3 - q) & 1)) ++neg;
  return neg % 2 ? -1 : 1;
}

void ShotRecord::validate() const {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw Error("shot record has a negative count");
    total += c;
  }
  if (total != shots) throw Error("shot record counts do not sum to shots");
}

bool ShotRecord::operator==(const ShotRecord& o) const {
  return setting_id == o.setting_id && setting.str() == o.setting.str() && counts == o.counts && shots == o.shots;
}

std::array<double, kOutcomes> outcome_probabilities(const Matrix& rho, const CollectiveSetting& s) {
  if (rho.rows() != 16 || rho.cols() != 16) throw Error("outcome_probabilities: four-qubit state required");
  return diagonal_in<kOutcomes>(rho, s.eigenbasis());
}

ShotRecord sample_setting(const DensityOperator& rho, const CollectiveSetting& s, int setting_id,
                          std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw Error("sample_setting: shots must be positive");
  const auto p = outcome_probabilities(rho.matrix(), s);
  CounterRng rng(seed, static_cast<std::uint64_t>(setting_id));
  ShotRecord rec;
  rec.setting_id = setting_id;
  rec.setting = s;
  rec.shots = shots;
  std::int64_t left = shots;
  double mass = 1.0;
  for (int k = 0; k < kOutcomes && left > 0; ++k) {
    if (k == kOutcomes - 1 || mass <= p[k]) {
      rec.counts[k] = left;
      left = 0;
      break;
    }
    const double frac = std::clamp(p[k] / mass, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> bin(left, frac);
    rec.counts[k] = bin(rng);
    left -= rec.counts[k];
    mass -= p[k];
  }
  return rec;
}

ShotRecord sample_setting_prepared(const std::vector<MixtureComponent>& components, double p_mix,
                                   const CollectiveSetting& s, int setting_id, std::int64_t shots,
                                   std::uint64_t seed) {
  if (shots < 1) throw Error("sample_setting_prepared: shots must be positive");
  if (!(p_mix >= 0.0 && p_mix <= 1.0)) throw Error("sample_setting_prepared: p_mix must lie in [0,1]");
  const auto& d = s.directions;
  const Matrix key_basis = kron2(direction_basis(d[0]), direction_basis(d[1]));
  const Matrix shield_basis = kron2(direction_basis(d[2]), direction_basis(d[3]));
  std::vector<std::array<double, 4>> pk, ps;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : components) {
    pk.push_back(diagonal_in<4>(c.key, key_basis));
    ps.push_back(diagonal_in<4>(c.shield, shield_basis));
    acc += p_mix * c.weight;
    cumulative.push_back(acc);
  }
  CounterRng rng(seed, static_cast<std::uint64_t>(setting_id));
  ShotRecord rec;
  rec.setting_id = setting_id;
  rec.setting = s;
  rec.shots = shots;
  for (std::int64_t n = 0; n < shots; ++n) {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    int k;
    if (it == cumulative.end()) {
      k = static_cast<int>(rng() >> 60);  // white noise: uniform over 16 outcomes
    } else {
      const std::size_t c = static_cast<std::size_t>(it - cumulative.begin());
      k = draw(pk[c], uniform01(rng)) * 4 + draw(ps[c], uniform01(rng));
    }
    ++rec.counts[k];
  }
  return rec;
}

std::string EstimationScheme::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& s : settings) feed(s.str() + ";");
  char buf[32];
  for (const auto& t : targets)
    for (int k = 0; k < kPauliStrings; ++k) {
      std::snprintf(buf, sizeof buf, "%.12f,", t.coeff(k).real());
      feed(buf);
    }
  return hex64(h);
}

std::vector<PauliDecomposition> verification_targets(const TwistingUnitary& tau, std::vector<std::string>* names) {
  const VerificationObservables obs = build_observables(tau);
  PauliDecomposition za, zb;
  za.set("ZIII", 1.0);
  zb.set("IZII", 1.0);
  if (names) *names = {"ZIII", "IZII", "O1", "R1", "I1", "R2", "I2"};
  return {za, zb, pauli_decompose(obs.o1), pauli_decompose(obs.r1), pauli_decompose(obs.i1),
          pauli_decompose(obs.r2), pauli_decompose(obs.i2)};
}

EstimationScheme verification_scheme(const TwistingUnitary& tau, const CoverOptions& options) {
  const auto targets = verification_targets(tau);
  const SettingsScheme cover = min_settings_cover(targets, options);
  if (!cover.feasible) throw Error("verification_scheme: no cover within the candidate settings");
  EstimationScheme s = scheme_for_settings(tau, cover.settings);
  s.proven_minimal = cover.proven_minimal;
  return s;
}

EstimationScheme scheme_for_settings(const TwistingUnitary& tau, std::vector<CollectiveSetting> settings) {
  EstimationScheme s;
  s.targets = verification_targets(tau, &s.target_names);
  s.settings = std::move(settings);
  s.weights = solve_weights(s.targets, s.settings, &s.max_residual);
  if (s.max_residual > 1e-9) throw Error("settings do not span the verification targets");
  return s;
}

double EstimateReport::value(int p) const {
  switch (p) {
    case kD00: case kD01: case kD10: case kD11: return estimate.diag[p];
    case kReA: return estimate.re_a;
    case kImA: return estimate.im_a;
    case kReB: return estimate.re_b;
    case kImB: return estimate.im_b;
  }
  throw Error("unknown parameter index");
}

EstimateReport estimate_parameters(const std::vector<ShotRecord>& records, const EstimationScheme& scheme,
                                   double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("estimate_parameters: delta must lie in (0,1)");
  Frequencies f;
  std::int64_t min_shots = std::numeric_limits<std::int64_t>::max();
  for (std::size_t s = 0; s < scheme.settings.size(); ++s) {
    const auto it = std::find_if(records.begin(), records.end(),
                                 [&](const ShotRecord& r) { return r.setting_id == static_cast<int>(s); });
    if (it == records.end() || it->setting.str() != scheme.settings[s].str())
      throw Error("records do not cover setting " + std::to_string(s) + " (" + scheme.settings[s].str() + ")");
    it->validate();
    std::array<double, kOutcomes> fr{};
    for (int k = 0; k < kOutcomes; ++k) fr[k] = static_cast<double>(it->counts[k]) / static_cast<double>(it->shots);
    f.freq.push_back(fr);
    f.shots.push_back(static_cast<double>(it->shots));
    min_shots = std::min(min_shots, it->shots);
  }
  EstimateReport rep = estimate_from(f, scheme, delta);
  rep.min_shots = min_shots;
  return rep;
}

EstimateReport estimate_exact(const std::vector<std::array<double, kOutcomes>>& probabilities,
                              const EstimationScheme& scheme) {
  if (probabilities.size() != scheme.settings.size()) throw Error("estimate_exact: one distribution per setting");
  Frequencies f;
  f.freq = probabilities;
  f.shots.assign(probabilities.size(), std::numeric_limits<double>::infinity());
  return estimate_from(f, scheme, 0.0);
}

double certify(EstimateReport& r) {
  std::array<double, kParams> lo{}, hi{};
  for (int p = 0; p < kParams; ++p) {
    if (!(r.radii[p] >= 0.0)) throw Error("certify: negative radius");
    lo[p] = r.value(p) - r.radii[p];
    hi[p] = r.value(p) + r.radii[p];
  }
  for (int p = kD00; p <= kD11; ++p) {
    lo[p] = std::max(lo[p], 0.0);
    hi[p] = std::min(hi[p], 1.0);
    if (lo[p] > hi[p]) throw InfeasibleError("certify: diagonal interval outside [0,1]");
  }
  auto nearest_zero = [&](int p) { return std::clamp(0.0, lo[p], hi[p]); };
  const double a = std::abs(nearest_zero(kReA));
  const double b = std::abs(nearest_zero(kReB));
  const double a2 = a * a + std::pow(nearest_zero(kImA), 2);
  const double b2 = b * b + std::pow(nearest_zero(kImB), 2);
  constexpr double kSlack = 1e-10;
  auto feasible = [&](double s1) {
    return max_product(s1, lo[kD00], hi[kD00], lo[kD11], hi[kD11]) >= a2 - kSlack &&
           max_product(1.0 - s1, lo[kD01], hi[kD01], lo[kD10], hi[kD10]) >= b2 - kSlack;
  };
  const double s_lo = std::max(lo[kD00] + lo[kD11], 1.0 - hi[kD01] - hi[kD10]);
  const double s_hi = std::min(hi[kD00] + hi[kD11], 1.0 - lo[kD01] - lo[kD10]);
  if (s_lo > s_hi + 1e-12) throw InfeasibleError("certify: no normalized diagonal in the rectangle");

  // Scan, then bracket the feasible interval and golden-section the concave
  // entropy on it.
  constexpr int kGrid = 2000;
  int first = -1, last = -1;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / kGrid;
    if (feasible(s)) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) throw InfeasibleError("certify: the confidence rectangle contains no valid state");
  auto at = [&](int i) { return s_lo + (s_hi - s_lo) * i / kGrid; };
  auto edge = [&](double in, double out) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (in + out);
      (feasible(mid) ? in : out) = mid;
    }
    return in;
  };
  const double f_lo = first > 0 ? edge(at(first), at(first - 1)) : at(first);
  const double f_hi = last < kGrid ? edge(at(last), at(last + 1)) : at(last);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x0 = f_lo, x1 = f_hi;
  double best = std::max(entropy_of(f_lo, a, b), entropy_of(f_hi, a, b));
  for (int i = first; i <= last; ++i) best = std::max(best, entropy_of(at(i), a, b));
  for (int it = 0; it < 200 && x1 - x0 > 1e-15; ++it) {
    const double m1 = x1 - g * (x1 - x0), m2 = x0 + g * (x1 - x0);
    if (entropy_of(m1, a, b) < entropy_of(m2, a, b)) x0 = m1; else x1 = m2;
  }
  best = std::max(best, entropy_of(0.5 * (x0 + x1), a, b));

  TwirlSpectrum raw = twirl_from_parameters(r.estimate);
  double total = 0.0;
  for (double& l : raw.lambda) total += (l = std::max(l, 0.0));
  for (double& l : raw.lambda) l /= total;
  r.raw_bound = 1.0 - raw.entropy();
  r.certified_bound = std::min(1.0 - best, r.raw_bound);
  return r.certified_bound;
}

void write_records(std::ostream& os, const std::vector<ShotRecord>& records, const std::string& scheme_hash,
                   std::uint64_t seed) {
  std::int64_t shots = records.empty() ? 0 : records.front().shots;
  for (const auto& r : records)
    if (r.shots != shots) shots = -1;
  os << "# scheme_hash=" << scheme_hash << " shots=" << shots << " seed=" << seed << "\n";
  for (const auto& r : records) os << "# setting " << r.setting_id << " " << r.setting.str() << "\n";
  for (const auto& r : records)
    for (int k = 0; k < kOutcomes; ++k)
      os << r.setting_id << "\t" << outcome_label(k) << "\t" << r.counts[k] << "\n";
}

RecordFile read_records(std::istream& is) {
  RecordFile f;
  std::string line;
  bool header = false;
  const auto known = default_directions();
  auto lookup = [&](const std::string& name) {
    for (const auto& d : known)
      if (d.name == name) return d;
    return parse_directions(name).front();
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string word;
      ls >> word;
      if (word.rfind("scheme_hash=", 0) == 0) {
        header = true;
        f.scheme_hash = word.substr(12);
        while (ls >> word)
          if (word.rfind("seed=", 0) == 0) f.seed = std::stoull(word.substr(5));
      } else if (word == "setting") {
        int id;
        std::string dirs;
        if (!(ls >> id >> dirs)) throw Error("malformed setting line: " + line);
        std::array<Direction, kQubits> d;
        std::istringstream ds(dirs);
        std::string name;
        int q = 0;
        while (std::getline(ds, name, ',')) {
          if (q >= kQubits) throw Error("malformed setting line: " + line);
          d[q++] = lookup(name);
        }
        if (q != kQubits) throw Error("malformed setting line: " + line);
        ShotRecord r;
        r.setting_id = id;
        r.setting = CollectiveSetting(d);
        f.records.push_back(r);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string id_text, label, count_text;
    if (!std::getline(ls, id_text, '\t') || !std::getline(ls, label, '\t') || !std::getline(ls, count_text))
      throw Error("malformed record line: " + line);
    const int k = parse_outcome(label);
    if (k < 0) throw Error("malformed outcome: " + label);
    std::size_t used = 0;
    long long count = 0;
    int id = 0;
    try {
      id = std::stoi(id_text);
      count = std::stoll(count_text, &used);
    } catch (const std::exception&) {
      throw Error("malformed record line: " + line);
    }
    if (used != count_text.size() || count < 0) throw Error("malformed count: " + count_text);
    auto it = std::find_if(f.records.begin(), f.records.end(), [&](const ShotRecord& r) { return r.setting_id == id; });
    if (it == f.records.end()) throw Error("record for undeclared setting " + id_text);
    it->counts[k] += count;
    it->shots += count;
  }
  if (!header) throw Error("record file has no header");
  return f;
}

}  // namespace pptkey
