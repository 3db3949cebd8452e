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


#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pptkey/shots.hpp"

using namespace pptkey;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

const EstimationScheme& hadamard_scheme() {
  static const EstimationScheme s = [] {
    CoverOptions o;
    o.node_budget = 200'000;
    return verification_scheme(twisting_from_state(rho_h().matrix(), 2), o);
  }();
  return s;
}

std::vector<ShotRecord> sample_all(const DensityOperator& rho, const EstimationScheme& scheme, std::int64_t shots,
                                   std::uint64_t seed) {
  std::vector<ShotRecord> out;
  for (std::size_t s = 0; s < scheme.settings.size(); ++s)
    out.push_back(sample_setting(rho, scheme.settings[s], static_cast<int>(s), shots, seed));
  return out;
}

std::vector<std::array<double, kOutcomes>> exact_all(const Matrix& rho, const EstimationScheme& scheme) {
  std::vector<std::array<double, kOutcomes>> out;
  for (const auto& s : scheme.settings) out.push_back(outcome_probabilities(rho, s));
  return out;
}

CollectiveSetting zzzz() {
  const Direction z = default_directions()[2];
  return CollectiveSetting({z, z, z, z});
}

}  // namespace

TEST_CASE("counter rng") {
  CounterRng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
    seen.insert(x);
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("outcome labels") {
  CHECK(outcome_label(0) == "+1+1+1+1");
  CHECK(outcome_label(0b0100) == "+1-1+1+1");
  for (int k = 0; k < kOutcomes; ++k) CHECK(parse_outcome(outcome_label(k)) == k);
  CHECK(parse_outcome("+1+1+1") == -1);
  CHECK(parse_outcome("+1+1+1+2") == -1);
  CHECK(outcome_parity(0b1100, 0b0011) == 1);
  CHECK(outcome_parity(0b1000, 0b0011) == -1);
  CHECK(outcome_parity(0b1111, 0) == 1);
}

TEST_CASE("sampling a basis state") {
  Matrix m = Matrix::Zero(16, 16);
  m(0, 0) = 1.0;
  const DensityOperator zero(m, {2, 2, 2, 2});
  const ShotRecord r = sample_setting(zero, zzzz(), 0, 1000, 5);
  CHECK(r.counts[0] == 1000);
  CHECK(r.shots == 1000);
  CHECK_THROWS_AS(sample_setting(zero, zzzz(), 0, 0, 5), Error);
}

TEST_CASE("sampling reproduces the Born rule") {
  const ShotRecord r = sample_setting(rho_h(), zzzz(), 0, 1'000'000, 11);
  double zz = 0.0;
  for (int k = 0; k < kOutcomes; ++k) zz += outcome_parity(k, 0b0011) * static_cast<double>(r.counts[k]);
  zz /= 1e6;
  CHECK(std::abs(zz - (3.0 - 2.0 * kSqrt2)) <= 3e-3);

  const DensityOperator white(Matrix(Matrix::Identity(16, 16) / 16.0), {2, 2, 2, 2});
  const ShotRecord w = sample_setting(white, zzzz(), 0, 160'000, 3);
  // Binomial sd per cell is about 97; allow 5 sd.
  for (int k = 0; k < kOutcomes; ++k) CHECK(std::abs(static_cast<double>(w.counts[k]) - 10'000.0) < 500.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto& scheme = hadamard_scheme();
  const auto a = sample_all(rho_h(), scheme, 5000, 42);
  const auto b = sample_all(rho_h(), scheme, 5000, 42);
  const auto c = sample_all(rho_h(), scheme, 5000, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("exact estimates recover rho_H") {
  const auto& scheme = hadamard_scheme();
  CHECK(scheme.settings.size() == 13);
  CHECK(scheme.max_residual <= 1e-9);
  EstimateReport r = estimate_exact(exact_all(rho_h().matrix(), scheme), scheme);
  const double half_p1 = (2.0 - kSqrt2) / 2.0;  // 0.29289
  const double half_p2 = (kSqrt2 - 1.0) / 2.0;  // 0.20711
  CHECK(std::abs(r.estimate.diag[0] - half_p1) <= 1e-10);
  CHECK(std::abs(r.estimate.diag[1] - half_p2) <= 1e-10);
  CHECK(std::abs(r.estimate.diag[2] - half_p2) <= 1e-10);
  CHECK(std::abs(r.estimate.diag[3] - half_p1) <= 1e-10);
  CHECK(std::abs(r.estimate.re_a - half_p1) <= 1e-10);
  CHECK(std::abs(r.estimate.re_b - half_p2) <= 1e-10);
  CHECK(std::abs(r.estimate.im_a) <= 1e-10);
  CHECK(std::abs(r.estimate.im_b) <= 1e-10);
  for (double x : r.radii) CHECK(x == 0.0);
  certify(r);
  CHECK(std::abs(r.certified_bound - 0.0213399157) <= 1e-6);
  CHECK(std::abs(r.raw_bound - r.certified_bound) <= 1e-9);
}

TEST_CASE("exact estimates on the maximally mixed state") {
  const auto& scheme = hadamard_scheme();
  EstimateReport r = estimate_exact(exact_all(Matrix(Matrix::Identity(16, 16) / 16.0), scheme), scheme);
  for (int p = kD00; p <= kD11; ++p) CHECK(std::abs(r.value(p) - 0.25) <= 1e-10);
  for (int p = kReA; p <= kImB; ++p) CHECK(std::abs(r.value(p)) <= 1e-10);
  certify(r);
  CHECK(std::abs(r.certified_bound + 1.0) <= 1e-9);
}

TEST_CASE("certification") {
  SqueezedParameters s;
  s.diag = {0.25, 0.25, 0.25, 0.25};
  SUBCASE("wide rectangle reaches the worst case") {
    EstimateReport r;
    r.estimate = s;
    r.radii.fill(1.0);
    certify(r);
    CHECK(r.certified_bound <= -1.0 + 1e-6);
  }
  SUBCASE("diagonal that cannot be normalized") {
    EstimateReport r;
    r.estimate.diag = {0.9, 0.9, 0.9, 0.9};
    CHECK_THROWS_AS(certify(r), InfeasibleError);
  }
  SUBCASE("coherence too large for the diagonal") {
    EstimateReport r;
    r.estimate.diag = {0.0, 0.5, 0.5, 0.0};
    r.estimate.re_a = 0.3;
    r.radii.fill(0.01);
    CHECK_THROWS_AS(certify(r), InfeasibleError);
  }
  SUBCASE("negative radius") {
    EstimateReport r;
    r.estimate = s;
    r.radii[kReA] = -1.0;
    CHECK_THROWS_AS(certify(r), Error);
  }
}

TEST_CASE("property: certified bound never exceeds the raw bound") {
  const auto& scheme = hadamard_scheme();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EstimateReport r = estimate_parameters(sample_all(rho_h(), scheme, 20'000, seed), scheme, 0.05);
    certify(r);
    CHECK(r.certified_bound <= r.raw_bound + 1e-12);
    CHECK(r.certified_bound >= -1.0 - 1e-9);
  }
}

TEST_CASE("radius regression at one million shots") {
  const auto& scheme = hadamard_scheme();
  const EstimateReport r = estimate_parameters(sample_all(rho_h(), scheme, 1'000'000, 1), scheme, 0.05);
  CHECK(r.min_shots == 1'000'000);
  for (double x : r.radii) CHECK(x <= 2.5e-3);
}

TEST_CASE("property: confidence rectangles cover the truth") {
  const auto& scheme = hadamard_scheme();
  const EstimateReport truth = estimate_exact(exact_all(rho_h().matrix(), scheme), scheme);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const EstimateReport r = estimate_parameters(sample_all(rho_h(), scheme, 10'000, 1000 + seed), scheme, 0.05);
    bool all = true;
    for (int p = 0; p < kParams; ++p) all = all && std::abs(r.value(p) - truth.value(p)) <= r.radii[p];
    covered += all;
  }
  CHECK(covered >= 190);
}

TEST_CASE("property: error shrinks with the shot count") {
  const auto& scheme = hadamard_scheme();
  const EstimateReport truth = estimate_exact(exact_all(rho_h().matrix(), scheme), scheme);
  double previous = std::numeric_limits<double>::infinity();
  for (std::int64_t shots : {1'000, 10'000, 100'000, 1'000'000}) {
    double err = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const EstimateReport r = estimate_parameters(sample_all(rho_h(), scheme, shots, seed), scheme, 0.05);
      for (int p = 0; p < kParams; ++p) err += std::abs(r.value(p) - truth.value(p));
    }
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("records must match the scheme") {
  const auto& scheme = hadamard_scheme();
  auto recs = sample_all(rho_h(), scheme, 100, 1);
  recs.pop_back();
  CHECK_THROWS_AS(estimate_parameters(recs, scheme, 0.05), Error);
  auto bad = sample_all(rho_h(), scheme, 100, 1);
  bad[0].counts[0] += 1;
  CHECK_THROWS_AS(estimate_parameters(bad, scheme, 0.05), Error);
  CHECK_THROWS_AS(estimate_parameters(sample_all(rho_h(), scheme, 100, 1), scheme, 1.5), Error);
}

TEST_CASE("record serialization round trip") {
  const auto& scheme = hadamard_scheme();
  const auto recs = sample_all(rho_h(), scheme, 1000, 9);
  std::stringstream ss;
  write_records(ss, recs, scheme.hash(), 9);
  const RecordFile f = read_records(ss);
  CHECK(f.scheme_hash == scheme.hash());
  CHECK(f.seed == 9);
  CHECK(f.records == recs);

  std::istringstream junk("# scheme_hash=00 shots=1 seed=0\n0\t+1+1+1\t1\n");
  CHECK_THROWS_AS(read_records(junk), Error);
}

TEST_CASE("scheme hash") {
  const auto& scheme = hadamard_scheme();
  CHECK(scheme.hash().size() == 16);
  EstimationScheme other = scheme;
  std::swap(other.settings[0], other.settings[1]);
  CHECK(other.hash() != scheme.hash());
}

TEST_CASE("prepared sampler agrees with the density sampler") {
  const auto& scheme = hadamard_scheme();
  const auto components = rho_h_components();
  for (double p_mix : {1.0, 0.9}) {
    const DensityOperator rho = depolarize(rho_h(), p_mix);
    for (std::size_t s = 0; s < scheme.settings.size(); s += 4) {
      const auto probs = outcome_probabilities(rho.matrix(), scheme.settings[s]);
      const std::int64_t n = 200'000;
      const ShotRecord r = sample_setting_prepared(components, p_mix, scheme.settings[s], static_cast<int>(s), n, 77);
      CHECK(r.shots == n);
      for (int k = 0; k < kOutcomes; ++k) {
        const double sd = std::sqrt(n * probs[k] * (1.0 - probs[k])) + 1.0;
        CHECK(std::abs(static_cast<double>(r.counts[k]) - n * probs[k]) <= 5.0 * sd);
      }
    }
  }
}
