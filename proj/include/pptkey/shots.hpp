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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pptkey/key.hpp"
#include "pptkey/settings.hpp"
#include "pptkey/states.hpp"

namespace pptkey {

/// Thrown when no state is consistent with the estimated parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Counter-based generator: output k of stream s is splitmix64 applied to a
/// key derived from (seed, s) plus k. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline constexpr int kOutcomes = 16;

/// "+1-1+1+1" for outcome index k (bit 3 - q set means qubit q read -1).
std::string outcome_label(int k);
/// Inverse of outcome_label; -1 on malformed input.
int parse_outcome(const std::string& label);
/// Product of the signs of the qubits in `mask` for outcome k.
int outcome_parity(int k, int mask);

struct ShotRecord {
  int setting_id = 0;
  CollectiveSetting setting;
  std::array<std::int64_t, kOutcomes> counts{};
  std::int64_t shots = 0;

  void validate() const;  // counts nonnegative and summing to shots
  bool operator==(const ShotRecord& o) const;
};

/// Born-rule probabilities of the 16 outcomes of a setting.
std::array<double, kOutcomes> outcome_probabilities(const Matrix& rho, const CollectiveSetting& s);

/// Multinomial sample of `shots` outcomes. Stream = setting_id.
ShotRecord sample_setting(const DensityOperator& rho, const CollectiveSetting& s, int setting_id,
                          std::int64_t shots, std::uint64_t seed);

/// Shot-by-shot preparation of a mixture: each shot draws a component with
/// probability p_mix * weight (or white noise with probability 1 - p_mix) and
/// measures the product key (x) shield state it prepares.
ShotRecord sample_setting_prepared(const std::vector<MixtureComponent>& components, double p_mix,
                                   const CollectiveSetting& s, int setting_id, std::int64_t shots,
                                   std::uint64_t seed);

/// Settings plus post-processing weights for the expectations
/// ZIII, IZII, O1, R1, I1, R2, I2 (in that order).
struct EstimationScheme {
  std::vector<CollectiveSetting> settings;
  std::vector<std::string> target_names;
  std::vector<PauliDecomposition> targets;
  std::vector<RealVector> weights;
  double max_residual = 0.0;
  bool proven_minimal = false;

  /// FNV-1a over the settings and target coefficients, as 16 hex digits.
  std::string hash() const;
};

std::vector<PauliDecomposition> verification_targets(const TwistingUnitary& tau,
                                                     std::vector<std::string>* names = nullptr);
/// Minimal cover of the verification targets.
EstimationScheme verification_scheme(const TwistingUnitary& tau, const CoverOptions& options = {});
/// Scheme on given settings; throws if they do not span every target.
EstimationScheme scheme_for_settings(const TwistingUnitary& tau, std::vector<CollectiveSetting> settings);

/// Parameter order in EstimateReport::radii.
enum Param : int { kD00 = 0, kD01, kD10, kD11, kReA, kImA, kReB, kImB, kParams };

struct EstimateReport {
  SqueezedParameters estimate;
  std::array<double, kParams> radii{};
  std::vector<double> target_estimates;
  double delta = 0.0;
  std::int64_t min_shots = 0;
  double certified_bound = 0.0;
  double raw_bound = 0.0;

  double value(int p) const;
};

/// Hoeffding radius for a sum of independent per-setting means, union bound
/// over the kParams parameters. imA = -<I1>/2 and imB = -<I2>/2 with the
/// tilde-Bell convention (|00> + i|11>)/sqrt2.
EstimateReport estimate_parameters(const std::vector<ShotRecord>& records, const EstimationScheme& scheme,
                                   double delta);
/// Infinite-shot limit: exact outcome distributions, zero radii.
EstimateReport estimate_exact(const std::vector<std::array<double, kOutcomes>>& probabilities,
                              const EstimationScheme& scheme);

/// Minimum of 1 - S(lambda) over all PSD-completable parameters in the
/// confidence rectangle; fills certified_bound and raw_bound. Throws
/// InfeasibleError if the rectangle holds no valid state.
double certify(EstimateReport& report);

/// Text serialization: a header of '#' lines (scheme hash, shots, seed, one
/// line per setting), then "setting-id<TAB>+1-1+1+1<TAB>count" lines.
void write_records(std::ostream& os, const std::vector<ShotRecord>& records, const std::string& scheme_hash,
                   std::uint64_t seed);
struct RecordFile {
  std::string scheme_hash;
  std::uint64_t seed = 0;
  std::vector<ShotRecord> records;
};
RecordFile read_records(std::istream& is);

}  // namespace pptkey
