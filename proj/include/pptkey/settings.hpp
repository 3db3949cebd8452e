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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pptkey/observables.hpp"

namespace pptkey {

/// A named Bloch direction.
struct Direction {
  std::string name;
  Eigen::Vector3d n;
};

/// x, y, z, (x+y)/sqrt2 as "x+y", (x-y)/sqrt2 as "x-y".
std::vector<Direction> default_directions();

/// Parses a comma-separated list of direction names from the default set,
/// or "a:b:c" triples which are normalized.
std::vector<Direction> parse_directions(const std::string& text);

/// One Bloch direction per qubit, in the order A, B, A', B'.
struct CollectiveSetting {
  std::array<Direction, kQubits> directions;

  CollectiveSetting() = default;
  explicit CollectiveSetting(std::array<Direction, kQubits> dirs);
  std::string str() const;  // e.g. "z,z,x+y,x"
  /// Product eigenbasis. Column k is the joint eigenvector for the outcome
  /// whose bit (3 - q) is set iff qubit q reads -1, so qubit A is the most
  /// significant bit.
  Matrix eigenbasis() const;
};

inline constexpr int kSubsets = 16;

/// Pauli vector of (x)_{q in T} (n_q . sigma) with identity elsewhere, one per
/// subset mask T (bit q set = qubit q included, bit 0 = qubit A).
std::array<RealVector, kSubsets> estimable_functionals(const CollectiveSetting& s);

struct SettingsScheme {
  bool feasible = false;
  bool proven_minimal = false;  // exhaustive search completed below this size
  std::vector<CollectiveSetting> settings;
  /// weights[t][s * 16 + mask]: target t = sum of weights times functionals.
  std::vector<RealVector> weights;
  double max_residual = 0.0;
  long nodes = 0;
  int candidates = 0;
  int searched_below = 0;  // no cover of this size or smaller exists
};

struct CoverOptions {
  int max_size = 13;
  std::vector<Direction> directions = default_directions();
  long node_budget = 3'000'000;
};

SettingsScheme min_settings_cover(const std::vector<PauliDecomposition>& targets,
                                  const CoverOptions& options = {});

/// Min-norm least-squares weights and the worst residual over targets.
std::vector<RealVector> solve_weights(const std::vector<PauliDecomposition>& targets,
                                      const std::vector<CollectiveSetting>& settings,
                                      double* max_residual);

/// Independent check: max over targets of |A w - t|_inf for freshly solved w.
double verify_scheme(const std::vector<PauliDecomposition>& targets,
                     const std::vector<CollectiveSetting>& settings);

}  // namespace pptkey
