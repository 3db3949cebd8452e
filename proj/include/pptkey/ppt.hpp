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

#include <functional>
#include <span>
#include <vector>

#include "pptkey/key.hpp"
#include "pptkey/tensor.hpp"

namespace pptkey {

inline constexpr double kPptMembershipTol = 1e-10;
inline constexpr double kNptScanFlag = -1e-5;

/// Bob's side, {B, B'} for four subsystems or {B} for two.
std::vector<int> default_cut(const DensityOperator& rho);

struct PptResult {
  bool is_ppt = false;
  double lambda_min = 0.0;
};

PptResult ppt_check(const DensityOperator& rho, std::span<const int> cut);
PptResult ppt_check(const DensityOperator& rho);

/// max |rho - rho^Gamma| elementwise.
double ppt_invariance(const DensityOperator& rho, std::span<const int> cut);
double ppt_invariance(const DensityOperator& rho);

struct ExtremalityRow {
  double q = 0.0;
  double lambda_min = 0.0;
  bool npt = false;  // lambda_min < -1e-5
};

/// Standard-form mixtures with weight q on the first pbit; lambda_min of the
/// partial transpose on {B, B'} for each q.
std::vector<ExtremalityRow> extremality_scan(const Matrix& x1, const Matrix& x2,
                                             std::span<const double> q_grid);

struct RobustnessRow {
  double p_mix = 0.0;
  double noise = 0.0;        // 1 - p_mix
  double lambda_min = 0.0;   // of the depolarized partial transpose
  double ppt_floor = 0.0;    // (1 - p_mix)/16 style analytic floor: noise / D
  double bound = 0.0;        // certified key bound at this noise level
};

struct RobustnessReport {
  std::vector<RobustnessRow> rows;
  double largest_positive_noise = -1.0;  // -1 if no grid point certifies
};

/// Default bound: twirl-hashing bound from the exact squeezed parameters of
/// the depolarized state under `tau`.
using BoundFn = std::function<double(const DensityOperator&)>;
BoundFn squeezed_hashing_bound(const TwistingUnitary& tau);

RobustnessReport robustness_scan(const DensityOperator& rho, std::span<const double> p_mix_grid,
                                 const BoundFn& bound);

/// Noise level 1 - p_mix at which `bound` crosses zero, by bisection on
/// [0, 1] to the given absolute tolerance. Requires bound > 0 at zero noise.
double noise_threshold(const DensityOperator& rho, const BoundFn& bound, double tol = 1e-6);

}  // namespace pptkey
