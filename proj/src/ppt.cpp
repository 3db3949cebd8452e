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

#include "pptkey/ppt.hpp"

#include <cmath>

#include "pptkey/states.hpp"

namespace pptkey {

std::vector<int> default_cut(const DensityOperator& rho) {
  switch (rho.dims().size()) {
    case 2: return {kB};
    case 4: return {kB, kBp};
  }
  throw Error("default_cut: expected two or four subsystems");
}

PptResult ppt_check(const DensityOperator& rho, std::span<const int> cut) {
  if (cut.empty()) throw Error("ppt_check: empty cut");
  const MultipartiteOperator pt = partial_transpose(rho.op(), cut);
  const double lmin = lambda_min(pt.data());
  return {lmin >= -kPptMembershipTol, lmin};
}

PptResult ppt_check(const DensityOperator& rho) {
  const auto cut = default_cut(rho);
  return ppt_check(rho, cut);
}

double ppt_invariance(const DensityOperator& rho, std::span<const int> cut) {
  return max_abs_diff(rho.op(), partial_transpose(rho.op(), cut));
}

double ppt_invariance(const DensityOperator& rho) {
  const auto cut = default_cut(rho);
  return ppt_invariance(rho, cut);
}

std::vector<ExtremalityRow> extremality_scan(const Matrix& x1, const Matrix& x2,
                                             std::span<const double> q_grid) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(x1.rows()))));
  std::vector<ExtremalityRow> rows;
  rows.reserve(q_grid.size());
  for (double q : q_grid) {
    if (!(q > 0.0 && q < 1.0)) throw Error("extremality_scan: q must lie in (0,1)");
    const MultipartiteOperator m(assemble_standard_form(x1, x2, q), {2, 2, d, d});
    const double lmin = lambda_min(partial_transpose(m, {kB, kBp}).data());
    rows.push_back({q, lmin, lmin < kNptScanFlag});
  }
  return rows;
}

BoundFn squeezed_hashing_bound(const TwistingUnitary& tau) {
  return [tau](const DensityOperator& rho) {
    const DensityOperator sigma = privacy_squeeze(rho, tau);
    return certified_bounds(squeezed_parameters(sigma.matrix())).twirl_hashing;
  };
}

RobustnessReport robustness_scan(const DensityOperator& rho, std::span<const double> p_mix_grid,
                                 const BoundFn& bound) {
  const auto cut = default_cut(rho);
  const double inv_dim = 1.0 / static_cast<double>(rho.dim());
  const double base_min = ppt_check(rho, cut).lambda_min;
  RobustnessReport report;
  for (double p : p_mix_grid) {
    const DensityOperator noisy = depolarize(rho, p);
    RobustnessRow row;
    row.p_mix = p;
    row.noise = 1.0 - p;
    row.lambda_min = ppt_check(noisy, cut).lambda_min;
    row.ppt_floor = (1.0 - p) * inv_dim + p * base_min;
    row.bound = bound(noisy);
    if (row.bound > 0.0 && row.noise > report.largest_positive_noise)
      report.largest_positive_noise = row.noise;
    report.rows.push_back(row);
  }
  return report;
}

double noise_threshold(const DensityOperator& rho, const BoundFn& bound, double tol) {
  auto at = [&](double noise) { return bound(depolarize(rho, 1.0 - noise)); };
  double lo = 0.0, hi = 1.0;
  if (!(at(lo) > 0.0)) throw Error("noise_threshold: bound is not positive at zero noise");
  if (at(hi) > 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pptkey
