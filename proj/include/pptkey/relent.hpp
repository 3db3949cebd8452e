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

#include <cstdint>
#include <vector>

#include "pptkey/tensor.hpp"

namespace pptkey {

/// Tr rho (log2 rho - log2 sigma) in bits; +infinity when the support of rho
/// is not contained in the support of sigma.
double rel_entropy(const Matrix& rho, const Matrix& sigma);

/// Pure product term |a><a| (x) |b><b| across the Alice | Bob cut.
struct ProductTerm {
  double weight = 0.0;
  Vector alice;
  Vector bob;
};

/// Explicit separable state sum_k w_k |a_k><a_k| (x) |b_k><b_k|. Alice and Bob
/// are each a group of subsystems of the full operator.
struct SeparableWitness {
  std::vector<int> dims;         // of the full operator
  std::vector<int> alice_parts;  // subsystem indices held by Alice
  std::vector<int> bob_parts;
  std::vector<ProductTerm> terms;

  /// Assembled state in the original subsystem order of `dims`.
  Matrix assemble() const;
  /// Checks weights are a probability vector and each local vector is unit.
  bool certified(double tol = 1e-9) const;
};

struct ErOptions {
  double budget_seconds = 60.0;
  long max_iterations = 200000;
  int restarts = 8;  // random restarts of each product-state search
  std::uint64_t seed = 1;
  double tolerance = 1e-7;
  int patience = 50;
};

struct ErResult {
  double value = 0.0;  // relative entropy to the witness, recomputed from scratch
  SeparableWitness witness;
  long iterations = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  double duality_gap = 0.0;  // last Frank-Wolfe gap
};

/// Upper bound on the relative entropy of entanglement across the cut
/// AA' | BB' (for two subsystems: A | B). Never throws on budget exhaustion;
/// returns the best witness found.
ErResult er_upper_bound(const DensityOperator& rho, const ErOptions& options = {});

}  // namespace pptkey
