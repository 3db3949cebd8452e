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
#include <random>

#include "doctest.h"
#include "pptkey/relent.hpp"
#include "pptkey/states.hpp"

using namespace pptkey;

TEST_CASE("relative entropy basics") {
  const Matrix half = Matrix::Identity(2, 2) / 2.0;
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  CHECK(rel_entropy(zero, half) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rel_entropy(half, half)) < 1e-12);
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1.0;
  CHECK(rel_entropy(half, zero) == std::numeric_limits<double>::infinity());
  CHECK(rel_entropy(zero, one) == std::numeric_limits<double>::infinity());
  std::mt19937_64 rng(2);
  const DensityOperator a = random_density({3}, rng), b = random_density({3}, rng);
  CHECK(rel_entropy(a.matrix(), b.matrix()) > 0.0);
}

TEST_CASE("E_r upper bound of a Bell state is close to one") {
  const DensityOperator bell(BellBasis::projector(0), {2, 2});
  ErOptions opt;
  opt.budget_seconds = 5.0;
  const ErResult r = er_upper_bound(bell, opt);
  CHECK(r.value >= 1.0 - 1e-9);
  CHECK(r.value <= 1.02);
  CHECK(r.witness.certified());
  CHECK(std::abs(rel_entropy(bell.matrix(), r.witness.assemble()) - r.value) < 1e-9);
}

TEST_CASE("E_r upper bound of a product state is near zero") {
  std::mt19937_64 rng(6);
  const DensityOperator a = random_density({2}, rng), b = random_density({2}, rng);
  const DensityOperator ab(tensor({a.op(), b.op()}));
  ErOptions opt;
  opt.budget_seconds = 5.0;
  const ErResult r = er_upper_bound(ab, opt);
  CHECK(r.value >= -1e-12);
  CHECK(r.value < 0.02);
}

TEST_CASE("E_r upper bound of rho_H is consistent with the key rate") {
  ErOptions opt;
  opt.budget_seconds = 10.0;
  const ErResult r = er_upper_bound(rho_h(), opt);
  CHECK(r.value >= 0.0213399 - 1e-6);
  CHECK(r.witness.certified());
  CHECK(r.witness.alice_parts == std::vector<int>{0, 2});
  CHECK(r.witness.bob_parts == std::vector<int>{1, 3});
}
