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

#include <iosfwd>
#include <string>
#include <vector>

#include "pptkey/tensor.hpp"

namespace pptkey {

/// State document: {"dims": [..], "matrix": [[re, im], ...]} with the matrix
/// in row-major order. Doubles are written so that reading them back gives
/// the identical bits.
std::string state_to_text(const Matrix& m, const std::vector<int>& dims);
void write_state(std::ostream& os, const DensityOperator& rho);
void write_state_file(const std::string& path, const DensityOperator& rho);

/// Raw matrix and dims from a state document. Throws Error when malformed.
std::pair<Matrix, std::vector<int>> parse_matrix_document(const std::string& text);
DensityOperator read_state(std::istream& is);
DensityOperator read_state_file(const std::string& path);

/// A unitary stored in the same document format with dims [d].
Matrix read_unitary_file(const std::string& path);

}  // namespace pptkey
