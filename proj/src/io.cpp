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

#include "pptkey/io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace pptkey {

using nlohmann::json;

std::string state_to_text(const Matrix& m, const std::vector<int>& dims) {
  json doc;
  doc["dims"] = dims;
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  doc["matrix"] = std::move(entries);
  return doc.dump() + "\n";
}

void write_state(std::ostream& os, const DensityOperator& rho) { os << state_to_text(rho.matrix(), rho.dims()); }

void write_state_file(const std::string& path, const DensityOperator& rho) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_state(f, rho);
  if (!f) throw Error("failed writing " + path);
}

std::pair<Matrix, std::vector<int>> parse_matrix_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed state document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("matrix"))
    throw Error("state document needs fields dims and matrix");
  std::vector<int> dims;
  long n = 1;
  try {
    dims = doc.at("dims").get<std::vector<int>>();
  } catch (const json::exception&) {
    throw Error("dims must be a list of integers");
  }
  if (dims.empty()) throw Error("dims must not be empty");
  for (int d : dims) {
    if (d < 1) throw Error("dims must be positive");
    n *= d;
  }
  const json& entries = doc.at("matrix");
  if (!entries.is_array() || static_cast<long>(entries.size()) != n * n)
    throw Error("matrix must hold prod(dims)^2 entries");
  Matrix m(n, n);
  for (long k = 0; k < n * n; ++k) {
    const json& e = entries[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error("matrix entries must be [re, im] pairs");
    m(k / n, k % n) = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return {std::move(m), std::move(dims)};
}

DensityOperator read_state(std::istream& is) {
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  auto [m, dims] = parse_matrix_document(text);
  return DensityOperator(std::move(m), std::move(dims));
}

DensityOperator read_state_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_state(f);
}

Matrix read_unitary_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  auto [m, dims] = parse_matrix_document(ss.str());
  if (dims.size() != 1) throw Error("unitary document must have a single dimension");
  if (!is_unitary(m)) throw Error("matrix in " + path + " is not unitary");
  return m;
}

}  // namespace pptkey
