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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pptkey/cli.hpp"
#include "pptkey/io.hpp"
#include "pptkey/states.hpp"

using namespace pptkey;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::vector<json> records;
  std::string err;

  const json& find(const std::string& kind) const {
    for (const json& j : records)
      if (j.value("record", "") == kind) return j;
    throw std::runtime_error("no record " + kind);
  }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r{cli::run(args, out, err), {}, err.str()};
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) r.records.push_back(json::parse(line));
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pptkey_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("gen then key on the Hadamard instance") {
  const std::string path = scratch("h.json").string();
  const Run g = run({"gen", "hadamard", "--out", path});
  REQUIRE(g.code == 0);
  CHECK(std::abs(g.find("state")["p1"].get<double>() - (2.0 - std::sqrt(2.0))) <= 1e-12);
  CHECK(std::abs(g.find("state")["p2"].get<double>() - (std::sqrt(2.0) - 1.0)) <= 1e-12);
  const Run k = run({"key", "--state", path});
  REQUIRE(k.code == 0);
  const json& rec = k.find("key");
  CHECK(rec["key_lower_bound"].get<double>() >= 0.0213399);
  CHECK(rec["squeezed_dw_rate"].get<double>() >= 0.0213399);
  CHECK(rec["paper_literal_bound"].get<double>() < 0.0);
}

TEST_CASE("identity twisting gives ratio one and no key bound") {
  const std::string path = scratch("id.json").string();
  REQUIRE(run({"gen", "identity", "--out", path}).code == 0);
  const Run k = run({"key", "--state", path});
  REQUIRE(k.code == 0);
  CHECK(std::abs(k.find("key")["ratio"].get<double>() - 1.0) <= 1e-12);
  CHECK(k.find("key")["key_lower_bound"].get<double>() <= 1e-12);
}

TEST_CASE("state files round trip exactly") {
  const std::string path = scratch("rt.json").string();
  REQUIRE(run({"gen", "hadamard", "--out", path}).code == 0);
  const DensityOperator back = read_state_file(path);
  CHECK(back.dims() == std::vector<int>{2, 2, 2, 2});
  CHECK(back.matrix() == rho_h().matrix());
}

TEST_CASE("every report starts with a header") {
  const Run r = run({"observables"});
  REQUIRE(r.code == 0);
  REQUIRE_FALSE(r.records.empty());
  const json& h = r.records.front();
  CHECK(h["record"] == "header");
  CHECK(h.contains("version"));
  CHECK(h.contains("seeds"));
  CHECK(h["tolerances"].contains("psd_slack"));
  CHECK(h["conventions"]["log_base"] == 2);
  CHECK(h["conventions"]["subsystem_order"] == "A,B,A',B'");
  CHECK(h["conventions"]["cut"] == "B,B'");
}

TEST_CASE("malformed input exits with code 2") {
  CHECK(run({"frobnicate"}).code == cli::kExitMalformed);
  CHECK(run({"key", "--state", scratch("missing.json").string()}).code == cli::kExitMalformed);
  const std::string bad = scratch("bad.json").string();
  std::ofstream(bad) << "{\"dims\": [2, 2], \"matrix\": [[1, 0]]}";
  CHECK(run({"key", "--state", bad}).code == cli::kExitMalformed);
  std::ofstream(bad) << "not json";
  CHECK(run({"ppt", "--state", bad}).code == cli::kExitMalformed);
  CHECK(run({"gen", "fourier-dx"}).code == cli::kExitMalformed);
  CHECK(run({"certify", "--delta", "2"}).code == cli::kExitMalformed);
}

TEST_CASE("simulate then certify") {
  const std::string recs = scratch("records.tsv").string();
  const Run s = run({"simulate", "--shots", "100000", "--seed", "7", "--out", recs, "--node-budget", "200000"});
  REQUIRE(s.code == 0);
  CHECK(s.find("simulate")["settings"].size() == 13);
  CHECK(s.records.front()["seeds"][0] == 7);
  const Run c = run({"certify", "--records", recs, "--delta", "0.05"});
  REQUIRE(c.code == 0);
  const json& e = c.find("estimate");
  CHECK(e["infeasible"] == false);
  CHECK(e["certified_bound"].get<double>() <= e["raw_bound"].get<double>());
  CHECK(std::abs(e["estimate"]["re_a"].get<double>() - (2.0 - std::sqrt(2.0)) / 2.0) <= 0.01);

  SUBCASE("records from another scheme are rejected") {
    std::ifstream in(recs);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    text.replace(text.find("scheme_hash=") + 12, 4, "0000");
    const std::string other = scratch("other.tsv").string();
    std::ofstream(other) << text;
    CHECK(run({"certify", "--records", other}).code == cli::kExitMalformed);
  }
  SUBCASE("inconsistent counts are infeasible") {
    // Put every z,z,z,z shot on a key-mismatch outcome: the diagonal then
    // leaves no room for the measured coherence.
    std::ifstream in(recs);
    std::ostringstream edited;
    std::string id;
    for (std::string line; std::getline(in, line);) {
      const auto at = line.find(" z,z,z,z");
      if (line.rfind("# setting ", 0) == 0 && at != std::string::npos) id = line.substr(10, at - 10) + "\t";
      if (!id.empty() && line.rfind(id, 0) == 0) {
        const bool target = line.find("\t+1-1+1+1\t") != std::string::npos;
        edited << id << line.substr(id.size(), 8) << "\t" << (target ? "100000" : "0") << "\n";
      } else {
        edited << line << "\n";
      }
    }
    const std::string bad = scratch("bad.tsv").string();
    std::ofstream(bad) << edited.str();
    const Run b = run({"certify", "--records", bad});
    CHECK(b.code == cli::kExitInfeasible);
    CHECK(b.find("estimate")["infeasible"] == true);
  }
}

TEST_CASE("the installed binary propagates exit codes") {
  const std::string bin = PPTKEY_CLI_PATH;
  const std::string out = scratch("bin.jsonl").string();
  int status = std::system((bin + " key --state hadamard > " + out + " 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 0);
  status = std::system((bin + " key --state " + scratch("missing.json").string() + " > " + out + " 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
