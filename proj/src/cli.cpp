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

#include "pptkey/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "pptkey/io.hpp"
#include "pptkey/key.hpp"
#include "pptkey/observables.hpp"
#include "pptkey/ppt.hpp"
#include "pptkey/relent.hpp"
#include "pptkey/settings.hpp"
#include "pptkey/shots.hpp"
#include "pptkey/states.hpp"

#ifndef PPTKEY_VERSION
#define PPTKEY_VERSION "0.0.0"
#endif

namespace pptkey::cli {

namespace {

using nlohmann::json;

class Report {
 public:
  Report(std::ostream& out, std::string command) : out_(out), command_(std::move(command)) {}

  void header(const std::vector<std::uint64_t>& seeds) {
    json h;
    h["record"] = "header";
    h["tool"] = "pptkey";
    h["version"] = PPTKEY_VERSION;
    h["command"] = command_;
    h["seeds"] = seeds;
    h["tolerances"] = {{"hermitian", tol::kHermitian},
                       {"trace", tol::kTrace},
                       {"psd_slack", tol::kPsdSlack},
                       {"unitary", tol::kUnitary},
                       {"ppt_membership", kPptMembershipTol},
                       {"npt_flag", kNptScanFlag},
                       {"settings_residual", 1e-9}};
    h["conventions"] = {{"log_base", 2}, {"subsystem_order", "A,B,A',B'"}, {"cut", "B,B'"}};
    emit(h);
  }

  void emit(const json& j) { out_ << j.dump() << "\n"; }

 private:
  std::ostream& out_;
  std::string command_;
};

int trailing_int(const std::string& name, const std::string& prefix) {
  const std::string tail = name.substr(prefix.size());
  std::size_t used = 0;
  int d = 0;
  try {
    d = std::stoi(tail, &used);
  } catch (const std::exception&) {
    throw Error("bad preset " + name);
  }
  if (used != tail.size() || d < 2 || d > 8) throw Error("bad preset dimension in " + name);
  return d;
}

bool is_preset(const std::string& name) {
  for (const char* p : {"hadamard", "identity", "fourier-d", "identity-d", "random-d"})
    if (name.rfind(p, 0) == 0) return true;
  return false;
}

Matrix preset_unitary(const std::string& name, std::uint64_t seed) {
  if (name == "hadamard") return presets::hadamard();
  if (name == "identity") return presets::identity(2);
  if (name.rfind("identity-d", 0) == 0) return presets::identity(trailing_int(name, "identity-d"));
  if (name.rfind("fourier-d", 0) == 0) return presets::fourier(trailing_int(name, "fourier-d"));
  if (name.rfind("random-d", 0) == 0) {
    std::mt19937_64 rng(seed);
    return presets::random_unitary(trailing_int(name, "random-d"), rng);
  }
  throw Error("unknown preset " + name);
}

// A state path, or a preset name for the noiseless rho_U.
DensityOperator load_state(const std::string& source) {
  if (is_preset(source)) return rho_u(preset_unitary(source, 1)).rho;
  return read_state_file(source);
}

int shield_dim_of(const DensityOperator& rho) {
  const auto& d = rho.dims();
  if (d.size() != 4 || d[0] != 2 || d[1] != 2 || d[2] != d[3])
    throw Error("state must live on [2,2,d,d]");
  return d[2];
}

// Weights of the two pbits read off the coherence blocks.
std::pair<double, double> pbit_weights(const DensityOperator& rho) {
  const long n = rho.dim() / 4;
  const double p1 = 2.0 * trace_norm(Matrix(rho.matrix().block(0, 3 * n, n, n)));
  const double p2 = 2.0 * trace_norm(Matrix(rho.matrix().block(n, 2 * n, n, n)));
  return {p1, p2};
}

json terms_json(const PauliDecomposition& d) {
  json j = json::object();
  for (const auto& [s, c] : d.terms(1e-12)) j[s] = c.real();
  return j;
}

json setting_list(const std::vector<CollectiveSetting>& settings) {
  json j = json::array();
  for (const auto& s : settings) j.push_back(s.str());
  return j;
}

int cmd_gen(Report& rep, const std::string& source, const std::string& unitary_path, const std::string& out_path,
            double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error("--noise must lie in [0,1]");
  Matrix u;
  std::string label;
  if (!unitary_path.empty()) {
    u = read_unitary_file(unitary_path);
    label = unitary_path;
  } else {
    if (source.empty()) throw Error("gen needs a preset name or --unitary");
    u = preset_unitary(source, seed);
    label = source;
  }
  rep.header({seed});
  const RhoU r = rho_u(u);
  const DensityOperator rho = noise > 0.0 ? depolarize(r.rho, 1.0 - noise) : r.rho;
  write_state_file(out_path, rho);
  rep.emit({{"record", "state"},
            {"source", label},
            {"path", out_path},
            {"dims", rho.dims()},
            {"d", u.rows()},
            {"p1", r.p1},
            {"p2", r.p2},
            {"ratio", key_ratio(u)},
            {"noise", noise}});
  return kExitOk;
}

int cmd_ppt(Report& rep, const std::string& source, int grid, bool threshold) {
  const DensityOperator rho = load_state(source);
  rep.header({});
  const PptResult pr = ppt_check(rho);
  rep.emit({{"record", "ppt"},
            {"is_ppt", pr.is_ppt},
            {"lambda_min", pr.lambda_min},
            {"invariance", ppt_invariance(rho)},
            {"cut", default_cut(rho)}});
  if (rho.dims().size() != 4) return kExitOk;
  const int d = shield_dim_of(rho);
  const long n = static_cast<long>(d) * d;
  const Matrix a = rho.matrix().block(0, 3 * n, n, n);
  const Matrix b = rho.matrix().block(n, 2 * n, n, n);
  const auto [p1, p2] = pbit_weights(rho);
  if (trace_norm(a) > 1e-12 && trace_norm(b) > 1e-12) {
    const std::vector<double> qs = {p1 - 0.01, p1, p1 + 0.01};
    const Matrix x1 = a / trace_norm(a);
    const Matrix x2 = b / trace_norm(b);
    for (const auto& row : extremality_scan(x1, x2, qs))
      rep.emit({{"record", "extremality"}, {"q", row.q}, {"lambda_min", row.lambda_min}, {"npt", row.npt}});
  }
  const TwistingUnitary tau = twisting_from_state(rho.matrix(), d);
  const BoundFn bound = squeezed_hashing_bound(tau);
  std::vector<double> mix;
  for (int i = 0; i < grid; ++i) mix.push_back(1.0 - 0.01 * i / std::max(1, grid - 1));
  const RobustnessReport rr = robustness_scan(rho, mix, bound);
  for (const auto& row : rr.rows)
    rep.emit({{"record", "robustness"},
              {"p_mix", row.p_mix},
              {"noise", row.noise},
              {"lambda_min", row.lambda_min},
              {"ppt_floor", row.ppt_floor},
              {"bound", row.bound}});
  json summary = {{"record", "robustness_summary"}, {"largest_positive_noise", rr.largest_positive_noise}};
  if (threshold && bound(rho) > 0.0) summary["noise_threshold"] = noise_threshold(rho, bound, 1e-6);
  rep.emit(summary);
  return kExitOk;
}

int cmd_key(Report& rep, const std::string& source) {
  const DensityOperator rho = load_state(source);
  rep.header({});
  const int d = shield_dim_of(rho);
  const auto [p1, p2] = pbit_weights(rho);
  const TwistingUnitary tau = twisting_from_state(rho.matrix(), d);
  const DensityOperator sigma = privacy_squeeze(rho, tau);
  const CcqState squeezed = ccq_from_state(sigma, EveView::kPurification);
  const double squeezed_dw = dw_rate(squeezed);
  const double conservative_dw = dw_rate(ccq_from_state(rho, EveView::kPurification));
  const double shielded_dw = dw_rate(ccq_from_state(rho, EveView::kPurificationAndShield));
  const SqueezedParameters params = squeezed_parameters(sigma.matrix());
  const CertifiedBounds cb = certified_bounds(params);
  const RecurrenceResult rec = recurrence_step(squeezed);
  const double lower = std::max({0.0, squeezed_dw, cb.twirl_hashing});
  rep.emit({{"record", "key"},
            {"p1", p1},
            {"p2", p2},
            {"ratio", p2 > 0.0 ? p1 / p2 : std::numeric_limits<double>::infinity()},
            {"squeezed_dw_rate", squeezed_dw},
            {"conservative_dw_rate", conservative_dw},
            {"eve_holds_shield_dw_rate", shielded_dw},
            {"twirl_hashing_bound", cb.twirl_hashing},
            {"paper_literal_bound", cb.paper_literal},
            {"twirl_lambda", cb.twirl.lambda},
            {"two_way_rate", cb.two_way_rate},
            {"two_way_flag", cb.two_way_flag},
            {"recurrence_per_copy_rate", rec.per_copy_rate},
            {"recurrence_acceptance", rec.acceptance},
            {"recurrence_improves", rec.per_copy_rate > squeezed_dw},
            {"key_lower_bound", lower}});
  return kExitOk;
}

int cmd_er(Report& rep, const std::string& source, const ErOptions& opt) {
  const DensityOperator rho = load_state(source);
  rep.header({opt.seed});
  const ErResult r = er_upper_bound(rho, opt);
  rep.emit({{"record", "er"},
            {"upper_bound", r.value},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"elapsed_seconds", r.elapsed_seconds},
            {"duality_gap", r.duality_gap},
            {"witness_terms", r.witness.terms.size()},
            {"witness_certified", r.witness.certified()},
            {"budget_seconds", opt.budget_seconds},
            {"restarts", opt.restarts}});
  return kExitOk;
}

int cmd_observables(Report& rep, const std::string& source) {
  const DensityOperator rho = load_state(source);
  rep.header({});
  if (rho.dims() != std::vector<int>{2, 2, 2, 2}) throw Error("observables need a four-qubit state");
  const TwistingUnitary tau = twisting_from_state(rho.matrix(), 2);
  const VerificationObservables obs = build_observables(tau);
  const PrintedExpansions printed = printed_expansions();
  struct Item {
    const char* name;
    const Matrix* op;
    const PauliDecomposition* printed;
  };
  const Item items[] = {{"O1", &obs.o1, nullptr},
                        {"R1", &obs.r1, &printed.r1},
                        {"I1", &obs.i1, &printed.i1},
                        {"R2", &obs.r2, &printed.r2},
                        {"I2", &obs.i2, &printed.i2}};
  for (const auto& it : items) {
    const PauliDecomposition dec = pauli_decompose(*it.op);
    json j = {{"record", "observable"},
              {"name", it.name},
              {"expectation", expectation(*it.op, rho.matrix())},
              {"terms", terms_json(dec)}};
    rep.emit(j);
    if (it.printed == nullptr) continue;
    json diffs = json::array();
    for (const auto& c : compare_decompositions(dec, *it.printed))
      diffs.push_back({{"string", c.string}, {"ours", c.ours}, {"printed", c.reference}});
    rep.emit({{"record", "printed_comparison"}, {"name", it.name}, {"match", diffs.empty()}, {"differences", diffs}});
  }
  return kExitOk;
}

int cmd_settings(Report& rep, const std::string& source, const std::string& which, const CoverOptions& opt) {
  const DensityOperator rho = load_state(source);
  rep.header({});
  if (rho.dims() != std::vector<int>{2, 2, 2, 2}) throw Error("settings need a four-qubit state");
  const TwistingUnitary tau = twisting_from_state(rho.matrix(), 2);
  std::vector<std::string> names;
  const auto all = verification_targets(tau, &names);
  std::vector<int> pick;
  int reference = 0;
  if (which == "o1") {
    pick = {2};
    reference = 1;
  } else if (which == "r") {
    pick = {3, 4, 5, 6};
    reference = 6;
  } else if (which == "all") {
    pick = {2, 3, 4, 5, 6};
    reference = 7;
  } else {
    throw Error("--targets must be one of o1, r, all");
  }
  std::vector<PauliDecomposition> targets;
  json tn = json::array();
  for (int i : pick) {
    targets.push_back(all[i]);
    tn.push_back(names[i]);
  }
  const SettingsScheme s = min_settings_cover(targets, opt);
  json weights = json::array();
  for (std::size_t t = 0; t < s.weights.size(); ++t) {
    json entries = json::array();
    for (Eigen::Index k = 0; k < s.weights[t].size(); ++k)
      if (std::abs(s.weights[t](k)) > 1e-12)
        entries.push_back({{"setting", k / kSubsets}, {"mask", k % kSubsets}, {"weight", s.weights[t](k)}});
    weights.push_back({{"target", tn[t]}, {"entries", entries}});
  }
  rep.emit({{"record", "settings"},
            {"targets", tn},
            {"feasible", s.feasible},
            {"size", s.settings.size()},
            {"reference_count", reference},
            {"proven_minimal", s.proven_minimal},
            {"no_cover_up_to", s.searched_below},
            {"candidates", s.candidates},
            {"nodes", s.nodes},
            {"max_residual", s.max_residual},
            {"independent_residual", s.feasible ? verify_scheme(targets, s.settings) : -1.0},
            {"settings", setting_list(s.settings)},
            {"weights", weights}});
  return kExitOk;
}

int cmd_simulate(Report& rep, const std::string& source, std::int64_t shots, std::uint64_t seed, double noise,
                 double delta, const std::string& out_path, bool prepared, long node_budget) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error("--noise must lie in [0,1]");
  if (shots < 1) throw Error("--shots must be positive");
  const DensityOperator clean = load_state(source);
  if (clean.dims() != std::vector<int>{2, 2, 2, 2}) throw Error("simulate needs a four-qubit state");
  if (prepared && source != "hadamard") throw Error("--prepared is only available for the hadamard preset");
  rep.header({seed});
  const DensityOperator rho = depolarize(clean, 1.0 - noise);
  CoverOptions opt;
  opt.node_budget = node_budget;
  const EstimationScheme scheme = verification_scheme(twisting_from_state(clean.matrix(), 2), opt);
  std::vector<ShotRecord> records;
  const auto comps = rho_h_components();
  for (std::size_t i = 0; i < scheme.settings.size(); ++i) {
    const int id = static_cast<int>(i);
    records.push_back(prepared ? sample_setting_prepared(comps, 1.0 - noise, scheme.settings[i], id, shots, seed)
                               : sample_setting(rho, scheme.settings[i], id, shots, seed));
  }
  std::ofstream f(out_path);
  if (!f) throw Error("cannot open " + out_path + " for writing");
  write_records(f, records, scheme.hash(), seed);
  rep.emit({{"record", "simulate"},
            {"path", out_path},
            {"scheme_hash", scheme.hash()},
            {"settings", setting_list(scheme.settings)},
            {"shots_per_setting", shots},
            {"noise", noise},
            {"delta", delta},
            {"sampler", prepared ? "prepared" : "density"}});
  return kExitOk;
}

json report_json(const EstimateReport& r) {
  json radii = json::object();
  const char* names[kParams] = {"d00", "d01", "d10", "d11", "re_a", "im_a", "re_b", "im_b"};
  json est = json::object();
  for (int p = 0; p < kParams; ++p) {
    radii[names[p]] = r.radii[p];
    est[names[p]] = r.value(p);
  }
  return {{"estimate", est}, {"radii", radii}, {"targets", r.target_estimates}, {"delta", r.delta}};
}

int cmd_certify(Report& rep, const std::string& source, const std::string& path, double delta) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  RecordFile file = read_records(f);
  rep.header({file.seed});
  const DensityOperator rho = load_state(source);
  if (rho.dims() != std::vector<int>{2, 2, 2, 2}) throw Error("certify needs a four-qubit state");
  std::sort(file.records.begin(), file.records.end(),
            [](const ShotRecord& a, const ShotRecord& b) { return a.setting_id < b.setting_id; });
  std::vector<CollectiveSetting> settings;
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    if (file.records[i].setting_id != static_cast<int>(i)) throw Error("setting ids must be 0..n-1");
    settings.push_back(file.records[i].setting);
  }
  const EstimationScheme scheme = scheme_for_settings(twisting_from_state(rho.matrix(), 2), settings);
  if (scheme.hash() != file.scheme_hash) throw Error("scheme hash mismatch: records were made for another scheme");
  EstimateReport r = estimate_parameters(file.records, scheme, delta);
  json j = report_json(r);
  try {
    certify(r);
  } catch (const InfeasibleError& e) {
    j["record"] = "estimate";
    j["infeasible"] = true;
    j["message"] = e.what();
    rep.emit(j);
    return kExitInfeasible;
  }
  j["record"] = "estimate";
  j["infeasible"] = false;
  j["certified_bound"] = r.certified_bound;
  j["raw_bound"] = r.raw_bound;
  j["certified"] = r.certified_bound > 0.0;
  j["min_shots"] = r.min_shots;
  rep.emit(j);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bound-entangled key states, certification and verification", "pptkey"};
  app.require_subcommand(1);

  std::string source, unitary_path, out_path = "state.json";
  double noise = 0.0;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("gen", "construct rho_U from a preset or unitary file");
  gen->add_option("preset", source, "hadamard, identity, identity-dN, fourier-dN or random-dN");
  gen->add_option("--unitary", unitary_path, "unitary document with dims [d]");
  gen->add_option("--out", out_path, "state file to write");
  gen->add_option("--noise", noise, "1 - p_mix of white noise");
  gen->add_option("--seed", seed, "seed for random-dN");

  std::string state = "state.json";
  int grid = 11;
  bool threshold = true;
  auto* ppt = app.add_subcommand("ppt", "PPT membership, invariance, extremality and robustness");
  ppt->add_option("--state", state, "state file or preset");
  ppt->add_option("--grid", grid, "robustness grid points on p_mix in [0.99, 1]")->check(CLI::Range(2, 10001));
  ppt->add_flag("!--no-threshold", threshold, "skip the bisection for the noise threshold");

  auto* key = app.add_subcommand("key", "key rates and bounds");
  key->add_option("--state", state, "state file or preset");

  ErOptions er_opt;
  auto* er = app.add_subcommand("er", "relative entropy of entanglement upper bound");
  er->add_option("--state", state, "state file or preset");
  er->add_option("--budget-seconds", er_opt.budget_seconds, "wall-clock budget");
  er->add_option("--restarts", er_opt.restarts, "restarts of each product-state search");
  er->add_option("--seed", er_opt.seed, "random seed");
  er->add_option("--max-iterations", er_opt.max_iterations, "iteration cap");

  std::string preset_state = "hadamard";
  auto* obs = app.add_subcommand("observables", "verification observables and printed expansions");
  obs->add_option("--state", preset_state, "state file or preset");

  CoverOptions cover;
  std::string candidates = "x,y,z,x+y,x-y";
  std::string targets = "all";
  auto* settings = app.add_subcommand("settings", "minimal collective measurement settings");
  settings->add_option("--state", preset_state, "state file or preset");
  settings->add_option("--max-size", cover.max_size, "largest scheme considered");
  settings->add_option("--candidates", candidates, "comma-separated directions (names or x:y:z)");
  settings->add_option("--targets", targets, "o1, r (R1,I1,R2,I2) or all");
  settings->add_option("--node-budget", cover.node_budget, "exhaustive search node budget");

  std::int64_t shots = 1000000;
  double delta = 0.05;
  std::string records = "records.tsv";
  bool prepared = false;
  long sim_budget = 200000;
  auto* sim = app.add_subcommand("simulate", "finite-shot measurement of the verification scheme");
  sim->add_option("--state", preset_state, "state file or preset");
  sim->add_option("--shots", shots, "shots per setting");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--noise", noise, "1 - p_mix of white noise");
  sim->add_option("--delta", delta, "confidence parameter carried into the report");
  sim->add_option("--out", records, "shot record file to write");
  sim->add_flag("--prepared", prepared, "sample shot by shot from the mixture preparation");
  sim->add_option("--node-budget", sim_budget, "settings search node budget");

  auto* cert = app.add_subcommand("certify", "estimate parameters and certify a key bound");
  cert->add_option("--state", preset_state, "state file or preset the records were taken on");
  cert->add_option("--records", records, "shot record file");
  cert->add_option("--delta", delta, "1 - confidence level")->check(CLI::Range(1e-12, 0.999999));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }

  try {
    if (*gen) {
      Report rep(out, "gen");
      return cmd_gen(rep, source, unitary_path, out_path, noise, seed);
    }
    if (*ppt) {
      Report rep(out, "ppt");
      return cmd_ppt(rep, state, grid, threshold);
    }
    if (*key) {
      Report rep(out, "key");
      return cmd_key(rep, state);
    }
    if (*er) {
      Report rep(out, "er");
      return cmd_er(rep, state, er_opt);
    }
    if (*obs) {
      Report rep(out, "observables");
      return cmd_observables(rep, preset_state);
    }
    if (*settings) {
      cover.directions = parse_directions(candidates);
      Report rep(out, "settings");
      return cmd_settings(rep, preset_state, targets, cover);
    }
    if (*sim) {
      Report rep(out, "simulate");
      return cmd_simulate(rep, preset_state, shots, seed, noise, delta, records, prepared, sim_budget);
    }
    if (*cert) {
      Report rep(out, "certify");
      return cmd_certify(rep, preset_state, records, delta);
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitMalformed;
}

}  // namespace pptkey::cli
