// Copyright 2026 The QP-VQE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sweep manifest format:
//
//   # comment
//   set k <K>
//   set sector <N>,<2Sz>
//   set weights <w0>,<w1>,...
//   set restarts <R>
//   set max_iterations <M>
//   <label> <hamiltonian path, relative to the manifest>
//
// Settings apply to every point regardless of where they appear.

#include "qpvqe/driver.hpp"
#include "qpvqe/exact.hpp"
#include "qpvqe/fermion.hpp"
#include "qpvqe/hamiltonian_io.hpp"
#include "qpvqe/observables.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace qpvqe {

/// Everything needed to optimize one Hamiltonian.
struct Problem {
  PauliSum h{1};
  Sector sector;
  ReferenceSet refs;
  PurifiedPrep prep;
  AnsatzCircuit circ;
};

/// Full UCCGSD, or the configured effective excitation list.
inline AnsatzCircuit build_ansatz(int n_qubits, const QpvqeConfig& cfg) {
  if (n_qubits % 2 != 0) throw std::invalid_argument("build_ansatz: odd number of spin orbitals");
  const auto gens = cfg.effective_excitations
                        ? enumerate_sz_excitations(n_qubits / 2, true, ExcitationMode::EffectiveList,
                                                   *cfg.effective_excitations)
                        : enumerate_sz_excitations(n_qubits / 2, true);
  return build_uccgsd(gens, n_qubits, cfg.trotter_steps);
}

inline Problem make_problem(PauliSum h, Sector sector, const QpvqeConfig& cfg,
                            std::optional<ReferenceSet> refs = std::nullopt) {
  const auto w = cfg.weight_vector();
  ReferenceSet r = refs ? *refs : select_references(h, sector.n_particles, sector.two_sz, w.size());
  auto prep = make_purified_prep(w, r);
  auto circ = build_ansatz(h.n_qubits(), cfg);
  return Problem{std::move(h), sector, std::move(r), std::move(prep), std::move(circ)};
}

/// A finished run together with its exact reference.
struct RunOutcome {
  SpectrumResult result;
  EDReference ed;
  std::vector<double> fidelities;
  bool certified = false;
  std::string certificate_error;
};

/// Optimizes, diagonalizes exactly and certifies. ED keeps a few levels past
/// K so degenerate partners count toward the subspace fidelity.
inline RunOutcome run_problem(const Problem& p, const QpvqeConfig& cfg) {
  RunOutcome out;
  out.result = optimize(p.h, p.circ, p.prep, cfg);
  const std::size_t dim = sector_basis(p.h.n_qubits(), p.sector.n_particles, p.sector.two_sz).size();
  out.ed = exact_diagonalize(p.h, p.sector, std::min(dim, p.refs.size() + 4));
  for (std::size_t j = 0; j < out.result.states.size(); ++j) {
    out.fidelities.push_back(subspace_fidelity(out.result.states[j], out.ed, j));
  }
  try {
    certify(out.result, p.prep.weights, out.ed.energies);
    out.certified = true;
  } catch (const std::logic_error& e) {
    out.certificate_error = e.what();
  }
  return out;
}

/// "N,2Sz".
inline Sector parse_sector(std::string_view s) {
  auto comma = s.find(',');
  Sector out;
  if (comma == std::string_view::npos || !detail::parse_int(s.substr(0, comma), out.n_particles) ||
      !detail::parse_int(s.substr(comma + 1), out.two_sz) || out.n_particles < 0) {
    throw std::invalid_argument("sector must look like '<N>,<2Sz>', got '" + std::string(s) + "'");
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view s, char sep = ',') {
  std::vector<double> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    auto j = s.find(sep, i);
    if (j == std::string_view::npos) j = s.size();
    double v = 0.0;
    if (!detail::parse_double(s.substr(i, j - i), v)) {
      throw std::invalid_argument("bad number '" + std::string(s.substr(i, j - i)) + "'");
    }
    out.push_back(v);
    i = j + 1;
  }
  return out;
}

/// "0,1,2,3;0,3,1,2" -> {{0,1,2,3},{0,3,1,2}}.
inline std::vector<std::vector<int>> parse_excitation_list(std::string_view s) {
  std::vector<std::vector<int>> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    auto j = s.find(';', i);
    if (j == std::string_view::npos) j = s.size();
    std::vector<int> idx;
    for (double v : parse_double_list(s.substr(i, j - i))) {
      if (v != std::floor(v) || v < 0) throw std::invalid_argument("excitation indices must be non-negative integers");
      idx.push_back(static_cast<int>(v));
    }
    out.push_back(std::move(idx));
    i = j + 1;
  }
  return out;
}

struct SweepPoint {
  std::string label;
  std::string path;  // resolved against the manifest directory
};

struct SweepManifest {
  std::vector<SweepPoint> points;
  QpvqeConfig config;
  Sector sector{2, 0};
};

inline SweepManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  SweepManifest m;
  std::set<std::string> labels;
  while (std::getline(in, raw)) {
    ++line_no;
    auto t = detail::split_ws(detail::strip_comment(raw));
    if (t.empty()) continue;
    if (t[0] == "set") {
      if (t.size() != 3) throw ParseError(line_no, "expected 'set <key> <value>'");
      const std::string key(t[1]);
      int v = 0;
      try {
        if (key == "k") {
          if (!detail::parse_int(t[2], v) || v < 1) throw ParseError(line_no, "k must be a positive integer");
          m.config.k = v;
        } else if (key == "sector") {
          m.sector = parse_sector(t[2]);
        } else if (key == "weights") {
          m.config.weights = parse_double_list(t[2]);
        } else if (key == "restarts") {
          if (!detail::parse_int(t[2], v) || v < 0) throw ParseError(line_no, "restarts must be >= 0");
          m.config.restarts = v;
        } else if (key == "max_iterations") {
          if (!detail::parse_int(t[2], v) || v < 0) throw ParseError(line_no, "max_iterations must be >= 0");
          m.config.max_iterations = v;
        } else {
          throw ParseError(line_no, "unknown setting '" + key + "'");
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
      continue;
    }
    if (t.size() != 2) throw ParseError(line_no, "expected '<label> <hamiltonian path>'");
    std::string label(t[0]);
    if (!labels.insert(label).second) throw ParseError(line_no, "duplicate label '" + label + "'");
    m.points.push_back({label, (base_dir / std::string(t[1])).string()});
  }
  if (m.points.empty()) throw ParseError(line_no, "manifest lists no points");
  if (m.config.weights && static_cast<int>(m.config.weights->size()) != m.config.k) {
    throw ParseError(line_no, "weights length differs from k");
  }
  return m;
}

inline SweepManifest load_manifest(const std::string& path) {
  try {
    return parse_manifest(read_text_file(path), std::filesystem::path(path).parent_path());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

/// Stream seed for run `index` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

/// --seed, else $QPVQE_SEED, else 0.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QPVQE_SEED")) {
    std::uint64_t v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("QPVQE_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

inline std::string csv_header() { return "label,j,energy_ha,ed_energy_ha,abs_err_ha,fidelity,e_w,bound\n"; }

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_rows(const std::string& label, const RunOutcome& o) {
  std::string out;
  const auto& r = o.result;
  for (std::size_t j = 0; j < r.energies.size(); ++j) {
    out += label + "," + std::to_string(j) + "," + format_g12(r.energies[j]) + "," + format_g12(o.ed.energies[j]) +
           "," + format_g12(std::abs(r.energies[j] - o.ed.energies[j])) + "," + format_g12(o.fidelities[j]) + "," +
           (r.e_w ? format_g12(*r.e_w) : "nan") + "," + (r.bound ? format_g12(*r.bound) : "nan") + "\n";
  }
  return out;
}

/**
 * @brief Runs every manifest point, up to `jobs` at a time, and returns the
 * outcomes in manifest order. Point i uses derive_seed(seed, i).
 */
inline std::vector<RunOutcome> run_sweep(const SweepManifest& m, std::uint64_t seed, int jobs) {
  if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");
  std::vector<RunOutcome> out(m.points.size());
  std::vector<std::string> errors(m.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < m.points.size(); i = next++) {
      try {
        QpvqeConfig cfg = m.config;
        cfg.seed = derive_seed(seed, i);
        out[i] = run_problem(make_problem(load_hamiltonian(m.points[i].path), m.sector, cfg), cfg);
      } catch (const std::exception& e) {
        errors[i] = m.points[i].label + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), m.points.size());
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  return out;
}

using json = nlohmann::ordered_json;

/// Versioned result record; equal inputs give byte-identical output.
inline json result_record(const std::string& hamiltonian, const Problem& p, const QpvqeConfig& cfg,
                          const RunOutcome& o) {
  json j;
  j["format"] = 1;
  j["hamiltonian"] = hamiltonian;
  j["n_working_qubits"] = p.prep.n_working;
  j["n_ancilla_qubits"] = p.prep.n_ancilla;
  j["sector"] = {{"n_particles", p.sector.n_particles}, {"two_sz", p.sector.two_sz}};
  j["k"] = p.refs.size();
  j["weights"] = std::vector<double>(p.prep.weights.values().begin(), p.prep.weights.values().end());
  json refs = json::array();
  for (const auto& d : p.refs.determinants()) refs.push_back(format_bitstring(d));
  j["references"] = refs;
  j["excitations"] = cfg.effective_excitations ? json(*cfg.effective_excitations) : json("full");
  j["trotter_steps"] = cfg.trotter_steps;
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  const auto& r = o.result;
  j["restart_index"] = r.restart_index;
  j["iterations_used"] = r.iterations_used;
  j["converged"] = r.converged;
  j["ordering_violated"] = r.ordering_violated;
  j["theta_star"] = r.theta_star;
  j["energies"] = r.energies;
  j["ed_energies"] = std::vector<double>(o.ed.energies.begin(), o.ed.energies.begin() + static_cast<long>(r.energies.size()));
  j["fidelities"] = o.fidelities;
  j["e_w"] = r.e_w ? json(*r.e_w) : json(nullptr);
  j["bound"] = r.bound ? json(*r.bound) : json(nullptr);
  j["ensemble_trace"] = r.ensemble_trace;
  return j;
}

/// A stored record reopened for measurement.
struct StoredRun {
  Problem problem;
  QpvqeConfig config;
  std::vector<double> theta_star;
  std::vector<double> energies;
};

inline StoredRun load_record(const std::string& path) {
  json j = json::parse(read_text_file(path));
  if (j.value("format", 0) != 1) throw std::runtime_error(path + ": unsupported record format");
  QpvqeConfig cfg;
  cfg.k = j.at("k").get<int>();
  cfg.weights = j.at("weights").get<std::vector<double>>();
  cfg.trotter_steps = j.at("trotter_steps").get<int>();
  if (j.at("excitations").is_array()) cfg.effective_excitations = j.at("excitations").get<std::vector<std::vector<int>>>();
  auto ham_path = std::filesystem::path(j.at("hamiltonian").get<std::string>());
  auto h = load_hamiltonian(ham_path.string());
  Sector s{j.at("sector").at("n_particles").get<int>(), j.at("sector").at("two_sz").get<int>()};
  auto refs = ReferenceSet::from_strings(j.at("references").get<std::vector<std::string>>());
  StoredRun out{make_problem(std::move(h), s, cfg, refs), cfg, j.at("theta_star").get<std::vector<double>>(),
                j.at("energies").get<std::vector<double>>()};
  if (static_cast<int>(out.theta_star.size()) != out.problem.circ.parameter_count) {
    throw std::runtime_error(path + ": theta_star length does not match the ansatz");
  }
  return out;
}

}  // namespace qpvqe
