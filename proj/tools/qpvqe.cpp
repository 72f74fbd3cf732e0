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

// Command-line front end: run, sweep, ed, gaps, amplitudes, noisy-run.

#include "qpvqe/qpvqe.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace qpvqe;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

struct CommonOpts {
  int k = 4;
  std::string sector;
  std::string weights;
  std::string effective;
  std::optional<std::uint64_t> seed;
  int restarts = 0;
  int max_iterations = 20000;
  double threshold = 1e-9;
  double lr = 0.05;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("-k", o.k, "number of targeted states")->check(CLI::PositiveNumber);
  app->add_option("--sector", o.sector, "particle number and 2*Sz as N,2Sz (default: half filling, 0)");
  app->add_option("--weights", o.weights, "comma-separated strictly decreasing weights (default: K..1 normalized)");
  app->add_option("--effective", o.effective, "excitation list, e.g. '0,1,2,3;0,3,1,2' (default: full UCCGSD)");
  app->add_option("--seed", o.seed, "master seed (fallback: $QPVQE_SEED, then 0)");
  app->add_option("--restarts", o.restarts, "extra randomly initialized runs")->check(CLI::NonNegativeNumber);
  app->add_option("--max-iterations", o.max_iterations, "optimizer iteration cap")->check(CLI::NonNegativeNumber);
  app->add_option("--threshold", o.threshold, "convergence threshold in Hartree")->check(CLI::PositiveNumber);
  app->add_option("--lr", o.lr, "Adam learning rate")->check(CLI::PositiveNumber);
}

QpvqeConfig make_config(const CommonOpts& o) {
  QpvqeConfig cfg;
  cfg.k = o.k;
  if (!o.weights.empty()) cfg.weights = parse_double_list(o.weights);
  if (!o.effective.empty()) cfg.effective_excitations = parse_excitation_list(o.effective);
  cfg.seed = resolve_seed(o.seed);
  cfg.restarts = o.restarts;
  cfg.max_iterations = o.max_iterations;
  cfg.convergence_threshold = o.threshold;
  cfg.adam.learning_rate = o.lr;
  return cfg;
}

Sector sector_or_default(const std::string& s, const PauliSum& h) {
  return s.empty() ? Sector{h.n_qubits() / 2, 0} : parse_sector(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-parallelized VQE for low-lying spectra"};
  app.require_subcommand(1);

  CommonOpts run_o;
  std::string run_ham, run_out = "-", run_csv;
  auto* run = app.add_subcommand("run", "optimize one Hamiltonian and write a result record");
  run->add_option("--hamiltonian", run_ham, "Hamiltonian file")->required();
  run->add_option("--out", run_out, "result record path ('-' for stdout)");
  run->add_option("--csv", run_csv, "also write CSV rows here");
  add_common(run, run_o);

  std::string sweep_manifest, sweep_out = "-";
  std::optional<std::uint64_t> sweep_seed;
  int sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run every point of a manifest and emit CSV");
  sweep->add_option("--manifest", sweep_manifest, "manifest file")->required();
  sweep->add_option("--out", sweep_out, "CSV path ('-' for stdout)");
  sweep->add_option("--seed", sweep_seed, "master seed (fallback: $QPVQE_SEED, then 0)");
  sweep->add_option("--jobs", sweep_jobs, "points run concurrently")->check(CLI::PositiveNumber);

  std::string ed_ham, ed_sector;
  int ed_k = 4;
  auto* ed = app.add_subcommand("ed", "print the lowest exact energies");
  ed->add_option("--hamiltonian", ed_ham, "Hamiltonian file")->required();
  ed->add_option("--sector", ed_sector, "N,2Sz (default: whole Hilbert space)");
  ed->add_option("-k", ed_k, "number of levels")->check(CLI::PositiveNumber);

  std::string gaps_record;
  auto* gaps = app.add_subcommand("gaps", "energy gaps from a stored result record");
  gaps->add_option("--record", gaps_record, "result record")->required();

  std::string amp_record, amp_obs;
  auto* amps = app.add_subcommand("amplitudes", "transition amplitudes <eps_i|O|eps_j> from a stored record");
  amps->add_option("--record", amp_record, "result record")->required();
  amps->add_option("--observable", amp_obs, "observable file (Hamiltonian format)")->required();

  CommonOpts noisy_o;
  std::string noisy_ham, noisy_cal, noisy_out;
  int noisy_shots = 10000, noisy_iters = 1000;
  auto* noisy = app.add_subcommand("noisy-run", "SPSA on the density-matrix simulator with a calibration file");
  noisy->add_option("--hamiltonian", noisy_ham, "Hamiltonian file")->required();
  noisy->add_option("--calibration", noisy_cal, "calibration file")->required();
  noisy->add_option("--shots", noisy_shots, "shots per Pauli term (0 = exact)")->check(CLI::NonNegativeNumber);
  noisy->add_option("--iterations", noisy_iters, "SPSA iterations")->check(CLI::PositiveNumber);
  noisy->add_option("--out", noisy_out, "write the trace as CSV here");
  add_common(noisy, noisy_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = make_config(run_o);
      auto h = load_hamiltonian(run_ham);
      auto sector = sector_or_default(run_o.sector, h);
      auto p = make_problem(std::move(h), sector, cfg);
      auto o = run_problem(p, cfg);
      write_text(run_out, result_record(run_ham, p, cfg, o).dump(2) + "\n");
      if (!run_csv.empty()) write_text(run_csv, csv_header() + csv_rows("run", o));
      if (!o.certified) std::cerr << "warning: " << o.certificate_error << "\n";
      if (o.result.ordering_violated) std::cerr << "warning: extracted energies are not ordered\n";
    } else if (*sweep) {
      auto m = load_manifest(sweep_manifest);
      auto outcomes = run_sweep(m, resolve_seed(sweep_seed), sweep_jobs);
      std::string csv = csv_header();
      for (std::size_t i = 0; i < outcomes.size(); ++i) csv += csv_rows(m.points[i].label, outcomes[i]);
      write_text(sweep_out, csv);
    } else if (*ed) {
      auto h = load_hamiltonian(ed_ham);
      std::optional<Sector> s;
      if (!ed_sector.empty()) s = parse_sector(ed_sector);
      auto ref = exact_diagonalize(h, s, static_cast<std::size_t>(ed_k));
      for (double e : ref.energies) std::printf("%.12g\n", e);
    } else if (*gaps) {
      auto st = load_record(gaps_record);
      const auto& p = st.problem;
      const std::size_t k = p.refs.size();
      std::printf("i,j,gap_pair_ha,gap_direct_ha,gap_purified_ha\n");
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          double pair = energy_gap(prepare_pair(p.circ, st.theta_star, p.refs, i, j), p.h);
          std::string full = k >= 2 && k <= 4
                                 ? format_g12(gap_from_full_purified(p.circ, st.theta_star, p.refs, p.h, i, j))
                                 : "nan";
          std::printf("%zu,%zu,%s,%s,%s\n", i, j, format_g12(pair).c_str(),
                      format_g12(st.energies[i] - st.energies[j]).c_str(), full.c_str());
        }
      }
    } else if (*amps) {
      auto st = load_record(amp_record);
      auto o = load_hamiltonian(amp_obs);
      const auto& p = st.problem;
      std::printf("i,j,re,im\n");
      for (std::size_t i = 0; i < p.refs.size(); ++i) {
        for (std::size_t j = 0; j < p.refs.size(); ++j) {
          if (i == j) continue;
          auto a = transition_amplitude(prepare_pair(p.circ, st.theta_star, p.refs, i, j), o);
          std::printf("%zu,%zu,%s,%s\n", i, j, format_g12(a.real()).c_str(), format_g12(a.imag()).c_str());
        }
      }
    } else if (*noisy) {
      auto cfg = make_config(noisy_o);
      auto h = load_hamiltonian(noisy_ham);
      auto sector = sector_or_default(noisy_o.sector, h);
      if (!cfg.effective_excitations && h.n_qubits() == 4) cfg.effective_excitations = default_effective_doubles();
      auto p = make_problem(std::move(h), sector, cfg);
      auto cal = load_calibration(noisy_cal);
      ShotSampler sampler(noisy_shots, derive_seed(cfg.seed, 1));
      auto objective = [&](std::span<const double> t) {
        return noisy_ensemble_energy(p.h, p.circ, p.prep, t, cal, sampler);
      };
      auto res = spsa_optimize(objective, std::vector<double>(p.circ.parameter_count, 0.0), cfg.spsa, noisy_iters,
                               derive_seed(cfg.seed, 0));
      auto ref = exact_diagonalize(p.h, p.sector, p.refs.size());
      double exact = 0.0;
      for (std::size_t j = 0; j < p.refs.size(); ++j) exact += p.prep.weights[j] * ref.energies[j];
      std::printf("stabilized_ensemble_ha %s\n", format_g12(trailing_mean(res.ensemble_trace, 100)).c_str());
      std::printf("exact_ensemble_ha %s\n", format_g12(exact).c_str());
      std::printf("totally_mixed_ha %s\n", format_g12(p.h.normalized_trace().real()).c_str());
      if (!noisy_out.empty()) {
        std::string csv = "iteration,ensemble_ha\n";
        for (std::size_t i = 0; i < res.ensemble_trace.size(); ++i) {
          csv += std::to_string(i) + "," + format_g12(res.ensemble_trace[i]) + "\n";
        }
        write_text(noisy_out, csv);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
