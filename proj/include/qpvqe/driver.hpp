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

#include "qpvqe/ansatz.hpp"
#include "qpvqe/state_prep.hpp"

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

struct AdamOptions {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Gains a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaOptions {
  double a = 0.2;
  double c = 0.1;
  double stability = 20.0;  // A
  double alpha = 0.602;
  double gamma = 0.101;
};

enum class OptimizerKind : std::uint8_t { Adam, Spsa };

struct QpvqeConfig {
  int k = 4;
  std::optional<std::vector<double>> weights;  // default: (K, ..., 1) normalized
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamOptions adam;
  SpsaOptions spsa;
  int max_iterations = 20000;
  double convergence_threshold = 1e-9;  // Hartree
  int convergence_window = 10;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::vector<int>>> effective_excitations;
  int trotter_steps = 1;
  int restarts = 0;         // extra randomly initialized runs
  double init_scale = 0.1;  // std. dev. of restart initial angles

  WeightVector weight_vector() const {
    if (k < 1) throw std::invalid_argument("QpvqeConfig: K must be >= 1");
    if (!(convergence_threshold > 0.0)) throw std::invalid_argument("QpvqeConfig: threshold must be positive");
    if (!weights) return default_weights(k);
    if (static_cast<int>(weights->size()) != k) throw std::invalid_argument("QpvqeConfig: weights length != K");
    return WeightVector(*weights);
  }
};

/// Thrown when the objective turns non-finite during optimization.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, double value)
      : std::runtime_error("objective diverged at iteration " + std::to_string(iteration) + " (value " +
                           std::to_string(value) + ")"),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct SpectrumResult {
  ParameterVector theta_star;
  std::vector<double> energies;  // in reference (weight) order
  std::vector<StateVector> states;
  std::vector<double> ensemble_trace;
  int iterations_used = 0;
  int restart_index = 0;
  bool converged = false;
  bool ordering_violated = false;
  std::optional<double> e_w;
  std::optional<double> bound;
};

/**
 * @brief L_w(theta) = <Phi(w)| U^dag H U (x) 1 |Phi(w)>, one expectation on
 * the evolved purified register.
 */
inline double ensemble_energy(const PauliSum& h, const AnsatzCircuit& circ, const StateVector& purified,
                              std::span<const double> theta) {
  if (h.n_qubits() != circ.n_working_qubits) {
    throw std::invalid_argument("ensemble_energy: Hamiltonian has " + std::to_string(h.n_qubits()) +
                                " qubits, ansatz " + std::to_string(circ.n_working_qubits));
  }
  StateVector s = purified;
  apply_ansatz(circ, theta, s);
  return expectation(h, s);
}

inline double ensemble_energy(const PauliSum& h, const AnsatzCircuit& circ, const PurifiedPrep& prep,
                              std::span<const double> theta) {
  if (prep.n_working != circ.n_working_qubits) throw std::invalid_argument("ensemble_energy: register mismatch");
  return ensemble_energy(h, circ, prepare_purified(prep), theta);
}

/// |eps_j> = U(theta*)|D_j> on the working register and eps_j = <eps_j|H|eps_j>.
inline std::pair<std::vector<double>, std::vector<StateVector>> extract_eigenpairs(const AnsatzCircuit& circ,
                                                                                   std::span<const double> theta,
                                                                                   const ReferenceSet& refs,
                                                                                   const PauliSum& h) {
  std::vector<double> energies;
  std::vector<StateVector> states;
  for (const auto& d : refs.determinants()) {
    StateVector s = init_basis(refs.n_qubits(), std::span<const int>(d));
    apply_ansatz(circ, theta, s);
    energies.push_back(expectation(h, s));
    states.push_back(std::move(s));
  }
  return {energies, states};
}

struct ErrorBound {
  double e_w = 0.0;
  double bound = 0.0;
  double total_error = 0.0;  // sum_j |eps_j - E_j|
};

/**
 * @brief e_w = sum_j w_j (eps_j - E_j) and the certificate
 * sum_j |eps_j - E_j| <= 2 e_w / min_{i<j} |w_i - w_j|.
 *
 * For K = 1 the sum equals e_w and the bound is e_w itself. Throws
 * std::logic_error on e_w < -1e-10 or a violated certificate.
 */
inline ErrorBound error_bound(std::span<const double> energies, const WeightVector& w,
                              std::span<const double> ed_energies) {
  if (energies.size() != w.size() || ed_energies.size() < w.size()) {
    throw std::invalid_argument("error_bound: size mismatch");
  }
  ErrorBound out;
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.e_w += w[j] * (energies[j] - ed_energies[j]);
    out.total_error += std::abs(energies[j] - ed_energies[j]);
  }
  if (out.e_w < -1e-10) {
    throw std::logic_error("error_bound: negative weighted error " + std::to_string(out.e_w) +
                           " violates the ensemble variational principle");
  }
  out.bound = w.size() == 1 ? out.e_w : 2.0 * out.e_w / w.min_gap();
  if (out.total_error > out.bound + 1e-10) {
    throw std::logic_error("error_bound: certificate violated (" + std::to_string(out.total_error) + " > " +
                           std::to_string(out.bound) + ")");
  }
  return out;
}

namespace detail {

struct AdamRun {
  std::vector<double> theta;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/**
 * Adam with step rejection: a step that raises the ensemble energy is
 * discarded, the learning rate is halved and the first moment is reset;
 * accepted steps grow the rate by 5% back toward its configured value. The
 * recorded trace is therefore non-increasing.
 */
inline AdamRun run_adam(const PauliSum& h, const AnsatzCircuit& circ, const StateVector& purified,
                        const QpvqeConfig& cfg, std::vector<double> theta) {
  const auto& a = cfg.adam;
  const std::size_t n_params = theta.size();
  std::vector<double> m(n_params, 0.0), v(n_params, 0.0), cand(n_params);
  AdamRun run;
  double energy = 0.0;
  std::vector<double> grad = adjoint_gradient(circ, theta, purified, h, &energy);
  if (!std::isfinite(energy)) throw DivergenceError(0, energy);
  run.trace.push_back(energy);
  double lr = a.learning_rate, b1t = 1.0, b2t = 1.0;
  const auto window = static_cast<std::size_t>(cfg.convergence_window);
  int it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    b1t *= a.beta1;
    b2t *= a.beta2;
    for (std::size_t i = 0; i < n_params; ++i) {
      m[i] = a.beta1 * m[i] + (1 - a.beta1) * grad[i];
      v[i] = a.beta2 * v[i] + (1 - a.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / (1 - b1t), vhat = v[i] / (1 - b2t);
      cand[i] = theta[i] - lr * mhat / (std::sqrt(vhat) + a.epsilon);
    }
    double trial = 0.0;
    std::vector<double> trial_grad = adjoint_gradient(circ, cand, purified, h, &trial);
    if (!std::isfinite(trial)) throw DivergenceError(it, trial);
    if (trial > energy) {
      lr *= 0.5;
      std::fill(m.begin(), m.end(), 0.0);
      b1t = 1.0;
      if (lr < 1e-14 * a.learning_rate) {
        run.converged = true;  // no descent left at machine precision
        break;
      }
      continue;
    }
    lr = std::min(a.learning_rate, lr * 1.05);
    theta.swap(cand);
    grad.swap(trial_grad);
    energy = trial;
    run.trace.push_back(energy);
    const std::size_t len = run.trace.size();
    if (len > window && std::abs(run.trace[len - 1 - window] - energy) < cfg.convergence_threshold) {
      run.converged = true;
      break;
    }
  }
  run.iterations = it;
  run.theta = std::move(theta);
  return run;
}

}  // namespace detail

/**
 * @brief Minimizes the ensemble energy with Adam and extracts eigenpairs.
 *
 * Run 0 starts from theta = 0 (the weighted reference ensemble). With
 * cfg.restarts > 0, additional runs start from theta ~ N(0, init_scale^2)
 * drawn from a stream seeded by (seed, run index); runs execute
 * concurrently and the lowest final ensemble energy wins, ties to the lower
 * run index. Results depend only on the config.
 */
inline SpectrumResult optimize(const PauliSum& h, const AnsatzCircuit& circ, const PurifiedPrep& prep,
                               const QpvqeConfig& cfg) {
  if (cfg.optimizer != OptimizerKind::Adam) {
    throw std::invalid_argument("optimize: the statevector path uses Adam; SPSA runs through the noisy objective");
  }
  if (cfg.max_iterations < 0 || cfg.convergence_window < 1 || cfg.restarts < 0) {
    throw std::invalid_argument("optimize: bad limits");
  }
  if (h.n_qubits() != circ.n_working_qubits || prep.n_working != circ.n_working_qubits) {
    throw std::invalid_argument("optimize: register sizes of Hamiltonian, ansatz and preparation differ");
  }
  const StateVector purified = prepare_purified(prep);
  const auto n_params = static_cast<std::size_t>(circ.parameter_count);
  std::vector<std::future<detail::AdamRun>> jobs;
  for (int r = 0; r <= cfg.restarts; ++r) {
    std::vector<double> theta0(n_params, 0.0);
    if (r > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> dist(0.0, cfg.init_scale);
      for (auto& x : theta0) x = dist(rng);
    }
    jobs.push_back(std::async(std::launch::async, [&, theta0 = std::move(theta0)]() mutable {
      return detail::run_adam(h, circ, purified, cfg, std::move(theta0));
    }));
  }
  std::vector<detail::AdamRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].trace.back() < runs[best].trace.back()) best = r;
  }
  SpectrumResult res;
  res.theta_star = std::move(runs[best].theta);
  res.ensemble_trace = std::move(runs[best].trace);
  res.iterations_used = runs[best].iterations;
  res.converged = runs[best].converged;
  res.restart_index = static_cast<int>(best);
  auto [energies, states] = extract_eigenpairs(circ, res.theta_star, prep.refs, h);
  for (std::size_t j = 1; j < energies.size(); ++j) {
    if (energies[j] < energies[j - 1] - 1e-10) res.ordering_violated = true;
  }
  res.energies = std::move(energies);
  res.states = std::move(states);
  return res;
}

/// Attaches e_w and the certificate given exact reference energies.
inline void certify(SpectrumResult& res, const WeightVector& w, std::span<const double> ed_energies) {
  auto b = error_bound(res.energies, w, ed_energies);
  res.e_w = b.e_w;
  res.bound = b.bound;
}

}  // namespace qpvqe
