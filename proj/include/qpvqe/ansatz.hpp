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

#include "qpvqe/fermion.hpp"
#include "qpvqe/statevector.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

/// One factor exp(-i * theta[parameter_index] * coefficient * P).
struct PauliRotation {
  PauliString string;
  double coefficient = 0.0;
  int parameter_index = 0;

  /// Angle in the exp(-i angle/2 P) convention.
  double angle(std::span<const double> theta) const { return 2.0 * theta[parameter_index] * coefficient; }
};

/**
 * @brief Trotterized UCC circuit U(theta) on the working register.
 *
 * Rotations are applied in list order. All strings act on qubits below
 * n_working_qubits, so the circuit is the identity on any ancilla register
 * appended after the working qubits.
 */
struct AnsatzCircuit {
  int n_working_qubits = 0;
  std::vector<PauliRotation> rotations;
  int parameter_count = 0;
};

using ParameterVector = std::vector<double>;

/**
 * @brief Compiles exp(sum_k theta_k (G_k - G_k^dag)) with `trotter_steps`
 * steps of the first-order product formula (default: one step).
 *
 * The anti-Hermitian Pauli form i*a*P of each generator becomes the rotation
 * exp(-i theta c P) with c = -a. Strings inside one generator follow the
 * canonical PauliSum order; generator order follows the input.
 */
inline AnsatzCircuit build_uccgsd(const std::vector<ExcitationGenerator>& generators, int n_working_qubits = 0,
                                  int trotter_steps = 1) {
  if (generators.empty()) throw std::invalid_argument("build_uccgsd: empty generator list");
  if (trotter_steps < 1) throw std::invalid_argument("build_uccgsd: trotter_steps must be >= 1");
  if (n_working_qubits == 0) n_working_qubits = generators.front().pauli_form.n_qubits();
  AnsatzCircuit circ;
  circ.n_working_qubits = n_working_qubits;
  std::vector<PauliRotation> step;
  for (const auto& g : generators) {
    for (const auto& [s, c] : g.pauli_form.terms()) {
      if (s.max_qubit() >= n_working_qubits) {
        throw std::invalid_argument("build_uccgsd: generator " + g.label() + " touches qubit " +
                                    std::to_string(s.max_qubit()) + " outside the working register");
      }
      if (std::abs(c.real()) > 1e-12) {
        throw std::invalid_argument("build_uccgsd: generator " + g.label() + " is not anti-Hermitian");
      }
      step.push_back({s, -c.imag() / trotter_steps, g.parameter_index});
    }
    circ.parameter_count = std::max(circ.parameter_count, g.parameter_index + 1);
  }
  for (int r = 0; r < trotter_steps; ++r) circ.rotations.insert(circ.rotations.end(), step.begin(), step.end());
  return circ;
}

namespace detail {
inline void check_theta(const AnsatzCircuit& circ, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != circ.parameter_count) {
    throw std::invalid_argument("ansatz: parameter vector has length " + std::to_string(theta.size()) +
                                ", circuit expects " + std::to_string(circ.parameter_count));
  }
}
}  // namespace detail

/// U(theta) (x) 1 applied in place.
inline void apply_ansatz(const AnsatzCircuit& circ, std::span<const double> theta, StateVector& state) {
  detail::check_theta(circ, theta);
  if (state.n_qubits() < circ.n_working_qubits) {
    throw std::invalid_argument("apply_ansatz: state has fewer qubits than the working register");
  }
  for (const auto& r : circ.rotations) {
    detail::pauli_rotation(state.amplitudes(), state.n_qubits(), r.string, r.angle(theta));
  }
}

/// U(theta)^dag (x) 1 applied in place.
inline void apply_ansatz_inverse(const AnsatzCircuit& circ, std::span<const double> theta, StateVector& state) {
  detail::check_theta(circ, theta);
  for (auto it = circ.rotations.rbegin(); it != circ.rotations.rend(); ++it) {
    detail::pauli_rotation(state.amplitudes(), state.n_qubits(), it->string, -it->angle(theta));
  }
}

using StateObjective = std::function<double(const StateVector&)>;

/**
 * @brief Parameter-shift gradient of objective(U(theta) initial).
 *
 * Each rotation exp(-i phi/2 P) contributes
 * dphi/dtheta * (f(phi + pi/2) - f(phi - pi/2)) / 2, exact for objectives
 * that are expectations of Hermitian operators.
 */
inline std::vector<double> gradient(const AnsatzCircuit& circ, std::span<const double> theta,
                                    const StateVector& initial, const StateObjective& objective) {
  detail::check_theta(circ, theta);
  std::vector<double> grad(circ.parameter_count, 0.0);
  const int n = initial.n_qubits();
  auto run_shifted = [&](std::size_t shifted, double shift) {
    StateVector s = initial;
    for (std::size_t j = 0; j < circ.rotations.size(); ++j) {
      const auto& r = circ.rotations[j];
      double a = r.angle(theta) + (j == shifted ? shift : 0.0);
      detail::pauli_rotation(s.amplitudes(), n, r.string, a);
    }
    return objective(s);
  };
  constexpr double kHalfPi = std::numbers::pi / 2;
  for (std::size_t j = 0; j < circ.rotations.size(); ++j) {
    const auto& r = circ.rotations[j];
    double d = 0.5 * (run_shifted(j, kHalfPi) - run_shifted(j, -kHalfPi));
    grad[r.parameter_index] += 2.0 * r.coefficient * d;
  }
  return grad;
}

/**
 * @brief Reverse-mode gradient of <psi|H (x) 1|psi>, psi = U(theta) initial.
 *
 * Same values as the parameter-shift rule at the cost of about three circuit
 * passes instead of two per rotation. Also returns the energy.
 */
inline std::vector<double> adjoint_gradient(const AnsatzCircuit& circ, std::span<const double> theta,
                                            const StateVector& initial, const PauliSum& h, double* energy = nullptr) {
  detail::check_theta(circ, theta);
  const int n = initial.n_qubits();
  StateVector phi = initial;
  apply_ansatz(circ, theta, phi);
  StateVector lambda = apply_pauli_sum(h, phi);
  if (energy) *energy = inner_product(phi, lambda).real();
  std::vector<double> grad(circ.parameter_count, 0.0);
  for (auto it = circ.rotations.rbegin(); it != circ.rotations.rend(); ++it) {
    // d<H>/dphi = 2 Re <lambda| (-i/2) P |phi> = Im <lambda|P|phi>.
    const complex_t lp = pauli_matrix_element(it->string, lambda.amplitudes(), phi.amplitudes(), n);
    grad[it->parameter_index] += 2.0 * it->coefficient * lp.imag();
    const double a = -it->angle(theta);
    detail::pauli_rotation(phi.amplitudes(), n, it->string, a);
    detail::pauli_rotation(lambda.amplitudes(), n, it->string, a);
  }
  return grad;
}

}  // namespace qpvqe
