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

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

/**
 * @brief (U|D_i>|0> + U|D_j>|1>) / sqrt 2 on N + 1 qubits, ancilla last.
 *
 * Measurement-only: the two branches have equal weight, which WeightVector
 * rejects, so this type is kept apart from the optimization path.
 */
class PairState {
 public:
  PairState(StateVector state, std::size_t i, std::size_t j) : state_(std::move(state)), i_(i), j_(j) {}

  const StateVector& state() const { return state_; }
  int n_working() const { return state_.n_qubits() - 1; }
  int ancilla() const { return state_.n_qubits() - 1; }
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  StateVector state_;
  std::size_t i_, j_;
};

/// Gates mapping |0...0>|a> to |D_i>|0> / |D_j>|1> on the working register.
inline std::vector<GateOp> pair_program(const std::vector<int>& di, const std::vector<int>& dj) {
  if (di.size() != dj.size()) throw std::invalid_argument("pair_program: determinants differ in length");
  if (di == dj) throw std::invalid_argument("pair_program: the two determinants are identical");
  const int n = static_cast<int>(di.size());
  std::vector<GateOp> out{GateOp::ry(n, std::numbers::pi / 2)};
  for (int q = 0; q < n; ++q) {
    if (di[q] && dj[q]) {
      out.push_back(GateOp::x(q));
    } else if (di[q]) {
      out.push_back(GateOp::controlled_x({{n, 0}}, q));
    } else if (dj[q]) {
      out.push_back(GateOp::cnot(n, q));
    }
  }
  return out;
}

inline PairState prepare_pair(const AnsatzCircuit& circ, std::span<const double> theta, const ReferenceSet& refs,
                              std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("prepare_pair: i and j must differ");
  if (i >= refs.size() || j >= refs.size()) throw std::out_of_range("prepare_pair: reference index out of range");
  if (refs.n_qubits() != circ.n_working_qubits) throw std::invalid_argument("prepare_pair: register mismatch");
  StateVector s(refs.n_qubits() + 1);
  apply_circuit(s, pair_program(refs[i], refs[j]));
  apply_ansatz(circ, theta, s);
  return PairState(std::move(s), i, j);
}

/// Z (or X, Y) on the pair ancilla, identity on the working register.
inline PauliSum ancilla_operator(PauliLetter l) {
  PauliString s(1);
  s.set(0, l);
  return PauliSum(s, 1.0);
}

/// eps_i - eps_j = 2 <Psi_ij| H (x) Z_a |Psi_ij>.
inline double energy_gap(const PairState& pair, const PauliSum& h) {
  if (h.n_qubits() != pair.n_working()) throw std::invalid_argument("energy_gap: register mismatch");
  return 2.0 * expectation(h.tensor(ancilla_operator(PauliLetter::Z)), pair.state());
}

/// <eps_i|O|eps_j>: real part from O (x) X_a, imaginary part from O (x) Y_a.
inline complex_t transition_amplitude(const PairState& pair, const PauliSum& o) {
  if (o.n_qubits() != pair.n_working()) throw std::invalid_argument("transition_amplitude: register mismatch");
  const double re = expectation(o.tensor(ancilla_operator(PauliLetter::X)), pair.state());
  const double im = expectation(o.tensor(ancilla_operator(PauliLetter::Y)), pair.state());
  return {re, im};
}

/// |l><l| for the c-bit label l, as a product of (1 +- Z)/2 factors.
inline PauliSum label_projector(std::size_t label, int c) {
  PauliSum out = PauliSum::identity(c);
  for (int m = 0; m < c; ++m) {
    PauliString z(c);
    z.set(m, PauliLetter::Z);
    PauliSum f = PauliSum::identity(c, 0.5);
    f.add_term(z, label_bit(label, m, c) ? -0.5 : 0.5);
    out = out * f;
  }
  return out;
}

/// |l_i><l_i| - |l_j><l_j| on the ancilla register.
inline PauliSum gap_ancilla_operator(std::size_t i, std::size_t j, int c) {
  return label_projector(i, c) - label_projector(j, c);
}

/**
 * @brief eps_i - eps_j from one expectation of H (x) (|l_i><l_i| - |l_j><l_j|)
 * on the equal-branch K-way state evolved by U(theta*), times K.
 *
 * For K = 4 the operator reduces to a Z string times a (1 +- Z)/2 projector
 * on the other ancilla. Supported for 2 <= K <= 4.
 */
inline double gap_from_full_purified(const AnsatzCircuit& circ, std::span<const double> theta,
                                     const ReferenceSet& refs, const PauliSum& h, std::size_t i, std::size_t j) {
  const std::size_t k = refs.size();
  if (k < 2 || k > 4) {
    throw std::invalid_argument("gap_from_full_purified: implemented for 2 <= K <= 4, got K = " + std::to_string(k));
  }
  if (i == j || i >= k || j >= k) throw std::invalid_argument("gap_from_full_purified: bad pair");
  if (h.n_qubits() != circ.n_working_qubits) throw std::invalid_argument("gap_from_full_purified: register mismatch");
  StateVector s = prepare_equal_branches(refs);
  apply_ansatz(circ, theta, s);
  const int c = ancilla_count(k);
  return static_cast<double>(k) * expectation(h.tensor(gap_ancilla_operator(i, j, c)), s);
}

}  // namespace qpvqe
