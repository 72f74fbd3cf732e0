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

#include "qpvqe/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qpvqe {

enum class GateKind : std::uint8_t { X, RY, CNOT, Controlled, PauliRot };

/// A control condition: the gate fires when `qubit` reads `value`.
struct Control {
  int qubit = 0;
  int value = 1;
  bool operator==(const Control&) const = default;
};

/**
 * @brief One gate of the state-preparation, ansatz, or measurement circuits.
 *
 * Controlled gates carry an inner kind (X or RY) in `inner`; CNOT is kept as
 * its own kind because noise calibration is keyed on it.
 */
struct GateOp {
  GateKind kind = GateKind::X;
  GateKind inner = GateKind::X;
  int target = 0;
  double angle = 0.0;
  std::vector<Control> controls;
  PauliString string;

  static GateOp x(int q) { return {GateKind::X, GateKind::X, q, 0.0, {}, {}}; }
  static GateOp ry(int q, double angle) { return {GateKind::RY, GateKind::RY, q, angle, {}, {}}; }
  static GateOp cnot(int control, int target) {
    return {GateKind::CNOT, GateKind::X, target, 0.0, {{control, 1}}, {}};
  }
  static GateOp controlled_x(std::vector<Control> controls, int target) {
    return {GateKind::Controlled, GateKind::X, target, 0.0, std::move(controls), {}};
  }
  static GateOp controlled_ry(std::vector<Control> controls, int target, double angle) {
    return {GateKind::Controlled, GateKind::RY, target, angle, std::move(controls), {}};
  }
  /// exp(-i angle/2 P).
  static GateOp pauli_rot(PauliString p, double angle) {
    return {GateKind::PauliRot, GateKind::PauliRot, 0, angle, {}, std::move(p)};
  }

  /// Every qubit the gate touches, controls first.
  std::vector<int> operands() const {
    std::vector<int> out;
    if (kind == GateKind::PauliRot) {
      for (auto [q, l] : string.letters()) out.push_back(q);
      return out;
    }
    for (const auto& c : controls) out.push_back(c.qubit);
    out.push_back(target);
    return out;
  }

  /// Inverse gate (angle negated; X and CNOT are self-inverse).
  GateOp inverse() const {
    GateOp g = *this;
    g.angle = -angle;
    return g;
  }
};

/**
 * @brief Dense pure state on n qubits, qubit 0 the most significant bit.
 */
class StateVector {
 public:
  StateVector() = default;

  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
      throw std::invalid_argument("StateVector: n_qubits must be in [1, 30], got " + std::to_string(n_qubits));
    }
    amp_.assign(std::size_t{1} << n_qubits, complex_t{});
    amp_[0] = 1.0;
  }

  StateVector(int n_qubits, std::vector<complex_t> amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
    if (amp_.size() != (std::size_t{1} << n_qubits)) {
      throw std::invalid_argument("StateVector: expected 2^" + std::to_string(n_qubits) + " amplitudes");
    }
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }
  std::span<const complex_t> amplitudes() const { return amp_; }
  std::span<complex_t> amplitudes() { return amp_; }
  const complex_t& operator[](std::size_t i) const { return amp_[i]; }
  complex_t& operator[](std::size_t i) { return amp_[i]; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// Basis-index bit of qubit q.
  std::uint64_t bit(int q) const { return std::uint64_t{1} << (n_ - 1 - q); }

 private:
  int n_ = 1;
  std::vector<complex_t> amp_{complex_t{1.0}};
};

/// Basis index of an occupation list, first entry most significant.
inline std::uint64_t basis_index(std::span<const int> bits) {
  std::uint64_t idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("basis_index: occupation must be 0 or 1");
    idx = (idx << 1) | static_cast<std::uint64_t>(b);
  }
  return idx;
}

/// Parses "1100" into {1,1,0,0}.
inline std::vector<int> parse_bitstring(std::string_view s) {
  std::vector<int> out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("parse_bitstring: bad character in '" + std::string(s) + "'");
    out.push_back(c - '0');
  }
  return out;
}

inline std::string format_bitstring(std::span<const int> bits) {
  std::string s;
  for (int b : bits) s += static_cast<char>('0' + b);
  return s;
}

inline StateVector init_basis(int n_qubits, std::span<const int> bits) {
  if (static_cast<int>(bits.size()) != n_qubits) {
    throw std::invalid_argument("init_basis: bitstring length " + std::to_string(bits.size()) +
                                " != n_qubits " + std::to_string(n_qubits));
  }
  StateVector s(n_qubits);
  s[0] = 0.0;
  s[basis_index(bits)] = 1.0;
  return s;
}

inline StateVector init_basis(int n_qubits, std::string_view bits) {
  auto v = parse_bitstring(bits);
  return init_basis(n_qubits, std::span<const int>(v));
}

namespace detail {

inline void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw std::out_of_range("gate operand " + std::to_string(q) + " out of range for " + std::to_string(n) + " qubits");
  }
}

inline void check_gate(const GateOp& g, int n) {
  auto ops = g.operands();
  if (g.kind == GateKind::PauliRot) {
    if (g.string.n_qubits() > n) throw std::out_of_range("PauliRot string wider than register");
    if (g.string.is_identity()) throw std::invalid_argument("PauliRot with identity string");
  }
  for (int q : ops) check_qubit(q, n);
  std::sort(ops.begin(), ops.end());
  if (std::adjacent_find(ops.begin(), ops.end()) != ops.end()) {
    throw std::invalid_argument("gate operands must be distinct");
  }
  if (!std::isfinite(g.angle)) throw std::invalid_argument("gate angle must be finite");
}

/// exp(-i angle/2 P) on raw amplitudes of an n-qubit register. P may be
/// narrower than the register (acts on the leading qubits).
inline void pauli_rotation(std::span<complex_t> amp, int n, const PauliString& p, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const std::uint64_t bx = p.basis_x_mask(n), bz = p.basis_z_mask(n);
  const int ny = p.y_count();
  const std::uint64_t dim = amp.size();
  const complex_t mis(0.0, -s);
  if (bx == 0) {
    // Z-only string: P|b> = (-1)^{|b & z|} |b>.
    const complex_t plus = complex_t(c, 0.0) + mis;
    const complex_t minus = complex_t(c, 0.0) - mis;
    for (std::uint64_t b = 0; b < dim; ++b) amp[b] *= (std::popcount(b & bz) & 1) ? minus : plus;
    return;
  }
  const std::uint64_t pivot = std::uint64_t{1} << (63 - std::countl_zero(bx));
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & pivot) continue;
    const std::uint64_t b2 = b ^ bx;
    // (P psi)[b] = phase(b2) psi[b2],  (P psi)[b2] = phase(b) psi[b].
    const complex_t ph_b = ipow(basis_phase_power(b, bz, ny));
    const complex_t ph_b2 = ipow(basis_phase_power(b2, bz, ny));
    const complex_t a = amp[b], a2 = amp[b2];
    amp[b] = c * a + mis * ph_b2 * a2;
    amp[b2] = c * a2 + mis * ph_b * a;
  }
}

inline bool controls_satisfied(std::uint64_t b, std::span<const Control> controls, int n) {
  for (const auto& c : controls) {
    std::uint64_t bit = std::uint64_t{1} << (n - 1 - c.qubit);
    if (((b & bit) != 0) != (c.value != 0)) return false;
  }
  return true;
}

/// Applies a gate to raw amplitudes. `conjugate` applies U* instead of U,
/// which the density-matrix simulator uses on column indices.
inline void apply_gate_raw(std::span<complex_t> amp, int n, const GateOp& g, bool conjugate = false) {
  if (g.kind == GateKind::PauliRot) {
    // conj(exp(-i a/2 P)) = exp(+i a/2 P*), and P* = (-1)^{#Y} P.
    double a = g.angle;
    if (conjugate) a = (g.string.y_count() % 2 == 0) ? -a : a;
    pauli_rotation(amp, n, g.string, a);
    return;
  }
  const std::uint64_t tbit = std::uint64_t{1} << (n - 1 - g.target);
  const GateKind k = (g.kind == GateKind::Controlled || g.kind == GateKind::CNOT) ? g.inner : g.kind;
  const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
  for (std::uint64_t b = 0; b < amp.size(); ++b) {
    if (b & tbit) continue;
    if (!g.controls.empty() && !controls_satisfied(b, g.controls, n)) continue;
    const std::uint64_t b1 = b | tbit;
    if (k == GateKind::X) {
      std::swap(amp[b], amp[b1]);
    } else {
      const complex_t a0 = amp[b], a1 = amp[b1];
      amp[b] = c * a0 - s * a1;
      amp[b1] = s * a0 + c * a1;
    }
  }
}

}  // namespace detail

/// Applies `gate` in place. Rotation angles are taken from the gate.
inline void apply_gate(StateVector& state, const GateOp& gate) {
  detail::check_gate(gate, state.n_qubits());
  detail::apply_gate_raw(state.amplitudes(), state.n_qubits(), gate);
}

inline void apply_circuit(StateVector& state, std::span<const GateOp> gates) {
  for (const auto& g : gates) apply_gate(state, g);
}

/// Applies exp(-i (angle/2) P). P acts on the leading qubits of the register.
inline void apply_pauli_exponential(StateVector& state, const PauliString& p, double angle) {
  if (p.is_identity()) throw std::invalid_argument("apply_pauli_exponential: identity string");
  if (p.n_qubits() > state.n_qubits()) throw std::out_of_range("apply_pauli_exponential: string wider than state");
  if (!std::isfinite(angle)) throw std::invalid_argument("apply_pauli_exponential: non-finite angle");
  detail::pauli_rotation(state.amplitudes(), state.n_qubits(), p, angle);
}

inline complex_t inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("inner_product: dimension mismatch (" + std::to_string(a.n_qubits()) + " vs " +
                                std::to_string(b.n_qubits()) + ")");
  }
  complex_t acc{};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double fidelity(const StateVector& a, const StateVector& b) {
  return std::min(1.0, std::norm(inner_product(a, b)));
}

/**
 * @brief <psi| H (x) 1 |psi> for Hermitian H on the leading qubits.
 *
 * Rejects non-Hermitian H and states whose norm deviates from 1 by more
 * than 1e-9. An imaginary residue above 1e-10 is treated as an error.
 */
inline double expectation(const PauliSum& h, const StateVector& psi) {
  if (!h.is_hermitian()) throw std::invalid_argument("expectation: operator is not Hermitian");
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("expectation: state is not normalized (norm " + std::to_string(psi.norm()) + ")");
  }
  complex_t e = expectation_complex(h, psi.amplitudes(), psi.n_qubits());
  if (std::abs(e.imag()) > 1e-10) {
    throw std::runtime_error("expectation: imaginary residue " + std::to_string(e.imag()));
  }
  return e.real();
}

/// H (x) 1 applied to psi (no normalization checks).
inline StateVector apply_pauli_sum(const PauliSum& h, const StateVector& psi) {
  int n = psi.n_qubits();
  if (h.n_qubits() > n) throw std::invalid_argument("apply_pauli_sum: operator wider than state");
  std::vector<complex_t> out(psi.dim());
  for (const auto& [s, c] : h.terms()) {
    std::uint64_t bx = s.basis_x_mask(n), bz = s.basis_z_mask(n);
    int ny = s.y_count();
    for (std::uint64_t b = 0; b < psi.dim(); ++b) {
      out[b ^ bx] += c * detail::ipow(detail::basis_phase_power(b, bz, ny)) * psi[b];
    }
  }
  return StateVector(n, std::move(out));
}

/**
 * @brief Reduced density matrix on `keep` (in the given order), tracing out
 * every other qubit.
 */
inline Eigen::MatrixXcd reduced_density(const StateVector& psi, std::span<const int> keep) {
  const int n = psi.n_qubits();
  for (int q : keep) detail::check_qubit(q, n);
  const int k = static_cast<int>(keep.size());
  const Eigen::Index d = Eigen::Index{1} << k;
  std::vector<int> rest;
  for (int q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  }
  auto compose = [&](std::uint64_t kept, std::uint64_t other) {
    std::uint64_t b = 0;
    for (int i = 0; i < k; ++i) {
      if ((kept >> (k - 1 - i)) & 1) b |= psi.bit(keep[i]);
    }
    int r = static_cast<int>(rest.size());
    for (int i = 0; i < r; ++i) {
      if ((other >> (r - 1 - i)) & 1) b |= psi.bit(rest[i]);
    }
    return b;
  };
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const std::uint64_t n_other = std::uint64_t{1} << rest.size();
  for (std::uint64_t o = 0; o < n_other; ++o) {
    for (Eigen::Index i = 0; i < d; ++i) {
      complex_t ai = psi[compose(static_cast<std::uint64_t>(i), o)];
      if (ai == complex_t{}) continue;
      for (Eigen::Index j = 0; j < d; ++j) {
        rho(i, j) += ai * std::conj(psi[compose(static_cast<std::uint64_t>(j), o)]);
      }
    }
  }
  return rho;
}

}  // namespace qpvqe
