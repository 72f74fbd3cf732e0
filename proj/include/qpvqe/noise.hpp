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

// Calibration file format:
//
//   # comment
//   gate_time_1q_ns <t>
//   qubit <i> t1_us <t1> t2_us <t2> freq_ghz <f> err_1q <p>
//   pair <a> <b> err_cnot <p> time_ns <t>
//
// Qubit records must cover 0..n-1. T1 and T2 accept "inf". Field order
// within a record is free; freq_ghz is optional.

#include "qpvqe/ansatz.hpp"
#include "qpvqe/driver.hpp"
#include "qpvqe/hamiltonian_io.hpp"
#include "qpvqe/state_prep.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

struct QubitCalibration {
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_us = std::numeric_limits<double>::infinity();
  double freq_ghz = 0.0;
  double err_1q = 0.0;
};

struct PairCalibration {
  double err_cnot = 0.0;
  double time_ns = 0.0;
};

/**
 * @brief Per-qubit coherence and error rates plus per-pair CNOT data.
 *
 * Simulated (logical) qubit i uses calibration qubit i mod n. A CNOT between
 * qubits without a pair record uses the worst recorded pair.
 */
struct CalibrationData {
  double gate_time_1q_ns = 35.6;
  std::vector<QubitCalibration> qubits;
  std::map<std::pair<int, int>, PairCalibration> pairs;  // keys ordered (low, high)

  void validate() const {
    if (qubits.empty()) throw std::invalid_argument("calibration: no qubit records");
    if (!(gate_time_1q_ns > 0.0) || !std::isfinite(gate_time_1q_ns)) {
      throw std::invalid_argument("calibration: gate_time_1q_ns must be positive");
    }
    auto rate_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      const auto& q = qubits[i];
      const std::string tag = "calibration: qubit " + std::to_string(i);
      if (!(q.t1_us > 0.0) || !(q.t2_us > 0.0)) throw std::invalid_argument(tag + ": T1 and T2 must be positive");
      if (q.t2_us > 2.0 * q.t1_us) throw std::invalid_argument(tag + ": T2 exceeds 2*T1");
      if (!rate_ok(q.err_1q)) throw std::invalid_argument(tag + ": err_1q outside [0, 1]");
    }
    for (const auto& [k, p] : pairs) {
      const std::string tag = "calibration: pair " + std::to_string(k.first) + "-" + std::to_string(k.second);
      if (k.first < 0 || k.second >= static_cast<int>(qubits.size()) || k.first >= k.second) {
        throw std::invalid_argument(tag + ": bad qubit indices");
      }
      if (!rate_ok(p.err_cnot)) throw std::invalid_argument(tag + ": err_cnot outside [0, 1]");
      if (!(p.time_ns > 0.0) || !std::isfinite(p.time_ns)) throw std::invalid_argument(tag + ": time_ns must be positive");
    }
  }

  const QubitCalibration& qubit(int logical) const { return qubits[static_cast<std::size_t>(logical) % qubits.size()]; }

  PairCalibration pair(int a, int b) const {
    int pa = static_cast<int>(static_cast<std::size_t>(a) % qubits.size());
    int pb = static_cast<int>(static_cast<std::size_t>(b) % qubits.size());
    if (pa > pb) std::swap(pa, pb);
    if (auto it = pairs.find({pa, pb}); it != pairs.end()) return it->second;
    PairCalibration worst{0.0, gate_time_1q_ns};
    for (const auto& [k, p] : pairs) {
      worst.err_cnot = std::max(worst.err_cnot, p.err_cnot);
      worst.time_ns = std::max(worst.time_ns, p.time_ns);
    }
    return worst;
  }

  /// All rates zero and infinite coherence: every channel is the identity.
  static CalibrationData noiseless(int n_qubits = 1) {
    CalibrationData c;
    c.qubits.resize(static_cast<std::size_t>(n_qubits));
    return c;
  }
};

namespace detail {

inline double parse_time(std::string_view tok, int line) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  if (!parse_double(tok, v)) throw ParseError(line, "bad number '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

inline CalibrationData parse_calibration(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  CalibrationData cal;
  std::map<int, QubitCalibration> qs;
  while (std::getline(in, raw)) {
    ++line_no;
    auto t = detail::split_ws(detail::strip_comment(raw));
    if (t.empty()) continue;
    auto num = [&](std::string_view s) { return detail::parse_time(s, line_no); };
    auto idx = [&](std::string_view s) {
      int v = -1;
      if (!detail::parse_int(s, v) || v < 0) throw ParseError(line_no, "bad qubit index '" + std::string(s) + "'");
      return v;
    };
    if (t[0] == "gate_time_1q_ns") {
      if (t.size() != 2) throw ParseError(line_no, "expected 'gate_time_1q_ns <t>'");
      cal.gate_time_1q_ns = num(t[1]);
    } else if (t[0] == "qubit") {
      if (t.size() < 2 || t.size() % 2 != 0) throw ParseError(line_no, "expected 'qubit <i>' and key/value pairs");
      const int i = idx(t[1]);
      if (qs.count(i)) throw ParseError(line_no, "qubit " + std::to_string(i) + " listed twice");
      QubitCalibration q;
      bool t1 = false, t2 = false, e = false;
      for (std::size_t k = 2; k < t.size(); k += 2) {
        const double v = num(t[k + 1]);
        if (t[k] == "t1_us") q.t1_us = v, t1 = true;
        else if (t[k] == "t2_us") q.t2_us = v, t2 = true;
        else if (t[k] == "freq_ghz") q.freq_ghz = v;
        else if (t[k] == "err_1q") q.err_1q = v, e = true;
        else throw ParseError(line_no, "unknown qubit field '" + std::string(t[k]) + "'");
      }
      if (!(t1 && t2 && e)) throw ParseError(line_no, "qubit record needs t1_us, t2_us and err_1q");
      qs[i] = q;
    } else if (t[0] == "pair") {
      if (t.size() != 7) throw ParseError(line_no, "expected 'pair <a> <b> err_cnot <p> time_ns <t>'");
      int a = idx(t[1]), b = idx(t[2]);
      if (a == b) throw ParseError(line_no, "pair needs two distinct qubits");
      if (a > b) std::swap(a, b);
      PairCalibration p;
      bool e = false, tm = false;
      for (std::size_t k = 3; k < t.size(); k += 2) {
        const double v = num(t[k + 1]);
        if (t[k] == "err_cnot") p.err_cnot = v, e = true;
        else if (t[k] == "time_ns") p.time_ns = v, tm = true;
        else throw ParseError(line_no, "unknown pair field '" + std::string(t[k]) + "'");
      }
      if (!(e && tm)) throw ParseError(line_no, "pair record needs err_cnot and time_ns");
      if (!cal.pairs.emplace(std::pair{a, b}, p).second) throw ParseError(line_no, "pair listed twice");
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(t[0]) + "'");
    }
  }
  for (int i = 0; i < static_cast<int>(qs.size()); ++i) {
    if (!qs.count(i)) throw ParseError(line_no, "missing record for qubit " + std::to_string(i));
    cal.qubits.push_back(qs[i]);
  }
  cal.validate();
  return cal;
}

inline CalibrationData load_calibration(const std::string& path) {
  try {
    return parse_calibration(read_text_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

/// rho -> (1 - p) rho + p I/2.
inline std::vector<Eigen::MatrixXcd> depolarizing_kraus(double p, int n_qubits) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing_kraus: rate outside [0, 1]");
  if (n_qubits < 1 || n_qubits > 2) throw std::invalid_argument("depolarizing_kraus: 1 or 2 qubits");
  const int d = 1 << n_qubits;
  const int m = d * d;  // number of Paulis
  std::vector<Eigen::MatrixXcd> out;
  // (1 - p) rho + p/d^2 sum_P P rho P.
  for (int k = 0; k < m; ++k) {
    PauliString s(n_qubits);
    for (int q = 0; q < n_qubits; ++q) s.set(q, static_cast<PauliLetter>((k >> (2 * (n_qubits - 1 - q))) & 3));
    const double w = (k == 0 ? 1.0 - p : 0.0) + p / m;
    out.push_back(std::sqrt(w) * to_matrix(PauliSum(s, 1.0)));
  }
  return out;
}

inline std::vector<Eigen::MatrixXcd> amplitude_damping_kraus(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("amplitude_damping_kraus: gamma outside [0, 1]");
  Eigen::MatrixXcd k0 = Eigen::MatrixXcd::Zero(2, 2), k1 = Eigen::MatrixXcd::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

/// rho -> (1 - pz) rho + pz Z rho Z.
inline std::vector<Eigen::MatrixXcd> phase_flip_kraus(double pz) {
  if (pz < 0.0 || pz > 0.5) throw std::invalid_argument("phase_flip_kraus: pz outside [0, 1/2]");
  Eigen::MatrixXcd k0 = std::sqrt(1.0 - pz) * Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd k1 = Eigen::MatrixXcd::Zero(2, 2);
  k1(0, 0) = std::sqrt(pz);
  k1(1, 1) = -std::sqrt(pz);
  return {k0, k1};
}

/**
 * @brief Amplitude damping followed by pure dephasing for an interval of
 * t_ns: populations relax as exp(-t/T1), coherences as exp(-t/T2).
 */
inline std::vector<std::vector<Eigen::MatrixXcd>> thermal_relaxation_kraus(double t_ns, const QubitCalibration& q) {
  const double t = t_ns * 1e-3;  // microseconds
  const double gamma = 1.0 - std::exp(-t / q.t1_us);
  // Damping alone leaves coherence exp(-t/2T1); dephasing supplies the rest.
  const double f = std::exp(-t / q.t2_us + t / (2.0 * q.t1_us));
  const double pz = std::clamp((1.0 - f) / 2.0, 0.0, 0.5);
  return {amplitude_damping_kraus(gamma), phase_flip_kraus(pz)};
}

/// max |sum_k K^dag K - 1|.
inline double kraus_completeness_error(const std::vector<Eigen::MatrixXcd>& ks) {
  if (ks.empty()) throw std::invalid_argument("kraus_completeness_error: empty set");
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(ks[0].rows(), ks[0].cols());
  for (const auto& k : ks) s += k.adjoint() * k;
  return (s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

/**
 * @brief Dense density matrix on n qubits.
 *
 * Stored as a vector over 2n bits, row index in the high n bits and column
 * index in the low n bits, so row qubit q is "qubit q" and column qubit q is
 * "qubit n + q" of a 2n-qubit register. Gates reuse the statevector kernels.
 */
class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || 2 * n_qubits > 28) throw std::invalid_argument("DensityMatrix: unsupported qubit count");
    data_.assign(std::size_t{1} << (2 * n_), complex_t{});
    data_[0] = 1.0;
  }

  static DensityMatrix pure(const StateVector& psi) {
    DensityMatrix r(psi.n_qubits());
    const std::uint64_t d = r.dim();
    for (std::uint64_t i = 0; i < d; ++i) {
      for (std::uint64_t j = 0; j < d; ++j) r.data_[(i << r.n_) | j] = psi[i] * std::conj(psi[j]);
    }
    return r;
  }

  static DensityMatrix maximally_mixed(int n_qubits) {
    DensityMatrix r(n_qubits);
    r.data_[0] = 0.0;
    const std::uint64_t d = r.dim();
    for (std::uint64_t i = 0; i < d; ++i) r.data_[(i << n_qubits) | i] = 1.0 / static_cast<double>(d);
    return r;
  }

  int n_qubits() const { return n_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_; }
  complex_t operator()(std::uint64_t i, std::uint64_t j) const { return data_[(i << n_) | j]; }
  std::span<complex_t> raw() { return data_; }
  std::span<const complex_t> raw() const { return data_; }

  complex_t trace() const {
    complex_t t = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) t += (*this)(i, i);
    return t;
  }

  Eigen::MatrixXcd matrix() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = (*this)(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    }
    return m;
  }

  /// Hermitian and unit trace to `tol`; optionally PSD down to -1e-8.
  bool is_valid(double tol = 1e-10, bool check_psd = false) const {
    if (std::abs(trace() - 1.0) > tol) return false;
    for (std::uint64_t i = 0; i < dim(); ++i) {
      for (std::uint64_t j = i; j < dim(); ++j) {
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
      }
    }
    if (!check_psd) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-8;
  }

 private:
  int n_;
  std::vector<complex_t> data_;
};

/// U rho U^dag.
inline void apply_unitary(DensityMatrix& rho, const GateOp& g) {
  const int n = rho.n_qubits();
  detail::check_gate(g, n);
  detail::apply_gate_raw(rho.raw(), 2 * n, g);
  GateOp col = g;
  if (g.kind == GateKind::PauliRot) {
    col.string = PauliString::from_masks(2 * n, g.string.x_mask() << n, g.string.z_mask() << n);
  } else {
    col.target += n;
    for (auto& c : col.controls) c.qubit += n;
  }
  detail::apply_gate_raw(rho.raw(), 2 * n, col, /*conjugate=*/true);
}

/// rho -> sum_k K_k rho K_k^dag with K acting on `qubits` (first = most significant).
inline void apply_kraus(DensityMatrix& rho, std::span<const int> qubits, const std::vector<Eigen::MatrixXcd>& ks) {
  const int n = rho.n_qubits();
  const int k = static_cast<int>(qubits.size());
  const int d = 1 << k;
  for (const auto& m : ks) {
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("apply_kraus: operator size mismatch");
  }
  for (int q : qubits) detail::check_qubit(q, n);
  // Superoperator S[(a,b),(a',b')] = sum_k K[a,a'] conj(K[b,b']).
  Eigen::MatrixXcd sup = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& m : ks) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int a2 = 0; a2 < d; ++a2)
          for (int b2 = 0; b2 < d; ++b2) sup(a * d + b, a2 * d + b2) += m(a, a2) * std::conj(m(b, b2));
  }
  std::vector<std::uint64_t> row_bits(k), col_bits(k);
  std::uint64_t mask = 0;
  for (int i = 0; i < k; ++i) {
    row_bits[i] = std::uint64_t{1} << (2 * n - 1 - qubits[i]);
    col_bits[i] = std::uint64_t{1} << (n - 1 - qubits[i]);
    mask |= row_bits[i] | col_bits[i];
  }
  auto offset = [&](int a, int b) {
    std::uint64_t o = 0;
    for (int i = 0; i < k; ++i) {
      if ((a >> (k - 1 - i)) & 1) o |= row_bits[i];
      if ((b >> (k - 1 - i)) & 1) o |= col_bits[i];
    }
    return o;
  };
  std::vector<std::uint64_t> offs(static_cast<std::size_t>(d * d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) offs[a * d + b] = offset(a, b);
  auto data = rho.raw();
  Eigen::VectorXcd in(d * d), out(d * d);
  for (std::uint64_t base = 0; base < data.size(); ++base) {
    if (base & mask) continue;
    for (int e = 0; e < d * d; ++e) in(e) = data[base | offs[e]];
    out.noalias() = sup * in;
    for (int e = 0; e < d * d; ++e) data[base | offs[e]] = out(e);
  }
}

namespace detail {

inline void depolarize(DensityMatrix& rho, std::vector<int> qs, double p) {
  if (p > 0.0) apply_kraus(rho, qs, depolarizing_kraus(p, static_cast<int>(qs.size())));
}

inline void relax(DensityMatrix& rho, int q, double t_ns, const CalibrationData& cal) {
  const auto& qc = cal.qubit(q);
  if (std::isinf(qc.t1_us) && std::isinf(qc.t2_us)) return;
  const int qs[] = {q};
  for (const auto& ch : thermal_relaxation_kraus(t_ns, qc)) apply_kraus(rho, qs, ch);
}

}  // namespace detail

/**
 * @brief Ideal gate, then depolarizing on the operands, then thermal
 * relaxation of each operand over the gate duration.
 *
 * Gates without native calibration are charged as their usual compilation:
 * a singly controlled X is one CNOT, a controlled RY is two CNOTs and two
 * RY, a k-controlled gate repeats that per control; a Pauli rotation of
 * weight k is a 2(k-1)-CNOT parity ladder, two basis changes per X or Y
 * factor and one RZ. Readout error is never applied.
 */
inline void apply_noisy_gate(DensityMatrix& rho, const GateOp& g, const CalibrationData& cal) {
  apply_unitary(rho, g);
  const double t1q = cal.gate_time_1q_ns;
  std::vector<int> ops = g.operands();
  double duration = 0.0;
  switch (g.kind) {
    case GateKind::X:
    case GateKind::RY:
      detail::depolarize(rho, {g.target}, cal.qubit(g.target).err_1q);
      duration = t1q;
      break;
    case GateKind::CNOT:
    case GateKind::Controlled: {
      const int reps = g.inner == GateKind::RY ? 2 : 1;
      for (const auto& c : g.controls) {
        const auto pc = cal.pair(c.qubit, g.target);
        for (int r = 0; r < reps; ++r) detail::depolarize(rho, {c.qubit, g.target}, pc.err_cnot);
        duration += reps * pc.time_ns;
      }
      if (g.inner == GateKind::RY) {
        for (int r = 0; r < 2; ++r) detail::depolarize(rho, {g.target}, cal.qubit(g.target).err_1q);
        duration += 2 * t1q;
      }
      break;
    }
    case GateKind::PauliRot: {
      const auto letters = g.string.letters();
      for (auto [q, l] : letters) {
        const int changes = (l == PauliLetter::X || l == PauliLetter::Y) ? 2 : 0;
        for (int r = 0; r < changes; ++r) detail::depolarize(rho, {q}, cal.qubit(q).err_1q);
      }
      for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
        const int a = letters[i].first, b = letters[i + 1].first;
        const auto pc = cal.pair(a, b);
        for (int r = 0; r < 2; ++r) detail::depolarize(rho, {a, b}, pc.err_cnot);
        duration += 2 * pc.time_ns;
      }
      const int last = letters.back().first;
      detail::depolarize(rho, {last}, cal.qubit(last).err_1q);
      duration += 3 * t1q;
      break;
    }
  }
  for (int q : ops) detail::relax(rho, q, duration, cal);
}

/// Finite-shot estimator of Pauli expectations; shots = 0 returns exact values.
class ShotSampler {
 public:
  explicit ShotSampler(int shots = 10000, std::uint64_t seed = 0) : shots_(shots), rng_(seed) {
    if (shots < 0) throw std::invalid_argument("ShotSampler: shots must be >= 0");
  }
  int shots() const { return shots_; }

  double sample(double exact) {
    if (shots_ == 0) return exact;
    const double p = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
    std::binomial_distribution<int> dist(shots_, p);
    return 2.0 * dist(rng_) / shots_ - 1.0;
  }

 private:
  int shots_;
  std::mt19937_64 rng_;
};

/// Tr(P rho) for a string acting on the leading qubits.
inline double pauli_trace(const PauliString& s, const DensityMatrix& rho) {
  const int n = rho.n_qubits();
  const std::uint64_t bx = s.basis_x_mask(n), bz = s.basis_z_mask(n);
  const int ny = s.y_count();
  // P|b> = phase(b)|b ^ x>, so Tr(P rho) = sum_b phase(b) rho[b, b ^ x].
  complex_t t = 0.0;
  for (std::uint64_t b = 0; b < rho.dim(); ++b) {
    t += detail::ipow(detail::basis_phase_power(b, bz, ny)) * rho(b, b ^ bx);
  }
  return t.real();
}

/// sum_P c_P * (sampled) Tr(P rho); the identity term is never sampled.
inline double noisy_expectation(const PauliSum& h, const DensityMatrix& rho, ShotSampler& sampler) {
  if (h.n_qubits() > rho.n_qubits()) throw std::invalid_argument("noisy_expectation: operator wider than state");
  if (!h.is_hermitian()) throw std::invalid_argument("noisy_expectation: operator is not Hermitian");
  double e = 0.0;
  for (const auto& [s, c] : h.terms()) {
    e += c.real() * (s.is_identity() ? 1.0 : sampler.sample(pauli_trace(s, rho)));
  }
  return e;
}

/// The ansatz as gates: one Pauli rotation per factor.
inline std::vector<GateOp> ansatz_gates(const AnsatzCircuit& circ, std::span<const double> theta) {
  detail::check_theta(circ, theta);
  std::vector<GateOp> out;
  for (const auto& r : circ.rotations) out.push_back(GateOp::pauli_rot(r.string, r.angle(theta)));
  return out;
}

/// Half-open ranges of consecutive rotations sharing a parameter and support.
inline std::vector<std::pair<std::size_t, std::size_t>> excitation_blocks(const AnsatzCircuit& circ) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& r = circ.rotations;
  auto support = [](const PauliString& p) { return p.x_mask() | p.z_mask(); };
  for (std::size_t i = 0; i < r.size();) {
    std::size_t j = i + 1;
    while (j < r.size() && r[j].parameter_index == r[i].parameter_index &&
           support(r[j].string) == support(r[i].string)) {
      ++j;
    }
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

/**
 * @brief Noise of one fermionic excitation exp(theta (G - G^dag)) charged as
 * its standard compiled circuit: 13 CNOTs for a double and 2 for a single,
 * plus 2 per Jordan-Wigner parity qubit, spread over neighbouring support
 * pairs; two 1q gates per support qubit. Blocks that are not a single or
 * double fall back to per-rotation costing.
 */
inline void apply_noisy_excitation(DensityMatrix& rho, std::span<const GateOp> block, const CalibrationData& cal) {
  if (block.empty()) return;
  const auto letters = block.front().string.letters();
  int flips = 0, parity = 0;
  for (auto [q, l] : letters) (l == PauliLetter::Z ? parity : flips) += 1;
  if (flips != 2 && flips != 4) {
    for (const auto& g : block) apply_noisy_gate(rho, g, cal);
    return;
  }
  for (const auto& g : block) apply_unitary(rho, g);
  const int cnots = (flips == 4 ? 13 : 2) + 2 * parity;
  double duration = 4 * cal.gate_time_1q_ns;
  for (int c = 0; c < cnots; ++c) {
    const std::size_t i = static_cast<std::size_t>(c) % (letters.size() - 1);
    const int a = letters[i].first, b = letters[i + 1].first;
    const auto pc = cal.pair(a, b);
    detail::depolarize(rho, {a, b}, pc.err_cnot);
    duration += pc.time_ns;
  }
  for (auto [q, l] : letters) {
    for (int r = 0; r < 2; ++r) detail::depolarize(rho, {q}, cal.qubit(q).err_1q);
  }
  for (auto [q, l] : letters) detail::relax(rho, q, duration, cal);
}

/// rho after the noisy purified preparation and noisy U(theta).
inline DensityMatrix noisy_evolve(const AnsatzCircuit& circ, const PurifiedPrep& prep, std::span<const double> theta,
                                  const CalibrationData& cal) {
  if (prep.n_working != circ.n_working_qubits) throw std::invalid_argument("noisy_evolve: register mismatch");
  DensityMatrix rho(prep.n_qubits());
  for (const auto& g : prep.program) apply_noisy_gate(rho, g, cal);
  const auto gates = ansatz_gates(circ, theta);
  for (auto [b, e] : excitation_blocks(circ)) {
    apply_noisy_excitation(rho, std::span<const GateOp>(gates).subspan(b, e - b), cal);
  }
  return rho;
}

inline double noisy_ensemble_energy(const PauliSum& h, const AnsatzCircuit& circ, const PurifiedPrep& prep,
                                    std::span<const double> theta, const CalibrationData& cal, ShotSampler& sampler) {
  if (h.n_qubits() != circ.n_working_qubits) throw std::invalid_argument("noisy_ensemble_energy: register mismatch");
  return noisy_expectation(h, noisy_evolve(circ, prep, theta, cal), sampler);
}

using Objective = std::function<double(std::span<const double>)>;

/**
 * @brief Two-evaluation SPSA from theta0.
 *
 * Iteration k evaluates f(theta +- c_k delta) with Rademacher delta, records
 * their mean as the trace value at theta_k, and steps
 * theta -= a_k (f+ - f-) / (2 c_k) * delta. Runs exactly `iterations`
 * steps; theta_star is the iterate with the lowest recorded value.
 */
inline SpectrumResult spsa_optimize(const Objective& objective, std::vector<double> theta0, const SpsaOptions& o,
                                    int iterations, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("spsa_optimize: iterations must be >= 1");
  if (!(o.a > 0.0) || !(o.c > 0.0)) throw std::invalid_argument("spsa_optimize: gains must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> theta = std::move(theta0), plus(theta.size()), minus(theta.size()), delta(theta.size());
  SpectrumResult res;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < iterations; ++k) {
    const double ak = o.a / std::pow(k + 1 + o.stability, o.alpha);
    const double ck = o.c / std::pow(k + 1, o.gamma);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      delta[i] = coin(rng) ? 1.0 : -1.0;
      plus[i] = theta[i] + ck * delta[i];
      minus[i] = theta[i] - ck * delta[i];
    }
    const double fp = objective(plus), fm = objective(minus);
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw DivergenceError(k, std::isfinite(fp) ? fm : fp);
    const double value = 0.5 * (fp + fm);
    res.ensemble_trace.push_back(value);
    if (value < best) {
      best = value;
      res.theta_star = theta;
    }
    const double g = (fp - fm) / (2.0 * ck);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= ak * g * delta[i];
  }
  res.iterations_used = iterations;
  return res;
}

/// Mean of the last `window` trace values (all of them if shorter).
inline double trailing_mean(std::span<const double> trace, std::size_t window) {
  if (trace.empty()) throw std::invalid_argument("trailing_mean: empty trace");
  const std::size_t n = std::min(window, trace.size());
  double s = 0.0;
  for (std::size_t i = trace.size() - n; i < trace.size(); ++i) s += trace[i];
  return s / static_cast<double>(n);
}

}  // namespace qpvqe
