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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpvqe {

/**
 * @brief Ensemble weights: positive, strictly decreasing, summing to one.
 *
 * Distinct weights are what make the individual eigenstates recoverable
 * from the optimized ensemble.
 */
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw std::invalid_argument("WeightVector: empty");
    double sum = 0.0;
    for (std::size_t j = 0; j < w_.size(); ++j) {
      if (!std::isfinite(w_[j]) || w_[j] <= 0.0) {
        throw std::invalid_argument("WeightVector: weight " + std::to_string(j) + " is not positive");
      }
      if (j > 0 && !(w_[j - 1] > w_[j])) {
        throw std::invalid_argument("WeightVector: weights must be strictly decreasing (index " +
                                    std::to_string(j) + ")");
      }
      sum += w_[j];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("WeightVector: weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  /// Normalizes raw positive weights, then validates.
  static WeightVector normalized(std::vector<double> raw) {
    double s = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(s > 0.0)) throw std::invalid_argument("WeightVector: weights must have positive sum");
    for (auto& x : raw) x /= s;
    return WeightVector(std::move(raw));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  std::span<const double> values() const { return w_; }

  /// min_{i<j} |w_i - w_j|; zero for a single weight.
  double min_gap() const {
    double g = 0.0;
    for (std::size_t j = 1; j < w_.size(); ++j) g = (j == 1) ? w_[0] - w_[1] : std::min(g, w_[j - 1] - w_[j]);
    return g;
  }

 private:
  std::vector<double> w_;
};

/// (K, K-1, ..., 1) normalized.
inline WeightVector default_weights(int k) {
  if (k < 1) throw std::invalid_argument("default_weights: K must be >= 1");
  std::vector<double> w(k);
  for (int j = 0; j < k; ++j) w[j] = static_cast<double>(k - j);
  return WeightVector::normalized(std::move(w));
}

/// ceil(log2 K), zero for K = 1.
inline int ancilla_count(std::size_t k) {
  int c = 0;
  while ((std::size_t{1} << c) < k) ++c;
  return c;
}

/**
 * @brief K distinct occupation bitstrings with common particle number and
 * S_z over the interleaved spin-orbital register.
 */
class ReferenceSet {
 public:
  explicit ReferenceSet(std::vector<std::vector<int>> dets) : dets_(std::move(dets)) {
    if (dets_.empty()) throw std::invalid_argument("ReferenceSet: empty");
    const std::size_t n = dets_.front().size();
    if (n == 0) throw std::invalid_argument("ReferenceSet: empty determinant");
    std::set<std::vector<int>> seen;
    auto qn = [](const std::vector<int>& d) {
      return occupation_quantum_numbers(basis_index(d), static_cast<int>(d.size()));
    };
    const auto q0 = qn(dets_.front());
    for (const auto& d : dets_) {
      if (d.size() != n) throw std::invalid_argument("ReferenceSet: determinants differ in length");
      if (!seen.insert(d).second) {
        throw std::invalid_argument("ReferenceSet: duplicate determinant " + format_bitstring(d));
      }
      if (qn(d) != q0) {
        throw std::invalid_argument("ReferenceSet: determinant " + format_bitstring(d) +
                                    " has a different particle number or S_z");
      }
    }
  }

  static ReferenceSet from_strings(const std::vector<std::string>& bits) {
    std::vector<std::vector<int>> d;
    for (const auto& b : bits) d.push_back(parse_bitstring(b));
    return ReferenceSet(std::move(d));
  }

  std::size_t size() const { return dets_.size(); }
  int n_qubits() const { return static_cast<int>(dets_.front().size()); }
  const std::vector<int>& operator[](std::size_t j) const { return dets_[j]; }
  const std::vector<std::vector<int>>& determinants() const { return dets_; }
  int n_particles() const { return std::accumulate(dets_.front().begin(), dets_.front().end(), 0); }
  int two_sz() const { return occupation_quantum_numbers(basis_index(dets_.front()), n_qubits()).second; }

 private:
  std::vector<std::vector<int>> dets_;
};

/// Bit m (0 = most significant) of the c-bit label of branch j.
inline int label_bit(std::size_t j, int m, int c) { return static_cast<int>((j >> (c - 1 - m)) & 1U); }

namespace detail {

/**
 * Binary RY cascade over c qubits starting at `offset` whose output amplitude
 * on label j is sqrt(probs[j]); missing labels are padded with zero. Nodes
 * with no weight on the |1> side are skipped, so at most K-1 gates.
 */
inline std::pair<std::vector<double>, std::vector<GateOp>> cascade(std::span<const double> probs, int offset) {
  const int c = ancilla_count(probs.size());
  const std::size_t n_labels = std::size_t{1} << c;
  std::vector<double> p(n_labels, 0.0);
  std::copy(probs.begin(), probs.end(), p.begin());
  std::vector<double> angles;
  std::vector<GateOp> gates;
  for (int level = 0; level < c; ++level) {
    const std::size_t span = n_labels >> level;
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
      const std::size_t lo = prefix * span;
      double left = 0.0, right = 0.0;
      for (std::size_t j = lo; j < lo + span / 2; ++j) left += p[j];
      for (std::size_t j = lo + span / 2; j < lo + span; ++j) right += p[j];
      if (right <= 0.0 || left + right <= 0.0) continue;
      const double angle = 2.0 * std::atan2(std::sqrt(right), std::sqrt(left));
      angles.push_back(angle);
      if (level == 0) {
        gates.push_back(GateOp::ry(offset, angle));
      } else {
        std::vector<Control> ctl;
        for (int m = 0; m < level; ++m) ctl.push_back({offset + m, label_bit(prefix, m, level)});
        gates.push_back(GateOp::controlled_ry(std::move(ctl), offset + level, angle));
      }
    }
  }
  return {angles, gates};
}

/// Amplitude check shared by the weighted and equal-branch constructions.
inline void check_branches(const StateVector& s, std::span<const double> probs, const ReferenceSet& refs) {
  const int n_work = refs.n_qubits();
  const int c = s.n_qubits() - n_work;
  std::vector<complex_t> expect(s.dim());
  for (std::size_t j = 0; j < refs.size(); ++j) {
    std::uint64_t idx = (basis_index(refs[j]) << c) | j;
    expect[idx] = std::sqrt(probs[j]);
  }
  for (std::size_t b = 0; b < s.dim(); ++b) {
    if (std::abs(s[b] - expect[b]) > 1e-12) {
      throw std::logic_error("prepare_purified: amplitude mismatch at basis index " + std::to_string(b));
    }
  }
}

}  // namespace detail

/**
 * @brief RY / controlled-RY cascade preparing sum_j sqrt(w_j)|l_j> on
 * ceil(log2 K) qubits starting at `offset`. Labels are binary with the
 * first register qubit most significant.
 */
inline std::pair<std::vector<double>, std::vector<GateOp>> compressed_cascade(const WeightVector& w, int offset = 0) {
  return detail::cascade(w.values(), offset);
}

/**
 * @brief Maps sum_j sqrt(w_j)|0..0>_q|l_j>_a to sum_j sqrt(w_j)|D_j>_q|l_j>_a.
 *
 * The compressed register (qubits N..N+c-1) doubles as the ancilla register.
 * Working bits set in every determinant get a plain X; bits that follow one
 * label bit (or its complement) get a CNOT (after an X); anything else gets
 * one fully-controlled X per branch that sets it.
 */
inline std::vector<GateOp> isometry_network(const ReferenceSet& refs) {
  const int n = refs.n_qubits();
  const std::size_t k = refs.size();
  const int c = ancilla_count(k);
  if (k > (std::size_t{1} << c)) throw std::logic_error("isometry_network: K exceeds 2^c");
  std::vector<GateOp> flips, controlled;
  for (int q = 0; q < n; ++q) {
    std::vector<int> f(k);
    for (std::size_t j = 0; j < k; ++j) f[j] = refs[j][q];
    const int ones = std::accumulate(f.begin(), f.end(), 0);
    if (ones == 0) continue;
    if (ones == static_cast<int>(k)) {
      flips.push_back(GateOp::x(q));
      continue;
    }
    bool done = false;
    for (int m = 0; m < c && !done; ++m) {
      bool same = true, complement = true;
      for (std::size_t j = 0; j < k; ++j) {
        same = same && f[j] == label_bit(j, m, c);
        complement = complement && f[j] != label_bit(j, m, c);
      }
      if (same || complement) {
        if (complement) flips.push_back(GateOp::x(q));
        controlled.push_back(GateOp::cnot(n + m, q));
        done = true;
      }
    }
    if (done) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (!f[j]) continue;
      std::vector<Control> ctl;
      for (int m = 0; m < c; ++m) ctl.push_back({n + m, label_bit(j, m, c)});
      controlled.push_back(GateOp::controlled_x(std::move(ctl), q));
    }
  }
  flips.insert(flips.end(), controlled.begin(), controlled.end());
  return flips;
}

/// Weights, references and the gate program preparing |Phi(w)>.
struct PurifiedPrep {
  WeightVector weights;
  ReferenceSet refs;
  int n_working = 0;
  int n_ancilla = 0;
  std::vector<GateOp> program;

  int n_qubits() const { return n_working + n_ancilla; }
};

inline PurifiedPrep make_purified_prep(const WeightVector& w, const ReferenceSet& refs) {
  if (w.size() != refs.size()) {
    throw std::invalid_argument("make_purified_prep: " + std::to_string(w.size()) + " weights for " +
                                std::to_string(refs.size()) + " references");
  }
  const int n = refs.n_qubits();
  const int c = ancilla_count(refs.size());
  auto [angles, program] = compressed_cascade(w, n);
  auto iso = isometry_network(refs);
  program.insert(program.end(), iso.begin(), iso.end());
  return PurifiedPrep{w, refs, n, c, std::move(program)};
}

/// Runs the prep program on |0...0> and verifies every amplitude.
inline StateVector prepare_purified(const PurifiedPrep& prep) {
  StateVector s(prep.n_qubits());
  apply_circuit(s, prep.program);
  detail::check_branches(s, prep.weights.values(), prep.refs);
  return s;
}

inline StateVector prepare_purified(const WeightVector& w, const ReferenceSet& refs) {
  return prepare_purified(make_purified_prep(w, refs));
}

/**
 * @brief sum_j (1/sqrt K)|D_j>|l_j> built with the same cascade + network.
 *
 * Equal weights are legitimate at the measurement stage only, which is why
 * this bypasses WeightVector.
 */
inline StateVector prepare_equal_branches(const ReferenceSet& refs) {
  const int n = refs.n_qubits();
  const int c = ancilla_count(refs.size());
  std::vector<double> probs(refs.size(), 1.0 / static_cast<double>(refs.size()));
  auto [angles, program] = detail::cascade(probs, n);
  auto iso = isometry_network(refs);
  program.insert(program.end(), iso.begin(), iso.end());
  StateVector s(n + c);
  apply_circuit(s, program);
  detail::check_branches(s, probs, refs);
  return s;
}

/// <D|H|D> for a basis determinant: only Z-type strings contribute.
inline double diagonal_energy(const PauliSum& h, std::uint64_t index) {
  const int n = h.n_qubits();
  double e = 0.0;
  for (const auto& [s, c] : h.terms()) {
    if (s.x_mask() != 0) continue;
    e += (std::popcount(index & s.basis_z_mask(n)) & 1) ? -c.real() : c.real();
  }
  return e;
}

/**
 * @brief The K lowest-diagonal-energy determinants of the (N, 2*S_z) sector,
 * ties broken by ascending bitstring.
 */
inline ReferenceSet select_references(const PauliSum& h, int n_particles, int two_sz, std::size_t k) {
  const int n = h.n_qubits();
  auto basis = sector_basis(n, n_particles, two_sz);
  if (k == 0 || k > basis.size()) {
    throw std::invalid_argument("select_references: K = " + std::to_string(k) + " but the sector has " +
                                std::to_string(basis.size()) + " determinants");
  }
  std::vector<std::pair<double, std::uint64_t>> ranked;
  // Energies are snapped to a 1e-10 Ha grid so float dust cannot split ties.
  for (auto b : basis) ranked.emplace_back(std::round(diagonal_energy(h, b) * 1e10), b);
  // With qubit 0 most significant, bitstring order equals basis-index order.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<std::vector<int>> dets;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<int> bits(n);
    for (int q = 0; q < n; ++q) bits[q] = static_cast<int>((ranked[j].second >> (n - 1 - q)) & 1U);
    dets.push_back(std::move(bits));
  }
  return ReferenceSet(std::move(dets));
}

}  // namespace qpvqe
