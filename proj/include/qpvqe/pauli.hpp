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

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpvqe {

using complex_t = std::complex<double>;

/// Maximum register width representable by the bit-mask Pauli encoding.
inline constexpr int kMaxQubits = 64;

/// Largest register for which dense matrices are materialized.
inline constexpr int kMaxDenseQubits = 14;

/// Coefficients with magnitude below this are dropped during simplification.
inline constexpr double kPruneThreshold = 1e-12;

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/**
 * @brief Exact phase i^k, k in {0,1,2,3}.
 *
 * Phases of Pauli products are tracked as a 2-bit counter so long products
 * never accumulate floating point error.
 */
class Phase {
 public:
  constexpr Phase() = default;
  constexpr explicit Phase(int power) : k_(static_cast<std::uint8_t>(((power % 4) + 4) % 4)) {}

  constexpr int power() const { return k_; }
  constexpr Phase operator*(Phase o) const { return Phase(k_ + o.k_); }
  constexpr bool operator==(const Phase&) const = default;

  complex_t value() const {
    switch (k_) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

 private:
  std::uint8_t k_ = 0;
};

/**
 * @brief Tensor product of single-qubit Paulis on an n-qubit register.
 *
 * Stored as symplectic bit masks: bit q of `x_mask` is set for X or Y on
 * qubit q, bit q of `z_mask` for Z or Y. Identity is the all-zero string.
 * Qubit 0 maps to the most significant bit of a computational-basis index;
 * use basis_x_mask()/basis_z_mask() when indexing amplitudes.
 */
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits) : n_(n_qubits) { check_width(n_qubits); }

  /// Builds from (qubit, letter) pairs. Repeated qubits are rejected.
  PauliString(int n_qubits, std::span<const std::pair<int, PauliLetter>> letters)
      : PauliString(n_qubits) {
    for (auto [q, l] : letters) {
      if (q < 0 || q >= n_) {
        throw std::out_of_range("PauliString: qubit index " + std::to_string(q) +
                                " out of range for " + std::to_string(n_) + " qubits");
      }
      if (letter(q) != PauliLetter::I) {
        throw std::invalid_argument("PauliString: qubit " + std::to_string(q) + " listed twice");
      }
      set(q, l);
    }
  }

  PauliString(int n_qubits, std::initializer_list<std::pair<int, PauliLetter>> letters)
      : PauliString(n_qubits, std::span<const std::pair<int, PauliLetter>>(letters.begin(), letters.size())) {}

  static PauliString from_masks(int n_qubits, std::uint64_t x, std::uint64_t z) {
    PauliString p(n_qubits);
    std::uint64_t valid = n_qubits == 64 ? ~0ULL : ((1ULL << n_qubits) - 1);
    if ((x | z) & ~valid) throw std::out_of_range("PauliString: mask exceeds register");
    p.x_ = x;
    p.z_ = z;
    return p;
  }

  int n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  bool is_identity() const { return (x_ | z_) == 0; }
  int weight() const { return std::popcount(x_ | z_); }
  int y_count() const { return std::popcount(x_ & z_); }

  /// Highest qubit index touched, or -1 for the identity.
  int max_qubit() const {
    std::uint64_t s = x_ | z_;
    return s == 0 ? -1 : 63 - std::countl_zero(s);
  }

  PauliLetter letter(int q) const {
    int x = static_cast<int>((x_ >> q) & 1U);
    int z = static_cast<int>((z_ >> q) & 1U);
    if (x && z) return PauliLetter::Y;
    if (x) return PauliLetter::X;
    if (z) return PauliLetter::Z;
    return PauliLetter::I;
  }

  void set(int q, PauliLetter l) {
    std::uint64_t bit = 1ULL << q;
    x_ &= ~bit;
    z_ &= ~bit;
    if (l == PauliLetter::X || l == PauliLetter::Y) x_ |= bit;
    if (l == PauliLetter::Z || l == PauliLetter::Y) z_ |= bit;
  }

  /// Non-identity factors in ascending qubit order.
  std::vector<std::pair<int, PauliLetter>> letters() const {
    std::vector<std::pair<int, PauliLetter>> out;
    for (int q = 0; q < n_; ++q) {
      if (auto l = letter(q); l != PauliLetter::I) out.emplace_back(q, l);
    }
    return out;
  }

  /// Same letters on a wider register (identity on the added qubits).
  PauliString widened(int n_qubits) const {
    if (n_qubits < n_) throw std::invalid_argument("PauliString::widened: cannot shrink");
    return from_masks(n_qubits, x_, z_);
  }

  /// X-support as a basis-index mask for an n_total-qubit register.
  std::uint64_t basis_x_mask(int n_total) const { return to_basis_mask(x_, n_total); }
  std::uint64_t basis_z_mask(int n_total) const { return to_basis_mask(z_, n_total); }

  /// "X0 Z3 Y5", or "I" for the identity.
  std::string to_string() const {
    if (is_identity()) return "I";
    std::string s;
    for (auto [q, l] : letters()) {
      if (!s.empty()) s += ' ';
      s += "IXYZ"[static_cast<int>(l)];
      s += std::to_string(q);
    }
    return s;
  }

  // Canonical order: ascending qubit-wise letters, qubit 0 most significant.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (int q = 0; q < a.n_; ++q) {
      auto la = a.letter(q), lb = b.letter(q);
      if (la != lb) return la < lb;
    }
    return false;
  }
  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }

 private:
  static void check_width(int n) {
    if (n < 1 || n > kMaxQubits) {
      throw std::invalid_argument("PauliString: n_qubits must be in [1, 64], got " + std::to_string(n));
    }
  }

  static std::uint64_t to_basis_mask(std::uint64_t m, int n_total) {
    std::uint64_t out = 0;
    while (m) {
      int q = std::countr_zero(m);
      m &= m - 1;
      out |= 1ULL << (n_total - 1 - q);
    }
    return out;
  }

  int n_ = 1;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Product a*b = phase * product, with phase exactly in {1, i, -1, -i}.
inline std::pair<Phase, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("multiply: dimension mismatch (" + std::to_string(a.n_qubits()) +
                                " vs " + std::to_string(b.n_qubits()) + ")");
  }
  // With P = i^{x.z} X^x Z^z:  X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1.x2} X^{x1^x2} Z^{z1^z2}.
  std::uint64_t x = a.x_mask() ^ b.x_mask();
  std::uint64_t z = a.z_mask() ^ b.z_mask();
  int k = a.y_count() + b.y_count() + 2 * std::popcount(a.z_mask() & b.x_mask()) -
          std::popcount(x & z);
  return {Phase(k), PauliString::from_masks(a.n_qubits(), x, z)};
}

/**
 * @brief Complex-weighted sum of Pauli strings over a fixed register.
 *
 * Terms are kept in a canonical ordered map; like strings are collected and
 * coefficients below kPruneThreshold are dropped on every mutation.
 */
class PauliSum {
 public:
  using TermMap = std::map<PauliString, complex_t>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("PauliSum: bad n_qubits");
  }
  PauliSum(const PauliString& s, complex_t c) : PauliSum(s.n_qubits()) { add_term(s, c); }

  static PauliSum identity(int n_qubits, complex_t c = 1.0) {
    return PauliSum(PauliString(n_qubits), c);
  }

  int n_qubits() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  complex_t coefficient(const PauliString& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? complex_t{} : it->second;
  }

  void add_term(const PauliString& s, complex_t c) {
    if (s.n_qubits() != n_) throw std::invalid_argument("PauliSum::add_term: dimension mismatch");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("PauliSum::add_term: non-finite coefficient on " + s.to_string());
    }
    auto [it, inserted] = terms_.try_emplace(s, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
  }

  PauliSum& operator+=(const PauliSum& o) {
    check_same(o, "operator+=");
    for (const auto& [s, c] : o.terms_) add_term(s, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    check_same(o, "operator-=");
    for (const auto& [s, c] : o.terms_) add_term(s, -c);
    return *this;
  }
  PauliSum& operator*=(complex_t c) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= c;
      if (std::abs(it->second) < kPruneThreshold) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, complex_t c) { return a *= c; }
  friend PauliSum operator*(complex_t c, PauliSum a) { return a *= c; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check_same(b, "operator*");
    PauliSum out(a.n_);
    for (const auto& [sa, ca] : a.terms_) {
      for (const auto& [sb, cb] : b.terms_) {
        auto [ph, s] = multiply(sa, sb);
        out.add_term(s, ph.value() * ca * cb);
      }
    }
    return out;
  }

  PauliSum adjoint() const {
    PauliSum out(n_);
    for (const auto& [s, c] : terms_) out.terms_.emplace(s, std::conj(c));
    return out;
  }

  /// All coefficients real within tol (Pauli strings are Hermitian).
  bool is_hermitian(double tol = 1e-10) const {
    for (const auto& [s, c] : terms_) {
      if (std::abs(c.imag()) > tol) return false;
    }
    return true;
  }

  /// Same terms on a wider register (identity on the added qubits).
  PauliSum widened(int n_qubits) const {
    PauliSum out(n_qubits);
    for (const auto& [s, c] : terms_) out.terms_.emplace(s.widened(n_qubits), c);
    return out;
  }

  /// Tensor product with `b`, whose qubits are appended after this register.
  PauliSum tensor(const PauliSum& b) const {
    int n = n_ + b.n_;
    PauliSum out(n);
    for (const auto& [sa, ca] : terms_) {
      for (const auto& [sb, cb] : b.terms_) {
        auto s = PauliString::from_masks(n, sa.x_mask() | (sb.x_mask() << n_),
                                         sa.z_mask() | (sb.z_mask() << n_));
        out.add_term(s, ca * cb);
      }
    }
    return out;
  }

  /// Normalized trace Tr(H)/2^n, i.e. the identity coefficient.
  complex_t normalized_trace() const { return coefficient(PauliString(n_)); }

  friend bool operator==(const PauliSum& a, const PauliSum& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void check_same(const PauliSum& o, const char* where) const {
    if (o.n_ != n_) {
      throw std::invalid_argument(std::string("PauliSum::") + where + ": dimension mismatch (" +
                                  std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
    }
  }

  int n_ = 1;
  TermMap terms_;
};

/// Term-wise sum with like-string collection and zero pruning.
inline PauliSum add_simplify(const PauliSum& a, const PauliSum& b) { return a + b; }

/// Convenience: c * (single string parsed from letters).
inline PauliSum pauli_term(int n_qubits, std::initializer_list<std::pair<int, PauliLetter>> letters,
                           complex_t c = 1.0) {
  return PauliSum(PauliString(n_qubits, letters), c);
}

namespace detail {

/// Phase picked up by basis state `b` under P: P|b> = phase(b) |b ^ x>.
/// Returns the power k of i^k.
inline int basis_phase_power(std::uint64_t b, std::uint64_t bz, int y_count) {
  return y_count + 2 * std::popcount(b & bz);
}

inline complex_t ipow(int k) { return Phase(k).value(); }

}  // namespace detail

/// Dense 2^n x 2^n matrix of a PauliSum, qubit 0 most significant.
inline Eigen::MatrixXcd to_matrix(const PauliSum& h) {
  int n = h.n_qubits();
  if (n > kMaxDenseQubits) {
    throw std::length_error("to_matrix: " + std::to_string(n) + " qubits exceeds dense guard of " +
                            std::to_string(kMaxDenseQubits));
  }
  std::uint64_t dim = 1ULL << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [s, c] : h.terms()) {
    std::uint64_t bx = s.basis_x_mask(n), bz = s.basis_z_mask(n);
    int ny = s.y_count();
    for (std::uint64_t b = 0; b < dim; ++b) {
      m(static_cast<Eigen::Index>(b ^ bx), static_cast<Eigen::Index>(b)) +=
          c * detail::ipow(detail::basis_phase_power(b, bz, ny));
    }
  }
  return m;
}

/// <bra| P |ket> for one Pauli string on the leading qubits of n_total-qubit
/// amplitude arrays.
inline complex_t pauli_matrix_element(const PauliString& s, std::span<const complex_t> bra,
                                      std::span<const complex_t> ket, int n_total) {
  std::uint64_t bx = s.basis_x_mask(n_total), bz = s.basis_z_mask(n_total);
  int ny = s.y_count();
  complex_t acc_even{}, acc_odd{};
  for (std::uint64_t b = 0; b < ket.size(); ++b) {
    complex_t t = std::conj(bra[b ^ bx]) * ket[b];
    if (std::popcount(b & bz) & 1) {
      acc_odd += t;
    } else {
      acc_even += t;
    }
  }
  return detail::ipow(ny) * (acc_even - acc_odd);
}

inline complex_t pauli_expectation(const PauliString& s, std::span<const complex_t> psi, int n_total) {
  return pauli_matrix_element(s, psi, psi, n_total);
}

/// Expectation of an arbitrary (possibly non-Hermitian) sum acting on the
/// leading h.n_qubits() qubits of psi, identity on the rest.
inline complex_t expectation_complex(const PauliSum& h, std::span<const complex_t> psi, int n_total) {
  if (n_total < h.n_qubits()) {
    throw std::invalid_argument("expectation: operator acts on " + std::to_string(h.n_qubits()) +
                                " qubits but state has " + std::to_string(n_total));
  }
  if (psi.size() != (std::size_t{1} << n_total)) throw std::invalid_argument("expectation: bad amplitude count");
  complex_t acc{};
  for (const auto& [s, c] : h.terms()) acc += c * pauli_expectation(s, psi, n_total);
  return acc;
}

}  // namespace qpvqe
