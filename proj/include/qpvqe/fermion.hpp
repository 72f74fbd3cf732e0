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
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

enum class Spin : std::uint8_t { Alpha = 0, Beta = 1 };

/// Interleaved spin-orbital numbering: (p, alpha) -> 2p, (p, beta) -> 2p+1.
struct SpinOrbitalMap {
  int n_spatial = 0;

  int n_spin_orbitals() const { return 2 * n_spatial; }
  int mode(int spatial, Spin s) const {
    if (spatial < 0 || spatial >= n_spatial) throw std::out_of_range("SpinOrbitalMap: spatial index out of range");
    return 2 * spatial + static_cast<int>(s);
  }
  static int spatial_of(int mode) { return mode / 2; }
  static Spin spin_of(int mode) { return (mode % 2) == 0 ? Spin::Alpha : Spin::Beta; }
  /// Twice the S_z contribution of one electron in `mode`.
  static int two_sz(int mode) { return spin_of(mode) == Spin::Alpha ? 1 : -1; }
};

struct LadderOp {
  int mode = 0;
  bool dagger = false;
};

/// coefficient * product of ladder operators, leftmost applied last.
struct FermionTerm {
  complex_t coefficient{1.0};
  std::vector<LadderOp> ladder;
};

/// JW image of a single ladder operator on n_modes qubits.
inline PauliSum jordan_wigner(const LadderOp& op, int n_modes) {
  if (op.mode < 0 || op.mode >= n_modes) {
    throw std::out_of_range("jordan_wigner: mode " + std::to_string(op.mode) + " out of range for " +
                            std::to_string(n_modes) + " modes");
  }
  PauliString zs(n_modes);
  for (int k = 0; k < op.mode; ++k) zs.set(k, PauliLetter::Z);
  PauliString xs = zs, ys = zs;
  xs.set(op.mode, PauliLetter::X);
  ys.set(op.mode, PauliLetter::Y);
  // a^dag = Z..Z (X - iY)/2,  a = Z..Z (X + iY)/2.
  PauliSum out(xs, 0.5);
  out.add_term(ys, complex_t(0.0, op.dagger ? -0.5 : 0.5));
  return out;
}

inline PauliSum jordan_wigner(const FermionTerm& term, int n_modes) {
  PauliSum out = PauliSum::identity(n_modes, term.coefficient);
  for (const auto& op : term.ladder) out = out * jordan_wigner(op, n_modes);
  return out;
}

inline PauliSum jordan_wigner(const std::vector<FermionTerm>& terms, int n_modes) {
  PauliSum out(n_modes);
  for (const auto& t : terms) out += jordan_wigner(t, n_modes);
  return out;
}

/// Total number operator N = sum_k n_k.
inline PauliSum number_operator(int n_modes) {
  PauliSum out(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    out += jordan_wigner(FermionTerm{1.0, {{k, true}, {k, false}}}, n_modes);
  }
  return out;
}

/// S_z = 1/2 sum_p (n_{p alpha} - n_{p beta}) under the interleaved map.
inline PauliSum sz_operator(int n_modes) {
  PauliSum out(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    out += jordan_wigner(FermionTerm{0.5 * SpinOrbitalMap::two_sz(k), {{k, true}, {k, false}}}, n_modes);
  }
  return out;
}

/// Particle number and twice the S_z of a basis index on n_modes qubits.
inline std::pair<int, int> occupation_quantum_numbers(std::uint64_t index, int n_modes) {
  int n = 0, two_sz = 0;
  for (int k = 0; k < n_modes; ++k) {
    if ((index >> (n_modes - 1 - k)) & 1) {
      ++n;
      two_sz += SpinOrbitalMap::two_sz(k);
    }
  }
  return {n, two_sz};
}

/// Basis indices with the given particle number and 2*S_z, ascending.
inline std::vector<std::uint64_t> sector_basis(int n_modes, int n_particles, int two_sz) {
  if (n_modes < 1 || n_modes > 30) throw std::invalid_argument("sector_basis: bad mode count");
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n_modes); ++b) {
    if (occupation_quantum_numbers(b, n_modes) == std::pair{n_particles, two_sz}) out.push_back(b);
  }
  return out;
}

enum class ExcitationKind : std::uint8_t { Single, Double };

/**
 * @brief One anti-Hermitian excitation generator G - G^dag.
 *
 * Singles are a_p^dag a_q; doubles are a_p^dag a_q^dag a_r a_s. `indices`
 * holds (p, q) or (p, q, r, s) as spin-orbital modes. `pauli_form` is the
 * JW image of G - G^dag and has purely imaginary coefficients.
 */
struct ExcitationGenerator {
  ExcitationKind kind = ExcitationKind::Single;
  std::vector<int> indices;
  int parameter_index = 0;
  PauliSum pauli_form;

  std::string label() const {
    std::string s = kind == ExcitationKind::Single ? "S(" : "D(";
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(indices[i]);
    }
    return s + ")";
  }
};

/// JW image of (G - G^dag) for the ladder product G.
inline PauliSum anti_hermitian_pauli_form(const FermionTerm& g, int n_modes) {
  PauliSum jw = jordan_wigner(g, n_modes);
  return jw - jw.adjoint();
}

inline FermionTerm single_excitation(int p, int q) { return FermionTerm{1.0, {{p, true}, {q, false}}}; }

inline FermionTerm double_excitation(int p, int q, int r, int s) {
  return FermionTerm{1.0, {{p, true}, {q, true}, {r, false}, {s, false}}};
}

/// Builds a generator from explicit spin-orbital indices (2 or 4 of them).
inline ExcitationGenerator make_generator(std::vector<int> indices, int n_modes, int parameter_index) {
  ExcitationGenerator g;
  g.indices = indices;
  g.parameter_index = parameter_index;
  for (int i : indices) {
    if (i < 0 || i >= n_modes) throw std::out_of_range("make_generator: mode " + std::to_string(i) + " out of range");
  }
  if (indices.size() == 2) {
    g.kind = ExcitationKind::Single;
    g.pauli_form = anti_hermitian_pauli_form(single_excitation(indices[0], indices[1]), n_modes);
  } else if (indices.size() == 4) {
    g.kind = ExcitationKind::Double;
    g.pauli_form =
        anti_hermitian_pauli_form(double_excitation(indices[0], indices[1], indices[2], indices[3]), n_modes);
  } else {
    throw std::invalid_argument("make_generator: expected 2 or 4 indices");
  }
  if (g.pauli_form.empty()) throw std::invalid_argument("make_generator: " + g.label() + " is trivial");
  return g;
}

enum class ExcitationMode : std::uint8_t { Full, EffectiveList };

/**
 * @brief Sz-preserving generalized singles and doubles.
 *
 * Full mode: singles a_p^dag a_q with p < q on the same spin, alpha and beta
 * copies of one spatial pair sharing a parameter; then doubles
 * a_p^dag a_q^dag a_r a_s with p < q, r < s, (p,q) < (r,s) and equal net
 * spin of the created and annihilated pairs, one parameter each. Order is
 * ascending by index tuple, singles first.
 *
 * EffectiveList mode returns exactly `effective`, one parameter per entry
 * (each entry holds 2 or 4 spin-orbital indices).
 */
inline std::vector<ExcitationGenerator> enumerate_sz_excitations(
    int n_spatial, bool include_doubles, ExcitationMode mode = ExcitationMode::Full,
    const std::vector<std::vector<int>>& effective = {}) {
  if (n_spatial < 1) throw std::invalid_argument("enumerate_sz_excitations: need at least one spatial orbital");
  const int n = 2 * n_spatial;
  std::vector<ExcitationGenerator> out;
  if (mode == ExcitationMode::EffectiveList) {
    if (effective.empty()) throw std::invalid_argument("enumerate_sz_excitations: empty effective list");
    int k = 0;
    for (const auto& idx : effective) out.push_back(make_generator(idx, n, k++));
    return out;
  }
  int param = 0;
  for (int p = 0; p < n_spatial; ++p) {
    for (int q = p + 1; q < n_spatial; ++q) {
      for (Spin s : {Spin::Alpha, Spin::Beta}) {
        out.push_back(make_generator({2 * p + static_cast<int>(s), 2 * q + static_cast<int>(s)}, n, param));
      }
      ++param;
    }
  }
  if (!include_doubles) return out;
  std::vector<std::array<int, 2>> pairs;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) pairs.push_back({p, q});
  }
  auto pair_sz = [](const std::array<int, 2>& pr) {
    return SpinOrbitalMap::two_sz(pr[0]) + SpinOrbitalMap::two_sz(pr[1]);
  };
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      if (pair_sz(pairs[a]) != pair_sz(pairs[b])) continue;
      out.push_back(make_generator({pairs[a][0], pairs[a][1], pairs[b][0], pairs[b][1]}, n, param++));
    }
  }
  return out;
}

/// Number of distinct parameters referenced by a generator list.
inline int parameter_count(const std::vector<ExcitationGenerator>& gens) {
  int m = 0;
  for (const auto& g : gens) m = std::max(m, g.parameter_index + 1);
  return m;
}

/**
 * @brief Default effective list for the two-electron, two-orbital problem:
 * the pair excitation |1100> <-> |0011> and the spin-flip exchange
 * |1001> <-> |0110>. A sensible candidate only; override via configuration.
 */
inline std::vector<std::vector<int>> default_effective_doubles() { return {{0, 1, 2, 3}, {0, 3, 1, 2}}; }

}  // namespace qpvqe
