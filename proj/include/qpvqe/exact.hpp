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

#include <Eigen/Eigenvalues>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpvqe {

/// Fixed particle number and 2*S_z.
struct Sector {
  int n_particles = 0;
  int two_sz = 0;
};

/// Lowest eigenpairs of a Hamiltonian, optionally inside one symmetry sector.
struct EDReference {
  std::optional<Sector> sector;
  std::vector<double> energies;      // ascending, Hartree
  std::vector<StateVector> vectors;  // on the full register
};

/**
 * @brief Dense Hermitian eigendecomposition, restricted to the sector's
 * determinants when one is given. Returns the lowest K pairs.
 */
inline EDReference exact_diagonalize(const PauliSum& h, std::optional<Sector> sector, std::size_t k) {
  const int n = h.n_qubits();
  if (n > kMaxDenseQubits) throw std::length_error("exact_diagonalize: too many qubits for dense ED");
  if (!h.is_hermitian()) throw std::invalid_argument("exact_diagonalize: operator is not Hermitian");
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<std::uint64_t> basis;
  if (sector) {
    basis = sector_basis(n, sector->n_particles, sector->two_sz);
  } else {
    basis.resize(full);
    for (std::uint64_t b = 0; b < full; ++b) basis[b] = b;
  }
  if (k == 0 || k > basis.size()) {
    throw std::invalid_argument("exact_diagonalize: K = " + std::to_string(k) + " exceeds sector dimension " +
                                std::to_string(basis.size()));
  }
  std::vector<Eigen::Index> pos(full, -1);
  for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<Eigen::Index>(i);
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [s, c] : h.terms()) {
    const std::uint64_t bx = s.basis_x_mask(n), bz = s.basis_z_mask(n);
    const int ny = s.y_count();
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::uint64_t b = basis[j];
      const Eigen::Index i = pos[b ^ bx];
      if (i < 0) continue;  // leaves the sector; cancels in a symmetric H
      m(i, j) += c * detail::ipow(detail::basis_phase_power(b, bz, ny));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("exact_diagonalize: eigensolver failed");
  EDReference out;
  out.sector = sector;
  for (std::size_t j = 0; j < k; ++j) {
    out.energies.push_back(es.eigenvalues()(static_cast<Eigen::Index>(j)));
    std::vector<complex_t> amp(full);
    for (Eigen::Index i = 0; i < d; ++i) amp[basis[i]] = es.eigenvectors()(i, static_cast<Eigen::Index>(j));
    out.vectors.emplace_back(n, std::move(amp));
  }
  return out;
}

/**
 * @brief Overlap of `psi` with the eigenspace of ED level j: the sum of
 * |<v|psi>|^2 over every returned ED vector whose energy lies within
 * `degeneracy_tol` of E_j. Degenerate levels have no preferred basis, so
 * this is the meaningful fidelity.
 */
inline double subspace_fidelity(const StateVector& psi, const EDReference& ed, std::size_t j,
                                double degeneracy_tol = 1e-6) {
  double f = 0.0;
  for (std::size_t i = 0; i < ed.energies.size(); ++i) {
    if (std::abs(ed.energies[i] - ed.energies[j]) <= degeneracy_tol) f += fidelity(ed.vectors[i], psi);
  }
  return std::min(1.0, f);
}

}  // namespace qpvqe
