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

#include "test_util.hpp"

#include <gtest/gtest.h>

namespace qpvqe {
namespace {

using testing::random_refs;
using testing::random_weights;

ReferenceSet h2_refs() { return ReferenceSet::from_strings({"1100", "1001", "0110", "0011"}); }

TEST(Weights, DefaultSchedule) {
  auto w4 = default_weights(4);
  const double expect[] = {0.4, 0.3, 0.2, 0.1};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(w4[j], expect[j], 1e-15);
  EXPECT_DOUBLE_EQ(default_weights(1)[0], 1.0);
  auto w2 = default_weights(2);
  EXPECT_NEAR(w2[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(w2[1], 1.0 / 3, 1e-15);
  EXPECT_THROW(default_weights(0), std::invalid_argument);
}

TEST(Weights, InvariantsEnforced) {
  EXPECT_THROW(WeightVector({0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(WeightVector({0.3, 0.7}), std::invalid_argument);
  EXPECT_THROW(WeightVector({0.6, 0.3}), std::invalid_argument);
  EXPECT_THROW(WeightVector({1.2, -0.2}), std::invalid_argument);
  EXPECT_NEAR(default_weights(4).min_gap(), 0.1, 1e-15);
}

TEST(Cascade, FourWeightAngles) {
  auto [angles, gates] = compressed_cascade(default_weights(4));
  ASSERT_EQ(angles.size(), 3u);
  // cos(t0/2) = sqrt(w0 + w1): the first split separates {0,1} from {2,3}.
  EXPECT_NEAR(std::cos(angles[0] / 2), std::sqrt(0.7), 1e-14);
  EXPECT_NEAR(std::cos(angles[0] / 2) * std::cos(angles[1] / 2), std::sqrt(0.4), 1e-14);
  EXPECT_NEAR(std::cos(angles[0] / 2) * std::sin(angles[1] / 2), std::sqrt(0.3), 1e-14);
  EXPECT_NEAR(std::sin(angles[0] / 2) * std::cos(angles[2] / 2), std::sqrt(0.2), 1e-14);
  EXPECT_NEAR(std::sin(angles[0] / 2) * std::sin(angles[2] / 2), std::sqrt(0.1), 1e-14);
  StateVector s(2);
  apply_circuit(s, gates);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(s[j].real(), std::sqrt(default_weights(4)[j]), 1e-12);
}

TEST(Cascade, SingleWeightIsEmpty) {
  auto [angles, gates] = compressed_cascade(default_weights(1));
  EXPECT_TRUE(angles.empty());
  EXPECT_TRUE(gates.empty());
}

TEST(Cascade, GateCountIsLinearInK) {
  for (int k : {2, 3, 4, 5, 8, 16}) {
    auto [angles, gates] = compressed_cascade(default_weights(k));
    EXPECT_LE(gates.size(), static_cast<std::size_t>(k - 1)) << "K=" << k;
    for (const auto& g : gates) EXPECT_LT(g.operands().back(), ancilla_count(k));
  }
  EXPECT_EQ(compressed_cascade(default_weights(8)).second.size(), 7u);
}

TEST(Isometry, H2NetworkShape) {
  auto net = isometry_network(h2_refs());
  int xs = 0, cnots = 0;
  for (const auto& g : net) (g.kind == GateKind::X ? xs : cnots) += 1;
  EXPECT_EQ(xs, 2);
  EXPECT_EQ(cnots, 4);
  for (const auto& g : net) EXPECT_TRUE(g.kind == GateKind::X || g.kind == GateKind::CNOT);
}

TEST(Isometry, SingleReferenceIsPlainFlips) {
  auto net = isometry_network(ReferenceSet::from_strings({"1010"}));
  ASSERT_EQ(net.size(), 2u);
  for (const auto& g : net) EXPECT_EQ(g.kind, GateKind::X);
}

TEST(Purified, H2ReferenceAmplitudes) {
  StateVector s = prepare_purified(default_weights(4), h2_refs());
  ASSERT_EQ(s.n_qubits(), 6);
  const char* labels[] = {"110000", "100101", "011010", "001111"};
  const double w[] = {0.4, 0.3, 0.2, 0.1};
  double rest = 0.0;
  for (std::size_t b = 0; b < s.dim(); ++b) rest += std::norm(s[b]);
  for (int j = 0; j < 4; ++j) {
    const auto idx = basis_index(parse_bitstring(labels[j]));
    EXPECT_NEAR(std::abs(s[idx] - std::sqrt(w[j])), 0.0, 1e-12);
    rest -= std::norm(s[idx]);
  }
  EXPECT_NEAR(rest, 0.0, 1e-12);
}

TEST(Purified, SingleReference) {
  StateVector s = prepare_purified(default_weights(1), ReferenceSet::from_strings({"11"}));
  EXPECT_EQ(s.n_qubits(), 2);
  EXPECT_NEAR(std::abs(s[3] - 1.0), 0.0, 1e-15);
}

TEST(Purified, RandomReferenceSetsMatchDirectConstruction) {
  std::mt19937_64 rng(30);
  for (std::size_t k : {2u, 3u, 5u, 7u}) {
    for (int t = 0; t < 5; ++t) {
      auto refs = random_refs(6, 2 + 2 * (t % 2), k, rng);
      auto w = random_weights(k, rng);
      // prepare_purified throws on any amplitude mismatch.
      StateVector s = prepare_purified(w, refs);
      const int c = ancilla_count(k);
      for (std::size_t j = 0; j < k; ++j) {
        EXPECT_NEAR(s[(basis_index(refs[j]) << c) | j].real(), std::sqrt(w[j]), 1e-12);
      }
    }
  }
}

TEST(Purified, AncillaSpectrumIsTheWeights) {
  std::mt19937_64 rng(31);
  auto refs = random_refs(6, 2, 4, rng);
  auto w = random_weights(4, rng);
  StateVector s = prepare_purified(w, refs);
  const int anc[] = {6, 7};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reduced_density(s, anc));
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(es.eigenvalues()(j), w[3 - j], 1e-12);
}

TEST(Purified, PurificationIdentity) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 20; ++t) {
    auto refs = random_refs(4, 2, 3, rng);
    auto w = random_weights(3, rng);
    auto a = testing::random_hermitian(4, 10, rng);
    double direct = 0.0;
    for (std::size_t j = 0; j < 3; ++j) direct += w[j] * expectation(a, init_basis(4, std::span<const int>(refs[j])));
    EXPECT_NEAR(expectation(a, prepare_purified(w, refs)), direct, 1e-12);
  }
}

TEST(Purified, MismatchedSizesThrow) {
  EXPECT_THROW(make_purified_prep(default_weights(3), h2_refs()), std::invalid_argument);
}

TEST(References, Validation) {
  EXPECT_THROW(ReferenceSet::from_strings({"1100", "1100"}), std::invalid_argument);
  EXPECT_THROW(ReferenceSet::from_strings({"1100", "1000"}), std::invalid_argument);
  EXPECT_THROW(ReferenceSet::from_strings({"1100", "1010"}), std::invalid_argument);
  EXPECT_THROW(ReferenceSet::from_strings({"1100", "110"}), std::invalid_argument);
}

TEST(References, DefaultSelectionForH2) {
  auto h = load_hamiltonian(testing::data_path("h2/h2_0.70.ham"));
  auto refs = select_references(h, 2, 0, 4);
  EXPECT_EQ(format_bitstring(refs[0]), "1100");
  EXPECT_EQ(format_bitstring(refs[3]), "0011");
  // 0110 and 1001 tie on the diagonal; the tie goes to the smaller bitstring.
  EXPECT_EQ(format_bitstring(refs[1]), "0110");
  EXPECT_EQ(format_bitstring(refs[2]), "1001");
  EXPECT_THROW(select_references(h, 2, 0, 5), std::invalid_argument);
}

TEST(References, SelectionIsSortedByDiagonalEnergy) {
  auto h = load_hamiltonian(testing::data_path("h4/h4_1.00.ham"));
  auto refs = select_references(h, 4, 0, 6);
  for (std::size_t j = 1; j < refs.size(); ++j) {
    EXPECT_LE(diagonal_energy(h, basis_index(refs[j - 1])), diagonal_energy(h, basis_index(refs[j])) + 1e-10);
  }
}

TEST(EqualBranches, UniformAmplitudes) {
  StateVector s = prepare_equal_branches(h2_refs());
  const int c = 2;
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(s[(basis_index(h2_refs()[j]) << c) | j].real(), 0.5, 1e-12);
}

}  // namespace
}  // namespace qpvqe
