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

using testing::data_path;

struct Solved {
  PauliSum h = load_hamiltonian(data_path("h2/h2_0.70.ham"));
  QpvqeConfig cfg;
  Problem p = make_problem(h, Sector{2, 0}, cfg);
  SpectrumResult r = optimize(p.h, p.circ, p.prep, cfg);
};

const Solved& solved() {
  static const Solved s;
  return s;
}

TEST(Pair, NormalizedWithBalancedAncilla) {
  const auto& s = solved();
  auto pair = prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 0, 2);
  EXPECT_NEAR(pair.state().norm(), 1.0, 1e-12);
  const int anc[] = {pair.ancilla()};
  auto rho = reduced_density(pair.state(), anc);
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-12);
}

TEST(Pair, BranchesAreTheEvolvedReferences) {
  const auto& s = solved();
  auto pair = prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 1, 3);
  const auto& st = pair.state();
  for (std::uint64_t b = 0; b < 16; ++b) {
    EXPECT_NEAR(std::abs(st[b << 1] - s.r.states[1][b] / std::sqrt(2.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st[(b << 1) | 1] - s.r.states[3][b] / std::sqrt(2.0)), 0.0, 1e-12);
  }
}

TEST(Gap, MatchesEnergyDifferences) {
  const auto& s = solved();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double want = s.r.energies[i] - s.r.energies[j];
      EXPECT_NEAR(energy_gap(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, i, j), s.h), want, 1e-12);
      EXPECT_NEAR(gap_from_full_purified(s.p.circ, s.r.theta_star, s.p.refs, s.h, i, j), want, 1e-12);
    }
  }
}

TEST(Gap, RandomAnglesStillGiveDiagonalDifference) {
  std::mt19937_64 rng(60);
  const auto& s = solved();
  for (int t = 0; t < 10; ++t) {
    auto theta = testing::random_theta(s.p.circ.parameter_count, rng);
    auto [e, st] = extract_eigenpairs(s.p.circ, theta, s.p.refs, s.h);
    EXPECT_NEAR(energy_gap(prepare_pair(s.p.circ, theta, s.p.refs, 0, 3), s.h), e[0] - e[3], 1e-12);
    EXPECT_NEAR(energy_gap(prepare_pair(s.p.circ, theta, s.p.refs, 3, 0), s.h), e[3] - e[0], 1e-12);
  }
}

TEST(Gap, ConstantHamiltonianHasNoGaps) {
  const auto& s = solved();
  auto c = PauliSum::identity(4, 0.7);
  EXPECT_NEAR(energy_gap(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 0, 1), c), 0.0, 1e-14);
  EXPECT_NEAR(gap_from_full_purified(s.p.circ, s.r.theta_star, s.p.refs, c, 0, 1), 0.0, 1e-14);
}

TEST(Gap, ProjectorsAreIdempotent) {
  for (std::size_t l = 0; l < 4; ++l) {
    auto p = label_projector(l, 2);
    auto m = to_matrix(p);
    EXPECT_LT((to_matrix(p * p) - m).cwiseAbs().maxCoeff(), 1e-14) << l;
    EXPECT_NEAR(std::abs(m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-14);
  }
}

TEST(Gap, UnsupportedRequestsRejected) {
  const auto& s = solved();
  auto refs5 = ReferenceSet::from_strings({"11000000", "10010000", "01100000", "00110000", "10000100"});
  auto circ8 = build_uccgsd(enumerate_sz_excitations(4, false));
  std::vector<double> zero(circ8.parameter_count, 0.0);
  EXPECT_THROW(gap_from_full_purified(circ8, zero, refs5, PauliSum::identity(8), 0, 1), std::invalid_argument);
  EXPECT_THROW(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 2, 2), std::invalid_argument);
  EXPECT_THROW(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 0, 4), std::out_of_range);
}

TEST(Amplitude, MatchesDirectMatrixElement) {
  const auto& s = solved();
  auto o = load_hamiltonian(data_path("h2/h2_0.70_dipole_z.ham"));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      StateVector oj = apply_pauli_sum(o, s.r.states[j]);
      const complex_t direct = inner_product(s.r.states[i], oj);
      auto got = transition_amplitude(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, i, j), o);
      EXPECT_NEAR(std::abs(got - direct), 0.0, 1e-12) << i << "," << j;
      auto back = transition_amplitude(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, j, i), o);
      EXPECT_NEAR(std::abs(back - std::conj(got)), 0.0, 1e-12);
    }
  }
}

TEST(Amplitude, IdentityBetweenOrthogonalStatesVanishes) {
  const auto& s = solved();
  auto a = transition_amplitude(prepare_pair(s.p.circ, s.r.theta_star, s.p.refs, 0, 1), PauliSum::identity(4));
  EXPECT_NEAR(std::abs(a), 0.0, 1e-12);
}

TEST(Amplitude, RandomStatesAndObservables) {
  std::mt19937_64 rng(61);
  const auto& s = solved();
  for (int t = 0; t < 20; ++t) {
    auto theta = testing::random_theta(s.p.circ.parameter_count, rng);
    auto o = testing::random_hermitian(4, 8, rng);
    auto [e, st] = extract_eigenpairs(s.p.circ, theta, s.p.refs, s.h);
    const complex_t direct = inner_product(st[2], apply_pauli_sum(o, st[0]));
    auto got = transition_amplitude(prepare_pair(s.p.circ, theta, s.p.refs, 2, 0), o);
    EXPECT_NEAR(std::abs(got - direct), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace qpvqe
