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

struct H2Setup {
  PauliSum h = load_hamiltonian(data_path("h2/h2_0.70.ham"));
  QpvqeConfig cfg;
  Problem p = make_problem(h, Sector{2, 0}, cfg);
};

TEST(Ensemble, ZeroAnglesGiveWeightedDiagonal) {
  H2Setup s;
  std::vector<double> zero(s.p.circ.parameter_count, 0.0);
  double expect = 0.0;
  for (std::size_t j = 0; j < 4; ++j) expect += s.p.prep.weights[j] * diagonal_energy(s.h, basis_index(s.p.refs[j]));
  EXPECT_NEAR(ensemble_energy(s.h, s.p.circ, s.p.prep, zero), expect, 1e-12);
}

TEST(Ensemble, OneShotEqualsWeightedSum) {
  std::mt19937_64 rng(40);
  auto h = load_hamiltonian(data_path("h2/h2_0.70.ham"));
  auto circ = build_uccgsd(enumerate_sz_excitations(2, true));
  for (int t = 0; t < 200; ++t) {
    auto refs = testing::random_refs(4, 2, 1 + t % 4, rng);
    auto w = testing::random_weights(refs.size(), rng);
    auto theta = testing::random_theta(circ.parameter_count, rng);
    auto prep = make_purified_prep(w, refs);
    auto [energies, states] = extract_eigenpairs(circ, theta, refs, h);
    double direct = 0.0;
    for (std::size_t j = 0; j < refs.size(); ++j) direct += w[j] * energies[j];
    ASSERT_NEAR(ensemble_energy(h, circ, prep, theta), direct, 1e-12) << "case " << t;
  }
}

TEST(Ensemble, NeverBelowWeightedExactSum) {
  std::mt19937_64 rng(41);
  H2Setup s;
  auto ed = exact_diagonalize(s.h, Sector{2, 0}, 4);
  double floor = 0.0;
  for (std::size_t j = 0; j < 4; ++j) floor += s.p.prep.weights[j] * ed.energies[j];
  for (int t = 0; t < 200; ++t) {
    auto theta = testing::random_theta(s.p.circ.parameter_count, rng, 3.0);
    EXPECT_GE(ensemble_energy(s.h, s.p.circ, s.p.prep, theta), floor - 1e-10);
  }
}

TEST(Optimize, H2SpectrumWithinChemicalAccuracy) {
  H2Setup s;
  auto o = run_problem(s.p, s.cfg);
  const double ed[] = {-1.13618945407, -0.47845305584, -0.120451903717, 0.583314103217};
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(o.ed.energies[j], ed[j], 1e-8);
    EXPECT_NEAR(o.result.energies[j], ed[j], 1.6e-3) << "level " << j;
    EXPECT_GE(o.fidelities[j], 0.99);
  }
  EXPECT_TRUE(o.result.converged);
  EXPECT_TRUE(o.certified) << o.certificate_error;
  EXPECT_FALSE(o.result.ordering_violated);
  ASSERT_TRUE(o.result.e_w.has_value());
  EXPECT_GE(*o.result.e_w, -1e-10);
}

TEST(Optimize, TraceIsMonotone) {
  H2Setup s;
  auto r = optimize(s.h, s.p.circ, s.p.prep, s.cfg);
  for (std::size_t i = 1; i < r.ensemble_trace.size(); ++i) {
    EXPECT_LE(r.ensemble_trace[i], r.ensemble_trace[i - 1] + 1e-12) << "iteration " << i;
  }
  // Rejected Adam steps count as iterations but leave no trace entry.
  EXPECT_LE(static_cast<int>(r.ensemble_trace.size()), r.iterations_used + 1);
}

TEST(Optimize, StatesOrthonormalAndNumberConserving) {
  H2Setup s;
  auto r = optimize(s.h, s.p.circ, s.p.prep, s.cfg);
  auto n_op = number_operator(4);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(expectation(n_op, r.states[i]), 2.0, 1e-12);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(std::abs(inner_product(r.states[i], r.states[j])), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Optimize, SingleStateIsGroundStateVqe) {
  H2Setup s;
  s.cfg.k = 1;
  auto p = make_problem(s.h, Sector{2, 0}, s.cfg);
  auto o = run_problem(p, s.cfg);
  EXPECT_NEAR(o.result.energies[0], -1.13618945407, 1.6e-3);
  EXPECT_TRUE(o.certified);
  EXPECT_NEAR(*o.result.bound, *o.result.e_w, 1e-15);
}

TEST(Optimize, DeterministicAndRestartsRun) {
  H2Setup s;
  s.cfg.restarts = 2;
  s.cfg.seed = 7;
  auto a = optimize(s.h, s.p.circ, s.p.prep, s.cfg);
  auto b = optimize(s.h, s.p.circ, s.p.prep, s.cfg);
  EXPECT_EQ(a.theta_star, b.theta_star);
  EXPECT_EQ(a.ensemble_trace, b.ensemble_trace);
  EXPECT_EQ(a.restart_index, b.restart_index);
  EXPECT_GE(a.restart_index, 0);
  EXPECT_LE(a.restart_index, 2);
}

TEST(Optimize, RejectsBadConfig) {
  H2Setup s;
  s.cfg.optimizer = OptimizerKind::Spsa;
  EXPECT_THROW(optimize(s.h, s.p.circ, s.p.prep, s.cfg), std::invalid_argument);
  s.cfg.optimizer = OptimizerKind::Adam;
  s.cfg.convergence_window = 0;
  EXPECT_THROW(optimize(s.h, s.p.circ, s.p.prep, s.cfg), std::invalid_argument);
  PauliSum wrong = PauliSum::identity(6);
  s.cfg.convergence_window = 10;
  EXPECT_THROW(optimize(wrong, s.p.circ, s.p.prep, s.cfg), std::invalid_argument);
}

TEST(ErrorBound, WorkedExamples) {
  WeightVector w = default_weights(4);
  const double e[] = {-1.0, -0.5, 0.0, 0.5};
  std::vector<double> shifted(e, e + 4);
  shifted[0] += 1e-3 / 0.4;
  auto b = error_bound(shifted, w, e);
  EXPECT_NEAR(b.e_w, 1e-3, 1e-15);
  EXPECT_NEAR(b.bound, 0.02, 1e-14);
  auto exact = error_bound(std::span<const double>(e, 4), w, e);
  EXPECT_EQ(exact.e_w, 0.0);
  EXPECT_EQ(exact.bound, 0.0);
  std::vector<double> low(e, e + 4);
  low[0] -= 1e-3;
  EXPECT_THROW(error_bound(low, w, e), std::logic_error);
}

TEST(ErrorBound, ViolatedCertificateThrows) {
  WeightVector w = default_weights(2);
  const double e[] = {0.0, 1.0};
  // e_w = 0.05 / 3 but the summed error is 0.25 > 0.1; no orthonormal pair does this.
  const double got[] = {0.1, 0.85};
  EXPECT_THROW(error_bound(got, w, e), std::logic_error);
}

}  // namespace
}  // namespace qpvqe
