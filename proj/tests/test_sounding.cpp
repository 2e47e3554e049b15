// Copyright 2026 The dpamimo Authors
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

#include <doctest.h>

#include "dpamimo/sounding.hpp"
#include "helpers.hpp"

using namespace dpamimo;
using namespace dpamimo::sounding;
using model::SystemConfig;

namespace {

double brute_coherence(const cmat& m) {
  double sum = 0.0;
  for (Index k = 0; k < m.cols(); ++k)
    for (Index l = 0; l < m.cols(); ++l)
      if (k != l) sum += std::norm(m.col(k).dot(m.col(l)));
  return sum;
}

void check_side(const SidePilots& s, Index subarrays, Index n_sub, Index n_beam) {
  const Index tot = subarrays * n_sub;
  CHECK(s.rf.rows() == tot);
  CHECK(s.rf.cols() == tot);
  CHECK(s.baseband.cols() == n_beam);
  CHECK(s.composite.cols() == n_beam);
  for (Index j = 0; j < n_beam; ++j) CHECK(std::abs(s.composite.col(j).norm() - 1.0) < 1e-12);
  // RF column p*M + i lives on subarray i with constant modulus.
  for (Index p = 0; p < n_sub; ++p)
    for (Index i = 0; i < subarrays; ++i) {
      const Index col = p * subarrays + i;
      for (Index row = 0; row < tot; ++row) {
        const bool own = row / n_sub == i;
        if (own) CHECK(std::abs(std::abs(s.rf(row, col)) - 1.0 / std::sqrt(double(n_sub))) < 1e-12);
        else CHECK(s.rf(row, col) == cplx(0.0, 0.0));
      }
    }
}

}  // namespace

TEST_SUITE("sounding") {

TEST_CASE("circular shift") {
  Rng rng(1);
  const cmat a = test::random_matrix(rng, 3, 5);
  CHECK(circshift_columns(a, 0) == a);
  const cmat s = circshift_columns(a, 2);
  for (Index j = 0; j < 5; ++j) CHECK(s.col((j + 2) % 5) == a.col(j));
  CHECK(circshift_columns(a, 7) == s);
  CHECK(circshift_columns(a, -3) == s);
}

TEST_CASE("unitary dft") {
  for (Index n : {1, 2, 5, 16}) {
    const cmat f = unitary_dft(n);
    CHECK((f.adjoint() * f - cmat::Identity(n, n)).norm() < 1e-12);
  }
  const cmat f4 = unitary_dft(4);
  CHECK(std::abs(f4(1, 1) - cplx(0.0, -0.5)) < 1e-15);
}

TEST_CASE("full-training pilots, M=2, N_sub=2") {
  SystemConfig cfg;
  cfg.m_t = cfg.m_r = 2;
  cfg.n_t_sub = cfg.n_r_sub = 2;
  cfg.n_t_beam = cfg.n_r_beam = 4;
  cfg.l_indiv = 2;
  cfg.l_common = 1;
  const SidePilots tx = design_tx_pilots(cfg);
  check_side(tx, 2, 2, 4);
  CHECK((tx.composite.adjoint() * tx.composite - cmat::Identity(4, 4)).norm() < 1e-12);
  // Truncation keeps every column when n_beam / n_block = M.
  const cmat block = tx.baseband.block(0, 0, 2, 2);
  CHECK((block - unitary_dft(2) * unitary_dft(2).adjoint()).norm() < 1e-12);
  CHECK((block.adjoint() * block - cmat::Identity(2, 2)).norm() < 1e-12);
  CHECK((tx.baseband.block(2, 2, 2, 2) - block).norm() == 0.0);
  CHECK(tx.baseband.block(0, 2, 2, 2).norm() == 0.0);
}

TEST_CASE("partial-training pilots at the default configuration") {
  SystemConfig cfg;
  const SidePilots tx = design_tx_pilots(cfg);
  const SidePilots rx = design_rx_pilots(cfg);
  check_side(tx, 4, 10, 20);
  check_side(rx, 4, 10, 20);
  CHECK((rx.composite.adjoint() * rx.composite - cmat::Identity(20, 20)).norm() < 1e-12);
  CHECK(rx.composite.cols() % cfg.m_r == 0);
  CHECK(rx.composite.cols() / cfg.m_r == 5);  // simultaneous snapshots
  // RF beam of subarray i in sub-block p is DFT column (p - i) mod n.
  const cmat dft = unitary_dft(10);
  CHECK((tx.rf.block(2 * 10, 3 * 4 + 2, 10, 1) - dft.col(1)).norm() < 1e-15);
  CHECK((tx.rf.block(3 * 10, 1 * 4 + 3, 10, 1) - dft.col(8)).norm() < 1e-15);

  SystemConfig bad = cfg;
  bad.n_t_beam = 25;
  CHECK_THROWS_AS(design_tx_pilots(bad), DimensionError);
}

TEST_CASE("random pilots keep the hardware constraints") {
  Rng rng(4);
  const SidePilots s = random_side_pilots(4, 10, 20, rng);
  check_side(s, 4, 10, 20);
}

TEST_CASE("measurement matrix permutation") {
  SystemConfig one;
  one.m_t = one.m_r = 1;
  one.n_t_beam = one.n_r_beam = 10;
  const PilotPlan p1 = design_pilot_plan(one);
  CHECK((p1.phi - kronecker_measurement(p1, one)).norm() == 0.0);

  SystemConfig cfg;
  cfg.m_t = cfg.m_r = 2;
  cfg.n_t_sub = cfg.n_r_sub = 2;
  cfg.n_t_beam = cfg.n_r_beam = 2;
  cfg.l_indiv = 2;
  cfg.l_common = 1;
  Rng rng(8);
  for (const PilotPlan& plan : {design_pilot_plan(cfg), random_pilot_plan(cfg, rng)}) {
    const cmat q = kronecker_measurement(plan, cfg);
    for (int rep = 0; rep < 50; ++rep) {
      const cmat g = test::random_matrix(rng, 4, 4);
      CHECK((plan.phi * model::vectorize_blocks(g, cfg) - q * vec(g)).norm() < 1e-12);
    }
  }

  SystemConfig big;
  const PilotPlan plan = design_pilot_plan(big);
  CHECK(plan.phi.rows() == 400);
  CHECK(plan.phi.cols() == 1600);
  // Orthonormal rows: post-combining noise stays white.
  CHECK((plan.phi * plan.phi.adjoint() - cmat::Identity(400, 400)).norm() < 1e-10);
  const model::ChannelRealization ch = model::draw_channel(big, model::draw_supports(big, rng), rng);
  const cmat direct = plan.w.adjoint() * ch.h * plan.f;
  CHECK((plan.phi * ch.x_true - vec(direct)).norm() < 1e-10 * direct.norm());
}

TEST_CASE("structured kernels agree with the dense path") {
  Rng rng(12);
  SystemConfig cfg;
  cfg.m_t = 2;
  cfg.m_r = 3;
  cfg.n_t_sub = 3;
  cfg.n_r_sub = 2;
  cfg.n_t_beam = 6;
  cfg.n_r_beam = 4;
  cfg.l_indiv = 2;
  cfg.l_common = 1;
  cfg.n_s = 1;
  for (const PilotPlan& plan : {design_pilot_plan(cfg), random_pilot_plan(cfg, rng)}) {
    const SensingMatrix s = sensing_matrix(plan, cfg).scaled(1.7);
    REQUIRE(s.structured());
    CHECK((s.dense() - 1.7 * plan.phi).norm() < 1e-12);
    const rvec w = rvec::Random(s.cols()).cwiseAbs();
    const cmat gs = s.weighted_gram(w);
    CHECK((gs - s.weighted_gram_dense(w)).norm() < 1e-11 * gs.norm());
    cmat x = test::random_matrix(rng, s.rows(), s.rows());
    x = x * x.adjoint();
    const rvec q = s.quadratic_diag(x);
    CHECK((q - s.quadratic_diag_dense(x)).norm() < 1e-11 * q.norm());
  }
}

TEST_CASE("sounding observations") {
  Rng rng(21);
  SystemConfig cfg = test::small_config();
  const PilotPlan plan = design_pilot_plan(cfg);
  const model::ChannelRealization ch = model::draw_channel(cfg, model::draw_supports(cfg, rng), rng);

  cfg.noise_var = 0.0;
  const cvec y = sound_channel(ch.h, plan, cfg, rng).y;
  const cvec clean = std::sqrt(cfg.pilot_power) * plan.phi * ch.x_true;
  CHECK((y - clean).norm() < 1e-12 * clean.norm());

  SystemConfig doubled = cfg;
  doubled.pilot_power *= 2.0;
  const cvec y2 = sound_channel(ch.h, plan, doubled, rng).y;
  CHECK(y2.squaredNorm() == doctest::Approx(2.0 * y.squaredNorm()).epsilon(1e-12));

  CHECK_THROWS_AS(sound_channel(cmat::Zero(3, 3), plan, cfg, rng), DimensionError);
}

TEST_CASE("post-combining noise is white") {
  SystemConfig cfg = test::small_config();
  cfg.pilot_power = 0.0;
  cfg.noise_var = 2.0;
  const PilotPlan plan = design_pilot_plan(cfg);
  const cmat h = cmat::Zero(cfg.n_r_tot(), cfg.n_t_tot());
  Rng rng(33);
  const int draws = 10000;
  const Index n = cfg.measurement_count();
  cmat cov = cmat::Zero(n, n);
  for (int i = 0; i < draws; ++i) {
    const SoundingObservation obs = sound_channel(h, plan, cfg, rng);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(obs.y);
    CHECK(obs.noise_var_effective == doctest::Approx(2.0));
  }
  cmat full = cov.selfadjointView<Eigen::Lower>();
  full /= double(draws);
  const double dev = (full - cfg.noise_var * cmat::Identity(n, n)).cwiseAbs().maxCoeff();
  CHECK(dev < 5.0 * cfg.noise_var / std::sqrt(double(draws)));
}

TEST_CASE("total coherence") {
  CHECK(total_coherence(cmat::Identity(5, 3)) == 0.0);
  cvec v = cvec::Zero(4);
  v[1] = 1.0;
  cmat dup(4, 2);
  dup << v, v;
  CHECK(total_coherence(dup) == doctest::Approx(2.0));
  Rng rng(3);
  for (Index cols : {3, 9}) {
    const cmat m = test::random_matrix(rng, 5, cols);
    CHECK(total_coherence(m) == doctest::Approx(brute_coherence(m)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(total_coherence(cmat()), DimensionError);
}

TEST_CASE("total coherence of a Kronecker product") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const cmat a = test::random_matrix(rng, 3, 4);
    const cmat c = test::random_matrix(rng, 2, 5);
    const double ma = total_coherence(a), mc = total_coherence(c);
    const double da = a.colwise().squaredNorm().array().square().sum();
    const double dc = c.colwise().squaredNorm().array().square().sum();
    CHECK(total_coherence(kron(a, c)) == doctest::Approx(ma * mc + ma * dc + da * mc).epsilon(1e-10));
  }
}

TEST_CASE("designed pilots beat random pilots on total coherence") {
  SystemConfig cfg;
  const double designed = total_coherence(design_pilot_plan(cfg).phi);
  Rng rng(99);
  int worse = 0;
  for (int rep = 0; rep < 10; ++rep) worse += total_coherence(random_pilot_plan(cfg, rng).phi) >= designed;
  CHECK(worse == 10);
}

}  // TEST_SUITE
