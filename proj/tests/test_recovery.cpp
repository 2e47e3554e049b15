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

#include <numeric>

#include "dpamimo/recovery.hpp"
#include "dpamimo/sounding.hpp"
#include "helpers.hpp"

using namespace dpamimo;
using namespace dpamimo::recovery;
using model::SystemConfig;

namespace {

// Full-training noiseless instance of the small configuration.
struct Instance {
  SystemConfig cfg;
  sounding::PilotPlan plan;
  model::ChannelRealization ch;
  cvec y;
};

Instance noiseless_instance(std::uint64_t seed) {
  Instance in;
  in.cfg = test::small_config();
  in.cfg.noise_var = 0.0;
  in.plan = sounding::design_pilot_plan(in.cfg);
  Rng rng(seed);
  in.ch = model::draw_channel(in.cfg, model::draw_supports(in.cfg, rng), rng);
  in.y = in.plan.phi * in.ch.x_true;
  return in;
}

cmat random_unitary(Rng& rng, Index n) {
  Eigen::HouseholderQR<cmat> qr(test::random_matrix(rng, n, n));
  return qr.householderQ() * cmat::Identity(n, n);
}

IndexSet true_support(const Instance& in) {
  IndexSet s;
  const Index b = in.cfg.block_size();
  for (Index k = 0; k < in.cfg.pair_count(); ++k)
    for (Index i : in.ch.supports.individual[k]) s.push_back(k * b + i);
  return s;
}

void check_greedy_contract(const cmat& phi, const cvec& y, const SparseEstimate& est) {
  for (Index j = 0; j < est.x_hat.size(); ++j)
    if (!test::contains(est.support_full_est, j)) CHECK(est.x_hat[j] == cplx(0.0, 0.0));
  const cvec r = y - phi * est.x_hat;
  double worst = 0.0;
  for (Index j : est.support_full_est) worst = std::max(worst, std::abs(phi.col(j).dot(r)));
  CHECK(worst < 1e-8 * std::max(1.0, y.norm()));
  for (Index j : est.support_common_est) CHECK(test::contains(est.support_full_est, j));
}

// Surrogate cost with z fixed.
double surrogate(const cmat& phi, const cvec& y, const cvec& s, const cvec& c, const rvec& gs,
                 const rvec& gc, const rvec& zs, const rvec& zc, double lambda, double beta) {
  const Index b = gc.size();
  const Index k = s.size() / b;
  double reg = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    reg += (std::norm(s[i]) + beta * zs[i]) / gs[i] + beta * std::log(gs[i]);
  for (Index j = 0; j < b; ++j) {
    double row = 0.0;
    for (Index kk = 0; kk < k; ++kk) row += std::norm(c[kk * b + j]);
    reg += (row + zc[j]) / gc[j] + static_cast<double>(k) * std::log(gc[j]);
  }
  return (y - phi * (s + c)).squaredNorm() + lambda * reg;
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("greedy estimators on y = 0") {
  Rng rng(1);
  const cmat phi = test::random_matrix(rng, 8, 12);
  const cvec y = cvec::Zero(8);
  JompOptions opt;
  opt.t1 = 2;
  opt.t2 = 4;
  const SparseEstimate j = jomp(phi, y, 3, opt);
  CHECK(j.x_hat.norm() == 0.0);
  CHECK(j.support_full_est.empty());
  CHECK(j.iterations == 0);
  const SparseEstimate o = omp(phi, y, 5, 0.0);
  CHECK(o.x_hat.norm() == 0.0);
  CHECK(o.support_full_est.empty());
}

TEST_CASE("greedy argument checks") {
  const cmat phi = cmat::Identity(4, 6);
  CHECK_THROWS_AS(jomp(phi, cvec::Zero(4), 4, {}), DimensionError);
  CHECK_THROWS_AS(jomp(phi, cvec::Zero(3), 3, {}), DimensionError);
  JompOptions bad;
  bad.t1 = 0;
  CHECK_THROWS_AS(jomp(phi, cvec::Zero(4), 3, bad), ConfigError);
  CHECK_THROWS_AS(omp(phi, cvec::Zero(4), -1, 0.0), ConfigError);
}

TEST_CASE("omp recovers a 1-sparse vector in one step") {
  Rng rng(2);
  const cmat phi = random_unitary(rng, 10);
  for (Index j : {0, 4, 9}) {
    const SparseEstimate est = omp(phi, phi.col(j), 3, 1e-20);
    CHECK(est.iterations == 1);
    REQUIRE(est.support_full_est.size() == 1);
    CHECK(est.support_full_est[0] == j);
    CHECK(std::abs(est.x_hat[j] - cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("jomp picks the strongest groups with orthonormal columns") {
  Rng rng(3);
  const Index b = 6, k = 4;
  const cmat phi = random_unitary(rng, b * k);
  for (int rep = 0; rep < 20; ++rep) {
    cvec x = cvec::Zero(b * k);
    for (Index g : {1, 3, 4})
      for (Index kk = 0; kk < k; ++kk) x[kk * b + g] = complex_normal(rng, 1.0);
    x[2 * b + 5] = complex_normal(rng, 0.1);
    const cvec y = phi * x;

    std::vector<double> energy(b, 0.0);
    for (Index g = 0; g < b; ++g)
      for (Index kk = 0; kk < k; ++kk) energy[g] += std::norm(phi.col(kk * b + g).dot(y));
    std::vector<Index> order(b);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index c) { return energy[a] > energy[c]; });

    JompOptions opt;
    opt.t1 = 2;
    opt.t2 = 0;
    const SparseEstimate est = jomp(phi, y, b, opt);
    IndexSet expect;
    for (Index g : {order[0], order[1]})
      for (Index kk = 0; kk < k; ++kk) expect.push_back(kk * b + g);
    std::sort(expect.begin(), expect.end());
    CHECK(est.support_common_est == expect);
    check_greedy_contract(phi, y, est);
  }
}

TEST_CASE("noiseless full training: exact greedy recovery") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance in = noiseless_instance(seed);
    const double tiny = 1e-20 * in.y.squaredNorm();
    JompOptions opt;
    opt.t1 = 1;
    opt.t2 = static_cast<int>((in.cfg.l_indiv + 1 - opt.t1) * in.cfg.pair_count());
    opt.delta1 = opt.delta2 = tiny;
    const SparseEstimate j = jomp(in.plan.phi, in.y, in.cfg.block_size(), opt);
    CHECK(j.support_full_est == true_support(in));
    CHECK((j.x_hat - in.ch.x_true).norm() < 1e-8 * in.ch.x_true.norm());
    check_greedy_contract(in.plan.phi, in.y, j);

    SparseEstimate o = omp(in.plan.phi, in.y, static_cast<int>(in.cfg.pair_count() * in.cfg.l_indiv), tiny);
    attach_channel(o, in.cfg);
    CHECK(nmse_db(in.ch.h, o.h_hat) < -60.0);
    check_greedy_contract(in.plan.phi, in.y, o);
  }
}

TEST_CASE("greedy estimates reshape consistently") {
  const Instance in = noiseless_instance(4);
  SparseEstimate est = omp(in.plan.phi, in.y, 8, 0.0);
  attach_channel(est, in.cfg);
  CHECK((est.h_hat - model::beam_to_spatial(est.g_hat, in.cfg)).norm() < 1e-12 * std::max(1.0, est.h_hat.norm()));
  CHECK((model::vectorize_blocks(est.g_hat, in.cfg) - est.x_hat).norm() == 0.0);
}

TEST_CASE("sbl on y = 0 shrinks to zero") {
  Rng rng(4);
  const cmat phi = test::random_matrix(rng, 6, 9);
  SblOptions opt;
  opt.lambda = 1.0;
  const SparseEstimate est = sbl(phi, cvec::Zero(6), opt);
  CHECK(est.x_hat.norm() == 0.0);
  CHECK_THROWS_AS(sbl(phi, cvec::Zero(6), SblOptions{0.0, 10, 1e-4, 0.0}), ConfigError);
}

TEST_CASE("sbl single column fixed point") {
  cmat v(3, 1);
  v << cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.0);
  const cplx a(2.0, -1.0);
  SblOptions opt;
  opt.lambda = 1e-9;
  opt.t_max = 200;
  opt.eps = 1e-14;
  const SparseEstimate est = sbl(SensingMatrix(v), a * v.col(0), opt);
  CHECK(std::abs(est.x_hat[0] - a) < 1e-6);
}

TEST_CASE("sbl noiseless full training") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance in = noiseless_instance(seed);
    SblOptions opt;
    opt.lambda = 1e-10 * in.y.squaredNorm() / double(in.y.size());
    opt.t_max = 300;
    SparseEstimate est = sbl(sounding::sensing_matrix(in.plan, in.cfg), in.y, opt);
    attach_channel(est, in.cfg);
    CHECK(nmse_db(in.ch.h, est.h_hat) < -40.0);
  }
}

TEST_CASE("jsbl on y = 0") {
  Rng rng(5);
  const cmat phi = test::random_matrix(rng, 8, 12);
  JsblOptions opt;
  SblState st;
  const SparseEstimate est = jsbl_l2(phi, cvec::Zero(8), 3, opt, {}, &st);
  CHECK(est.x_hat.norm() == 0.0);
  CHECK(st.s.norm() == 0.0);
  CHECK(st.c.norm() == 0.0);
  CHECK((st.gamma_s.array() >= 0.0).all());
  CHECK((st.gamma_c.array() >= 0.0).all());
  CHECK(st.gamma_s.maxCoeff() < 1.0);
  CHECK_THROWS_AS(jsbl_l2(phi, cvec::Zero(8), 5, opt), DimensionError);
  JsblOptions bad;
  bad.beta = 0.0;
  CHECK_THROWS_AS(jsbl_l2(phi, cvec::Zero(8), 3, bad), ConfigError);
}

TEST_CASE("jsbl noiseless full training") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance in = noiseless_instance(seed);
    JsblOptions opt;
    opt.lambda = 1e-10 * in.y.squaredNorm() / double(in.y.size());
    SblState st;
    SparseEstimate est = jsbl_l2(sounding::sensing_matrix(in.plan, in.cfg), in.y, in.cfg.block_size(), opt, {}, &st);
    attach_channel(est, in.cfg);
    CHECK(nmse_db(in.ch.h, est.h_hat) < -50.0);
    CHECK((est.x_hat - (st.s + st.c)).norm() <= 1e-12 * est.x_hat.norm());
    const double top = st.gamma_c.maxCoeff();
    for (Index c : in.ch.supports.common) CHECK(st.gamma_c[c] > 1e-3 * top);
  }
}

TEST_CASE("jsbl surrogate is non-increasing") {
  SystemConfig cfg = test::small_config();
  cfg.n_t_beam = cfg.n_r_beam = 4;  // partial training
  const sounding::PilotPlan plan = sounding::design_pilot_plan(cfg);
  const double lambda = 0.5, beta = 3.3;
  Rng rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const model::ChannelRealization ch = model::draw_channel(cfg, model::draw_supports(cfg, rng), rng);
    const cvec y = plan.phi * ch.x_true + complex_normal_matrix(rng, plan.phi.rows(), 1, lambda);
    JsblOptions opt;
    opt.lambda = lambda;
    opt.beta = beta;
    opt.t_max = 40;
    opt.eps = 0.0;
    int steps = 0;
    jsbl_l2(sounding::sensing_matrix(plan, cfg), y, cfg.block_size(), opt, [&](const JsblStep& s) {
      const SblState& a = s.before;
      const SblState& b = s.after;
      // z of the current step is held fixed across all three evaluations.
      const double f0 = surrogate(plan.phi, y, a.s, a.c, a.gamma_s, a.gamma_c, b.z_s, b.z_c, lambda, beta);
      const double f1 = surrogate(plan.phi, y, b.s, b.c, a.gamma_s, a.gamma_c, b.z_s, b.z_c, lambda, beta);
      const double f2 = surrogate(plan.phi, y, b.s, b.c, b.gamma_s, b.gamma_c, b.z_s, b.z_c, lambda, beta);
      const double tol = 1e-9 * std::abs(f0);
      CHECK(f1 <= f0 + tol);
      CHECK(f2 <= f1 + tol);
      ++steps;
    });
    CHECK(steps == 40);
  }
}

TEST_CASE("dual identity") {
  Rng rng(7);
  const Index n = 8, b = 3, k = 4;
  for (int rep = 0; rep < 100; ++rep) {
    const cmat phi = test::random_matrix(rng, n, b * k);
    const cvec y = test::random_matrix(rng, n, 1);
    const rvec gs = (rvec::Random(b * k).array().abs() + 0.05).matrix();
    const rvec gc = (rvec::Random(b).array().abs() + 0.05).matrix();
    CHECK(dual_identity_residual(phi, y, gs, gc, 0.7) < 1e-10);
    CHECK(dual_identity_residual(phi, y, gs, gc, 7.0) < 1e-10);
  }
  CHECK_THROWS_AS(dual_identity_residual(cmat::Identity(8, 12), cvec::Zero(8), rvec::Zero(12), rvec::Ones(3), 1.0),
                  ConfigError);
}

TEST_CASE("dual identity with a very large common prior") {
  // With Gamma_c = 1e6 I the prior covariance is Gamma_s + I (x) Gamma_c; the
  // joint identity must agree with the single-prior SBL identity there.
  Rng rng(8);
  const Index n = 8, b = 3, k = 4;
  const double lambda = 0.9;
  for (int rep = 0; rep < 20; ++rep) {
    const cmat phi = test::random_matrix(rng, n, b * k);
    const cvec y = test::random_matrix(rng, n, 1);
    const rvec gs = (rvec::Random(b * k).array().abs() + 0.05).matrix();
    const rvec gc = rvec::Constant(b, 1e6);
    CHECK(dual_identity_residual(phi, y, gs, gc, lambda) < 1e-6);

    rvec gamma = gs;
    for (Index i = 0; i < b * k; ++i) gamma[i] += gc[i % b];
    cmat sigma = phi * gamma.cast<cplx>().asDiagonal() * phi.adjoint();
    sigma.diagonal().array() += lambda;
    const double lhs = y.dot(sigma.ldlt().solve(y)).real();
    cmat normal = phi.adjoint() * phi / lambda;
    normal.diagonal() += gamma.cwiseInverse().cast<cplx>();
    const cvec x = normal.ldlt().solve(phi.adjoint() * y / lambda);
    const double rhs = (y - phi * x).squaredNorm() / lambda + x.cwiseAbs2().dot(gamma.cwiseInverse());
    CHECK(std::abs(lhs - rhs) / lhs < 1e-6);
  }
}

TEST_CASE("nmse metric") {
  Rng rng(9);
  const cmat h = test::random_matrix(rng, 4, 5);
  CHECK(nmse_db(h, h) == kNmseFloorDb);
  CHECK(nmse_db(h, cmat::Zero(4, 5)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(nmse_db(h, 2.0 * h)) < 1e-12);
  CHECK(nmse_linear(h, 0.5 * h) == doctest::Approx(0.25));
  CHECK(to_db(0.1) == doctest::Approx(-10.0));
  CHECK_THROWS_AS(nmse_db(cmat::Zero(4, 5), h), NumericError);
  CHECK_THROWS_AS(nmse_db(h, cmat::Zero(5, 4)), DimensionError);
}

}  // TEST_SUITE
