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

#include <algorithm>
#include <cmath>

#include "dpamimo/recovery.hpp"

namespace dpamimo::recovery {

namespace {

void prune(rvec& gamma, double tol) {
  if (tol <= 0.0 || gamma.size() == 0) return;
  const double cut = tol * gamma.maxCoeff();
  for (Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] < cut) gamma[i] = 0.0;
}

// Expands per-row gammas to the block layout, I_K (x) Gamma_c.
rvec tile(const rvec& gamma_c, Index k_count) {
  rvec out(gamma_c.size() * k_count);
  for (Index k = 0; k < k_count; ++k) out.segment(k * gamma_c.size(), gamma_c.size()) = gamma_c;
  return out;
}

cmat shifted(const cmat& gram, double shift) {
  cmat out = gram;
  out.diagonal().array() += shift;
  return out;
}

// diag(Gamma - Gamma Phi^H Sigma^{-1} Phi Gamma), floored at zero.
rvec posterior_variance(const SensingMatrix& phi, const cmat& sigma, const rvec& gamma) {
  const cmat inv = HermitianSolver(sigma).inverse();
  const rvec q = phi.quadratic_diag(inv);
  return (gamma.array() - gamma.array().square() * q.array()).cwiseMax(0.0);
}

}  // namespace

SparseEstimate sbl(const SensingMatrix& phi, const cvec& y, const SblOptions& opt) {
  if (phi.rows() != y.size()) throw DimensionError("sbl: phi rows must match y");
  if (!(opt.lambda > 0.0)) throw ConfigError("sbl: lambda must be > 0");
  const cmat& dense = phi.dense();

  rvec gamma = rvec::Ones(phi.cols());
  int iterations = 0;
  for (int t = 1; t <= opt.t_max; ++t) {
    const cmat sigma = shifted(phi.weighted_gram(gamma), opt.lambda);
    const HermitianSolver solver(sigma);
    const cvec mu = gamma.cast<cplx>().cwiseProduct(dense.adjoint() * solver.solve(y));
    const rvec q = phi.quadratic_diag(solver.inverse());
    const rvec var = (gamma.array() - gamma.array().square() * q.array()).cwiseMax(0.0);
    rvec next = mu.cwiseAbs2() + var;
    prune(next, opt.prune_tol);
    const double change = (next - gamma).norm();
    const double scale = gamma.norm();
    gamma = std::move(next);
    iterations = t;
    if (change <= opt.eps * scale) break;
  }

  const cmat sigma = shifted(phi.weighted_gram(gamma), opt.lambda);
  SparseEstimate est;
  est.x_hat = gamma.cast<cplx>().cwiseProduct(dense.adjoint() * HermitianSolver(sigma).solve(y));
  for (Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] > 0.0) est.support_full_est.push_back(i);
  est.iterations = iterations;
  est.residual_norm = (y - dense * est.x_hat).norm();
  return est;
}

SparseEstimate jsbl_l2(const SensingMatrix& phi, const cvec& y, Index block_size,
                       const JsblOptions& opt, const std::function<void(const JsblStep&)>& observer,
                       SblState* final_state) {
  if (phi.rows() != y.size()) throw DimensionError("jsbl_l2: phi rows must match y");
  if (block_size < 1 || phi.cols() % block_size != 0)
    throw DimensionError("jsbl_l2: phi columns must be a multiple of the block size");
  if (!(opt.lambda > 0.0) || !(opt.beta > 0.0))
    throw ConfigError("jsbl_l2: lambda and beta must be > 0");

  const Index total = phi.cols();
  const Index k_count = total / block_size;
  const cmat& dense = phi.dense();
  const double half = 0.5 * opt.lambda;

  SblState st;
  st.gamma_s = rvec::Ones(total);
  st.gamma_c = rvec::Ones(block_size);
  st.s = cvec::Zero(total);
  st.c = cvec::Zero(total);
  st.z_s = rvec::Zero(total);
  st.z_c = rvec::Zero(block_size);

  int iterations = 0;
  for (int t = 1; t <= opt.t_max; ++t) {
    JsblStep step;
    if (observer) step.before = st;
    const cvec s_old = st.s;
    const cvec c_old = st.c;

    const rvec gamma_c_full = tile(st.gamma_c, k_count);
    const cmat gram_s = phi.weighted_gram(st.gamma_s);
    const cmat gram_c = phi.weighted_gram(gamma_c_full);

    // s, c from Sigma_sc = lambda I + Phi (Gamma_s + I (x) Gamma_c) Phi^H.
    const cvec back = dense.adjoint() * HermitianSolver(shifted(gram_s + gram_c, opt.lambda)).solve(y);
    st.s = st.gamma_s.cast<cplx>().cwiseProduct(back);
    st.c = gamma_c_full.cast<cplx>().cwiseProduct(back);

    // z from the half-noise marginals Sigma_s and Sigma_c.
    st.z_s = posterior_variance(phi, shifted(gram_s, half), st.gamma_s);
    const rvec zc_full = posterior_variance(phi, shifted(gram_c, half), gamma_c_full);
    st.z_c.setZero();
    for (Index k = 0; k < k_count; ++k) st.z_c += zc_full.segment(k * block_size, block_size);

    st.gamma_s = st.s.cwiseAbs2() / opt.beta + st.z_s;
    rvec row_energy = rvec::Zero(block_size);
    for (Index k = 0; k < k_count; ++k) row_energy += st.c.segment(k * block_size, block_size).cwiseAbs2();
    st.gamma_c = (row_energy + st.z_c) / static_cast<double>(k_count);
    prune(st.gamma_s, opt.prune_tol);
    prune(st.gamma_c, opt.prune_tol);

    iterations = t;
    if (observer) {
      step.after = st;
      observer(step);
    }
    if ((st.s + st.c - s_old - c_old).squaredNorm() <= opt.eps) break;
  }

  const rvec gamma_c_full = tile(st.gamma_c, k_count);
  const rvec gamma_sum = st.gamma_s + gamma_c_full;
  const cmat sigma = shifted(phi.weighted_gram(gamma_sum), opt.lambda);
  const cvec back = dense.adjoint() * HermitianSolver(sigma).solve(y);
  st.s = st.gamma_s.cast<cplx>().cwiseProduct(back);
  st.c = gamma_c_full.cast<cplx>().cwiseProduct(back);
  SparseEstimate est;
  est.x_hat = st.s + st.c;
  for (Index i = 0; i < total; ++i)
    if (gamma_sum[i] > 0.0) est.support_full_est.push_back(i);
  for (Index b = 0; b < block_size; ++b)
    if (st.gamma_c[b] > 0.0)
      for (Index k = 0; k < k_count; ++k) est.support_common_est.push_back(k * block_size + b);
  std::sort(est.support_common_est.begin(), est.support_common_est.end());
  est.iterations = iterations;
  est.residual_norm = (y - dense * est.x_hat).norm();
  if (final_state) *final_state = st;
  return est;
}

double dual_identity_residual(const cmat& phi, const cvec& y, const rvec& gamma_s,
                              const rvec& gamma_c, double lambda) {
  const Index total = phi.cols();
  if (gamma_s.size() != total || gamma_c.size() < 1 || total % gamma_c.size() != 0)
    throw DimensionError("dual_identity_residual: hyperparameter lengths do not match phi");
  if (!(lambda > 0.0) || (gamma_s.array() <= 0.0).any() || (gamma_c.array() <= 0.0).any())
    throw ConfigError("dual_identity_residual: hyperparameters and lambda must be > 0");

  const rvec gc = tile(gamma_c, total / gamma_c.size());

  // Left side: y^H (lambda I + Phi (Gamma_s + I (x) Gamma_c) Phi^H)^{-1} y.
  cmat sigma = phi * (gamma_s + gc).cast<cplx>().asDiagonal() * phi.adjoint();
  sigma.diagonal().array() += lambda;
  const double lhs = y.dot(sigma.ldlt().solve(y)).real();

  // Right side in x-space. With A = Gamma_s^{-1}, B = (I (x) Gamma_c)^{-1}:
  // c* = (A + B)^{-1} A x and the x-penalty is (A^{-1} + B^{-1})^{-1}.
  const rvec a = gamma_s.cwiseInverse();
  const rvec b = gc.cwiseInverse();
  const rvec penalty = (gamma_s + gc).cwiseInverse();
  cmat normal = phi.adjoint() * phi / lambda;
  normal.diagonal() += penalty.cast<cplx>();
  const cvec x = normal.ldlt().solve(phi.adjoint() * y / lambda);
  const cvec c = ((a + b).cwiseInverse().cwiseProduct(a)).cast<cplx>().cwiseProduct(x);
  const cvec s = x - c;
  const double rhs = (y - phi * x).squaredNorm() / lambda +
                     (s.cwiseAbs2().cwiseProduct(a)).sum() + (c.cwiseAbs2().cwiseProduct(b)).sum();
  return std::abs(lhs - rhs) / std::abs(lhs);
}

}  // namespace dpamimo::recovery
