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

#include "dpamimo/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpamimo/linalg.hpp"
#include "dpamimo/matrix_file.hpp"

namespace dpamimo::precoding {

namespace {

Index group_total(const std::vector<Index>& groups) {
  for (Index d : groups)
    if (d < 1) throw ConfigError("grouping: every group needs at least one subarray");
  return std::accumulate(groups.begin(), groups.end(), Index{0});
}

void require_positive(double p_d, double sigma2) {
  if (!(p_d > 0.0) || !(sigma2 > 0.0)) throw ConfigError("precoding: p_d and sigma2 must be > 0");
}

// Principal eigenvector, rotated so its largest-modulus entry is real positive.
cvec principal_eigenvector(const cmat& t) {
  Eigen::SelfAdjointEigenSolver<cmat> eig(t);
  if (eig.info() != Eigen::Success) throw NumericError("sic: eigen decomposition failed");
  cvec v = eig.eigenvectors().col(t.cols() - 1);
  Index top = 0;
  v.cwiseAbs().maxCoeff(&top);
  if (std::abs(v[top]) > 0.0) v *= std::conj(v[top]) / std::abs(v[top]);
  return v;
}

// SIC recursion on G: T_{n-1} = G^H R_{n-1}^{-1} G, R_n = R_{n-1} + snr G f_n f_n^H G^H.
SicResult sic_design(const cmat& g, const std::vector<Index>& groups, double snr) {
  const Index n_s = static_cast<Index>(groups.size());
  const Index total = group_total(groups);
  if (total == 0 || g.cols() % total != 0)
    throw DimensionError("sic: antenna count is not a multiple of the subarray count");
  const Index n_sub = g.cols() / total;

  SicResult out;
  out.f_tilde = cmat::Zero(g.cols(), n_s);
  out.f_rf_bar = cmat::Zero(g.cols(), n_s);
  cmat r = cmat::Identity(g.rows(), g.rows());
  Index offset = 0;
  for (Index n = 0; n < n_s; ++n) {
    const cmat t = g.adjoint() * HermitianSolver(r).solve(g);
    const Index len = groups[n] * n_sub;
    const cmat block = t.block(offset, offset, len, len);
    const cvec v = principal_eigenvector(0.5 * (block + block.adjoint()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(len));
    for (Index i = 0; i < len; ++i) {
      out.f_tilde(offset + i, n) = std::polar(amp, std::arg(v[i]));
      out.f_rf_bar(offset + i, n) = std::polar(1.0 / std::sqrt(static_cast<double>(n_sub)), std::arg(v[i]));
    }
    const cvec f = out.f_tilde.col(n);
    out.sub_rates.push_back(std::log2(1.0 + snr * f.dot(t * f).real()));
    const cvec gf = g * f;
    r += snr * gf * gf.adjoint();
    offset += len;
  }
  return out;
}

}  // namespace

std::vector<Index> group_subarrays(Index m, Index n_s) {
  if (n_s < 1 || n_s > m) throw ConfigError("group_subarrays: need 1 <= n_s <= m");
  std::vector<Index> d(static_cast<std::size_t>(n_s), m / n_s);
  d.back() += m % n_s;
  return d;
}

SicResult sic_rf_precoder(const cmat& h, const std::vector<Index>& d_t, double p_d, double sigma2,
                          Index n_s) {
  require_positive(p_d, sigma2);
  if (static_cast<Index>(d_t.size()) != n_s) throw DimensionError("sic_rf_precoder: d_t must have n_s entries");
  return sic_design(h, d_t, p_d / (static_cast<double>(n_s) * sigma2));
}

DigitalResult digital_precoder(const cmat& h, const cmat& f_rf_bar, const std::vector<Index>& d_t,
                               Index n_s, PowerAllocation alloc, double p_d, double sigma2) {
  if (static_cast<Index>(d_t.size()) != n_s || f_rf_bar.cols() != n_s || f_rf_bar.rows() != h.cols())
    throw DimensionError("digital_precoder: shapes do not match n_s");
  rvec inv_sqrt_d(n_s);
  for (Index i = 0; i < n_s; ++i) inv_sqrt_d[i] = 1.0 / std::sqrt(static_cast<double>(d_t[i]));

  const cmat m = h * f_rf_bar * inv_sqrt_d.cast<cplx>().asDiagonal();
  Eigen::JacobiSVD<cmat> svd(m, Eigen::ComputeFullV);
  const rvec& sv = svd.singularValues();

  DigitalResult out;
  const double tol = sv.size() > 0 ? sv[0] * 1e-10 : 0.0;
  out.effective_rank = (sv.array() > tol).count();

  rvec power = rvec::Ones(n_s);
  if (alloc == PowerAllocation::kWaterFilling) {
    require_positive(p_d, sigma2);
    rvec gains = rvec::Zero(n_s);
    for (Index i = 0; i < std::min<Index>(n_s, sv.size()); ++i)
      gains[i] = p_d / (static_cast<double>(n_s) * sigma2) * sv[i] * sv[i];
    power = water_filling(gains, static_cast<double>(n_s));
  }
  out.f_bb_bar = inv_sqrt_d.cast<cplx>().asDiagonal() * svd.matrixV().leftCols(n_s) *
                 power.cwiseSqrt().cast<cplx>().asDiagonal();
  const double norm2 = (f_rf_bar * out.f_bb_bar).squaredNorm();
  if (norm2 > 0.0) out.f_bb_bar *= std::sqrt(static_cast<double>(n_s) / norm2);
  return out;
}

SicResult sic_rf_combiner(const cmat& h, const cmat& f_rf_bar, const cmat& f_bb_bar,
                          const std::vector<Index>& d_r, double p_d, double sigma2, Index n_s) {
  require_positive(p_d, sigma2);
  if (static_cast<Index>(d_r.size()) != n_s) throw DimensionError("sic_rf_combiner: d_r must have n_s entries");
  const cmat h_eq = h * f_rf_bar * f_bb_bar;
  return sic_design(h_eq.adjoint(), d_r, p_d / (static_cast<double>(n_s) * sigma2));
}

cmat mmse_combiner(const cmat& h, const cmat& f_rf_bar, const cmat& f_bb_bar, const cmat& w_rf_bar,
                   double p_d, double sigma2, Index n_s) {
  if (w_rf_bar.rows() != h.rows() || f_rf_bar.rows() != h.cols())
    throw DimensionError("mmse_combiner: shapes do not match the channel");
  const double scale = p_d / static_cast<double>(n_s);
  const cmat a = w_rf_bar.adjoint() * h * f_rf_bar * f_bb_bar;
  cmat j = scale * a * a.adjoint() + sigma2 * (w_rf_bar.adjoint() * w_rf_bar);
  j = 0.5 * (j + j.adjoint());
  return scale * HermitianSolver(j).solve(a);
}

cmat range_basis(const cmat& a) {
  Eigen::ColPivHouseholderQR<cmat> qr(a);
  qr.setThreshold(1e-10);
  return qr.householderQ() * cmat::Identity(a.rows(), qr.rank());
}

double spectral_efficiency(const cmat& h, const cmat& f_t, const cmat& w_t, double p_d,
                           double sigma2, Index n_s) {
  require_positive(p_d, sigma2);
  if (n_s < 1) throw ConfigError("spectral_efficiency: n_s must be >= 1");
  if (f_t.rows() != h.cols() || w_t.rows() != h.rows())
    throw DimensionError("spectral_efficiency: shapes do not match the channel");
  Eigen::ColPivHouseholderQR<cmat> qr(w_t);
  qr.setThreshold(1e-10);
  if (qr.rank() < w_t.cols()) throw NumericError("spectral_efficiency: combiner is rank deficient");
  const cmat q = qr.householderQ() * cmat::Identity(w_t.rows(), w_t.cols());

  const cmat b = q.adjoint() * h * f_t;
  cmat m = cmat::Identity(q.cols(), q.cols()) + p_d / (static_cast<double>(n_s) * sigma2) * b * b.adjoint();
  Eigen::LLT<cmat> llt(0.5 * (m + m.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericError("spectral_efficiency: determinant not positive");
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum() / std::log(2.0);
}

rvec water_filling(const rvec& gains, double total) {
  const Index n = gains.size();
  rvec power = rvec::Zero(n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return gains[a] > gains[b]; });
  Index active = 0;
  while (active < n && gains[order[active]] > 0.0) ++active;
  if (active == 0) {
    if (n > 0) power.setConstant(total / static_cast<double>(n));
    return power;
  }
  for (; active > 0; --active) {
    double inv_sum = 0.0;
    for (Index i = 0; i < active; ++i) inv_sum += 1.0 / gains[order[i]];
    const double mu = (total + inv_sum) / static_cast<double>(active);
    if (mu - 1.0 / gains[order[active - 1]] > 0.0) {
      for (Index i = 0; i < active; ++i) power[order[i]] = mu - 1.0 / gains[order[i]];
      break;
    }
  }
  return power;
}

DigitalSolution optimal_digital(const cmat& h, Index n_s, double p_d, double sigma2) {
  require_positive(p_d, sigma2);
  if (n_s < 1 || n_s > std::min(h.rows(), h.cols()))
    throw ConfigError("optimal_digital: n_s exceeds the channel dimensions");
  Eigen::JacobiSVD<cmat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvec& sv = svd.singularValues();
  if (!(sv[n_s - 1] > sv[0] * 1e-10)) throw NumericError("optimal_digital: channel rank below n_s");
  const rvec gains = (p_d / (static_cast<double>(n_s) * sigma2)) * sv.head(n_s).array().square();
  const rvec power = water_filling(gains, static_cast<double>(n_s));
  DigitalSolution out;
  out.f = svd.matrixV().leftCols(n_s) * power.cwiseSqrt().cast<cplx>().asDiagonal();
  out.w = svd.matrixU().leftCols(n_s);
  return out;
}

HybridDesign group_sic(const cmat& h, Index m_t, Index m_r, Index n_s, double p_d, double sigma2,
                       PowerAllocation alloc) {
  if (m_t < 1 || m_r < 1 || h.cols() % m_t != 0 || h.rows() % m_r != 0)
    throw DimensionError("group_sic: channel shape does not match the subarray counts");
  HybridDesign out;
  out.groups.d_t = group_subarrays(m_t, n_s);
  out.groups.d_r = group_subarrays(m_r, n_s);

  SicResult tx = sic_rf_precoder(h, out.groups.d_t, p_d, sigma2, n_s);
  DigitalResult bb = digital_precoder(h, tx.f_rf_bar, out.groups.d_t, n_s, alloc, p_d, sigma2);
  SicResult rx = sic_rf_combiner(h, tx.f_rf_bar, bb.f_bb_bar, out.groups.d_r, p_d, sigma2, n_s);
  out.beams.f_rf_bar = std::move(tx.f_rf_bar);
  out.beams.f_bb_bar = std::move(bb.f_bb_bar);
  out.beams.w_rf_bar = std::move(rx.f_rf_bar);
  out.beams.w_bb_bar = mmse_combiner(h, out.beams.f_rf_bar, out.beams.f_bb_bar, out.beams.w_rf_bar,
                                     p_d, sigma2, n_s);
  out.f_t = out.beams.f_rf_bar * out.beams.f_bb_bar;
  out.w_t = out.beams.w_rf_bar * out.beams.w_bb_bar;
  out.sub_rates = std::move(tx.sub_rates);
  out.effective_rank = bb.effective_rank;
  return out;
}

cmat import_channel(const std::filesystem::path& path, const std::string& name) {
  return io::read_matrix_file(path).matrix(name);
}

}  // namespace dpamimo::precoding
