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

#include "dpamimo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dpamimo/linalg.hpp"

namespace dpamimo::model {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

// Uniform draw of `count` distinct values from `pool` (partial Fisher-Yates).
IndexSet sample_without_replacement(std::vector<Index> pool, Index count, Rng& rng) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
    out.push_back(pool[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void SystemConfig::validate() const {
  require(m_t >= 1 && m_r >= 1, "m_t and m_r must be >= 1");
  require(n_t_sub >= 1 && n_r_sub >= 1, "n_t_sub and n_r_sub must be >= 1");
  require(n_t_beam >= 1 && n_r_beam >= 1, "beam counts must be >= 1");
  require(l_common >= 1, "l_common must be >= 1");
  require(l_common <= l_indiv, "l_common must not exceed l_indiv");
  require(l_indiv <= block_size(), "l_indiv must not exceed n_t_sub * n_r_sub");
  require(n_t_beam <= n_t_tot(), "n_t_beam must not exceed m_t * n_t_sub");
  require(n_r_beam <= n_r_tot(), "n_r_beam must not exceed m_r * n_r_sub");
  require(n_r_beam % m_r == 0, "n_r_beam must be a multiple of m_r");
  require(n_t_beam % n_t_sub == 0, "n_t_beam must be a multiple of n_t_sub");
  require(n_r_beam % n_r_sub == 0, "n_r_beam must be a multiple of n_r_sub");
  require(n_t_beam / n_t_sub <= m_t, "n_t_beam / n_t_sub must not exceed m_t");
  require(n_r_beam / n_r_sub <= m_r, "n_r_beam / n_r_sub must not exceed m_r");
  require(n_s >= 1 && n_s <= std::min(m_t, m_r), "n_s must be in [1, min(m_t, m_r)]");
  for (double v : {var_los, var_nlos, pilot_power, data_power, noise_var})
    require(std::isfinite(v) && v >= 0.0, "variances and powers must be finite and >= 0");
}

double beam_direction(Index i, Index n) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5;
}

cvec array_response(double psi, Index n) {
  if (n < 1) throw DimensionError("array_response: antenna count must be >= 1");
  cvec a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index l = 0; l < n; ++l) {
    const double u = static_cast<double>(l) - 0.5 * static_cast<double>(n - 1);
    a[l] = std::polar(scale, -2.0 * kPi * psi * u);
  }
  return a;
}

cmat beam_dictionary(Index n) {
  if (n < 1) throw DimensionError("beam_dictionary: antenna count must be >= 1");
  cmat u(n, n);
  for (Index i = 0; i < n; ++i) u.col(i) = array_response(beam_direction(i, n), n);
  return u;
}

cmat tx_transform(const SystemConfig& cfg) {
  return kron(cmat::Identity(cfg.m_t, cfg.m_t), beam_dictionary(cfg.n_t_sub));
}

cmat rx_transform(const SystemConfig& cfg) {
  return kron(cmat::Identity(cfg.m_r, cfg.m_r), beam_dictionary(cfg.n_r_sub));
}

SupportSet draw_supports(const SystemConfig& cfg, Rng& rng) {
  const Index b = cfg.block_size();
  std::vector<Index> all(static_cast<std::size_t>(b));
  std::iota(all.begin(), all.end(), Index{0});

  SupportSet s;
  s.common = sample_without_replacement(all, cfg.l_common, rng);

  std::vector<Index> rest;
  std::set_difference(all.begin(), all.end(), s.common.begin(), s.common.end(),
                      std::back_inserter(rest));
  const Index extra = cfg.l_indiv - cfg.l_common;
  s.individual.reserve(static_cast<std::size_t>(cfg.pair_count()));
  for (Index k = 0; k < cfg.pair_count(); ++k) {
    IndexSet own = sample_without_replacement(rest, extra, rng);
    own.insert(own.end(), s.common.begin(), s.common.end());
    std::sort(own.begin(), own.end());
    s.individual.push_back(std::move(own));
  }
  return s;
}

Index block_to_vec_index(Index x_index, const SystemConfig& cfg) {
  const Index b = cfg.block_size();
  const Index k = x_index / b;
  const Index within = x_index % b;
  const Index n = k / cfg.m_r;  // TX subarray
  const Index m = k % cfg.m_r;  // RX subarray
  const Index t = within / cfg.n_r_sub;
  const Index r = within % cfg.n_r_sub;
  return (n * cfg.n_t_sub + t) * cfg.n_r_tot() + (m * cfg.n_r_sub + r);
}

cvec vectorize_blocks(const cmat& g, const SystemConfig& cfg) {
  if (g.rows() != cfg.n_r_tot() || g.cols() != cfg.n_t_tot())
    throw DimensionError("vectorize_blocks: G has wrong shape");
  const Index total = cfg.block_size() * cfg.pair_count();
  cvec x(total);
  const cvec vg = vec(g);
  for (Index i = 0; i < total; ++i) x[i] = vg[block_to_vec_index(i, cfg)];
  return x;
}

cmat devectorize_blocks(const cvec& x, const SystemConfig& cfg) {
  const Index total = cfg.block_size() * cfg.pair_count();
  if (x.size() != total) throw DimensionError("devectorize_blocks: length mismatch");
  cmat g(cfg.n_r_tot(), cfg.n_t_tot());
  for (Index i = 0; i < total; ++i) {
    const Index v = block_to_vec_index(i, cfg);
    g(v % cfg.n_r_tot(), v / cfg.n_r_tot()) = x[i];
  }
  return g;
}

cmat beam_to_spatial(const cmat& g, const SystemConfig& cfg) {
  const cmat ur = beam_dictionary(cfg.n_r_sub);
  const cmat ut = beam_dictionary(cfg.n_t_sub);
  cmat h(g.rows(), g.cols());
  // Block-diagonal transforms act per subarray pair.
  for (Index m = 0; m < cfg.m_r; ++m)
    for (Index n = 0; n < cfg.m_t; ++n)
      h.block(m * cfg.n_r_sub, n * cfg.n_t_sub, cfg.n_r_sub, cfg.n_t_sub) =
          ur * g.block(m * cfg.n_r_sub, n * cfg.n_t_sub, cfg.n_r_sub, cfg.n_t_sub) *
          ut.adjoint();
  return h;
}

ChannelRealization draw_channel(const SystemConfig& cfg, const SupportSet& supports, Rng& rng) {
  const Index b = cfg.block_size();
  if (static_cast<Index>(supports.individual.size()) != cfg.pair_count())
    throw DimensionError("draw_channel: support count does not match m_t * m_r");
  for (const auto& set : supports.individual)
    for (Index idx : set)
      if (idx < 0 || idx >= b) throw DimensionError("draw_channel: support index out of range");
  for (Index idx : supports.common)
    if (idx < 0 || idx >= b) throw DimensionError("draw_channel: support index out of range");

  // sqrt(N_t N_r / L) amplitude scaling of the path model, applied to variances.
  const double scale = static_cast<double>(b) / static_cast<double>(cfg.l_indiv);
  ChannelRealization ch;
  ch.supports = supports;
  ch.x_true = cvec::Zero(b * cfg.pair_count());
  for (Index k = 0; k < cfg.pair_count(); ++k) {
    for (Index idx : supports.individual[static_cast<std::size_t>(k)]) {
      const bool common =
          std::binary_search(supports.common.begin(), supports.common.end(), idx);
      const double var = (common ? cfg.var_los : cfg.var_nlos) * scale;
      ch.x_true[k * b + idx] = complex_normal(rng, var);
    }
  }
  ch.g = devectorize_blocks(ch.x_true, cfg);
  ch.h = beam_to_spatial(ch.g, cfg);
  return ch;
}

}  // namespace dpamimo::model
