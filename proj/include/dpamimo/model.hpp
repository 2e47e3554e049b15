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

#pragma once

#include "dpamimo/common.hpp"
#include "dpamimo/rng.hpp"

namespace dpamimo::model {

/// Dimensional and statistical parameters of one simulated link.
struct SystemConfig {
  Index m_t = 4;        // TX subarrays
  Index m_r = 4;        // RX subarrays
  Index n_t_sub = 10;   // antennas per TX subarray
  Index n_r_sub = 10;   // antennas per RX subarray
  Index n_t_beam = 20;  // TX training beams
  Index n_r_beam = 20;  // RX training beams
  Index n_s = 1;        // data streams
  Index l_indiv = 5;    // paths per subarray pair
  Index l_common = 3;   // paths shared by every pair
  double var_los = 1.0;
  double var_nlos = 0.31622776601683794;  // 10^-0.5
  double pilot_power = 10.0;
  double data_power = 10.0;
  double noise_var = 1.0;
  std::uint64_t seed = 1;

  Index n_t_tot() const { return m_t * n_t_sub; }
  Index n_r_tot() const { return m_r * n_r_sub; }
  /// Block length B = n_t_sub n_r_sub.
  Index block_size() const { return n_t_sub * n_r_sub; }
  /// Number of subarray pairs K = m_t m_r.
  Index pair_count() const { return m_t * m_r; }
  /// Measurement count N = n_t_beam n_r_beam.
  Index measurement_count() const { return n_t_beam * n_r_beam; }

  /// Throws ConfigError naming the first violated invariant. Zero variances
  /// and powers are admitted (noiseless and pure-noise experiments).
  void validate() const;
};

struct SupportSet {
  IndexSet common;                   // Omega_c, zero-based over [0, B)
  std::vector<IndexSet> individual;  // Omega_{m,n} in block order k = n m_r + m
};

struct ChannelRealization {
  cmat g;  // beam domain, (m_r n_r_sub) x (m_t n_t_sub)
  cmat h;  // spatial, same shape
  SupportSet supports;
  cvec x_true;  // block-reordered vec(G)
};

/// Unit-norm ULA response; entry u in {l-(n-1)/2} is exp(-j 2 pi psi u)/sqrt(n).
cvec array_response(double psi, Index n);

/// Grid direction of dictionary column i (zero-based): (i + 1/2)/n - 1/2.
double beam_direction(Index i, Index n);

/// n x n unitary beam-domain dictionary whose columns are array responses
/// on the orthogonal direction grid.
cmat beam_dictionary(Index n);

/// A_t = I_{m_t} (x) U_t.
cmat tx_transform(const SystemConfig& cfg);
/// A_r = I_{m_r} (x) U_r.
cmat rx_transform(const SystemConfig& cfg);

SupportSet draw_supports(const SystemConfig& cfg, Rng& rng);

ChannelRealization draw_channel(const SystemConfig& cfg, const SupportSet& supports, Rng& rng);

/// Block k = n m_r + m (zero-based) holds vec(G_{m,n}).
cvec vectorize_blocks(const cmat& g, const SystemConfig& cfg);

/// Inverse of vectorize_blocks.
cmat devectorize_blocks(const cvec& x, const SystemConfig& cfg);

/// H = A_r G A_t^H.
cmat beam_to_spatial(const cmat& g, const SystemConfig& cfg);

/// Position of block entry x[k B + b] inside vec(G).
Index block_to_vec_index(Index x_index, const SystemConfig& cfg);

}  // namespace dpamimo::model
