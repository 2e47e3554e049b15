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

#include <filesystem>
#include <map>

#include "dpamimo/common.hpp"
#include "dpamimo/linalg.hpp"
#include "dpamimo/model.hpp"
#include "dpamimo/rng.hpp"

namespace dpamimo::sounding {

using model::SystemConfig;

/// Hybrid pilot beams for one end of the link.
struct SidePilots {
  cmat rf;         // N^tot x N^tot, n_sub sub-blocks of m block-diagonal columns
  cmat baseband;   // N^tot x n_beam, block diagonal
  cmat composite;  // rf * baseband
};

struct PilotPlan {
  cmat f_rf, f_bb, f;
  cmat w_rf, w_bb, w;
  cmat phi;  // (n_t_beam n_r_beam) x (B K), block-ordered columns
  /// column_map[i] is the vec(G) index that phi column i reads from Q.
  std::vector<Index> column_map;
};

struct SoundingObservation {
  cvec y;
  double noise_var_effective = 0.0;
};

/// Circularly shifted DFT RF beams with truncated-DFT baseband blocks (TX side).
SidePilots design_tx_pilots(const SystemConfig& cfg);
/// Mirror of design_tx_pilots with RX dimensions.
SidePilots design_rx_pilots(const SystemConfig& cfg);

/// Per-subarray constant-modulus RF phases drawn uniformly, baseband blocks
/// drawn Gaussian, composite columns normalized to unit norm.
SidePilots random_side_pilots(Index subarrays, Index n_sub, Index n_beam, Rng& rng);

/// Designs both ends and assembles phi.
PilotPlan design_pilot_plan(const SystemConfig& cfg);
PilotPlan random_pilot_plan(const SystemConfig& cfg, Rng& rng);

/// Builds a plan from given side pilots (used by design and by random plans).
PilotPlan assemble_plan(const SidePilots& tx, const SidePilots& rx, const SystemConfig& cfg);

/// Q = (F^T A_t^*) (x) (W^H A_r), columns in vec(G) order.
cmat kronecker_measurement(const PilotPlan& plan, const SystemConfig& cfg);

/// Q with columns permuted so that phi * vectorize_blocks(G) == Q vec(G).
cmat measurement_matrix(const PilotPlan& plan, const SystemConfig& cfg);

/// phi together with its Kronecker factorization.
SensingMatrix sensing_matrix(const PilotPlan& plan, const SystemConfig& cfg);

/// sum_k sum_{l != k} |m_k^H m_l|^2.
double total_coherence(const cmat& m);

/// y = sqrt(P_p) vec(W^H H F) + z, with antenna-level CN(0, noise_var) noise
/// passed through each simultaneous RX snapshot W_q^H.
SoundingObservation sound_channel(const cmat& h, const PilotPlan& plan, const SystemConfig& cfg,
                                  Rng& rng);

void export_pilot_plan(const PilotPlan& plan, const SystemConfig& cfg,
                       const std::filesystem::path& path);

/// Writes the true channel (matrix "h") and, when nonempty, an estimate ("h_hat").
void export_channel(const cmat& h, const cmat& h_hat, const SystemConfig& cfg,
                    const std::filesystem::path& path);

struct ImportedPlan {
  SystemConfig cfg;
  PilotPlan plan;
};
ImportedPlan import_pilot_plan(const std::filesystem::path& path);

/// Config fields as name/value text pairs (shared by every exported file).
std::map<std::string, std::string> config_params(const SystemConfig& cfg);
SystemConfig config_from_params(const std::map<std::string, std::string>& params);

}  // namespace dpamimo::sounding
