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

#include "dpamimo/common.hpp"

namespace dpamimo::precoding {

/// Subarrays per stream on each side.
struct GroupingPlan {
  std::vector<Index> d_t;
  std::vector<Index> d_r;
};

struct BeamformerSet {
  cmat f_rf_bar;  // N_t^tot x n_s, block diagonal per d_t
  cmat f_bb_bar;  // n_s x n_s
  cmat w_rf_bar;  // N_r^tot x n_s, block diagonal per d_r
  cmat w_bb_bar;  // n_s x n_s
};

/// Splits m subarrays into n_s contiguous groups; the remainder goes to the last.
std::vector<Index> group_subarrays(Index m, Index n_s);

struct SicResult {
  cmat f_tilde;  // unit-norm group columns
  cmat f_rf_bar;  // f_tilde D^{1/2}
  std::vector<double> sub_rates;  // log2(1 + snr f_n^H T_{n-1} f_n)
};

/// Successive group-wise RF precoder. Group n covers d_t[n] consecutive
/// subarrays; the subarray size is h.cols() / sum(d_t).
SicResult sic_rf_precoder(const cmat& h, const std::vector<Index>& d_t, double p_d,
                          double sigma2, Index n_s);

enum class PowerAllocation { kEqual, kWaterFilling };

struct DigitalResult {
  cmat f_bb_bar;
  /// Numerical rank of the effective channel; below n_s means padded streams.
  Index effective_rank = 0;
};

/// F_BB = D^{-1/2} U_e (Lambda_e^{1/2}), scaled so ||F_RF F_BB||_F^2 = n_s.
DigitalResult digital_precoder(const cmat& h, const cmat& f_rf_bar, const std::vector<Index>& d_t,
                               Index n_s, PowerAllocation alloc = PowerAllocation::kEqual,
                               double p_d = 1.0, double sigma2 = 1.0);

/// RX-side SIC on the effective channel H F_RF F_BB.
SicResult sic_rf_combiner(const cmat& h, const cmat& f_rf_bar, const cmat& f_bb_bar,
                          const std::vector<Index>& d_r, double p_d, double sigma2, Index n_s);

/// W_BB = (p_d/n_s) J^{-1} W_RF^H H F_t, J the covariance of W_RF^H y.
/// The combined receiver is W_t = W_RF W_BB, symbols estimated as W_t^H y.
cmat mmse_combiner(const cmat& h, const cmat& f_rf_bar, const cmat& f_bb_bar,
                   const cmat& w_rf_bar, double p_d, double sigma2, Index n_s);

/// Orthonormal basis of span(a) (pivoted QR, relative tolerance 1e-10). May
/// have fewer columns than `a`, or none.
cmat range_basis(const cmat& a);

/// log2 |I + p_d/(n_s sigma2) P_W H F F^H H^H| with P_W the projector onto span(W).
double spectral_efficiency(const cmat& h, const cmat& f_t, const cmat& w_t, double p_d,
                           double sigma2, Index n_s);

/// Water-filling over channel gains g_i (SNR per unit power) with total power
/// `total`: p_i = max(0, mu - 1/g_i).
rvec water_filling(const rvec& gains, double total);

struct DigitalSolution {
  cmat f;
  cmat w;
};

/// Fully digital SVD precoder/combiner with water-filled power (total n_s).
DigitalSolution optimal_digital(const cmat& h, Index n_s, double p_d, double sigma2);

struct HybridDesign {
  GroupingPlan groups;
  BeamformerSet beams;
  cmat f_t;  // f_rf_bar f_bb_bar
  cmat w_t;  // w_rf_bar w_bb_bar
  std::vector<double> sub_rates;
  Index effective_rank = 0;
};

/// Full Group-SIC chain: grouping, SIC RF precoder, digital precoder, SIC RF
/// combiner and MMSE baseband combiner, all designed on `h`.
HybridDesign group_sic(const cmat& h, Index m_t, Index m_r, Index n_s, double p_d, double sigma2,
                       PowerAllocation alloc = PowerAllocation::kEqual);

/// Reads matrix "h" (or `name`) from a matrix file written by the sounding exporter.
cmat import_channel(const std::filesystem::path& path, const std::string& name = "h");

}  // namespace dpamimo::precoding
