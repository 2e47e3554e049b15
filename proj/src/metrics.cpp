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

#include <cmath>

#include "dpamimo/recovery.hpp"

namespace dpamimo::recovery {

double nmse_linear(const cmat& h_true, const cmat& h_hat) {
  if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols())
    throw DimensionError("nmse: shape mismatch");
  const double ref = h_true.squaredNorm();
  if (!(ref > 0.0)) throw NumericError("nmse: true channel is zero, NMSE undefined");
  return (h_true - h_hat).squaredNorm() / ref;
}

double to_db(double ratio) {
  if (!(ratio > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

double nmse_db(const cmat& h_true, const cmat& h_hat) { return to_db(nmse_linear(h_true, h_hat)); }

void attach_channel(SparseEstimate& est, const SystemConfig& cfg) {
  est.g_hat = model::devectorize_blocks(est.x_hat, cfg);
  est.h_hat = model::beam_to_spatial(est.g_hat, cfg);
}

}  // namespace dpamimo::recovery
