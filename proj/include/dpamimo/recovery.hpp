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

#include <functional>

#include "dpamimo/common.hpp"
#include "dpamimo/linalg.hpp"
#include "dpamimo/model.hpp"

namespace dpamimo::recovery {

using model::SystemConfig;

/// Block-structured recovery result.
struct SparseEstimate {
  cvec x_hat;
  IndexSet support_common_est;  // greedy: selected equi-spaced groups, flattened
  IndexSet support_full_est;
  cmat g_hat;
  cmat h_hat;
  int iterations = 0;
  double residual_norm = 0.0;
  /// Least-squares solves whose selected columns were numerically rank deficient.
  int degenerate_solves = 0;
};

/// Hyperparameters and latent components of the joint Bayesian estimator.
struct SblState {
  rvec gamma_s;  // length B K
  rvec gamma_c;  // length B
  cvec s;
  cvec c;
  rvec z_s;
  rvec z_c;
};

struct JompOptions {
  int t1 = 1;  // common-support iterations
  int t2 = 0;  // individual-support iterations
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// Joint OMP: equi-spaced group selection for the common support, then
/// single-column OMP for the rest. Both loops stop on budget or residual.
/// `block_size` is B; phi must have a multiple of B columns.
SparseEstimate jomp(const cmat& phi, const cvec& y, Index block_size, const JompOptions& opt);

/// Standard OMP.
SparseEstimate omp(const cmat& phi, const cvec& y, int t_max, double delta);

struct SblOptions {
  double lambda = 1.0;
  int t_max = 100;
  double eps = 1e-4;
  /// Hyperparameters below prune_tol * max(gamma) are snapped to zero (a
  /// fixed point of the update). 0 disables pruning.
  double prune_tol = 0.0;
};

/// Conventional SBL (Type-II, EM fixed point gamma = |mu|^2 + Sigma_ii).
/// Stops when ||gamma_new - gamma|| <= eps ||gamma||.
SparseEstimate sbl(const SensingMatrix& phi, const cvec& y, const SblOptions& opt);

struct JsblOptions {
  double lambda = 1.0;
  double beta = 3.3;
  int t_max = 100;
  double eps = 1e-4;
  double prune_tol = 0.0;
};

/// One iteration snapshot, for diagnostics and surrogate checks.
struct JsblStep {
  SblState before;  // state entering the iteration (s, c from the previous step)
  SblState after;   // s, c, z updated with `before` gammas; gammas updated last
};

/// Joint SBL with l2 reweighting; `block_size` is B.
SparseEstimate jsbl_l2(const SensingMatrix& phi, const cvec& y, Index block_size,
                       const JsblOptions& opt,
                       const std::function<void(const JsblStep&)>& observer = {},
                       SblState* final_state = nullptr);

/// |LHS - RHS| / |LHS| for y^H (Sigma_sc)^{-1} y against the minimization form
/// evaluated at its closed-form minimizers.
double dual_identity_residual(const cmat& phi, const cvec& y, const rvec& gamma_s,
                              const rvec& gamma_c, double lambda);

/// 10 log10(||H - H_hat||_F^2 / ||H||_F^2), floored at kNmseFloorDb.
double nmse_db(const cmat& h_true, const cmat& h_hat);

/// ||H - H_hat||_F^2 / ||H||_F^2 (linear, for averaging before the log).
double nmse_linear(const cmat& h_true, const cmat& h_hat);

/// 10 log10 of a linear ratio with the floor applied.
double to_db(double ratio);

/// Fills g_hat/h_hat from x_hat.
void attach_channel(SparseEstimate& est, const SystemConfig& cfg);

}  // namespace dpamimo::recovery
