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

constexpr double kPinvTolerance = 1e-10;

struct LsFit {
  cvec coeffs;
  cvec residual;
  bool rank_deficient = false;
};

// Minimum-norm least squares on the selected columns via a column-pivoted
// complete orthogonal decomposition.
LsFit least_squares(const cmat& phi, const cvec& y, const IndexSet& cols) {
  LsFit fit;
  if (cols.empty()) {
    fit.residual = y;
    return fit;
  }
  cmat sub(phi.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Index>(j)) = phi.col(cols[j]);
  Eigen::CompleteOrthogonalDecomposition<cmat> cod;
  cod.setThreshold(kPinvTolerance);
  cod.compute(sub);
  fit.coeffs = cod.solve(y);
  fit.residual = y - sub * fit.coeffs;
  fit.rank_deficient = cod.rank() < sub.cols();
  return fit;
}

SparseEstimate finish(Index n_cols, const IndexSet& support, const LsFit& fit) {
  SparseEstimate est;
  est.x_hat = cvec::Zero(n_cols);
  for (std::size_t j = 0; j < support.size(); ++j)
    est.x_hat[support[j]] = fit.coeffs[static_cast<Index>(j)];
  est.support_full_est = support;
  est.residual_norm = fit.residual.norm();
  return est;
}

void insert_sorted(IndexSet& set, Index v) { set.insert(std::lower_bound(set.begin(), set.end(), v), v); }

}  // namespace

SparseEstimate jomp(const cmat& phi, const cvec& y, Index block_size, const JompOptions& opt) {
  if (phi.rows() != y.size()) throw DimensionError("jomp: phi rows must match y");
  if (block_size < 1 || phi.cols() % block_size != 0)
    throw DimensionError("jomp: phi columns must be a multiple of the block size");
  if (opt.t1 < 1 || opt.t2 < 0 || opt.delta1 < 0.0 || opt.delta2 < 0.0)
    throw ConfigError("jomp: need t1 >= 1, t2 >= 0 and nonnegative thresholds");

  const Index b_count = block_size;
  const Index k_count = phi.cols() / block_size;
  IndexSet support;
  std::vector<bool> group_taken(static_cast<std::size_t>(b_count), false);
  std::vector<bool> taken(static_cast<std::size_t>(phi.cols()), false);
  LsFit fit;
  fit.residual = y;
  int degenerate = 0;
  int iterations = 0;

  // Common support: equi-spaced groups {b, B + b, ..., (K-1) B + b}.
  for (int t = 1; t <= opt.t1 && fit.residual.squaredNorm() > opt.delta1; ++t) {
    const rvec corr = (phi.adjoint() * fit.residual).cwiseAbs2();
    Index best = -1;
    double best_energy = -1.0;
    for (Index b = 0; b < b_count; ++b) {
      if (group_taken[static_cast<std::size_t>(b)]) continue;
      double energy = 0.0;
      for (Index k = 0; k < k_count; ++k) energy += corr[k * block_size + b];
      if (energy > best_energy) {
        best_energy = energy;
        best = b;
      }
    }
    if (best < 0) break;
    group_taken[static_cast<std::size_t>(best)] = true;
    for (Index k = 0; k < k_count; ++k) {
      insert_sorted(support, k * block_size + best);
      taken[static_cast<std::size_t>(k * block_size + best)] = true;
    }
    fit = least_squares(phi, y, support);
    degenerate += fit.rank_deficient;
    ++iterations;
  }
  const IndexSet common = support;

  // Individual support: plain OMP over the remaining columns.
  for (int t = 1; t <= opt.t2 && fit.residual.squaredNorm() > opt.delta2; ++t) {
    const rvec corr = (phi.adjoint() * fit.residual).cwiseAbs2();
    Index best = -1;
    double best_corr = -1.0;
    for (Index j = 0; j < phi.cols(); ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      if (corr[j] > best_corr) {
        best_corr = corr[j];
        best = j;
      }
    }
    if (best < 0) break;
    taken[static_cast<std::size_t>(best)] = true;
    insert_sorted(support, best);
    fit = least_squares(phi, y, support);
    degenerate += fit.rank_deficient;
    ++iterations;
  }

  SparseEstimate est = finish(phi.cols(), support, fit);
  est.support_common_est = common;
  est.iterations = iterations;
  est.degenerate_solves = degenerate;
  return est;
}

SparseEstimate omp(const cmat& phi, const cvec& y, int t_max, double delta) {
  if (phi.rows() != y.size()) throw DimensionError("omp: phi rows must match y");
  if (t_max < 0 || delta < 0.0) throw ConfigError("omp: need t_max >= 0 and delta >= 0");
  IndexSet support;
  std::vector<bool> taken(static_cast<std::size_t>(phi.cols()), false);
  LsFit fit;
  fit.residual = y;
  int degenerate = 0;
  int iterations = 0;
  for (int t = 1; t <= t_max && fit.residual.squaredNorm() > delta; ++t) {
    const rvec corr = (phi.adjoint() * fit.residual).cwiseAbs2();
    Index best = -1;
    double best_corr = -1.0;
    for (Index j = 0; j < phi.cols(); ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      if (corr[j] > best_corr) {
        best_corr = corr[j];
        best = j;
      }
    }
    if (best < 0) break;
    taken[static_cast<std::size_t>(best)] = true;
    insert_sorted(support, best);
    fit = least_squares(phi, y, support);
    degenerate += fit.rank_deficient;
    ++iterations;
  }
  SparseEstimate est = finish(phi.cols(), support, fit);
  est.iterations = iterations;
  est.degenerate_solves = degenerate;
  return est;
}

}  // namespace dpamimo::recovery
