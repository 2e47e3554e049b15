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

#include <optional>

#include "dpamimo/common.hpp"

namespace dpamimo {

/// N-point unitary DFT, [F]_{a,b} = exp(-j 2 pi a b / N) / sqrt(N).
cmat unitary_dft(Index n);

/// Moves the columns of `a` to the right by `shift`, wrapping around.
cmat circshift_columns(const cmat& a, Index shift);

cmat kron(const cmat& a, const cmat& b);

/// Column-major vec().
cvec vec(const cmat& a);

/// Solves against a Hermitian positive-definite matrix (LAPACK Cholesky).
/// Falls back to a trace-scaled ridge only when the factorization breaks down.
class HermitianSolver {
 public:
  explicit HermitianSolver(const cmat& a);

  cmat solve(const cmat& b) const;
  cvec solve(const cvec& b) const;
  cmat inverse() const;

  /// Ridge actually added (0 when the plain factorization succeeded).
  double ridge() const { return ridge_; }

 private:
  cmat factor_;  // lower Cholesky factor
  double ridge_ = 0.0;
};

/// Geometry that maps a beam-domain vector index onto a Kronecker column.
///
/// Q = A (x) C with A = F^T A_t^* (n_t_beam x N_t^tot) and C = W^H A_r
/// (n_r_beam x N_r^tot). Column i of phi (block order) equals column
/// (tx_col[i], rx_col[i]) of Q, i.e. a_{tx_col} (x) c_{rx_col}.
struct KroneckerLayout {
  cmat tx_factor;
  cmat rx_factor;
  std::vector<Index> tx_col;
  std::vector<Index> rx_col;
};

/// Measurement matrix with an optional Kronecker factorization. The
/// factorization only accelerates the weighted Gram and quadratic-diagonal
/// kernels; results agree with the dense path to roundoff.
class SensingMatrix {
 public:
  SensingMatrix(cmat phi);  // NOLINT: implicit by intent
  SensingMatrix(cmat phi, KroneckerLayout layout);

  const cmat& dense() const { return phi_; }
  Index rows() const { return phi_.rows(); }
  Index cols() const { return phi_.cols(); }
  bool structured() const { return layout_.has_value(); }

  /// a * Phi, keeping the factorization.
  SensingMatrix scaled(double a) const;

  /// Phi diag(w) Phi^H.
  cmat weighted_gram(const rvec& w) const;

  /// Real part of diag(Phi^H X Phi) for Hermitian X.
  rvec quadratic_diag(const cmat& x) const;

  /// Dense-path kernels, exposed so the structured path can be checked.
  cmat weighted_gram_dense(const rvec& w) const;
  rvec quadratic_diag_dense(const cmat& x) const;

 private:
  cmat phi_;
  std::optional<KroneckerLayout> layout_;
  // Pairwise tx products: row jt, column p + p' n_tb holds A(p,jt) conj(A(p',jt)).
  cmat tx_pairs_;
};

}  // namespace dpamimo
