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

#include "dpamimo/linalg.hpp"

#include <cmath>
#include <utility>

#include <lapacke.h>

namespace dpamimo {

cmat unitary_dft(Index n) {
  if (n < 1) throw DimensionError("unitary_dft: size must be >= 1");
  cmat f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      // Reduce a*b mod n first so the phase stays exact for large products.
      const double phase = -2.0 * kPi * static_cast<double>((a * b) % n) / static_cast<double>(n);
      f(a, b) = std::polar(scale, phase);
    }
  return f;
}

cmat circshift_columns(const cmat& a, Index shift) {
  const Index n = a.cols();
  cmat out(a.rows(), n);
  if (n == 0) return out;
  const Index s = ((shift % n) + n) % n;
  for (Index j = 0; j < n; ++j) out.col((j + s) % n) = a.col(j);
  return out;
}

cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

cvec vec(const cmat& a) { return Eigen::Map<const cvec>(a.data(), a.size()); }

namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

// Lower Cholesky factor in place; false on a non-positive pivot.
bool cholesky(cmat& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  return LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, lp(a.data()), n) == 0;
}

}  // namespace

HermitianSolver::HermitianSolver(const cmat& a) {
  if (a.rows() != a.cols()) throw DimensionError("HermitianSolver: matrix must be square");
  factor_ = a;
  if (cholesky(factor_)) return;
  const double n = static_cast<double>(a.rows());
  const double scale = std::max(std::abs(a.trace().real()) / n, 1e-300);
  for (double r = 1e-12; r < 1.0; r *= 100.0) {
    ridge_ = r * scale;
    factor_ = a;
    factor_.diagonal().array() += ridge_;
    if (cholesky(factor_)) return;
  }
  throw NumericError("HermitianSolver: matrix is not positive definite even after ridge");
}

cmat HermitianSolver::solve(const cmat& b) const {
  if (b.rows() != factor_.rows()) throw DimensionError("HermitianSolver: right-hand side size mismatch");
  cmat x = b;
  const auto n = static_cast<lapack_int>(factor_.rows());
  LAPACKE_zpotrs(LAPACK_COL_MAJOR, 'L', n, static_cast<lapack_int>(x.cols()),
                 lp(const_cast<cplx*>(factor_.data())), n, lp(x.data()), n);
  return x;
}

cvec HermitianSolver::solve(const cvec& b) const { return solve(cmat(b)).col(0); }

cmat HermitianSolver::inverse() const {
  cmat inv = factor_;
  const auto n = static_cast<lapack_int>(inv.rows());
  if (LAPACKE_zpotri(LAPACK_COL_MAJOR, 'L', n, lp(inv.data()), n) != 0)
    throw NumericError("HermitianSolver: inverse failed");
  // zpotri fills the lower triangle only.
  for (Index j = 0; j < inv.cols(); ++j) {
    inv(j, j) = inv(j, j).real();
    for (Index i = j + 1; i < inv.rows(); ++i) inv(j, i) = std::conj(inv(i, j));
  }
  return inv;
}

SensingMatrix::SensingMatrix(cmat phi) : phi_(std::move(phi)) {}

SensingMatrix::SensingMatrix(cmat phi, KroneckerLayout layout) : phi_(std::move(phi)) {
  const Index ntb = layout.tx_factor.rows();
  const Index nrb = layout.rx_factor.rows();
  const auto n = static_cast<std::size_t>(phi_.cols());
  if (ntb * nrb != phi_.rows() || layout.tx_col.size() != n || layout.rx_col.size() != n)
    throw DimensionError("SensingMatrix: Kronecker layout does not match phi");
  const Index ntt = layout.tx_factor.cols();
  tx_pairs_.resize(ntt, ntb * ntb);
  for (Index jt = 0; jt < ntt; ++jt)
    for (Index pp = 0; pp < ntb; ++pp)
      for (Index p = 0; p < ntb; ++p)
        tx_pairs_(jt, p + pp * ntb) =
            layout.tx_factor(p, jt) * std::conj(layout.tx_factor(pp, jt));
  layout_ = std::move(layout);
}

SensingMatrix SensingMatrix::scaled(double a) const {
  if (!layout_) return SensingMatrix(cmat(a * phi_));
  KroneckerLayout layout = *layout_;
  layout.tx_factor *= a;
  return SensingMatrix(cmat(a * phi_), std::move(layout));
}

cmat SensingMatrix::weighted_gram_dense(const rvec& w) const {
  if (w.size() != cols()) throw DimensionError("weighted_gram: weight length mismatch");
  cmat scaled = phi_ * w.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  cmat g(rows(), rows());
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  return g.selfadjointView<Eigen::Lower>();
}

rvec SensingMatrix::quadratic_diag_dense(const cmat& x) const {
  if (x.rows() != rows() || x.cols() != rows())
    throw DimensionError("quadratic_diag: matrix shape mismatch");
  cmat xp = x * phi_;
  return (phi_.conjugate().array() * xp.array()).colwise().sum().real().transpose();
}

cmat SensingMatrix::weighted_gram(const rvec& w) const {
  if (!layout_) return weighted_gram_dense(w);
  if (w.size() != cols()) throw DimensionError("weighted_gram: weight length mismatch");
  const auto& lay = *layout_;
  const cmat& c = lay.rx_factor;
  const Index ntb = lay.tx_factor.rows();
  const Index nrb = c.rows();
  const Index ntt = lay.tx_factor.cols();
  const Index nrt = c.cols();

  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(nrt, ntt);
  for (Index i = 0; i < cols(); ++i) grid(lay.rx_col[i], lay.tx_col[i]) = w[i];

  // Column jt holds vec(C diag(grid(:,jt)) C^H).
  cmat rx_grams(nrb * nrb, ntt);
  cmat scaled(nrb, nrt);
  cmat s(nrb, nrb);
  for (Index jt = 0; jt < ntt; ++jt) {
    scaled = c * grid.col(jt).asDiagonal();
    s.noalias() = scaled * c.adjoint();
    rx_grams.col(jt) = Eigen::Map<const cvec>(s.data(), s.size());
  }
  const cmat blocks = rx_grams * tx_pairs_;

  cmat g(rows(), rows());
  for (Index pp = 0; pp < ntb; ++pp)
    for (Index p = 0; p < ntb; ++p)
      g.block(p * nrb, pp * nrb, nrb, nrb) =
          Eigen::Map<const cmat>(blocks.col(p + pp * ntb).data(), nrb, nrb);
  return g;
}

rvec SensingMatrix::quadratic_diag(const cmat& x) const {
  if (!layout_) return quadratic_diag_dense(x);
  if (x.rows() != rows() || x.cols() != rows())
    throw DimensionError("quadratic_diag: matrix shape mismatch");
  const auto& lay = *layout_;
  const cmat& c = lay.rx_factor;
  const Index ntb = lay.tx_factor.rows();
  const Index nrb = c.rows();
  const Index ntt = lay.tx_factor.cols();
  const Index nrt = c.cols();

  cmat x_blocks(nrb * nrb, ntb * ntb);
  for (Index pp = 0; pp < ntb; ++pp)
    for (Index p = 0; p < ntb; ++p) {
      cmat blk = x.block(p * nrb, pp * nrb, nrb, nrb);
      x_blocks.col(p + pp * ntb) = Eigen::Map<const cvec>(blk.data(), blk.size());
    }
  // Column jt holds vec(sum_{p,p'} conj(A(p,jt)) A(p',jt) X_{p,p'}).
  const cmat reduced = x_blocks * tx_pairs_.adjoint();

  Eigen::MatrixXd grid(nrt, ntt);
  cmat yc(nrb, nrt);
  for (Index jt = 0; jt < ntt; ++jt) {
    Eigen::Map<const cmat> y(reduced.col(jt).data(), nrb, nrb);
    yc.noalias() = y * c;
    grid.col(jt) = (c.conjugate().array() * yc.array()).colwise().sum().real().transpose();
  }
  rvec out(cols());
  for (Index i = 0; i < cols(); ++i) out[i] = grid(lay.rx_col[i], lay.tx_col[i]);
  return out;
}

}  // namespace dpamimo
