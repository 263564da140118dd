#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace dicke {

struct LanczosOptions {
  int k = 4;              // number of lowest eigenpairs
  int max_basis = 0;      // 0 picks max(2k + 24, 48)
  int max_restarts = 400;
  double tol = 1e-10;     // residual norm relative to max(1, |theta|)
  std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  bool converged = false;
  int restarts = 0;
  double max_residual = 0.0;
};

// Lowest eigenpairs of a symmetric operator known only through y = A x.
// Thick restart: the lowest Ritz vectors are kept, the projected matrix is formed explicitly
// and every new direction is fully reorthogonalized twice.
template <class Apply>
LanczosResult lowest_eigenpairs(Apply&& apply, Eigen::Index dim, const LanczosOptions& opt = {}) {
  using Eigen::Index;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Index k = std::min<Index>(opt.k, dim);
  const Index m = std::min<Index>(dim, opt.max_basis > 0 ? opt.max_basis : std::max<Index>(2 * k + 24, 48));
  LanczosResult res;

  if (m >= dim) {
    // the whole space fits in the basis: project onto unit vectors
    MatrixXd A(dim, dim);
    VectorXd e = VectorXd::Zero(dim), y(dim);
    for (Index i = 0; i < dim; ++i) {
      e(i) = 1.0;
      apply(e, y);
      A.col(i) = y;
      e(i) = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));
    res.values = es.eigenvalues().head(k);
    res.vectors = es.eigenvectors().leftCols(k);
    res.converged = true;
    return res;
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_vector = [&] {
    VectorXd v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = uni(rng);
    return v;
  };

  MatrixXd V(dim, m), AV(dim, m), T = MatrixXd::Zero(m, m);
  VectorXd w(dim);
  V.col(0) = random_vector().normalized();
  Index start = 0;

  auto orthonormalize_against = [&](VectorXd& r, Index cols) {
    for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(cols) * (V.leftCols(cols).transpose() * r);
    return r.norm();
  };

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    for (Index j = start; j < m; ++j) {
      apply(V.col(j), w);
      AV.col(j) = w;
      const VectorXd h = V.leftCols(j + 1).transpose() * w;
      T.col(j).head(j + 1) = h;
      T.row(j).head(j + 1) = h.transpose();
      if (j + 1 < m) {
        VectorXd r = w - V.leftCols(j + 1) * h;
        double nr = orthonormalize_against(r, j + 1);
        if (!(nr > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))) {
          r = random_vector();
          nr = orthonormalize_against(r, j + 1);
        }
        V.col(j + 1) = r / nr;
      }
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    const VectorXd theta = es.eigenvalues();
    const MatrixXd& Y = es.eigenvectors();

    const MatrixXd X = V * Y.leftCols(k);
    const MatrixXd R = AV * Y.leftCols(k) - X * theta.head(k).asDiagonal();
    double worst = 0.0;
    Index first_bad = -1;
    for (Index i = 0; i < k; ++i) {
      const double rel = R.col(i).norm() / std::max(1.0, std::abs(theta(i)));
      worst = std::max(worst, rel);
      if (rel >= opt.tol && first_bad < 0) first_bad = i;
    }
    res.values = theta.head(k);
    res.vectors = X;
    res.restarts = restart;
    res.max_residual = worst;
    if (first_bad < 0) {
      res.converged = true;
      return res;
    }

    const Index keep = std::min<Index>(m - 2, k + (m - k) / 2);
    const MatrixXd Vk = V * Y.leftCols(keep);
    const MatrixXd AVk = AV * Y.leftCols(keep);
    V.leftCols(keep) = Vk;
    AV.leftCols(keep) = AVk;
    T.setZero();
    T.topLeftCorner(keep, keep) = theta.head(keep).asDiagonal();
    VectorXd r = R.col(first_bad);
    double nr = orthonormalize_against(r, keep);
    if (!(nr > 1e-14)) {
      r = random_vector();
      nr = orthonormalize_against(r, keep);
    }
    V.col(keep) = r / nr;
    start = keep;
  }
  return res;
}

}  // namespace dicke
