#pragma once

// Reference computations written independently of the library, used only by the tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "dicke/params.hpp"

namespace oracle {

// Classical energy per j in canonical coordinates y = (q, Q, p, P): boson quadratures (q, p) and
// spin coordinates around the spin-down pole, Q + iP = sqrt(2 (1 + jz)) e^{i phi}. The brackets are
// {q, p} = 1/j and {Q, P} = -1/j (phi and jz are conjugate with {phi, jz} = 1/j), so the normal-mode
// frequencies are the symplectic eigenvalues of the Hessian under that orientation.
inline double energy(const dicke::ModelParams& m, const Eigen::Vector4d& y) {
  const double q = y(0), Q = y(1), p = y(2), P = y(3);
  const double t = 0.5 * (Q * Q + P * P);
  const double jz = t - 1.0;
  const double shrink = std::sqrt(std::max(0.0, 1.0 - 0.5 * t));
  const double X = Q * shrink, Y = P * shrink;
  return 0.5 * m.omega() * (q * q + p * p) + jz * (m.omega0() + 0.5 * m.eta_z() * jz) +
         0.5 * (m.eta_x() * X * X + m.eta_y() * Y * Y) +
         m.gamma() * ((1.0 + m.xi()) * q * X - (1.0 - m.xi()) * p * Y);
}

inline Eigen::Vector4d gradient(const dicke::ModelParams& m, const Eigen::Vector4d& y, double h = 1e-6) {
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d a = y, b = y;
    a(i) += h;
    b(i) -= h;
    g(i) = (energy(m, a) - energy(m, b)) / (2.0 * h);
  }
  return g;
}

inline Eigen::Matrix4d hessian(const dicke::ModelParams& m, const Eigen::Vector4d& y, double h = 1e-4) {
  Eigen::Matrix4d H;
  for (int i = 0; i < 4; ++i)
    for (int k = i; k < 4; ++k) {
      auto e = [&](double si, double sk) {
        Eigen::Vector4d z = y;
        z(i) += si * h;
        z(k) += sk * h;
        return energy(m, z);
      };
      H(i, k) = H(k, i) = (e(1, 1) - e(1, -1) - e(-1, 1) + e(-1, -1)) / (4.0 * h * h);
    }
  return H;
}

// Local minimum by Newton iteration on the finite-difference gradient, started on the Q axis
// at the best point of a coarse scan with the boson relaxed.
inline Eigen::Vector4d minimum(const dicke::ModelParams& m) {
  auto relaxed = [&](double Q) {
    Eigen::Vector4d y(0.0, Q, 0.0, 0.0);
    const double X = Q * std::sqrt(std::max(0.0, 1.0 - 0.25 * Q * Q));
    y(0) = -m.gamma() * (1.0 + m.xi()) * X / m.omega();
    return y;
  };
  Eigen::Vector4d best = relaxed(0.0);
  for (int i = 1; i < 400; ++i) {
    const Eigen::Vector4d y = relaxed(2.0 * i / 400.0);
    if (energy(m, y) < energy(m, best)) best = y;
  }
  Eigen::Vector4d y = best;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector4d g = gradient(m, y);
    if (g.norm() < 1e-11) break;
    const Eigen::Vector4d step = hessian(m, y).ldlt().solve(g);
    if (!step.allFinite()) break;
    y -= step;
  }
  return y;
}

// Symplectic eigenvalues of a Hessian ordered as (q, Q, p, P), ascending.
inline std::vector<double> frequencies(const Eigen::Matrix4d& K) {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 2) = 1.0;
  J(2, 0) = -1.0;
  J(1, 3) = -1.0;
  J(3, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(J * K);
  std::vector<double> w;
  for (int i = 0; i < 4; ++i) w.push_back(std::abs(es.eigenvalues()(i).imag()));
  std::sort(w.begin(), w.end());
  return {0.5 * (w[0] + w[1]), 0.5 * (w[2] + w[3])};
}

// Full Fock x spin matrix built from Kronecker products; rows ordered (n, m) with m fastest.
inline Eigen::MatrixXd hamiltonian(const dicke::ModelParams& p, int n_max) {
  const int N = p.n_qubits();
  const double j = 0.5 * N;
  const int ds = N + 1, db = n_max + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(db, db), jp = Eigen::MatrixXd::Zero(ds, ds), jz = Eigen::MatrixXd::Zero(ds, ds);
  for (int n = 1; n < db; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < ds; ++k) {
    const double m = k - j;
    jz(k, k) = m;
    if (k + 1 < ds) jp(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXd ad = a.transpose(), jm = jp.transpose();
  const Eigen::MatrixXd jx = 0.5 * (jp + jm);
  const Eigen::MatrixXd jy2 = -0.25 * (jp - jm) * (jp - jm);
  auto kron = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int r = 0; r < A.rows(); ++r)
      for (int c = 0; c < A.cols(); ++c) K.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
    return K;
  };
  const Eigen::MatrixXd Ib = Eigen::MatrixXd::Identity(db, db), Is = Eigen::MatrixXd::Identity(ds, ds);
  const double g = p.gamma() / std::sqrt(static_cast<double>(N));
  Eigen::MatrixXd H = p.omega() * kron(ad * a, Is) + p.omega0() * kron(Ib, jz);
  H += g * (kron(a, jp) + kron(ad, jm)) + g * p.xi() * (kron(ad, jp) + kron(a, jm));
  H += kron(Ib, p.eta_x() * jx * jx + p.eta_y() * jy2 + p.eta_z() * jz * jz) / N;
  return H;
}

}  // namespace oracle
