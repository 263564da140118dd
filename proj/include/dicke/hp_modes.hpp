#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>

#include "dicke/params.hpp"

namespace dicke {

// Square-root arguments in [-kImaginaryGuard, 0) are treated as zero.
inline constexpr double kImaginaryGuard = 1e-12;

struct GuardedRoot {
  double value = 0.0;
  bool valid = true;
};

inline GuardedRoot guarded_sqrt(double x) {
  if (x >= 0.0) return {std::sqrt(x), true};
  if (x >= -kImaginaryGuard) return {0.0, true};
  return {std::numeric_limits<double>::quiet_NaN(), false};
}

// Rotation convention (x, y)^T = R (q1, q2)^T with R = [[c, s], [-s, c]]; returns R^T V R.
inline Eigen::Matrix2d rotate_form(const Eigen::Matrix2d& V, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d R;
  R << c, s, -s, c;
  return R.transpose() * V * R;
}

inline double decoupling_angle(const Eigen::Matrix2d& V) {
  return 0.5 * std::atan2(2.0 * V(0, 1), V(1, 1) - V(0, 0));
}

// Factorized normal-phase branches: H = 1/2 [x^T V1 x + p^T T p] in rescaled quadratures.
struct NormalModeFactors {
  double eps1_minus = 0.0, eps1_plus = 0.0;
  double eps2_minus = 0.0, eps2_plus = 0.0;
  bool valid1_minus = true, valid1_plus = true, valid2_minus = true, valid2_plus = true;
  double theta1 = 0.0, theta2 = 0.0;
  double wN_minus = 0.0, wN_plus = 0.0;
  Eigen::Matrix2d position_form = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d momentum_form = Eigen::Matrix2d::Zero();
};

inline NormalModeFactors normal_mode_factors(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  const double w = m.omega(), w0 = m.omega0();
  const double wx2 = d.w_zx_sq, wy2 = d.w_zy_sq;
  // f_x * w_zx^2 = f_plus and g_y * w_zy^2 = f_minus; the products are used directly so that
  // w_zx -> 0 with f_x -> infinity stays finite.
  const double fx_wx2 = d.f_plus, gy_wy2 = d.f_minus;
  NormalModeFactors f;

  const double a1 = w * w + w0 * w0 * wx2;
  const double b1 = std::sqrt((w * w - w0 * w0 * wx2) * (w * w - w0 * w0 * wx2) + 4.0 * w * w * w0 * w0 * fx_wx2);
  const auto e1m = guarded_sqrt(0.5 * (a1 - b1)), e1p = guarded_sqrt(0.5 * (a1 + b1));
  const double a2 = 1.0 + wy2;
  const double b2 = std::sqrt((1.0 - wy2) * (1.0 - wy2) + 4.0 * gy_wy2);
  const auto e2m = guarded_sqrt(0.5 * (a2 - b2)), e2p = guarded_sqrt(0.5 * (a2 + b2));
  f.eps1_minus = e1m.value;
  f.eps1_plus = e1p.value;
  f.eps2_minus = e2m.value;
  f.eps2_plus = e2p.value;
  f.valid1_minus = e1m.valid;
  f.valid1_plus = e1p.valid;
  f.valid2_minus = e2m.valid;
  f.valid2_plus = e2p.valid;
  f.wN_minus = f.eps1_minus / f.eps2_minus;
  f.wN_plus = f.eps1_plus / f.eps2_plus;

  const double cross_x = std::sqrt(fx_wx2) * w * w0;  // f_x^(1/2) w w0 w_zx
  f.position_form << w * w, cross_x, cross_x, w0 * w0 * wx2;
  const double cross_p = std::sqrt(gy_wy2);  // f_x^(1/2) (1-xi)/(1+xi) w_zx
  f.momentum_form << 1.0, cross_p, cross_p, wy2;
  f.theta1 = 0.5 * std::atan2(2.0 * cross_x, w0 * w0 * wx2 - w * w);
  f.theta2 = 0.5 * std::atan2(2.0 * cross_p, wy2 - 1.0);
  return f;
}

// Reduced frequencies and factorized branches about the displaced x-branch minimum.
struct SuperradiantIntermediates {
  double wA = 0.0, wB = 0.0, wC = 0.0, wD = 0.0, wE = 0.0, wF = 0.0;
  double chi_plus = 0.0, chi_minus = 0.0;
  double kappa_plus = 0.0, kappa_minus = 0.0;
  double phi1 = 0.0, phi2 = 0.0;
  double eps1_minus = 0.0, eps1_plus = 0.0;
  double eps2_minus = 0.0, eps2_plus = 0.0;
  bool valid1_minus = true, valid1_plus = true, valid2_minus = true, valid2_plus = true;
  double wS_minus = 0.0, wS_plus = 0.0;
  double eps0_const = 0.0;
  Eigen::Matrix2d position_form = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d momentum_form = Eigen::Matrix2d::Zero();
};

inline SuperradiantIntermediates superradiant_intermediates(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  const double w = m.omega(), w0 = m.omega0(), g = m.gamma(), xi = m.xi();
  const double ex = m.eta_x() / w0, ey = m.eta_y() / w0, ez = m.eta_z() / w0;
  const double mu = d.mu_x;
  const double two_j = 2.0 * m.j();
  // f_x^(1/2) sqrt(w w0) w_zx = gamma (1+xi) and g_y^(1/2) sqrt(w w0) w_zy = gamma (1-xi)
  const double sfx = g * (1.0 + xi);
  const double sgy = g * (1.0 - xi);
  SuperradiantIntermediates s;

  s.wA = 0.5 * w0 * ((1.0 / mu - ez) * (1.0 + mu) + ex * (1.0 - mu));
  s.wB = 0.5 * w0 * (1.0 - mu) / 4.0 *
         ((1.0 / (1.0 + mu)) * (3.0 + mu) / mu + ez + ex * (3.0 * mu * mu - 2.0 * mu + 3.0) / (1.0 - mu * mu));
  s.wC = -w0 / 8.0 * ey * (1.0 + mu);
  s.wD = -std::sqrt(2.0) / 4.0 * sfx * (1.0 - mu) / std::sqrt(1.0 + mu);
  s.wE = g * std::sqrt(0.5 * (1.0 + mu));
  s.wF = -0.5 * w0 * (((1.0 - mu * mu) / (2.0 * mu) + (mu - 0.5 * ez)) * two_j +
                      0.5 * (1.0 / mu - d.d_eta_zx / w0) * (1.0 - mu));
  s.eps0_const = w0 * ((1.0 - mu * mu) / (2.0 * mu) + (mu - 0.5 * ez)) * two_j +
                 w0 * ((1.0 / mu - ez) + ex * (1.0 - mu)) - w;

  s.chi_plus = 1.0 + 4.0 * s.wB / s.wA;
  s.kappa_plus = 4.0 * s.wD + std::sqrt(2.0) * sfx * std::sqrt(1.0 + mu);
  s.chi_minus = 1.0 - 4.0 * s.wC / s.wA;
  s.kappa_minus = std::sqrt(2.0) * sgy * std::sqrt(1.0 + mu);

  const double wwA = w * s.wA;
  const double A2 = s.wA * s.wA * s.chi_plus;
  const double b1 = std::sqrt((A2 - w * w) * (A2 - w * w) + wwA * s.kappa_plus * s.kappa_plus);
  const auto e1m = guarded_sqrt(0.5 * ((w * w + A2) - b1)), e1p = guarded_sqrt(0.5 * ((w * w + A2) + b1));
  const double b2 = std::sqrt((s.chi_minus - 1.0) * (s.chi_minus - 1.0) + s.kappa_minus * s.kappa_minus / wwA);
  const auto e2m = guarded_sqrt(0.5 * ((1.0 + s.chi_minus) - b2)), e2p = guarded_sqrt(0.5 * ((1.0 + s.chi_minus) + b2));
  s.eps1_minus = e1m.value;
  s.eps1_plus = e1p.value;
  s.eps2_minus = e2m.value;
  s.eps2_plus = e2p.value;
  s.valid1_minus = e1m.valid;
  s.valid1_plus = e1p.valid;
  s.valid2_minus = e2m.valid;
  s.valid2_plus = e2p.valid;
  s.wS_minus = s.eps1_minus / s.eps2_minus;
  s.wS_plus = s.eps1_plus / s.eps2_plus;

  const double cross_x = 0.5 * std::sqrt(wwA) * s.kappa_plus;
  s.position_form << w * w, cross_x, cross_x, A2;
  const double cross_p = 0.5 * s.kappa_minus / std::sqrt(wwA);
  s.momentum_form << 1.0, cross_p, cross_p, s.chi_minus;
  s.phi1 = 0.5 * std::atan2(std::sqrt(wwA) * s.kappa_plus, A2 - w * w);
  s.phi2 = 0.5 * std::atan2(s.kappa_minus, std::sqrt(wwA) * (s.chi_minus - 1.0));
  return s;
}

// Quadratic fluctuation Hamiltonian H2 = 1/2 x^T Vq x + 1/2 p^T Vp p, x = (photon, spin) quadratures
// with [x_i, p_j] = i delta_ij, expanded about the x-branch mean field (the origin when mu_x >= 1).
struct QuadraticForm {
  Eigen::Matrix2d position;
  Eigen::Matrix2d momentum;
};

namespace detail {

// Expansion about the x-branch mean field with order parameter mu (mu = 1 is the origin).
inline QuadraticForm quadratic_form_at(const ModelParams& m, const DerivedScales& d, double mu) {
  const double w = m.omega(), w0 = m.omega0(), g = m.gamma(), xi = m.xi();
  QuadraticForm q;
  const double g1 = g * (1.0 + xi) * mu;
  q.position << w, g1, g1, w0 / mu - mu * mu * d.d_eta_zx;
  const double g2 = g * (1.0 - xi);
  q.momentum << w, g2, g2, w0 / mu - d.d_eta_zy;
  return q;
}

}  // namespace detail

inline QuadraticForm quadratic_form(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  return detail::quadratic_form_at(m, d, d.superradiant ? d.mu_x : 1.0);
}

// Determinants of the two blocks in cancellation-free closed form; they decide stability.
struct FormDeterminants {
  double position = 0.0;
  double momentum = 0.0;
};

inline FormDeterminants quadratic_form_determinants(const ModelParams& m, bool displaced) {
  const DerivedScales d = derive_scales(m);
  const double w = m.omega(), w0 = m.omega0(), g = m.gamma(), xi = m.xi();
  FormDeterminants r;
  if (displaced) {
    const double mu = d.mu_x;
    r.position = w * w0 * (1.0 / mu - mu);
    r.momentum = 4.0 * xi * g * g + w * (m.eta_y() - m.eta_x());
  } else {
    r.position = w * (w0 - d.d_eta_zx) - g * g * (1.0 + xi) * (1.0 + xi);
    r.momentum = w * (w0 - d.d_eta_zy) - g * g * (1.0 - xi) * (1.0 - xi);
  }
  return r;
}

struct RawSquares {
  double minus = 0.0;
  double plus = 0.0;
  bool complex_pair = false;  // squared frequencies form a complex-conjugate pair
};

namespace detail {

// Roots of l^2 - tr l + det = 0; the small root is det / large root.
inline RawSquares squares_from(double tr, double det) {
  RawSquares r;
  const double disc = tr * tr - 4.0 * det;
  if (disc < -1e-12 * std::max(1.0, tr * tr)) {
    r.complex_pair = true;
    r.minus = r.plus = 0.5 * tr;
    return r;
  }
  const double sq = std::sqrt(std::max(0.0, disc));
  if (tr >= 0.0) {
    r.plus = 0.5 * (tr + sq);
    r.minus = r.plus != 0.0 ? det / r.plus : 0.0;
  } else {
    r.minus = 0.5 * (tr - sq);
    r.plus = r.minus != 0.0 ? det / r.minus : 0.0;
  }
  return r;
}

inline RawSquares mode_squares_at(const ModelParams& m, bool displaced) {
  const DerivedScales d = derive_scales(m);
  const QuadraticForm q = quadratic_form_at(m, d, displaced ? d.mu_x : 1.0);
  const FormDeterminants dets = quadratic_form_determinants(m, displaced);
  return squares_from((q.position * q.momentum).trace(), dets.position * dets.momentum);
}

}  // namespace detail

// Squared normal-mode frequencies (eigenvalues of Vq Vp) about the actual mean-field state.
inline RawSquares mode_squares(const ModelParams& m) {
  return detail::mode_squares_at(m, derive_scales(m).superradiant);
}

// Symplectic change of variables x = L y, p = L^{-T} pi that brings H2 to sum_i (pi_i^2 + w_i^2 y_i^2)/2.
// Requires a positive-definite momentum block.
struct SymplecticDecoupling {
  Eigen::Matrix2d L = Eigen::Matrix2d::Identity();
  Eigen::Vector2d frequency_squares = Eigen::Vector2d::Zero();
  bool valid = false;
};

inline SymplecticDecoupling symplectic_decoupling(const QuadraticForm& q) {
  SymplecticDecoupling out;
  Eigen::LLT<Eigen::Matrix2d> llt(q.momentum);
  if (llt.info() != Eigen::Success) return out;
  const Eigen::Matrix2d G = llt.matrixL();
  const Eigen::Matrix2d M = G.transpose() * q.position * G;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (M + M.transpose()));
  out.L = G * es.eigenvectors();
  out.frequency_squares = es.eigenvalues();
  out.valid = true;
  return out;
}

struct FactorizedModes {
  double eps_minus = 0.0;
  double eps_plus = 0.0;
  bool valid_minus = true;
  bool valid_plus = true;
};

struct ModeSpectrum {
  double eps_minus = 0.0;  // phase mode (lower polariton)
  double eps_plus = 0.0;   // amplitude mode (upper polariton)
  double zero_point = 0.0;
  PhaseLabel phase = PhaseLabel::NormalDeformed;
  bool valid_minus = true;
  bool valid_plus = true;
  bool suppressed_minus = false;
  RawSquares raw_squares;
  FactorizedModes factorized;  // products eps2 * eps1 of the rotated-quadrature factors
  std::optional<NormalModeFactors> normal;
  std::optional<SuperradiantIntermediates> superradiant;
};

namespace detail {

inline void fill_from_squares(ModeSpectrum& s, const RawSquares& r) {
  s.raw_squares = r;
  if (r.complex_pair) {
    s.valid_minus = s.valid_plus = false;
    s.eps_minus = s.eps_plus = 0.0;
    return;
  }
  const auto lo = guarded_sqrt(r.minus), hi = guarded_sqrt(r.plus);
  s.valid_minus = lo.valid;
  s.valid_plus = hi.valid;
  s.eps_minus = lo.valid ? lo.value : 0.0;
  s.eps_plus = hi.valid ? hi.value : 0.0;
}

template <class Factors>
FactorizedModes factorized_from(const Factors& f) {
  FactorizedModes r;
  r.valid_minus = f.valid1_minus && f.valid2_minus;
  r.valid_plus = f.valid1_plus && f.valid2_plus;
  r.eps_minus = r.valid_minus ? f.eps2_minus * f.eps1_minus : 0.0;
  r.eps_plus = r.valid_plus ? f.eps2_plus * f.eps1_plus : 0.0;
  return r;
}

}  // namespace detail

// Modes about the undisplaced state. Frequencies are the exact ones of the quadratic form;
// the factorized products are carried alongside.
inline ModeSpectrum normal_modes(const ModelParams& m) {
  ModeSpectrum s;
  s.phase = classify_phase(m);
  const double w = m.omega(), w0 = m.omega0();
  const RawSquares r = detail::mode_squares_at(m, false);
  detail::fill_from_squares(s, r);
  s.suppressed_minus = !r.complex_pair && r.minus < -kImaginaryGuard;

  s.normal = normal_mode_factors(m);
  s.factorized = detail::factorized_from(*s.normal);
  const double eps0 = w + w0 * (1.0 - m.eta_z() / w0) + 2.0 * m.j() * w0 * (1.0 - m.eta_z() / (2.0 * w0));
  s.zero_point = 0.5 * (s.eps_minus + s.eps_plus - eps0);
  return s;
}

inline ModeSpectrum superradiant_modes(const ModelParams& m) {
  ModeSpectrum s;
  s.phase = classify_phase(m);
  detail::fill_from_squares(s, detail::mode_squares_at(m, true));
  s.superradiant = superradiant_intermediates(m);
  s.factorized = detail::factorized_from(*s.superradiant);
  s.zero_point = 0.5 * (s.eps_minus + s.eps_plus - s.superradiant->eps0_const);
  return s;
}

inline ModeSpectrum mode_branches(const ModelParams& m) {
  const PhaseLabel label = classify_phase(m);
  const DerivedScales d = derive_scales(m);
  ModeSpectrum s;
  switch (label) {
    case PhaseLabel::NormalDeformed:
      return normal_modes(m);
    case PhaseLabel::SuperradiantX:
      return superradiant_modes(m);
    case PhaseLabel::DeformedSuppressed:
      s = d.superradiant ? superradiant_modes(m) : normal_modes(m);
      s.phase = label;
      s.eps_minus = 0.0;
      s.valid_minus = true;
      s.suppressed_minus = true;
      if (d.d_eta_zx >= m.omega0()) {
        s.valid_plus = false;
        s.eps_plus = 0.0;
      }
      return s;
    case PhaseLabel::Invalid:
      s = normal_modes(m);
      s.phase = label;
      s.valid_minus = s.valid_plus = false;
      s.eps_minus = s.eps_plus = 0.0;
      return s;
  }
  return s;
}

// Amplitude gap at gc_x from the factorized closed form.
inline double critical_amplitude_gap(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  const double w = m.omega(), w0 = m.omega0(), xi = m.xi();
  const double r = (1.0 - xi) / (1.0 + xi);
  const double wy2 = d.w_zy_sq, wx2 = d.w_zx_sq;
  const double inner = (1.0 + wy2) + std::sqrt((1.0 - wy2) * (1.0 - wy2) + 4.0 * wx2 * r * r);
  return std::sqrt(0.5 * (w * w + w0 * w0 * wx2) * inner);
}

// Amplitude gap at gc_x from the quadratic form (the phase-mode root vanishes there).
inline double critical_amplitude_gap_quadratic(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  const double w = m.omega(), w0 = m.omega0(), xi = m.xi();
  const double gc2 = d.gc_x * d.gc_x;
  return std::sqrt(w * w + 2.0 * gc2 * (1.0 - xi * xi) + w0 * w0 * d.w_zx_sq * d.w_zy_sq);
}

// Closed-form large-coupling limit of the phase mode (no matter interactions).
inline double roton_asymptote(const ModelParams& m) {
  const double xi = m.xi();
  return m.omega() * std::sqrt(1.0 + std::abs((1.0 - xi) / (1.0 + xi)));
}

// Large-coupling limit of the quadratic-form phase mode without matter interactions.
inline double roton_limit_quadratic(const ModelParams& m) {
  const double xi = m.xi();
  return m.omega() * 2.0 * std::sqrt(xi) / (1.0 + xi);
}

inline double amplitude_asymptote(const ModelParams& m) {
  const double xi = m.xi();
  return (1.0 + xi) * (1.0 + xi) * m.gamma() * m.gamma() / m.omega();
}

struct SuppressionWindow {
  double delta_gamma = 0.0;  // gc_x - gc_y
  bool window_exists = false;
};

inline std::optional<SuppressionWindow> suppression_window(const ModelParams& m) {
  if (m.xi() >= 1.0) return std::nullopt;
  const DerivedScales d = derive_scales(m);
  SuppressionWindow w;
  w.delta_gamma = d.gc_x * (1.0 - (d.w_zy / d.w_zx) * (1.0 + m.xi()) / (1.0 - m.xi()));
  w.window_exists = w.delta_gamma > 0.0;
  return w;
}

struct GroundEnergy {
  double direct = 0.0;       // mean-field energy per 2j at (alpha, beta)
  double closed_form = 0.0;  // branch expression
};

inline GroundEnergy ground_state_energy(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  GroundEnergy e;
  e.direct = mean_field_energy(m, d.alpha, d.beta);
  const double w0 = m.omega0(), ez = m.eta_z() / w0;
  if (d.superradiant)
    e.closed_form = -0.5 * w0 * (0.5 * (d.mu_x + 1.0 / d.mu_x) - 0.5 * ez);
  else
    e.closed_form = -0.5 * w0 * (1.0 - 0.5 * ez);
  return e;
}

}  // namespace dicke
