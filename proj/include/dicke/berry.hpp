#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dicke/params.hpp"

namespace dicke {

struct GeometricPhases {
  double gamma_n_per_j = 0.0;               // closed form, photon-number circulation
  double gamma_m_per_j = 0.0;               // closed form, pseudospin circulation
  double gamma_n_definitional_per_j = 0.0;  // 2 pi <n> / j with <n> = 2j alpha^2
  double gamma_m_definitional_per_j = 0.0;  // 2 pi <Jz + j> / j with <Jz + j> = 2j beta^2
  double n_expectation_per_2j = 0.0;        // alpha^2
  double m_expectation_per_2j = 0.0;        // beta^2
  double gamma_n = 0.0;                     // closed forms times j
  double gamma_m = 0.0;
};

// Closed-form photon phase per j. The product f_x w_zx^2 equals f_plus and is formed directly.
inline double berry_photon(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  if (!d.superradiant) return 0.0;
  const double mu = d.mu_x;
  return 0.5 * std::numbers::pi * d.f_plus / m.omega0() * (1.0 - mu * mu);
}

inline double berry_spin(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  if (!d.superradiant) return 0.0;
  return std::numbers::pi * (1.0 - d.mu_x);
}

inline GeometricPhases geometric_phases(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  GeometricPhases g;
  g.gamma_n_per_j = berry_photon(m);
  g.gamma_m_per_j = berry_spin(m);
  g.n_expectation_per_2j = d.alpha * d.alpha;
  g.m_expectation_per_2j = d.beta * d.beta;
  g.gamma_n_definitional_per_j = 4.0 * std::numbers::pi * g.n_expectation_per_2j;
  g.gamma_m_definitional_per_j = 4.0 * std::numbers::pi * g.m_expectation_per_2j;
  g.gamma_n = g.gamma_n_per_j * m.j();
  g.gamma_m = g.gamma_m_per_j * m.j();
  return g;
}

// Fixed ratios closed form / definitional value above gc_x.
inline double photon_phase_ratio(const ModelParams& m) { return m.omega() / (2.0 * m.omega0() * m.omega0()); }
inline constexpr double spin_phase_ratio = 0.5;

struct SignatureRow {
  double d_eta_zx = 0.0;
  double gamma = 0.0;
  PhaseLabel phase = PhaseLabel::NormalDeformed;
  double gamma_n_per_j = 0.0;
  double gamma_m_per_j = 0.0;
  bool w_zx_real = true;
};

struct FirstOrderSignature {
  std::vector<SignatureRow> rows;  // d_eta_zx outer, gamma inner
  bool validity_change = false;    // w_zx turns imaginary somewhere in the sweep
  bool sign_change = false;        // some phase changes sign between neighbouring d_eta_zx values
  double crossing = 0.0;           // d_eta_zx where w_zx vanishes (omega0)
};

// Sweeps d_eta_zx through eta_x at fixed eta_z, tabulating both phases per coupling.
inline FirstOrderSignature first_order_signature(const ModelParams& base, const std::vector<double>& d_eta_zx,
                                                 const std::vector<double>& gammas) {
  FirstOrderSignature out;
  out.crossing = base.omega0();
  std::vector<std::vector<SignatureRow>> by_d;
  for (double dz : d_eta_zx) {
    std::vector<SignatureRow> rows;
    for (double g : gammas) {
      const ModelParams m = base.with_field("eta_x", base.eta_z() - dz).with_gamma(g);
      const DerivedScales d = derive_scales(m);
      SignatureRow r;
      r.d_eta_zx = dz;
      r.gamma = g;
      r.phase = classify_phase(m);
      r.w_zx_real = d.zx_real;
      if (d.zx_real) {
        r.gamma_n_per_j = berry_photon(m);
        r.gamma_m_per_j = berry_spin(m);
      } else {
        // continue the closed forms past w_zx^2 = 0 with the real f_x and mu_x
        const double mu = d.mu_x;
        r.gamma_n_per_j = 0.5 * std::numbers::pi * d.f_plus / m.omega0() * (1.0 - mu * mu);
        r.gamma_m_per_j = std::numbers::pi * (1.0 - mu);
        out.validity_change = true;
      }
      rows.push_back(r);
    }
    by_d.push_back(rows);
  }
  auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
  for (std::size_t i = 1; i < by_d.size(); ++i)
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      const auto &a = by_d[i - 1][k], &b = by_d[i][k];
      if (sgn(a.gamma_n_per_j) * sgn(b.gamma_n_per_j) < 0 || sgn(a.gamma_m_per_j) * sgn(b.gamma_m_per_j) < 0)
        out.sign_change = true;
    }
  for (auto& rows : by_d) out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  return out;
}

struct KinkCheck {
  double slope_left = 0.0;
  double slope_right = 0.0;
  bool kink = false;
};

// One-sided slopes of a phase curve at gc_x; a kink means they differ by more than ten times the smaller one.
template <class PhaseFn>
KinkCheck detect_kink(const ModelParams& m, PhaseFn&& phase, double h = 1e-4) {
  const DerivedScales d = derive_scales(m);
  const double gc = d.gc_x;
  const double c = phase(m.with_gamma(gc));
  KinkCheck k;
  k.slope_left = (c - phase(m.with_gamma(gc - h))) / h;
  k.slope_right = (phase(m.with_gamma(gc + h)) - c) / h;
  const double diff = std::abs(k.slope_right - k.slope_left);
  const double small = std::min(std::abs(k.slope_left), std::abs(k.slope_right));
  k.kink = diff > 10.0 * small && diff > 1e-8;
  return k;
}

}  // namespace dicke
