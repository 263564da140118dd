#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dicke/params.hpp"

namespace dicke {

struct PhaseSpacePoint {
  double q = 0.0;
  double p = 0.0;
  double jz = -1.0;  // scaled pseudospin projection in [-1, 1]
  double phi = 0.0;
};

// Classical energy per j for coherent-state labels (q, p, jz, phi).
inline double classical_energy(const ModelParams& m, const PhaseSpacePoint& x) {
  const double s2 = std::max(0.0, 1.0 - x.jz * x.jz);
  const double c = std::cos(x.phi), s = std::sin(x.phi);
  return 0.5 * m.omega() * (x.q * x.q + x.p * x.p) + x.jz * (m.omega0() + 0.5 * m.eta_z() * x.jz) +
         0.5 * s2 * (m.eta_x() * c * c + m.eta_y() * s * s) +
         m.gamma() * std::sqrt(s2) * ((1.0 + m.xi()) * x.q * c - (1.0 - m.xi()) * x.p * s);
}

// Boson quadratures that minimise the classical energy for a given spin orientation.
inline PhaseSpacePoint relax_boson(const ModelParams& m, double jz, double phi) {
  const double s = std::sqrt(std::max(0.0, 1.0 - jz * jz));
  PhaseSpacePoint x;
  x.jz = jz;
  x.phi = phi;
  x.q = -m.gamma() * (1.0 + m.xi()) * s * std::cos(phi) / m.omega();
  x.p = m.gamma() * (1.0 - m.xi()) * s * std::sin(phi) / m.omega();
  return x;
}

// (u, v) = arccos(-jz) (cos phi, sin phi)
inline std::array<double, 2> spin_to_uv(double jz, double phi) {
  const double r = std::acos(std::clamp(-jz, -1.0, 1.0));
  return {r * std::cos(phi), r * std::sin(phi)};
}

namespace detail {

// Radial profile functions of s = u^2 + v^2 and their first two s-derivatives.
struct Radial {
  double c, c1, c2;  // cos(r)
  double S, S1, S2;  // sin(r)^2 / r^2
};

// Value, first and second derivative of sum_k a[k] x^k.
template <std::size_t K>
inline std::array<double, 3> poly_with_derivatives(const std::array<double, K>& a, double x) {
  double p = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t i = K; i-- > 0;) {
    d2 = d2 * x + 2.0 * d1;
    d1 = d1 * x + p;
    p = p * x + a[i];
  }
  return {p, d1, d2};
}

inline constexpr std::size_t kSeriesTerms = 16;

// cos(sqrt(s)) = sum (-s)^k / (2k)!
inline std::array<double, kSeriesTerms> cos_series() {
  std::array<double, kSeriesTerms> a{};
  double fact = 1.0;
  for (std::size_t k = 0; k < kSeriesTerms; ++k) {
    if (k > 0) fact *= (2.0 * k - 1.0) * (2.0 * k);
    a[k] = (k % 2 == 0 ? 1.0 : -1.0) / fact;
  }
  return a;
}

// sin(sqrt(s))^2 / s = sum_e (-1)^e 4^(e+1) s^e / (2 (2e+2)!)
inline std::array<double, kSeriesTerms> sinc2_series() {
  std::array<double, kSeriesTerms> a{};
  double fact = 2.0;  // (2e+2)!
  double four = 4.0;
  for (std::size_t e = 0; e < kSeriesTerms; ++e) {
    if (e > 0) {
      fact *= (2.0 * e + 1.0) * (2.0 * e + 2.0);
      four *= 4.0;
    }
    a[e] = (e % 2 == 0 ? 1.0 : -1.0) * four / (2.0 * fact);
  }
  return a;
}

inline Radial radial_functions(double s) {
  Radial f{};
  if (s < 0.25) {
    static const auto ca = cos_series();
    static const auto sa = sinc2_series();
    const auto c = poly_with_derivatives(ca, s);
    const auto q = poly_with_derivatives(sa, s);
    f.c = c[0];
    f.c1 = c[1];
    f.c2 = c[2];
    f.S = q[0];
    f.S1 = q[1];
    f.S2 = q[2];
    return f;
  }
  const double r = std::sqrt(s);
  const double sr = std::sin(r), cr = std::cos(r);
  f.c = cr;
  f.c1 = -sr / (2.0 * r);
  f.c2 = (sr - r * cr) / (4.0 * r * s);
  f.S = sr * sr / s;
  const double n = r * sr * cr - sr * sr;
  const double dn = r * std::cos(2.0 * r) - 0.5 * std::sin(2.0 * r);
  f.S1 = n / (s * s);
  f.S2 = (dn * r - 4.0 * n) / (2.0 * s * s * s);
  return f;
}


struct SurfaceCoefficients {
  double a;  // coefficient of u^2 inside the bracket
  double b;  // coefficient of v^2
};

inline SurfaceCoefficients surface_coefficients(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  return {m.eta_x() / m.omega0() - d.f_plus, m.eta_y() / m.omega0() - d.f_minus};
}

}  // namespace detail

struct SurfacePoint {
  double u = 0.0;
  double v = 0.0;
  double energy = 0.0;
};

// Energy surface per j in the reduced spin plane, with the boson relaxed.
inline double surface_energy(const ModelParams& m, double u, double v) {
  const auto k = detail::surface_coefficients(m);
  const auto f = detail::radial_functions(u * u + v * v);
  const double w0 = m.omega0();
  return 0.5 * w0 * f.S * (k.a * u * u + k.b * v * v) - w0 * f.c + 0.5 * m.eta_z() * f.c * f.c;
}

struct GradientHessian {
  Eigen::Vector2d gradient;
  Eigen::Matrix2d hessian;
};

inline GradientHessian surface_gradient_hessian(const ModelParams& m, double u, double v) {
  const auto k = detail::surface_coefficients(m);
  const double s = u * u + v * v;
  const auto f = detail::radial_functions(s);
  const double w0 = m.omega0();
  const double ez = m.eta_z();

  // E = g(s) Q(u, v) + C(s)
  const double g = 0.5 * w0 * f.S, g1 = 0.5 * w0 * f.S1, g2 = 0.5 * w0 * f.S2;
  const double C1 = -w0 * f.c1 + ez * f.c * f.c1;
  const double C2 = -w0 * f.c2 + ez * (f.c1 * f.c1 + f.c * f.c2);
  const double Q = k.a * u * u + k.b * v * v;
  const double su = 2.0 * u, sv = 2.0 * v;
  const double Qu = 2.0 * k.a * u, Qv = 2.0 * k.b * v;

  GradientHessian r;
  r.gradient << g1 * su * Q + g * Qu + C1 * su, g1 * sv * Q + g * Qv + C1 * sv;
  const double huu = g2 * su * su * Q + 2.0 * g1 * su * Qu + 2.0 * g1 * Q + 2.0 * g * k.a + C2 * su * su + 2.0 * C1;
  const double hvv = g2 * sv * sv * Q + 2.0 * g1 * sv * Qv + 2.0 * g1 * Q + 2.0 * g * k.b + C2 * sv * sv + 2.0 * C1;
  const double huv = g2 * su * sv * Q + g1 * su * Qv + g1 * sv * Qu + C2 * su * sv;
  r.hessian << huu, huv, huv, hvv;
  return r;
}

// Central differences with one Richardson step (h and h/2).
inline GradientHessian surface_gradient_hessian_fd(const ModelParams& m, double u, double v, double h = 1e-5) {
  auto E = [&](double x, double y) { return surface_energy(m, x, y); };
  auto at_step = [&](double t) {
    GradientHessian r;
    const double e0 = E(u, v);
    const double epu = E(u + t, v), emu = E(u - t, v), epv = E(u, v + t), emv = E(u, v - t);
    r.gradient << (epu - emu) / (2.0 * t), (epv - emv) / (2.0 * t);
    const double huu = (epu - 2.0 * e0 + emu) / (t * t);
    const double hvv = (epv - 2.0 * e0 + emv) / (t * t);
    const double huv = (E(u + t, v + t) - E(u + t, v - t) - E(u - t, v + t) + E(u - t, v - t)) / (4.0 * t * t);
    r.hessian << huu, huv, huv, hvv;
    return r;
  };
  const GradientHessian a = at_step(h), b = at_step(0.5 * h);
  GradientHessian r;
  r.gradient = (4.0 * b.gradient - a.gradient) / 3.0;
  r.hessian = (4.0 * b.hessian - a.hessian) / 3.0;
  return r;
}

enum class ExtremumClass { Min, Max, Saddle };

inline const char* to_string(ExtremumClass c) {
  switch (c) {
    case ExtremumClass::Min: return "min";
    case ExtremumClass::Max: return "max";
    case ExtremumClass::Saddle: return "saddle";
  }
  return "saddle";
}

struct ExtremumPoint {
  double u = 0.0;
  double v = 0.0;
  double energy = 0.0;
  ExtremumClass kind = ExtremumClass::Saddle;
  std::array<double, 2> hessian_eigenvalues{};  // ascending
  bool degenerate = false;  // some |lambda| below the degeneracy tolerance
};

struct SearchConfig {
  int seeds_per_axis = 41;
  double seed_min = -std::numbers::pi;
  double seed_max = std::numbers::pi;
  double newton_tol = 1e-12;  // gradient norm, scaled by max(1, energy scale)
  int max_iterations = 100;
  double merge_distance = 1e-6;
  double degeneracy_tol = 1e-8;
  double family_energy_tol = 1e-9;
  int family_min_count = 8;
  double pole_margin = 1e-3;  // stationary points this close to the rim |(u, v)| = pi are the spin-up pole
};

// Continuum of minima with equal energy (the U(1) ring).
struct DegenerateFamily {
  double energy = 0.0;
  double energy_spread = 0.0;
  double mean_radius = 0.0;
  std::size_t count = 0;
};

struct ExtremaResult {
  std::vector<ExtremumPoint> points;  // isolated stationary points, sorted by (energy, u, v)
  std::optional<DegenerateFamily> family;
  std::optional<double> pole_energy;  // set when seeds run into the rim, which is a single point of the sphere
  std::size_t failed_seeds = 0;

  // Lowest energy among minima, including the degenerate family.
  double global_minimum_energy() const {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
      if (p.kind == ExtremumClass::Min) e = std::min(e, p.energy);
    if (family) e = std::min(e, family->energy);
    return e;
  }
};

inline ExtremumPoint classify_stationary_point(const ModelParams& m, double u, double v, double tol = 1e-8) {
  const auto gh = surface_gradient_hessian(m, u, v);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gh.hessian, Eigen::EigenvaluesOnly);
  ExtremumPoint p;
  p.u = u;
  p.v = v;
  p.energy = surface_energy(m, u, v);
  const double l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
  p.hessian_eigenvalues = {l1, l2};
  p.degenerate = std::abs(l1) < tol || std::abs(l2) < tol;
  if (l1 < -tol && l2 > tol) p.kind = ExtremumClass::Saddle;
  else if (l1 >= -tol && l2 > tol) p.kind = ExtremumClass::Min;
  else if (l2 <= tol && l1 < -tol) p.kind = ExtremumClass::Max;
  else p.kind = ExtremumClass::Saddle;
  return p;
}

namespace detail {

inline double surface_energy_scale(const ModelParams& m) {
  const DerivedScales d = derive_scales(m);
  return std::max(1.0, m.omega0() * (1.0 + d.f_plus + d.f_minus) + std::abs(m.eta_x()) + std::abs(m.eta_y()) +
                           std::abs(m.eta_z()));
}

// Newton iteration on grad E = 0. Returns nullopt when the seed does not converge inside the disk.
inline std::optional<std::array<double, 2>> newton_stationary(const ModelParams& m, double u, double v,
                                                              const SearchConfig& cfg, double scale) {
  const double pi = std::numbers::pi;
  Eigen::Vector2d x(u, v);
  auto gh = surface_gradient_hessian(m, x(0), x(1));
  double gn = gh.gradient.norm();
  const double tol = cfg.newton_tol * scale;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (gn <= tol) return std::array<double, 2>{x(0), x(1)};
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gh.hessian);
    const Eigen::Vector2d lam = es.eigenvalues();
    const Eigen::Matrix2d V = es.eigenvectors();
    const double lmax = std::max(std::abs(lam(0)), std::abs(lam(1)));
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    for (int i = 0; i < 2; ++i) {
      const double gi = V.col(i).dot(gh.gradient);
      if (std::abs(lam(i)) > 1e-10 * lmax) step -= (gi / lam(i)) * V.col(i);
    }
    // steepest descent on |grad E|^2 / 2 when the pseudo-inverse step is unusable
    const Eigen::Vector2d fallback = -gh.hessian * gh.gradient;
    bool accepted = false;
    for (int pass = 0; pass < 2 && !accepted; ++pass) {
      Eigen::Vector2d dir = pass == 0 ? step : fallback;
      if (!dir.allFinite() || dir.norm() == 0.0) continue;
      if (pass == 1) dir *= std::min(1.0, 0.1 / dir.norm());
      if (dir.norm() > 0.5) dir *= 0.5 / dir.norm();
      double t = 1.0;
      for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
        const Eigen::Vector2d y = x + t * dir;
        const auto gy = surface_gradient_hessian(m, y(0), y(1));
        const double gny = gy.gradient.norm();
        if (gny < gn) {
          x = y;
          gh = gy;
          gn = gny;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
    if (x.norm() >= pi) return std::nullopt;
  }
  if (gn <= tol && x.norm() < pi) return std::array<double, 2>{x(0), x(1)};
  return std::nullopt;
}

}  // namespace detail

inline ExtremaResult find_extrema(const ModelParams& m, const SearchConfig& cfg = {}) {
  const double pi = std::numbers::pi;
  const double scale = detail::surface_energy_scale(m);
  const int n = cfg.seeds_per_axis;
  ExtremaResult out;
  std::vector<ExtremumPoint> found;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double u = n == 1 ? cfg.seed_min : cfg.seed_min + (cfg.seed_max - cfg.seed_min) * i / (n - 1);
      const double v = n == 1 ? cfg.seed_min : cfg.seed_min + (cfg.seed_max - cfg.seed_min) * k / (n - 1);
      if (u * u + v * v >= pi * pi) continue;
      const auto x = detail::newton_stationary(m, u, v, cfg, scale);
      if (!x) {
        ++out.failed_seeds;
        continue;
      }
      if (std::hypot((*x)[0], (*x)[1]) > pi - cfg.pole_margin) {
        out.pole_energy = surface_energy(m, pi, 0.0);
        continue;
      }
      found.push_back(classify_stationary_point(m, (*x)[0], (*x)[1], cfg.degeneracy_tol));
    }
  }
  std::sort(found.begin(), found.end(), [](const ExtremumPoint& a, const ExtremumPoint& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  std::vector<ExtremumPoint> unique;
  for (const auto& p : found) {
    bool merged = false;
    for (const auto& q : unique)
      if (std::hypot(p.u - q.u, p.v - q.v) < cfg.merge_distance) {
        merged = true;
        break;
      }
    if (!merged) unique.push_back(p);
  }

  // A ring of minima shows up as many distinct points at one energy.
  std::vector<ExtremumPoint> minima;
  for (const auto& p : unique)
    if (p.kind == ExtremumClass::Min) minima.push_back(p);
  if (!minima.empty()) {
    const double e0 = minima.front().energy;
    std::vector<ExtremumPoint> group;
    for (const auto& p : minima)
      if (p.energy - e0 <= cfg.family_energy_tol) group.push_back(p);
    if (static_cast<int>(group.size()) >= cfg.family_min_count) {
      DegenerateFamily fam;
      fam.count = group.size();
      fam.energy = e0;
      double r = 0.0;
      for (const auto& p : group) {
        fam.energy_spread = std::max(fam.energy_spread, p.energy - e0);
        r += std::hypot(p.u, p.v);
      }
      fam.mean_radius = r / group.size();
      out.family = fam;
      std::vector<ExtremumPoint> rest;
      for (const auto& p : unique)
        if (!(p.kind == ExtremumClass::Min && p.energy - e0 <= cfg.family_energy_tol)) rest.push_back(p);
      unique.swap(rest);
    }
  }
  out.points = std::move(unique);
  return out;
}

enum class SoftAxis { U, V };

struct CriticalCoupling {
  double coupling = 0.0;
  SoftAxis axis = SoftAxis::U;
};

// Hessian of the surface at the origin; diagonal by the reflection symmetry.
inline Eigen::Matrix2d origin_hessian(const ModelParams& m) {
  return surface_gradient_hessian(m, 0.0, 0.0).hessian;
}

// Coupling at which the origin first stops being a minimum, by bisection on the smallest Hessian eigenvalue.
inline CriticalCoupling critical_coupling_from_surface(const ModelParams& m, double gamma_tol = 1e-12) {
  auto lowest = [&](double g) {
    const Eigen::Matrix2d h = origin_hessian(m.with_gamma(g));
    return std::min(h(0, 0), h(1, 1));
  };
  double lo = 0.0, hi = 5.0 * std::sqrt(m.omega() * m.omega0());
  const double flo = lowest(lo), fhi = lowest(hi);
  if (!(flo > 0.0 && fhi < 0.0))
    throw std::domain_error("origin Hessian has no sign change on the coupling bracket");
  while (hi - lo > gamma_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (lowest(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  CriticalCoupling c;
  c.coupling = 0.5 * (lo + hi);
  const Eigen::Matrix2d h = origin_hessian(m.with_gamma(hi));
  c.axis = h(0, 0) <= h(1, 1) ? SoftAxis::U : SoftAxis::V;
  return c;
}

// True when no direction in the spin plane lies below the u axis, so the x-branch carries the global minimum.
inline bool x_branch_is_lowest(const ModelParams& m) {
  const auto k = detail::surface_coefficients(m);
  return k.a <= k.b;
}

}  // namespace dicke
