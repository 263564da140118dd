#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dicke/hp_modes.hpp"
#include "dicke/surface.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

ModelParams make(double gamma, double xi, double ex = 0.0, double ey = 0.0, double ez = 0.0) {
  Couplings c;
  c.gamma = gamma;
  c.xi = xi;
  c.eta_x = ex;
  c.eta_y = ey;
  c.eta_z = ez;
  return ModelParams(c, 20);
}

ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.8, 0.8), G(0.0, 2.0), X(0.0, 1.0);
  return make(G(rng), X(rng), U(rng), U(rng), U(rng));
}

}  // namespace

TEST(Surface, OriginEnergy) {
  EXPECT_DOUBLE_EQ(surface_energy(make(0.0, 0.0), 0.0, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(surface_energy(make(0.7, 0.3, 0.1, 0.2, 0.4), 0.0, 0.0), -1.0 + 0.2);
}

TEST(Surface, MatchesRelaxedClassicalEnergy) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> J(-1.0, 1.0), P(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 300; ++i) {
    const ModelParams m = random_params(rng);
    const double jz = J(rng), phi = P(rng);
    const auto uv = spin_to_uv(jz, phi);
    // oracle coordinates of the same spin state, boson relaxed analytically
    const double t = 1.0 + jz;
    const double Q = std::sqrt(2.0 * t) * std::cos(phi), Pp = std::sqrt(2.0 * t) * std::sin(phi);
    const double shrink = std::sqrt(std::max(0.0, 1.0 - 0.5 * t));
    Eigen::Vector4d y(0.0, Q, 0.0, Pp);
    y(0) = -m.gamma() * (1.0 + m.xi()) * Q * shrink / m.omega();
    y(2) = m.gamma() * (1.0 - m.xi()) * Pp * shrink / m.omega();
    EXPECT_NEAR(surface_energy(m, uv[0], uv[1]), oracle::energy(m, y), 1e-12);
    EXPECT_NEAR(classical_energy(m, relax_boson(m, jz, phi)), oracle::energy(m, y), 1e-12);
  }
}

TEST(Surface, SeriesAndClosedFormJoinSmoothly) {
  const ModelParams m = make(1.3, 0.4, 0.3, -0.2, 0.5);
  const double r = 0.5;  // s = 0.25
  for (double angle : {0.0, 0.7, 2.0}) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double lo = r * (1.0 - 1e-12), hi = r * (1.0 + 1e-12);
    EXPECT_NEAR(surface_energy(m, lo * c, lo * s), surface_energy(m, hi * c, hi * s), 1e-11);
    const auto a = surface_gradient_hessian(m, lo * c, lo * s), b = surface_gradient_hessian(m, hi * c, hi * s);
    EXPECT_LT((a.gradient - b.gradient).norm(), 1e-10);
    EXPECT_LT((a.hessian - b.hessian).norm(), 1e-9);
  }
}

TEST(Surface, AnalyticDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> R(0.0, 3.0), A(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 300; ++i) {
    const ModelParams m = random_params(rng);
    const double r = R(rng), a = A(rng);
    const double u = r * std::cos(a), v = r * std::sin(a);
    const auto an = surface_gradient_hessian(m, u, v);
    const auto fd = surface_gradient_hessian_fd(m, u, v, 1e-3);
    EXPECT_LT((an.gradient - fd.gradient).norm(), 1e-8);
    EXPECT_LT((an.hessian - fd.hessian).norm(), 1e-6);
  }
}

TEST(Extrema, FreeSpinHasSingleMinimumAtOrigin) {
  const ExtremaResult r = find_extrema(make(0.0, 0.0));
  int minima = 0;
  for (const auto& p : r.points)
    if (p.kind == ExtremumClass::Min) {
      ++minima;
      EXPECT_NEAR(p.u, 0.0, 1e-9);
      EXPECT_NEAR(p.v, 0.0, 1e-9);
      EXPECT_NEAR(p.energy, -1.0, 1e-14);
    }
  EXPECT_EQ(minima, 1);
  EXPECT_FALSE(r.family.has_value());
}

TEST(Extrema, DickeMinimaAreMirrorImages) {
  const ExtremaResult r = find_extrema(make(0.6, 1.0));
  std::vector<ExtremumPoint> minima;
  for (const auto& p : r.points)
    if (p.kind == ExtremumClass::Min) minima.push_back(p);
  ASSERT_EQ(minima.size(), 2u);
  EXPECT_NEAR(minima[0].u, -minima[1].u, 1e-8);
  EXPECT_NEAR(minima[0].v, 0.0, 1e-8);
  EXPECT_NEAR(minima[0].energy, minima[1].energy, 1e-13);
  EXPECT_NEAR(r.global_minimum_energy(), 2.0 * ground_state_energy(make(0.6, 1.0)).direct, 1e-12);
  bool saddle_at_origin = false;
  for (const auto& p : r.points)
    saddle_at_origin = saddle_at_origin || (p.kind == ExtremumClass::Saddle && std::hypot(p.u, p.v) < 1e-8);
  EXPECT_TRUE(saddle_at_origin);
}

TEST(Extrema, StrongXInteractionKeepsLobesOnUAxis) {
  const ModelParams m = make(1.5, 1.0, 0.9);
  const ExtremaResult r = find_extrema(m);
  int minima = 0;
  for (const auto& p : r.points)
    if (p.kind == ExtremumClass::Min) {
      ++minima;
      EXPECT_NEAR(p.v, 0.0, 1e-8);
      EXPECT_GT(std::abs(p.u), 0.1);
    }
  EXPECT_EQ(minima, 2);
}

TEST(Extrema, TavisCummingsRingIsDegenerate) {
  const ModelParams m = make(2.0, 0.0);
  const ExtremaResult r = find_extrema(m);
  ASSERT_TRUE(r.family.has_value());
  EXPECT_GE(r.family->count, 8u);
  EXPECT_LT(r.family->energy_spread, 1e-10);
  EXPECT_NEAR(r.family->energy, 2.0 * ground_state_energy(m).direct, 1e-10);
}

TEST(Extrema, GlobalMinimumMatchesMeanFieldEnergy) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-0.5, 0.5), G(0.0, 2.0), X(0.0, 1.0);
  SearchConfig cfg;
  cfg.seeds_per_axis = 21;
  for (int i = 0; i < 25; ++i) {
    const double ex = U(rng);
    const ModelParams m = make(G(rng), X(rng), ex, ex + 0.5, U(rng));
    const ExtremaResult r = find_extrema(m, cfg);
    EXPECT_NEAR(r.global_minimum_energy(), 2.0 * ground_state_energy(m).direct, 1e-10);
  }
}

TEST(CriticalCoupling, SurfaceSofteningMatchesClosedForm) {
  for (double xi : {0.1, 0.6, 1.0})
    for (double dz : {-0.7, 0.0, 0.6}) {
      const ModelParams m = make(0.0, xi, 0.0, 0.5, dz);
      const CriticalCoupling c = critical_coupling_from_surface(m);
      EXPECT_NEAR(c.coupling, derive_scales(m).gc_x, 1e-10);
      EXPECT_EQ(c.axis, SoftAxis::U);
    }
}

TEST(CriticalCoupling, ThrowsWithoutSignChange) {
  EXPECT_THROW(critical_coupling_from_surface(make(0.0, 0.5, -1.5)), std::domain_error);
}
