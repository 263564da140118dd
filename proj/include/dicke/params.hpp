#pragma once

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dicke {

// Raw couplings of the anisotropic Dicke Hamiltonian with collective matter terms.
struct Couplings {
  double omega = 1.0;   // boson frequency
  double omega0 = 1.0;  // qubit splitting
  double gamma = 0.0;   // light-matter coupling
  double xi = 0.0;      // counter-rotating weight: 0 Tavis-Cummings, 1 Dicke
  double eta_x = 0.0;
  double eta_y = 0.0;
  double eta_z = 0.0;
};

class ModelParams {
 public:
  explicit ModelParams(const Couplings& c = {}, int n_qubits = 2) : c_(c), n_(n_qubits) {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!(finite(c.omega) && finite(c.omega0) && finite(c.gamma) && finite(c.xi) &&
          finite(c.eta_x) && finite(c.eta_y) && finite(c.eta_z)))
      throw std::invalid_argument("model parameters must be finite");
    if (!(c.omega > 0.0)) throw std::invalid_argument("omega must be positive");
    if (!(c.omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
    if (c.gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
    if (c.xi < 0.0 || c.xi > 1.0) throw std::invalid_argument("xi must lie in [0, 1]");
    if (n_qubits < 1) throw std::invalid_argument("n_qubits must be positive");
  }

  double omega() const { return c_.omega; }
  double omega0() const { return c_.omega0; }
  double gamma() const { return c_.gamma; }
  double xi() const { return c_.xi; }
  double eta_x() const { return c_.eta_x; }
  double eta_y() const { return c_.eta_y; }
  double eta_z() const { return c_.eta_z; }
  int n_qubits() const { return n_; }
  double j() const { return 0.5 * n_; }
  const Couplings& couplings() const { return c_; }

  ModelParams with_gamma(double g) const {
    Couplings c = c_;
    c.gamma = g;
    return ModelParams(c, n_);
  }
  ModelParams with_n_qubits(int n) const { return ModelParams(c_, n); }

  // Returns a copy with one named field replaced; names follow the CSV columns.
  ModelParams with_field(std::string_view name, double value) const {
    Couplings c = c_;
    int n = n_;
    if (name == "omega") c.omega = value;
    else if (name == "omega0") c.omega0 = value;
    else if (name == "gamma") c.gamma = value;
    else if (name == "xi") c.xi = value;
    else if (name == "eta_x") c.eta_x = value;
    else if (name == "eta_y") c.eta_y = value;
    else if (name == "eta_z") c.eta_z = value;
    else if (name == "n_qubits") n = static_cast<int>(std::lround(value));
    else throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
    return ModelParams(c, n);
  }

 private:
  Couplings c_;
  int n_;
};

inline bool is_field_name(std::string_view name) {
  return name == "omega" || name == "omega0" || name == "gamma" || name == "xi" ||
         name == "eta_x" || name == "eta_y" || name == "eta_z" || name == "n_qubits";
}

// Critical coupling that can never be reached (gc_minus at xi = 1).
inline constexpr double unreachable = std::numeric_limits<double>::infinity();
inline bool is_unreachable(double g) { return std::isinf(g) && g > 0.0; }

struct DerivedScales {
  double d_eta_zx = 0.0;
  double d_eta_zy = 0.0;
  double w_zx_sq = 1.0;  // may be negative; w_zx is then NaN
  double w_zy_sq = 1.0;
  double w_zx = 1.0;
  double w_zy = 1.0;
  double gc_plus = 0.0;
  double gc_minus = 0.0;
  double gc_x = 0.0;
  double gc_y = 0.0;
  double f_x = 0.0;
  double g_y = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;
  double mu_x = 1.0;  // unclamped
  double alpha = 0.0;
  double beta = 0.0;
  double k = 1.0;
  bool zx_real = true;
  bool zy_real = true;
  bool superradiant = false;
};

namespace detail {

inline double mu_inverse_scaled_form(const DerivedScales& s) {
  return s.w_zx_sq * (s.f_x - 1.0) + 1.0;
}

inline double mu_inverse_plus_form(const DerivedScales& s, double omega0) {
  return s.f_plus + s.d_eta_zx / omega0;
}

}  // namespace detail

inline DerivedScales derive_scales(const ModelParams& p) {
  DerivedScales s;
  const double w0 = p.omega0();
  const double root = std::sqrt(p.omega() * w0);
  const double g2 = p.gamma() * p.gamma();

  s.d_eta_zx = p.eta_z() - p.eta_x();
  s.d_eta_zy = p.eta_z() - p.eta_y();
  s.w_zx_sq = 1.0 - s.d_eta_zx / w0;
  s.w_zy_sq = 1.0 - s.d_eta_zy / w0;
  s.zx_real = s.w_zx_sq >= 0.0;
  s.zy_real = s.w_zy_sq >= 0.0;
  s.w_zx = s.zx_real ? std::sqrt(s.w_zx_sq) : std::numeric_limits<double>::quiet_NaN();
  s.w_zy = s.zy_real ? std::sqrt(s.w_zy_sq) : std::numeric_limits<double>::quiet_NaN();

  s.gc_plus = root / (1.0 + p.xi());
  s.gc_minus = p.xi() == 1.0 ? unreachable : root / (1.0 - p.xi());
  s.gc_x = s.gc_plus * s.w_zx;
  if (is_unreachable(s.gc_minus))
    s.gc_y = s.zy_real && s.w_zy > 0.0 ? unreachable : std::numeric_limits<double>::quiet_NaN();
  else
    s.gc_y = s.gc_minus * s.w_zy;

  s.f_plus = g2 * (1.0 + p.xi()) * (1.0 + p.xi()) / (p.omega() * w0);
  s.f_minus = g2 * (1.0 - p.xi()) * (1.0 - p.xi()) / (p.omega() * w0);
  // f_x = (gamma/gc_x)^2 written through gc_x^2 = gc_plus^2 * w_zx^2 so it stays real when w_zx^2 < 0
  if (s.w_zx_sq != 0.0)
    s.f_x = s.f_plus / s.w_zx_sq;
  else
    s.f_x = s.f_plus > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  if (s.f_minus == 0.0)
    s.g_y = 0.0;
  else if (s.w_zy_sq != 0.0)
    s.g_y = s.f_minus / s.w_zy_sq;
  else
    s.g_y = std::numeric_limits<double>::infinity();

  const double inv_plus = detail::mu_inverse_plus_form(s, w0);
  double inv = inv_plus;
  if (s.w_zx_sq != 0.0 && std::isfinite(s.f_x)) {
    inv = detail::mu_inverse_scaled_form(s);
    assert(std::abs(inv - inv_plus) <= 1e-9 * std::max(1.0, std::abs(inv_plus)));
  }
  s.mu_x = 1.0 / inv;

  s.superradiant = s.zx_real && p.gamma() > s.gc_x;
  if (s.superradiant) {
    const double mu = s.mu_x;
    s.alpha = p.gamma() * (1.0 + p.xi()) / (2.0 * p.omega()) * std::sqrt(std::max(0.0, 1.0 - mu * mu));
    s.beta = std::sqrt(std::max(0.0, 0.5 * (1.0 - mu)));
    s.k = 1.0 - s.beta * s.beta;
  }
  return s;
}

struct OrderParameters {
  double alpha = 0.0;
  double beta = 0.0;
  double mu_x = 1.0;      // clamped to 1 when no displacement
  double mu_x_raw = 1.0;  // value of the closed form
  bool valid = true;
};

inline OrderParameters order_parameters(const ModelParams& p) {
  const DerivedScales s = derive_scales(p);
  OrderParameters o;
  o.mu_x_raw = s.mu_x;
  if (!s.superradiant) return o;
  o.valid = s.mu_x > 0.0 && s.mu_x <= 1.0;
  o.alpha = s.alpha;
  o.beta = s.beta;
  o.mu_x = s.mu_x;
  return o;
}

// Mean-field energy per 2j as a function of the two displacements (k = 1 - beta^2).
inline double mean_field_energy(const ModelParams& p, double alpha, double beta) {
  const double b2 = beta * beta;
  const double k = 1.0 - b2;
  return p.omega() * alpha * alpha + p.omega0() * b2 - 0.5 * p.omega0() -
         2.0 * p.gamma() * std::sqrt(std::max(0.0, k)) * alpha * beta * (1.0 + p.xi()) +
         p.eta_x() * k * b2 + p.eta_z() * (b2 - 0.5) * (b2 - 0.5);
}

// Left-hand sides of the two linear-term elimination conditions.
struct StationarityResidual {
  double photon = 0.0;
  double spin = 0.0;
};

inline StationarityResidual stationarity_residual(const ModelParams& p, double alpha, double beta) {
  const double b2 = beta * beta;
  const double k = 1.0 - b2;
  const double sk = std::sqrt(k);
  StationarityResidual r;
  r.photon = p.omega() * alpha - p.gamma() * sk * beta * (1.0 + p.xi());
  r.spin = -p.omega0() * beta + p.gamma() * alpha * ((k - b2) / sk) * (1.0 + p.xi()) -
           p.eta_x() * k * beta * (1.0 - b2 / k) - p.eta_z() * (2.0 * b2 - 1.0) * beta;
  return r;
}

enum class PhaseLabel { NormalDeformed, SuperradiantX, DeformedSuppressed, Invalid };

inline const char* to_string(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::NormalDeformed: return "normal";
    case PhaseLabel::SuperradiantX: return "superradiant_x";
    case PhaseLabel::DeformedSuppressed: return "deformed_suppressed";
    case PhaseLabel::Invalid: return "invalid";
  }
  return "invalid";
}

inline PhaseLabel classify_phase(const ModelParams& p) {
  const DerivedScales s = derive_scales(p);
  if (p.xi() == 1.0 && s.d_eta_zy >= p.omega0()) return PhaseLabel::DeformedSuppressed;
  if (!s.zx_real || (!s.zy_real && p.xi() < 1.0)) return PhaseLabel::Invalid;
  if (p.gamma() > s.gc_x) return PhaseLabel::SuperradiantX;
  return PhaseLabel::NormalDeformed;
}

}  // namespace dicke
