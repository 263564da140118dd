#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/hp_modes.hpp"
#include "dicke/lanczos.hpp"
#include "dicke/params.hpp"

namespace dicke {

enum class Parity { Even, Odd, Both };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Both: return "both";
  }
  return "both";
}

struct BasisSpec {
  int n_qubits = 2;
  int n_max = 16;  // boson cutoff, Fock states 0..n_max
  Parity parity = Parity::Both;
};

// Kets |n> (x) |j, m> with m = mm - j, mm = 0..N; parity of a ket is (n + mm) mod 2.
class Basis {
 public:
  explicit Basis(const BasisSpec& spec) : spec_(spec) {
    if (spec.n_qubits < 1) throw std::invalid_argument("n_qubits must be positive");
    if (spec.n_max < 1) throw std::invalid_argument("boson cutoff must be at least 1");
    const int dm = spec.n_qubits + 1;
    index_.assign(static_cast<std::size_t>(spec.n_max + 1) * dm, -1);
    for (int n = 0; n <= spec.n_max; ++n)
      for (int mm = 0; mm < dm; ++mm) {
        const int par = (n + mm) % 2;
        if (spec.parity == Parity::Even && par != 0) continue;
        if (spec.parity == Parity::Odd && par != 1) continue;
        index_[static_cast<std::size_t>(n) * dm + mm] = static_cast<long>(n_.size());
        n_.push_back(n);
        mm_.push_back(mm);
      }
  }

  std::size_t size() const { return n_.size(); }
  int n(std::size_t i) const { return n_[i]; }
  int mm(std::size_t i) const { return mm_[i]; }
  double m(std::size_t i) const { return mm_[i] - 0.5 * spec_.n_qubits; }
  double j() const { return 0.5 * spec_.n_qubits; }
  const BasisSpec& spec() const { return spec_; }

  // -1 when the ket is outside the truncated space or the sector
  long index(int n, int mm) const {
    if (n < 0 || n > spec_.n_max || mm < 0 || mm > spec_.n_qubits) return -1;
    return index_[static_cast<std::size_t>(n) * (spec_.n_qubits + 1) + mm];
  }

 private:
  BasisSpec spec_;
  std::vector<int> n_, mm_;
  std::vector<long> index_;
};

inline std::size_t basis_dimension(const BasisSpec& spec) {
  const std::size_t full = static_cast<std::size_t>(spec.n_max + 1) * (spec.n_qubits + 1);
  if (spec.parity == Parity::Both) return full;
  return Basis(spec).size();
}

// <j, m+1| J+ |j, m>
inline double ladder_up(double j, double m) { return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m + 1.0))); }

using SparseMatrix = Eigen::SparseMatrix<double>;

struct HamiltonianOptions {
  std::size_t max_dimension = 200000;
};

// Coupling constants entering the finite-N matrix; unlike ModelParams no sign restrictions apply.
struct MatrixCouplings {
  double omega, omega0, gamma, xi, eta_x, eta_y, eta_z;
};

inline MatrixCouplings matrix_couplings(const ModelParams& p) {
  return {p.omega(), p.omega0(), p.gamma(), p.xi(), p.eta_x(), p.eta_y(), p.eta_z()};
}

inline SparseMatrix assemble_hamiltonian(const MatrixCouplings& c, const Basis& basis,
                                         const HamiltonianOptions& opt = {}) {
  if (basis.size() > opt.max_dimension)
    throw std::length_error("basis dimension " + std::to_string(basis.size()) + " exceeds the limit " +
                            std::to_string(opt.max_dimension));
  const double N = basis.spec().n_qubits;
  const double j = basis.j();
  const double g = c.gamma / std::sqrt(N);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(basis.size() * 7);
  auto add_pair = [&](std::size_t r, long col, double v) {
    if (col < 0 || v == 0.0) return;
    t.emplace_back(static_cast<int>(r), static_cast<int>(col), v);
    t.emplace_back(static_cast<int>(col), static_cast<int>(r), v);
  };
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const int n = basis.n(r), mm = basis.mm(r);
    const double m = basis.m(r);
    const double casimir = j * (j + 1.0) - m * m;
    const double diag = c.omega * n + c.omega0 * m + c.eta_z / N * m * m + (c.eta_x + c.eta_y) * casimir / (2.0 * N);
    t.emplace_back(static_cast<int>(r), static_cast<int>(r), diag);
    const double up = ladder_up(j, m);
    // a J+ and its conjugate
    if (n > 0) add_pair(r, basis.index(n - 1, mm + 1), g * std::sqrt(static_cast<double>(n)) * up);
    // xi a^dagger J+ and its conjugate
    add_pair(r, basis.index(n + 1, mm + 1), g * c.xi * std::sqrt(n + 1.0) * up);
    // (eta_x Jx^2 + eta_y Jy^2)/N between m and m + 2
    add_pair(r, basis.index(n, mm + 2), (c.eta_x - c.eta_y) / (4.0 * N) * up * ladder_up(j, m + 1.0));
  }
  SparseMatrix H(static_cast<int>(basis.size()), static_cast<int>(basis.size()));
  H.setFromTriplets(t.begin(), t.end());
  H.makeCompressed();
  return H;
}

inline SparseMatrix build_hamiltonian(const ModelParams& p, const BasisSpec& spec, const HamiltonianOptions& opt = {}) {
  return assemble_hamiltonian(matrix_couplings(p), Basis(spec), opt);
}

struct GroundObservables {
  double n = 0.0;
  double jz = 0.0;
  double jx2 = 0.0;
  double jy2 = 0.0;
};

inline GroundObservables observables(const Basis& basis, const Eigen::Ref<const Eigen::VectorXd>& psi) {
  GroundObservables o;
  const double j = basis.j();
  double off = 0.0;  // <psi| (J+^2 + J-^2) |psi> / 4
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const double w = psi(r) * psi(r);
    const double m = basis.m(r);
    o.n += w * basis.n(r);
    o.jz += w * m;
    const double half_casimir = 0.5 * (j * (j + 1.0) - m * m);
    o.jx2 += w * half_casimir;
    o.jy2 += w * half_casimir;
    const long c = basis.index(basis.n(r), basis.mm(r) + 2);
    if (c >= 0) off += 2.0 * psi(r) * psi(c) * ladder_up(j, m) * ladder_up(j, m + 1.0) / 4.0;
  }
  o.jx2 += off;
  o.jy2 -= off;
  return o;
}

struct EigenSolveOptions {
  std::size_t dense_max_dimension = 400;
  double lanczos_tol = 1e-10;
};

struct SectorSolution {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  bool converged = true;
};

// Lowest k eigenpairs of a symmetric sparse matrix: full dense solve for small blocks, Lanczos above.
inline SectorSolution sector_eigenpairs(const SparseMatrix& H, int k, const EigenSolveOptions& opt = {}) {
  const Eigen::Index dim = H.rows();
  const Eigen::Index kk = std::min<Eigen::Index>(k, dim);
  SectorSolution s;
  if (static_cast<std::size_t>(dim) <= opt.dense_max_dimension) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H)};
    s.values = es.eigenvalues().head(kk);
    s.vectors = es.eigenvectors().leftCols(kk);
    return s;
  }
  LanczosOptions lo;
  lo.k = static_cast<int>(kk);
  lo.tol = opt.lanczos_tol;
  auto apply = [&H](const auto& x, Eigen::VectorXd& y) { y.noalias() = H * x; };
  const LanczosResult r = lowest_eigenpairs(apply, dim, lo);
  s.values = r.values;
  s.vectors = r.vectors;
  s.converged = r.converged;
  return s;
}

struct SectorSpectrum {
  Parity parity = Parity::Even;
  std::vector<double> eigenvalues;  // ascending
  GroundObservables ground;         // of the lowest state in this sector
};

struct ExactSpectrum {
  int n_qubits = 0;
  int cutoff_used = 0;
  bool converged = false;
  double convergence_residual = std::numeric_limits<double>::infinity();
  std::vector<SectorSpectrum> sectors;
  Parity ground_sector = Parity::Even;
  GroundObservables ground_observables;
  bool cutoff_adequate = false;  // <n> below a quarter of the cutoff

  const SectorSpectrum& sector(Parity p) const {
    for (const auto& s : sectors)
      if (s.parity == p) return s;
    throw std::out_of_range("sector not computed");
  }
  double ground_energy() const { return sector(ground_sector).eigenvalues.front(); }
};

struct OracleOptions {
  int k_levels = 4;
  double tol = 1e-8;  // absolute shift of each tracked eigenvalue between cutoff doublings
  std::size_t max_dimension = 200000;
  int initial_cutoff = 0;  // 0 seeds from the mean-field photon number
  std::vector<Parity> sectors = {Parity::Even, Parity::Odd};
  EigenSolveOptions solver;
};

inline int initial_cutoff(const ModelParams& p) {
  const DerivedScales d = derive_scales(p);
  return std::max(16, static_cast<int>(std::ceil(8.0 * p.j() * d.alpha * d.alpha)));
}

inline ExactSpectrum spectrum_at_cutoff(const ModelParams& p, int n_max, const OracleOptions& opt) {
  ExactSpectrum out;
  out.n_qubits = p.n_qubits();
  out.cutoff_used = n_max;
  HamiltonianOptions ho;
  ho.max_dimension = opt.max_dimension;
  double best = std::numeric_limits<double>::infinity();
  bool solver_ok = true;
  for (Parity par : opt.sectors) {
    const Basis basis(BasisSpec{p.n_qubits(), n_max, par});
    const SparseMatrix H = assemble_hamiltonian(matrix_couplings(p), basis, ho);
    const SectorSolution sol = sector_eigenpairs(H, opt.k_levels, opt.solver);
    solver_ok = solver_ok && sol.converged;
    SectorSpectrum s;
    s.parity = par;
    s.eigenvalues.assign(sol.values.data(), sol.values.data() + sol.values.size());
    s.ground = observables(basis, sol.vectors.col(0));
    if (s.eigenvalues.front() < best) {
      best = s.eigenvalues.front();
      out.ground_sector = par;
      out.ground_observables = s.ground;
    }
    out.sectors.push_back(std::move(s));
  }
  out.converged = solver_ok;
  out.cutoff_adequate = out.ground_observables.n < 0.25 * n_max;
  return out;
}

inline std::size_t cutoff_dimension(const ModelParams& p, int n_max, const std::vector<Parity>& sectors) {
  std::size_t worst = 0;
  for (Parity par : sectors) worst = std::max(worst, basis_dimension(BasisSpec{p.n_qubits(), n_max, par}));
  return worst;
}

// Doubles the boson cutoff until the tracked eigenvalues move by less than tol.
inline ExactSpectrum converged_spectrum(const ModelParams& p, const OracleOptions& opt = {}) {
  if (opt.k_levels < 2) throw std::invalid_argument("k_levels must be at least 2");
  int n_max = opt.initial_cutoff > 0 ? opt.initial_cutoff : initial_cutoff(p);
  if (cutoff_dimension(p, n_max, opt.sectors) > opt.max_dimension)
    throw std::length_error("initial cutoff already exceeds the dimension limit");
  ExactSpectrum prev = spectrum_at_cutoff(p, n_max, opt);
  for (;;) {
    const int next = 2 * n_max;
    if (cutoff_dimension(p, next, opt.sectors) > opt.max_dimension) {
      prev.converged = false;
      return prev;
    }
    ExactSpectrum cur = spectrum_at_cutoff(p, next, opt);
    double shift = 0.0;
    for (std::size_t s = 0; s < cur.sectors.size(); ++s) {
      const auto& a = prev.sectors[s].eigenvalues;
      const auto& b = cur.sectors[s].eigenvalues;
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) shift = std::max(shift, std::abs(a[i] - b[i]));
    }
    cur.convergence_residual = shift;
    const bool solver_ok = cur.converged;
    if (shift < opt.tol) {
      cur.converged = solver_ok;
      return cur;
    }
    cur.converged = false;
    prev = std::move(cur);
    n_max = next;
  }
}

struct ConvergenceRow {
  int n_qubits = 0;
  int cutoff = 0;
  bool converged = false;
  PhaseLabel phase = PhaseLabel::NormalDeformed;
  double e0_exact_per_2j = 0.0, e0_hp = 0.0, e0_rel_err = 0.0;
  double gap_exact = 0.0, eps_minus_hp = 0.0, gap_rel_err = 0.0;
  double amp_gap_exact = std::numeric_limits<double>::quiet_NaN(), eps_plus_hp = 0.0,
         amp_rel_err = std::numeric_limits<double>::quiet_NaN();
  double n_per_2j = 0.0, alpha_sq = 0.0, n_abs_err = 0.0;
  double m_per_2j = 0.0, beta_sq = 0.0, m_abs_err = 0.0;
  double doublet_splitting = 0.0;
  bool cutoff_adequate = false;
};

namespace detail {

inline double relative_error(double exact, double reference, double fallback_scale) {
  const double den = std::abs(reference) > 1e-12 ? std::abs(reference) : fallback_scale;
  return std::abs(exact - reference) / den;
}

// Position of the one-quantum amplitude level among harmonic levels n1 eps_- + n2 eps_+ of the given
// excitation parity (-1: any), counting only levels strictly below it.
inline int amplitude_level_rank(double em, double ep, int parity) {
  int rank = 0;
  for (int n2 = 0; n2 <= 1; ++n2)
    for (int n1 = 0; n1 < 64 && n1 * em + n2 * ep < ep - 1e-9; ++n1) {
      if (parity >= 0 && (n1 + n2) % 2 != parity) continue;
      ++rank;
    }
  return rank;
}

}  // namespace detail

inline ConvergenceRow convergence_row(const ModelParams& p, const ExactSpectrum& ex) {
  ConvergenceRow r;
  const DerivedScales d = derive_scales(p);
  const ModeSpectrum modes = mode_branches(p);
  const double two_j = 2.0 * p.j();
  r.n_qubits = p.n_qubits();
  r.cutoff = ex.cutoff_used;
  r.converged = ex.converged;
  r.phase = modes.phase;
  r.cutoff_adequate = ex.cutoff_adequate;
  r.e0_exact_per_2j = ex.ground_energy() / two_j;
  r.e0_hp = ground_state_energy(p).direct;
  r.e0_rel_err = detail::relative_error(r.e0_exact_per_2j, r.e0_hp, p.omega0());
  r.eps_minus_hp = modes.eps_minus;
  r.eps_plus_hp = modes.eps_plus;

  const auto& ground = ex.sector(ex.ground_sector);
  const Parity other_parity = ex.ground_sector == Parity::Even ? Parity::Odd : Parity::Even;
  bool have_other = false;
  for (const auto& s : ex.sectors) have_other = have_other || s.parity == other_parity;
  const double e0 = ground.eigenvalues.front();

  if (d.superradiant) {
    r.gap_exact = ground.eigenvalues.at(1) - e0;
    const int rank = detail::amplitude_level_rank(modes.eps_minus, modes.eps_plus, -1);
    if (modes.eps_minus > 1e-9 && static_cast<std::size_t>(rank + 1) < ground.eigenvalues.size())
      r.amp_gap_exact = ground.eigenvalues[rank + 1] - e0;
  } else if (have_other) {
    const auto& other = ex.sector(other_parity);
    r.gap_exact = other.eigenvalues.front() - e0;
    const int rank = detail::amplitude_level_rank(modes.eps_minus, modes.eps_plus, 1);
    if (static_cast<std::size_t>(rank) < other.eigenvalues.size()) r.amp_gap_exact = other.eigenvalues[rank] - e0;
  }
  r.gap_rel_err = detail::relative_error(r.gap_exact, r.eps_minus_hp, p.omega());
  if (std::isfinite(r.amp_gap_exact)) r.amp_rel_err = detail::relative_error(r.amp_gap_exact, r.eps_plus_hp, p.omega());

  r.n_per_2j = ex.ground_observables.n / two_j;
  r.alpha_sq = d.alpha * d.alpha;
  r.n_abs_err = std::abs(r.n_per_2j - r.alpha_sq);
  r.m_per_2j = (ex.ground_observables.jz + p.j()) / two_j;
  r.beta_sq = d.beta * d.beta;
  r.m_abs_err = std::abs(r.m_per_2j - r.beta_sq);
  if (have_other) r.doublet_splitting = std::abs(ex.sector(Parity::Even).eigenvalues.front() -
                                                 ex.sector(Parity::Odd).eigenvalues.front());
  return r;
}

inline std::vector<ConvergenceRow> hp_convergence_report(const ModelParams& p, const std::vector<int>& n_list,
                                                         const OracleOptions& opt = {}) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw std::invalid_argument("N list must be ascending");
  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    const ModelParams q = p.with_n_qubits(n);
    rows.push_back(convergence_row(q, converged_spectrum(q, opt)));
  }
  return rows;
}

}  // namespace dicke
