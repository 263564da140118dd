#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/berry.hpp"
#include "dicke/config.hpp"
#include "dicke/exact_oracle.hpp"
#include "dicke/hp_modes.hpp"
#include "dicke/io.hpp"
#include "dicke/surface.hpp"

namespace dicke {

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  bool all_converged = true;
};

// Grid points in output order: slice outer, axis inner.
inline std::vector<ModelParams> sweep_points(const SweepConfig& cfg) {
  const ModelParams base = cfg.fixed();
  std::vector<double> slices = cfg.xi_slices;
  if (slices.empty() || (cfg.axis && cfg.axis->name == "xi")) slices = {base.xi()};
  std::vector<ModelParams> out;
  for (double xi : slices) {
    const ModelParams b = base.with_field("xi", xi);
    if (!cfg.axis) {
      out.push_back(b);
      continue;
    }
    for (double x : cfg.axis->values()) out.push_back(b.with_field(cfg.axis->name, x));
  }
  return out;
}

inline std::string modes_csv(const SweepConfig& cfg) {
  const std::vector<ModelParams> pts = sweep_points(cfg);
  std::vector<std::string> rows(pts.size());
  io::parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    const ModelParams& m = pts[i];
    const ModeSpectrum s = mode_branches(m);
    rows[i] = io::csv_row(m.gamma(), m.xi(), m.eta_x(), m.eta_y(), m.eta_z(), m.omega(), m.omega0(),
                          to_string(s.phase), s.eps_minus, s.eps_plus, s.valid_minus, s.valid_plus,
                          ground_state_energy(m).direct);
  });
  std::string out = "gamma,xi,eta_x,eta_y,eta_z,omega,omega0,phase,eps_minus,eps_plus,valid_minus,valid_plus,e0\n";
  for (const auto& r : rows) out += r;
  return out;
}

inline RunOutcome run_modes_sweep(const SweepConfig& cfg) {
  const auto path = resolve_output(cfg, RunMode::Modes);
  io::write_atomic(path, modes_csv(cfg));
  return {{path}, true};
}

struct SurfaceOutput {
  std::string grid;
  std::string extrema;
};

inline SurfaceOutput surface_csv(const SweepConfig& cfg) {
  const ModelParams m = cfg.fixed();
  const GridSpec& g = cfg.grid;
  auto coord = [](double lo, double hi, int n, int i) { return i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1); };
  std::vector<std::string> rows(g.u_count);
  io::parallel_for(static_cast<std::size_t>(g.u_count), cfg.threads, [&](std::size_t iu) {
    const double u = coord(g.u_min, g.u_max, g.u_count, static_cast<int>(iu));
    std::string block;
    for (int iv = 0; iv < g.v_count; ++iv) {
      const double v = coord(g.v_min, g.v_max, g.v_count, iv);
      block += io::csv_row(u, v, surface_energy(m, u, v));
    }
    rows[iu] = std::move(block);
  });
  SurfaceOutput out;
  out.grid = "u,v,energy\n";
  for (const auto& r : rows) out.grid += r;

  SearchConfig sc;
  sc.seeds_per_axis = g.seeds_per_axis;
  const ExtremaResult ex = find_extrema(m, sc);
  out.extrema = "u,v,energy,class,lambda1,lambda2\n";
  for (const auto& p : ex.points)
    out.extrema += io::csv_row(p.u, p.v, p.energy, to_string(p.kind), p.hessian_eigenvalues[0], p.hessian_eigenvalues[1]);
  if (ex.family)
    out.extrema += io::csv_row(ex.family->mean_radius, 0.0, ex.family->energy, "ring", 0.0, 0.0);
  if (ex.pole_energy)
    out.extrema += io::csv_row(std::numbers::pi, 0.0, *ex.pole_energy, "pole", std::nan(""), std::nan(""));
  return out;
}

inline RunOutcome run_surface_grid(const SweepConfig& cfg) {
  const auto path = resolve_output(cfg, RunMode::Surface);
  const auto side = sibling(path, ".extrema.csv");
  const SurfaceOutput s = surface_csv(cfg);
  io::write_atomic(side, s.extrema);
  io::write_atomic(path, s.grid);
  return {{path, side}, true};
}

// Family curves one after another, each ordered by gamma. eta_x realizes eta_z - d_eta_zx.
inline std::string berry_csv(const SweepConfig& cfg) {
  if (cfg.axis && cfg.axis->name != "gamma") throw ConfigError("berry sweeps need the gamma axis", 0, "sweep.axis");
  const ModelParams base = cfg.fixed();
  const std::vector<double> gammas = cfg.axis ? cfg.axis->values() : std::vector<double>{base.gamma()};
  std::vector<ModelParams> pts;
  std::vector<double> fam;
  for (double d : cfg.d_eta_zx_family)
    for (double g : gammas) {
      pts.push_back(base.with_field("eta_x", base.eta_z() - d).with_gamma(g));
      fam.push_back(d);
    }
  std::vector<std::string> rows(pts.size());
  io::parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    const GeometricPhases ph = geometric_phases(pts[i]);
    rows[i] = io::csv_row(pts[i].gamma(), fam[i], ground_state_energy(pts[i]).direct, ph.gamma_n_per_j,
                          ph.gamma_m_per_j, ph.gamma_n_definitional_per_j, ph.gamma_m_definitional_per_j);
  });
  std::string out = "gamma,d_eta_zx,e0,gamma_n_per_j,gamma_m_per_j,gamma_n_definitional,gamma_m_definitional\n";
  for (const auto& r : rows) out += r;
  return out;
}

inline RunOutcome run_berry_sweep(const SweepConfig& cfg) {
  const auto path = resolve_output(cfg, RunMode::Berry);
  io::write_atomic(path, berry_csv(cfg));
  return {{path}, true};
}

inline std::vector<ExactSpectrum> exact_spectra(const SweepConfig& cfg) {
  const ModelParams base = cfg.fixed();
  std::vector<ExactSpectrum> out(cfg.n_list.size());
  io::parallel_for(cfg.n_list.size(), cfg.threads,
                   [&](std::size_t i) { out[i] = converged_spectrum(base.with_n_qubits(cfg.n_list[i]), cfg.oracle); });
  return out;
}

inline RunOutcome run_exact(const SweepConfig& cfg) {
  const ModelParams base = cfg.fixed();
  const auto spectra = exact_spectra(cfg);
  std::string spec = "N,n_max,sector,level,energy\n";
  std::string obs =
      "N,gamma,xi,eta_x,eta_y,eta_z,omega,omega0,n_max,converged,residual,ground_sector,jx2_exp,jy2_exp,n_exp,jz_exp\n";
  RunOutcome r;
  for (const auto& ex : spectra) {
    for (const auto& s : ex.sectors)
      for (std::size_t l = 0; l < s.eigenvalues.size(); ++l)
        spec += io::csv_row(ex.n_qubits, ex.cutoff_used, to_string(s.parity), static_cast<int>(l), s.eigenvalues[l]);
    const auto& o = ex.ground_observables;
    obs += io::csv_row(ex.n_qubits, base.gamma(), base.xi(), base.eta_x(), base.eta_y(), base.eta_z(), base.omega(),
                       base.omega0(), ex.cutoff_used, ex.converged, ex.convergence_residual,
                       to_string(ex.ground_sector), o.jx2, o.jy2, o.n, o.jz);
    r.all_converged = r.all_converged && ex.converged;
  }
  const auto path = resolve_output(cfg, RunMode::Exact);
  const auto side = sibling(path, ".observables.csv");
  io::write_atomic(side, obs);
  io::write_atomic(path, spec);
  r.files = {path, side};
  return r;
}

struct ReportOutput {
  std::string csv;
  std::string json;
  bool all_converged = true;
};

inline ReportOutput oracle_report(const SweepConfig& cfg) {
  const ModelParams base = cfg.fixed();
  const auto spectra = exact_spectra(cfg);
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < spectra.size(); ++i)
    rows.push_back(convergence_row(base.with_n_qubits(cfg.n_list[i]), spectra[i]));

  ReportOutput out;
  out.csv =
      "N,n_max,converged,phase,e0_exact_per_2j,e0_hp,e0_rel_err,gap_exact,eps_minus_hp,gap_rel_err,amp_gap_exact,"
      "eps_plus_hp,amp_rel_err,n_per_2j,alpha_sq,n_abs_err,m_per_2j,beta_sq,m_abs_err,doublet_splitting,"
      "cutoff_adequate\n";
  for (const auto& r : rows)
    out.csv += io::csv_row(r.n_qubits, r.cutoff, r.converged, to_string(r.phase), r.e0_exact_per_2j, r.e0_hp,
                           r.e0_rel_err, r.gap_exact, r.eps_minus_hp, r.gap_rel_err, r.amp_gap_exact, r.eps_plus_hp,
                           r.amp_rel_err, r.n_per_2j, r.alpha_sq, r.n_abs_err, r.m_per_2j, r.beta_sq, r.m_abs_err,
                           r.doublet_splitting, r.cutoff_adequate);

  using nlohmann::ordered_json;
  const bool broken = derive_scales(base).superradiant;
  ordered_json j;
  j["params"] = {{"omega", base.omega()}, {"omega0", base.omega0()}, {"gamma", base.gamma()}, {"xi", base.xi()},
                 {"eta_x", base.eta_x()}, {"eta_y", base.eta_y()},   {"eta_z", base.eta_z()}};
  j["tolerances"] = {{"relative", cfg.report.relative}, {"doublet", cfg.report.doublet}, {"cutoff", cfg.oracle.tol}};
  ordered_json arr = ordered_json::array();
  bool e0_dec = true, gap_dec = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ordered_json row = {{"N", r.n_qubits},
                        {"converged", r.converged},
                        {"e0_rel_err", r.e0_rel_err},
                        {"e0_pass", r.e0_rel_err < cfg.report.relative},
                        {"gap_rel_err", r.gap_rel_err},
                        {"gap_pass", r.gap_rel_err < cfg.report.relative},
                        {"doublet_splitting", r.doublet_splitting}};
    row["doublet_pass"] = broken ? ordered_json(r.doublet_splitting < cfg.report.doublet) : ordered_json(nullptr);
    arr.push_back(row);
    if (i > 0) {
      e0_dec = e0_dec && r.e0_rel_err < rows[i - 1].e0_rel_err;
      gap_dec = gap_dec && r.gap_rel_err < rows[i - 1].gap_rel_err;
    }
    out.all_converged = out.all_converged && r.converged;
  }
  j["rows"] = arr;
  j["e0_error_decreasing"] = e0_dec;
  j["gap_error_decreasing"] = gap_dec;
  j["all_converged"] = out.all_converged;
  out.json = j.dump(2) + "\n";
  return out;
}

inline RunOutcome run_oracle_report(const SweepConfig& cfg) {
  const auto path = resolve_output(cfg, RunMode::Report);
  const auto side = sibling(path, ".json");
  const ReportOutput rep = oracle_report(cfg);
  io::write_atomic(side, rep.json);
  io::write_atomic(path, rep.csv);
  return {{path, side}, rep.all_converged};
}

inline RunOutcome run(RunMode mode, const SweepConfig& cfg) {
  switch (mode) {
    case RunMode::Modes: return run_modes_sweep(cfg);
    case RunMode::Surface: return run_surface_grid(cfg);
    case RunMode::Berry: return run_berry_sweep(cfg);
    case RunMode::Exact: return run_exact(cfg);
    case RunMode::Report: return run_oracle_report(cfg);
  }
  return {};
}

}  // namespace dicke
