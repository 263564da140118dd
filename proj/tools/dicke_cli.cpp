#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dicke/config.hpp"
#include "dicke/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

struct Flags {
  std::string config;
  std::string preset;
  std::string out;
  int threads = 0;
  double tol = 0.0;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI run configuration");
  sub->add_option("--preset", f.preset, "preset: fig1 fig1a fig1b fig1c fig2 fig3 fig4 none");
  sub->add_option("--out", f.out, "output CSV path");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_option("--tol", f.tol, "eigenvalue tolerance for cutoff convergence");
}

void report_config_error(const dicke::ConfigError& e, const std::string& file, const std::string& text) {
  int line = e.line();
  const std::string& field = e.field();
  if (line == 0 && !text.empty()) {
    const auto dot = field.find('.');
    line = dot == std::string::npos ? dicke::detail::locate(text, field, "")
                                    : dicke::detail::locate(text, field.substr(0, dot), field.substr(dot + 1));
  }
  std::string where = file.empty() ? std::string("config") : file;
  if (line > 0) where += ":" + std::to_string(line);
  if (!field.empty()) where += ": " + field;
  std::cerr << "error: " << where << ": " << e.what() << '\n';
}

int execute(dicke::RunMode mode, const Flags& f) {
  std::string text;
  try {
    dicke::SweepConfig cfg;
    std::optional<std::string> preset_key;
    if (!f.config.empty()) {
      text = dicke::read_text_file(f.config);
      dicke::parse_config_text(text, cfg, &preset_key);
    }
    const std::string preset = !f.preset.empty() ? f.preset : preset_key.value_or("none");
    dicke::apply_preset(cfg, preset);
    if (!f.out.empty()) cfg.output_path = f.out;
    if (f.threads != 0) cfg.threads = f.threads;
    if (f.tol != 0.0) cfg.oracle.tol = f.tol;
    dicke::validate(cfg);

    const dicke::RunOutcome r = dicke::run(mode, cfg);
    for (const auto& p : r.files) std::cout << p.string() << '\n';
    if (!r.all_converged) {
      std::cerr << "warning: some exact spectra did not converge within the dimension limit\n";
      return kExitNotConverged;
    }
    return 0;
  } catch (const dicke::ConfigError& e) {
    report_config_error(e, f.config, text);
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polariton modes, energy surfaces, geometric phases and exact spectra of the anisotropic Dicke model"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<dicke::RunMode> chosen;
  const std::pair<const char*, const char*> subs[] = {
      {"modes", "lower and upper polariton branches along a sweep"},
      {"surface", "classical energy surface on a (u, v) grid plus its extrema"},
      {"berry", "geometric phases along a gamma sweep for a d_eta_zx family"},
      {"exact", "converged finite-N spectra and ground-state observables"},
      {"report", "finite-N convergence towards the thermodynamic-limit modes"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(sub, flags);
    sub->callback([&chosen, n = std::string(name)] { chosen = dicke::parse_run_mode(n); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return execute(*chosen, flags);
}
