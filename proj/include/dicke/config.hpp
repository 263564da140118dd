#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dicke/exact_oracle.hpp"
#include "dicke/params.hpp"

namespace dicke {

// Carries the offending location so the CLI can report "file:line: [section] key: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0, std::string field = {})
      : std::runtime_error(msg), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class RunMode { Modes, Surface, Berry, Exact, Report };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Modes: return "modes";
    case RunMode::Surface: return "surface";
    case RunMode::Berry: return "berry";
    case RunMode::Exact: return "exact";
    case RunMode::Report: return "report";
  }
  return "?";
}

inline std::optional<RunMode> parse_run_mode(std::string_view s) {
  for (RunMode m : {RunMode::Modes, RunMode::Surface, RunMode::Berry, RunMode::Exact, RunMode::Report})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct AxisSpec {
  std::string name = "gamma";
  double start = 0.0;
  double stop = 1.5;
  int count = 400;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      out[i] = log ? start * std::pow(stop / start, t) : start + t * (stop - start);
    }
    out.back() = stop;
    return out;
  }
};

struct GridSpec {
  double u_min = -std::numbers::pi, u_max = std::numbers::pi;
  double v_min = -std::numbers::pi, v_max = std::numbers::pi;
  int u_count = 201, v_count = 201;
  int seeds_per_axis = 41;
};

struct ReportTolerances {
  double relative = 0.05;   // e0 and gap relative errors
  double doublet = 1e-3;    // even/odd splitting in the broken phase
};

struct SweepConfig {
  std::string preset = "none";
  Couplings couplings;
  int n_qubits = 20;
  std::optional<AxisSpec> axis;     // absent: the single fixed point
  std::vector<double> xi_slices;    // empty: the fixed xi only
  GridSpec grid;
  std::vector<double> d_eta_zx_family = {-0.5, 0.0, 0.5, 1.0};
  std::vector<int> n_list = {10, 20, 40};
  OracleOptions oracle;
  ReportTolerances report;
  std::string output_path;          // empty: "<mode>.csv"
  int threads = 1;

  ModelParams fixed() const { return ModelParams(couplings, n_qubits); }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line number of `key` inside `[section]`, or of the section header when key is empty; 0 if absent.
inline int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  for (int no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return no;
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return no;
  }
  return 0;
}

inline double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw std::invalid_argument("not a number: '" + t + "'");
  return x;
}

inline int parse_int(const std::string& s) {
  const std::string t = trim(s);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw std::invalid_argument("not an integer: '" + t + "'");
  return x;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(parse(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1", "fig1a", "fig1b", "fig1c", "fig2", "fig3", "fig4", "none"};
  return names;
}

// Writes a preset's fixed parameters into cfg. The gamma axis is installed only when cfg has none.
inline void apply_preset(SweepConfig& cfg, const std::string& name) {
  if (name == "none") {
    cfg.preset = name;
    return;
  }
  bool known = false;
  for (const auto& n : preset_names()) known = known || n == name;
  if (!known) throw ConfigError("unknown preset '" + name + "'", 0, "preset");
  cfg.preset = name;
  Couplings& c = cfg.couplings;
  c.omega = 1.0;
  c.omega0 = 1.0;
  c.eta_x = c.eta_y = c.eta_z = 0.0;
  c.xi = 0.0;
  if (name == "fig1") cfg.xi_slices = {0.0, 1.0, 0.5};
  if (name == "fig1a") cfg.xi_slices = {0.0};
  if (name == "fig1b") cfg.xi_slices = {1.0}, c.xi = 1.0;
  if (name == "fig1c") cfg.xi_slices = {0.5}, c.xi = 0.5;
  if (name == "fig2") cfg.xi_slices = {0.0, 1.0, 0.5}, c.eta_y = 0.9 * c.omega0;
  if (name == "fig3") cfg.xi_slices = {0.0, 1.0, 0.5}, c.eta_x = 0.9 * c.omega0;
  if (name == "fig4") cfg.xi_slices.clear(), c.xi = 1.0;
  if (!cfg.axis) cfg.axis = AxisSpec{"gamma", 0.0, 1.5 * std::sqrt(c.omega * c.omega0), 400, false};
}

// Checks cross-field invariants and that every grid point yields valid model parameters.
inline void validate(const SweepConfig& cfg) {
  ModelParams base = [&] {
    try {
      return cfg.fixed();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), 0, "model");
    }
  }();
  if (cfg.axis) {
    const AxisSpec& a = *cfg.axis;
    if (!is_field_name(a.name) || a.name == "n_qubits")
      throw ConfigError("sweep axis '" + a.name + "' is not a model parameter", 0, "sweep.axis");
    if (a.count < 2) throw ConfigError("sweep count must be at least 2", 0, "sweep.count");
    if (a.log && !(a.start > 0.0 && a.stop > 0.0))
      throw ConfigError("log sweep needs positive start and stop", 0, "sweep.scale");
    const std::vector<double> slices = cfg.xi_slices.empty() ? std::vector<double>{cfg.couplings.xi} : cfg.xi_slices;
    for (double xi : slices)
      for (double x : {a.start, a.stop}) try {
          (void)base.with_field("xi", xi).with_field(a.name, x);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("sweep reaches invalid parameters: ") + e.what(), 0, "sweep");
        }
  }
  for (double xi : cfg.xi_slices)
    if (xi < 0.0 || xi > 1.0) throw ConfigError("xi slice outside [0, 1]", 0, "sweep.xi_slices");
  const GridSpec& g = cfg.grid;
  if (g.u_count < 2 || g.v_count < 2) throw ConfigError("grid counts must be at least 2", 0, "surface");
  if (!(g.u_max > g.u_min) || !(g.v_max > g.v_min)) throw ConfigError("grid ranges must be increasing", 0, "surface");
  if (g.seeds_per_axis < 1) throw ConfigError("seeds_per_axis must be positive", 0, "surface.seeds_per_axis");
  if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty", 0, "exact.n_list");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("n_list entries must be positive", 0, "exact.n_list");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError("n_list must be ascending", 0, "exact.n_list");
  }
  if (cfg.oracle.k_levels < 2) throw ConfigError("k_levels must be at least 2", 0, "exact.k_levels");
  if (!(cfg.oracle.tol > 0.0)) throw ConfigError("tol must be positive", 0, "exact.tol");
  if (cfg.threads < 1) throw ConfigError("threads must be positive", 0, "run.threads");
}

// Parses the INI text. Keys absent from the file keep their current values in cfg.
inline void parse_config_text(const std::string& text, SweepConfig& cfg, std::optional<std::string>* preset_key = nullptr) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }

  using Setter = std::function<void(const std::string&)>;
  struct Key {
    const char* section;
    const char* name;
    Setter set;
  };
  AxisSpec axis = cfg.axis.value_or(AxisSpec{});
  bool axis_touched = false;
  auto axis_set = [&](auto f) {
    return [&, f](const std::string& v) {
      f(v);
      axis_touched = true;
    };
  };
  auto dbl = [](double& dst) { return [&dst](const std::string& v) { dst = detail::parse_double(v); }; };
  auto integer = [](int& dst) { return [&dst](const std::string& v) { dst = detail::parse_int(v); }; };

  const std::vector<Key> keys = {
      {"model", "omega", dbl(cfg.couplings.omega)},
      {"model", "omega0", dbl(cfg.couplings.omega0)},
      {"model", "gamma", dbl(cfg.couplings.gamma)},
      {"model", "xi", dbl(cfg.couplings.xi)},
      {"model", "eta_x", dbl(cfg.couplings.eta_x)},
      {"model", "eta_y", dbl(cfg.couplings.eta_y)},
      {"model", "eta_z", dbl(cfg.couplings.eta_z)},
      {"model", "n_qubits", integer(cfg.n_qubits)},
      {"sweep", "axis", axis_set([&](const std::string& v) { axis.name = detail::trim(v); })},
      {"sweep", "start", axis_set([&](const std::string& v) { axis.start = detail::parse_double(v); })},
      {"sweep", "stop", axis_set([&](const std::string& v) { axis.stop = detail::parse_double(v); })},
      {"sweep", "count", axis_set([&](const std::string& v) { axis.count = detail::parse_int(v); })},
      {"sweep", "scale", axis_set([&](const std::string& v) {
         const std::string s = detail::trim(v);
         if (s != "linear" && s != "log") throw std::invalid_argument("scale must be linear or log");
         axis.log = s == "log";
       })},
      {"sweep", "xi_slices",
       [&](const std::string& v) { cfg.xi_slices = detail::parse_list<double>(v, detail::parse_double); }},
      {"surface", "u_min", dbl(cfg.grid.u_min)},
      {"surface", "u_max", dbl(cfg.grid.u_max)},
      {"surface", "v_min", dbl(cfg.grid.v_min)},
      {"surface", "v_max", dbl(cfg.grid.v_max)},
      {"surface", "u_count", integer(cfg.grid.u_count)},
      {"surface", "v_count", integer(cfg.grid.v_count)},
      {"surface", "seeds_per_axis", integer(cfg.grid.seeds_per_axis)},
      {"berry", "d_eta_zx",
       [&](const std::string& v) { cfg.d_eta_zx_family = detail::parse_list<double>(v, detail::parse_double); }},
      {"exact", "n_list", [&](const std::string& v) { cfg.n_list = detail::parse_list<int>(v, detail::parse_int); }},
      {"exact", "k_levels", integer(cfg.oracle.k_levels)},
      {"exact", "tol", dbl(cfg.oracle.tol)},
      {"exact", "initial_cutoff", integer(cfg.oracle.initial_cutoff)},
      {"exact", "max_dimension",
       [&](const std::string& v) { cfg.oracle.max_dimension = static_cast<std::size_t>(detail::parse_int(v)); }},
      {"exact", "dense_max_dimension",
       [&](const std::string& v) { cfg.oracle.solver.dense_max_dimension = static_cast<std::size_t>(detail::parse_int(v)); }},
      {"exact", "rel_tol", dbl(cfg.report.relative)},
      {"exact", "doublet_tol", dbl(cfg.report.doublet)},
      {"output", "path", [&](const std::string& v) { cfg.output_path = detail::trim(v); }},
      {"run", "threads", integer(cfg.threads)},
      {"run", "preset",
       [&](const std::string& v) {
         if (preset_key) *preset_key = detail::trim(v);
       }},
  };

  for (const auto& [section, sub] : tree) {
    if (sub.empty()) throw ConfigError("key '" + section + "' outside any section", detail::locate(text, "", section), section);
    bool section_known = false;
    for (const auto& k : keys) section_known = section_known || section == k.section;
    if (!section_known)
      throw ConfigError("unknown section [" + section + "]", detail::locate(text, section, ""), section);
    for (const auto& [name, value] : sub) {
      const Key* match = nullptr;
      for (const auto& k : keys)
        if (section == k.section && name == k.name) match = &k;
      const int line = detail::locate(text, section, name);
      const std::string field = section + "." + name;
      if (!match) throw ConfigError("unknown key", line, field);
      try {
        match->set(value.data());
      } catch (const std::exception& e) {
        throw ConfigError(e.what(), line, field);
      }
    }
  }
  if (axis_touched) cfg.axis = axis;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output target after the DICKE_OUTPUT_DIR override, which replaces the directory part only.
inline std::filesystem::path resolve_output(const SweepConfig& cfg, RunMode mode) {
  std::filesystem::path p = cfg.output_path.empty() ? std::filesystem::path(std::string(to_string(mode)) + ".csv")
                                                    : std::filesystem::path(cfg.output_path);
  if (const char* dir = std::getenv("DICKE_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p.filename();
  return p;
}

// "out/surface.csv" + ".extrema.csv" -> "out/surface.extrema.csv"
inline std::filesystem::path sibling(const std::filesystem::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

}  // namespace dicke
