#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "dicke/sweep.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dicke_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("DICKE_OUTPUT_DIR");
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

SweepConfig preset(const std::string& name) {
  SweepConfig cfg;
  apply_preset(cfg, name);
  validate(cfg);
  return cfg;
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const std::string text =
      "[model]\nomega = 1.5\nomega0=0.5\ngamma=0.3\nxi=0.25\neta_x=0.1\neta_y=-0.2\neta_z=0.3\nn_qubits=12\n"
      "[sweep]\naxis=eta_x\nstart=-0.5\nstop=0.5\ncount=11\nscale=linear\nxi_slices=0,0.5\n"
      "[surface]\nu_min=-1\nu_max=1\nv_min=-2\nv_max=2\nu_count=5\nv_count=7\nseeds_per_axis=9\n"
      "[berry]\nd_eta_zx=0,1\n"
      "[exact]\nn_list=4,8\nk_levels=3\ntol=1e-9\nmax_dimension=5000\ndense_max_dimension=100\n"
      "[output]\npath=out/x.csv\n[run]\nthreads=3\npreset=none\n";
  SweepConfig cfg;
  std::optional<std::string> preset_key;
  parse_config_text(text, cfg, &preset_key);
  validate(cfg);
  EXPECT_EQ(cfg.couplings.omega, 1.5);
  EXPECT_EQ(cfg.couplings.eta_y, -0.2);
  EXPECT_EQ(cfg.n_qubits, 12);
  ASSERT_TRUE(cfg.axis.has_value());
  EXPECT_EQ(cfg.axis->name, "eta_x");
  EXPECT_EQ(cfg.axis->count, 11);
  EXPECT_EQ(cfg.xi_slices, (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(cfg.grid.v_count, 7);
  EXPECT_EQ(cfg.d_eta_zx_family, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(cfg.n_list, (std::vector<int>{4, 8}));
  EXPECT_EQ(cfg.oracle.k_levels, 3);
  EXPECT_EQ(cfg.oracle.solver.dense_max_dimension, 100u);
  EXPECT_EQ(cfg.output_path, "out/x.csv");
  EXPECT_EQ(cfg.threads, 3);
  EXPECT_EQ(preset_key.value_or(""), "none");
}

TEST(Config, ErrorsCarryLineAndField) {
  SweepConfig cfg;
  try {
    parse_config_text("[model]\nomega=1\n\nxi = abc\n", cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.field(), "model.xi");
  }
  try {
    parse_config_text("[model]\ncolour=1\n", cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.field(), "model.colour");
  }
  EXPECT_THROW(parse_config_text("[plot]\nx=1\n", cfg), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nscale=cubic\n", cfg), ConfigError);
}

TEST(Config, ValidationRejectsBadSweeps) {
  SweepConfig cfg;
  cfg.axis = AxisSpec{"gamma", 0.0, 1.0, 1, false};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.axis = AxisSpec{"omega1", 0.0, 1.0, 5, false};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.axis = AxisSpec{"xi", 0.0, 1.5, 5, false};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.axis = AxisSpec{"gamma", 0.0, 1.0, 5, true};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.axis.reset();
  cfg.n_list = {20, 10};
  EXPECT_THROW(validate(cfg), ConfigError);
  SweepConfig bad_model;
  bad_model.couplings.gamma = -1.0;
  EXPECT_THROW(validate(bad_model), ConfigError);
}

TEST(Config, AxisValuesHitEndpoints) {
  const AxisSpec lin{"gamma", 0.0, 1.5, 400, false};
  const auto v = lin.values();
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 1.5);
  const AxisSpec lg{"gamma", 0.01, 10.0, 4, true};
  const auto w = lg.values();
  EXPECT_NEAR(w[1], 0.1, 1e-15);
  EXPECT_EQ(w.back(), 10.0);
}

TEST(Presets, FixedParameters) {
  const SweepConfig f2 = preset("fig2");
  EXPECT_EQ(f2.couplings.omega, 1.0);
  EXPECT_EQ(f2.couplings.omega0, 1.0);
  EXPECT_EQ(f2.couplings.eta_y, 0.9);
  EXPECT_EQ(f2.couplings.eta_x, 0.0);
  const SweepConfig f3 = preset("fig3");
  EXPECT_EQ(f3.couplings.eta_x, 0.9);
  EXPECT_EQ(f3.xi_slices, (std::vector<double>{0.0, 1.0, 0.5}));
  ASSERT_TRUE(f3.axis.has_value());
  EXPECT_EQ(f3.axis->count, 400);
  EXPECT_EQ(f3.axis->stop, 1.5);
  const SweepConfig f4 = preset("fig4");
  EXPECT_EQ(f4.couplings.eta_z, 0.0);
  EXPECT_EQ(f4.d_eta_zx_family, (std::vector<double>{-0.5, 0.0, 0.5, 1.0}));
  SweepConfig cfg;
  EXPECT_THROW(apply_preset(cfg, "fig9"), ConfigError);
}

TEST(ModesSweep, GoldstoneColumnInFig1) {
  const auto rows = parse_csv(modes_csv(preset("fig1a")));
  EXPECT_EQ(rows[0][8], "eps_minus");
  ASSERT_EQ(rows.size(), 401u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double g = std::stod(rows[i][0]);
    if (g > 1.0) {
      EXPECT_LT(std::stod(rows[i][8]), 1e-10);
    } else if (g < 0.99) {
      EXPECT_GT(std::stod(rows[i][8]), 1e-3);
    }
  }
}

TEST(ModesSweep, SuppressionWindowInFig3) {
  const auto rows = parse_csv(modes_csv(preset("fig3")));
  ASSERT_EQ(rows.size(), 1201u);
  int inside = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][1]) != 0.0) continue;
    const double g = std::stod(rows[i][0]);
    if (g >= 1.0 && g <= std::sqrt(1.9)) {
      EXPECT_LT(std::stod(rows[i][8]), 1e-10);
      EXPECT_EQ(rows[i][11], "1");
      ++inside;
    }
  }
  EXPECT_GT(inside, 50);
}

TEST(ModesSweep, TwoPointSweepGivesTwoRecords) {
  SweepConfig cfg;
  cfg.axis = AxisSpec{"gamma", 0.2, 0.8, 2, false};
  const auto rows = parse_csv(modes_csv(cfg));
  EXPECT_EQ(rows.size(), 3u);
}

TEST(ModesSweep, ThreadCountDoesNotChangeOutput) {
  SweepConfig cfg = preset("fig2");
  cfg.threads = 1;
  const std::string a = modes_csv(cfg);
  cfg.threads = 4;
  EXPECT_EQ(a, modes_csv(cfg));
}

TEST_F(TempDir, SurfaceGridAndSidecar) {
  SweepConfig cfg;
  cfg.couplings.xi = 1.0;
  cfg.couplings.gamma = 0.6;
  cfg.grid.u_count = 11;
  cfg.grid.v_count = 5;
  cfg.output_path = (dir_ / "s.csv").string();
  const RunOutcome r = run_surface_grid(cfg);
  const auto grid = parse_csv(slurp(dir_ / "s.csv"));
  ASSERT_EQ(grid.size(), 56u);
  EXPECT_EQ(grid[0], (std::vector<std::string>{"u", "v", "energy"}));
  EXPECT_EQ(grid[1][0], grid[5][0]);  // v runs fastest
  EXPECT_NE(grid[1][1], grid[2][1]);
  const auto ext = parse_csv(slurp(dir_ / "s.extrema.csv"));
  int minima = 0;
  for (const auto& row : ext) minima += row[3] == "min";
  EXPECT_EQ(minima, 2);
  EXPECT_EQ(r.files.size(), 2u);
}

TEST_F(TempDir, FreeSurfaceMinimumAtOrigin) {
  SweepConfig cfg;
  cfg.grid.u_count = cfg.grid.v_count = 3;
  const SurfaceOutput s = surface_csv(cfg);
  const auto ext = parse_csv(s.extrema);
  int minima = 0;
  for (const auto& row : ext)
    if (row[3] == "min") {
      ++minima;
      EXPECT_NEAR(std::stod(row[2]), -1.0, 1e-14);
    }
  EXPECT_EQ(minima, 1);
}

TEST(BerrySweep, FamiliesAndSinglePoint) {
  const auto rows = parse_csv(berry_csv(preset("fig4")));
  ASSERT_EQ(rows.size(), 1601u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double g = std::stod(rows[i][0]), d = std::stod(rows[i][1]);
    const double gc = 0.5 * std::sqrt(1.0 - d);
    if (g < gc) {
      EXPECT_EQ(std::stod(rows[i][3]), 0.0);
      EXPECT_EQ(std::stod(rows[i][4]), 0.0);
    }
  }
  SweepConfig one;
  one.couplings.gamma = 0.8;
  EXPECT_EQ(parse_csv(berry_csv(one)).size(), 1u + one.d_eta_zx_family.size());
  one.d_eta_zx_family = {0.0};
  EXPECT_EQ(parse_csv(berry_csv(one)).size(), 2u);
}

TEST_F(TempDir, ExactAndReportOutputs) {
  SweepConfig cfg;
  cfg.couplings.gamma = 1.0;
  cfg.couplings.xi = 1.0;
  cfg.n_list = {4, 8};
  cfg.output_path = (dir_ / "e.csv").string();
  EXPECT_TRUE(run_exact(cfg).all_converged);
  const auto spec = parse_csv(slurp(dir_ / "e.csv"));
  EXPECT_EQ(spec[0], (std::vector<std::string>{"N", "n_max", "sector", "level", "energy"}));
  EXPECT_EQ(spec.size(), 1u + 2u * 2u * 4u);
  const auto obs = parse_csv(slurp(dir_ / "e.observables.csv"));
  EXPECT_EQ(obs.size(), 3u);
  EXPECT_EQ(obs[0].back(), "jz_exp");

  cfg.output_path = (dir_ / "r.csv").string();
  EXPECT_TRUE(run_oracle_report(cfg).all_converged);
  const auto js = nlohmann::json::parse(slurp(dir_ / "r.json"));
  EXPECT_EQ(js["rows"].size(), 2u);
  EXPECT_TRUE(js["all_converged"].get<bool>());
  EXPECT_TRUE(js["rows"][1]["doublet_pass"].is_boolean());
}

TEST_F(TempDir, OutputDirectoryOverrideAndNoTemporaries) {
  setenv("DICKE_OUTPUT_DIR", dir_.c_str(), 1);
  SweepConfig cfg;
  cfg.output_path = "elsewhere/m.csv";
  cfg.axis = AxisSpec{"gamma", 0.0, 1.0, 3, false};
  const RunOutcome r = run_modes_sweep(cfg);
  unsetenv("DICKE_OUTPUT_DIR");
  ASSERT_EQ(r.files.size(), 1u);
  EXPECT_EQ(r.files[0], dir_ / "m.csv");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    ++entries;
    EXPECT_EQ(e.path().filename(), "m.csv");
  }
  EXPECT_EQ(entries, 1);
}

TEST_F(TempDir, RepeatedRunsAreByteIdentical) {
  SweepConfig cfg = preset("fig1");
  cfg.threads = 3;
  cfg.output_path = (dir_ / "a.csv").string();
  run_modes_sweep(cfg);
  cfg.output_path = (dir_ / "b.csv").string();
  run_modes_sweep(cfg);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(-2.0), "-2");
  EXPECT_EQ(io::csv_row(1, 0.5, true, "x"), "1,0.5,1,x\n");
}

#ifdef DICKE_CLI_PATH
TEST_F(TempDir, CommandLineExitCodes) {
  const std::string cli = DICKE_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  const fs::path bad = dir_ / "bad.ini";
  std::ofstream(bad) << "[model]\nxi=2\n";
  EXPECT_EQ(run("modes --config " + bad.string()), 2);
  EXPECT_EQ(run("modes --preset fig9"), 2);
  EXPECT_EQ(run("modes --no-such-flag"), 2);
  EXPECT_EQ(run("modes --preset fig1b --out " + (dir_ / "m.csv").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "m.csv"));
  const fs::path capped = dir_ / "cap.ini";
  std::ofstream(capped) << "[model]\ngamma=1\nxi=1\n[exact]\nn_list=20\nmax_dimension=800\n";
  EXPECT_EQ(run("report --config " + capped.string() + " --out " + (dir_ / "r.csv").string()), 3);
  EXPECT_TRUE(fs::exists(dir_ / "r.csv"));
}
#endif
