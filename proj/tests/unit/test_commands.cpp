#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermolab/commands.hpp"
#include "thermolab/csv.hpp"

using namespace thermolab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thermolab_cmd_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

Config small(const std::string& out, std::vector<std::string> overrides = {}) {
  overrides.push_back("output_dir=" + out);
  return load_config("", overrides, std::nullopt);
}

#ifdef THERMOLAB_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(THERMOLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Simulate, MinimalConfigPasses) {
  const fs::path dir = temp_dir("simulate");
  const Config cfg = small(dir.string(), {"n_interior=50", "T=1", "dt=1e-3"});
  const CommandResult res = cmd_simulate(cfg);
  EXPECT_EQ(res.exit_code, exit_ok);
  EXPECT_TRUE(res.report.pass());
  for (const auto& f : res.files) EXPECT_TRUE(fs::exists(f)) << f;
  EXPECT_TRUE(fs::exists(dir / "energy.csv"));
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
  const json report = json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(report.contains("tool_version"));
  EXPECT_TRUE(report.contains("config"));
  for (const auto& c : report["checks"]) EXPECT_FALSE(c["operation"].get<std::string>().empty());
  // 1000 steps plus the initial sample, plus the header
  EXPECT_EQ(lines(slurp(dir / "energy.csv")).size(), 1002u);
}

TEST(Simulate, ZeroInitialDataGivesZeroEnergy) {
  const fs::path dir = temp_dir("zero");
  const CommandResult res = cmd_simulate(small(dir.string(), {"n_interior=10", "T=0.1", "dt=1e-2", "initial_data=zero"}));
  EXPECT_EQ(res.exit_code, exit_ok);
  const auto rows = lines(slurp(dir / "energy.csv"));
  ASSERT_GT(rows.size(), 1u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream in(rows[i]);
    std::string cell;
    std::getline(in, cell, ',');  // time
    while (std::getline(in, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0) << rows[i];
  }
}

TEST(Simulate, FourierAndConservativeKinds) {
  for (const std::string kind : {"fourier", "conservative_cattaneo"}) {
    const fs::path dir = temp_dir("kind_" + kind);
    const CommandResult res = cmd_simulate(small(dir.string(), {"n_interior=20", "T=1", "dt=1e-3", "kind=" + kind}));
    EXPECT_EQ(res.exit_code, exit_ok) << kind;
  }
}

TEST(Spectrum, OneRowPerEigenvalue) {
  const fs::path dir = temp_dir("spectrum");
  const CommandResult res = cmd_spectrum(small(dir.string(), {"n_interior=12", "subspace=full"}));
  EXPECT_EQ(res.exit_code, exit_ok);
  const auto rows = lines(slurp(dir / "spectrum.csv"));
  EXPECT_EQ(rows.size(), 1u + 4 * 12 + 1);
  EXPECT_EQ(rows[0], "\"re\",\"im\",\"residual\"");
}

TEST(Resolvent, ConservativeKindFlagsSpike) {
  const fs::path dir = temp_dir("resolvent");
  const Config cfg = small(dir.string(), {"n_interior=3", "modes=3", "kind=conservative_cattaneo", "subspace=full",
                                          "beta_grid.min=1", "beta_grid.max=100", "beta_grid.points=200"});
  const CommandResult res = cmd_resolvent(cfg);
  EXPECT_EQ(res.exit_code, exit_ok);
  const json fit = json::parse(slurp(dir / "fit.json"));
  const auto flags = fit["flags"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(flags.begin(), flags.end(), "spike"), flags.end());
  EXPECT_FALSE(fit["spike_betas"].empty());
  EXPECT_EQ(lines(slurp(dir / "scan.csv")).size(), 201u);
}

TEST(Resolvent, DampedScanPasses) {
  const fs::path dir = temp_dir("resolvent_damped");
  const CommandResult res =
      cmd_resolvent(small(dir.string(), {"n_interior=30", "beta_grid.points=9", "beta_grid.max=300"}));
  EXPECT_EQ(res.exit_code, exit_ok);
  EXPECT_TRUE(res.report.pass());
}

TEST(Observability, ReportFields) {
  const fs::path dir = temp_dir("observability");
  const CommandResult res = cmd_observability(
      small(dir.string(), {"n_interior=12", "T=3", "dt=1e-2", "n_max=5", "trials=20"}));
  EXPECT_EQ(res.exit_code, exit_ok);
  const json j = json::parse(slurp(dir / "observability.json"));
  for (const char* key : {"T", "alpha", "c_obs", "kernel_dim", "minimizing_direction_norms", "trials", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Decay, SmallRunPasses) {
  const fs::path dir = temp_dir("decay");
  const CommandResult res = cmd_decay(
      small(dir.string(), {"n_interior=15", "T=4", "dt=1e-2", "ensemble=3", "intervals=4", "russell_steps=500"}));
  EXPECT_EQ(res.exit_code, exit_ok);
  EXPECT_TRUE(fs::exists(dir / "decay.csv"));
}

TEST(RunCommand, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run_command("bogus", Config{}, out, err), exit_usage);
  Config bad = small(temp_dir("badkind").string());
  bad.kind = "conservative_cattaneo";
  EXPECT_EQ(run_command("decay", bad, out, err), exit_usage);
  EXPECT_EQ(run_command("simulate", small(temp_dir("ok").string(), {"n_interior=5", "modes=3", "T=0.1", "dt=1e-2"}), out, err),
            exit_ok);
  EXPECT_NE(out.str().find("pass"), std::string::npos);
}

TEST(Verify, QuickProfileDeterministic) {
  const Config a = small(temp_dir("verify_a").string(), {"profile=quick"});
  const Config b = small(temp_dir("verify_b").string(), {"profile=quick"});
  const CommandResult ra = cmd_verify(a);
  const CommandResult rb = cmd_verify(b);
  json ja = ra.report.deterministic_json(), jb = rb.report.deterministic_json();
  ja["config"].erase("output_dir");
  jb["config"].erase("output_dir");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ra.exit_code, exit_ok);
  for (const auto& c : ra.report.checks) EXPECT_NE(c.status, CheckStatus::fail) << c.name;
}

#ifdef THERMOLAB_CLI_PATH
TEST(Cli, ExitCodeContract) {
  const std::string out = temp_dir("cli").string();
  EXPECT_EQ(run_cli("simulate --set dt=0 --out " + out), exit_usage);
  EXPECT_EQ(run_cli("simulate --set nonsense=1 --out " + out), exit_usage);
  EXPECT_EQ(run_cli("simulate --config /nonexistent/file.json"), exit_usage);
  EXPECT_EQ(run_cli("frobnicate"), exit_usage);
  EXPECT_EQ(run_cli("--version"), exit_ok);
  EXPECT_EQ(run_cli("simulate --help"), exit_ok);
  EXPECT_EQ(run_cli("simulate --set n_interior=8 --set T=0.1 --set dt=1e-2 --seed 3 --out " + out), exit_ok);
  EXPECT_TRUE(fs::exists(fs::path(out) / "report.json"));
  EXPECT_EQ(json::parse(slurp(fs::path(out) / "report.json"))["config"]["seed"], 3);
  // an impossible tolerance makes a check fail
  EXPECT_EQ(run_cli("simulate --set n_interior=8 --set T=0.1 --set dt=1e-2 --set tolerances.discrete_energy_law=1e-300 "
                    "--out " + out),
            exit_check_failed);
}
#endif
