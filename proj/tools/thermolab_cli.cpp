// thermolab command line front end.
//
//   thermolab <command> [--config PATH] [--out DIR] [--seed N] [--set key=value]...
//
// Commands: simulate, spectrum, resolvent, observability, decay, verify.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermolab/commands.hpp"
#include "thermolab/config.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermo-elastic semigroup lab: simulations, spectra, resolvent scans, observability"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(thermolab::tool_version()));

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "integrate one trajectory, write energy/trajectory CSVs"},
      {"spectrum", "dense spectrum, frequency gaps, explicit frequency comparison"},
      {"resolvent", "resolvent norm scan along the imaginary axis with growth fit"},
      {"observability", "Gramian, observability constants and exponential-sum check"},
      {"decay", "decay-rate fits, recurrence verifier and decay certificate"},
      {"verify", "run the full acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--set", opt.overrides, "override a config key, e.g. --set beta_grid.points=21")
        ->take_all()
        ->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return thermolab::exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  thermolab::Config cfg;
  try {
    cfg = thermolab::load_config(opt.config_path, opt.overrides, opt.seed);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  } catch (const thermolab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return thermolab::exit_usage;
  }
  return thermolab::run_command(command, cfg, std::cout, std::cerr);
}
