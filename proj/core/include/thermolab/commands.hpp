#pragma once

// Command implementations behind the CLI. Each writes its CSV artifacts and a
// report.json into cfg.output_dir.
//
// Exit codes: 0 all checks pass, 2 a check failed (or the run broke down
// numerically), 1 usage or configuration error.

#include <iosfwd>
#include <string>
#include <vector>

#include "thermolab/config.hpp"
#include "thermolab/report.hpp"

namespace thermolab {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_check_failed = 2;

struct CommandResult {
  int exit_code = exit_ok;
  Report report;
  std::vector<std::string> files;  // written artifacts, report.json last
};

CommandResult cmd_simulate(const Config& cfg);
CommandResult cmd_spectrum(const Config& cfg);
CommandResult cmd_resolvent(const Config& cfg);
CommandResult cmd_observability(const Config& cfg);
CommandResult cmd_decay(const Config& cfg);
CommandResult cmd_verify(const Config& cfg, std::ostream* progress = nullptr);

const std::vector<std::string>& command_names();

/// Dispatches by name and maps exceptions onto the exit-code contract;
/// diagnostics go to err.
int run_command(const std::string& name, const Config& cfg, std::ostream& out, std::ostream& err);

}  // namespace thermolab
