#pragma once

// The verification suite: one check per acceptance criterion, each at its
// pinned problem size and tolerance, plus report-only supplementary records.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "thermolab/config.hpp"
#include "thermolab/report.hpp"
#include "thermolab/resolvent.hpp"

namespace thermolab {

/// Problem sizes used by the suite. "full" is the acceptance scale, "quick"
/// a reduced variant for smoke and determinism runs.
struct SuiteScale {
  double tau = 1.0;
  int n_identity = 100;
  int identity_samples = 100;
  int n_dynamics = 100;
  int smooth_modes = 8;
  double dt = 1e-3;
  double T_balance = 5.0;
  double T_conservation = 10.0;
  double T_splitting = 1.0;
  double T_inequality = 3.0;
  int inequality_states = 30;
  std::vector<int> convergence_sizes{100, 200, 400};
  int convergence_count = 6;
  double convergence_time_limit = 300.0;
  int n_resolvent = 200;
  BetaGrid beta_grid{10.0, 1000.0, 41, true, false};
  int n_observability = 100;
  std::vector<double> observability_horizons{2.0, 2.5, 3.0};
  double observability_dt = 1e-3;
  int ingham_n_max = 20;
  double ingham_T = 3.0;
  int ingham_trials = 200;
  double ingham_refused_tau = 1.0 / 3.0;
  long russell_steps = 10000;
  double T_decay = 20.0;
  double decay_dt = 1e-2;
};

SuiteScale suite_scale(const std::string& profile);

std::vector<int> criterion_ids();
std::string criterion_title(int id);

/// Runs one criterion; the record's status is pass or fail.
CheckRecord run_criterion(int id, const Config& cfg);

/// Report-only records (explicit formula comparison, decay model selection,
/// decay certificate, frequency gaps).
std::vector<std::pair<CheckRecord, double>> supplementary_records(const Config& cfg);

using ProgressFn = std::function<void(const CheckRecord&, double seconds)>;

/// All criteria followed by the supplementary records.
Report run_verify(const Config& cfg, const ProgressFn& progress = {});

/// One-line human summary of a record's key values.
std::string summarize(const CheckRecord& record);

}  // namespace thermolab
