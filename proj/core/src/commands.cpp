#include "thermolab/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>

#include "thermolab/csv.hpp"
#include "thermolab/dynamics.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/observability.hpp"
#include "thermolab/operators.hpp"
#include "thermolab/resolvent.hpp"
#include "thermolab/spectral.hpp"
#include "thermolab/stability.hpp"
#include "thermolab/verify.hpp"

namespace thermolab {

using Eigen::VectorXd;
using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

CheckStatus status(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

std::string out_path(const Config& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.output_dir) / file).string();
}

OperatorSet make_ops(const Config& cfg) {
  OperatorSet ops = assemble_example1(build_grid(cfg.n_interior), cfg.tau);
  if (cfg.subspace == "zero_mean_temperature") ops = restrict_zero_mean_temperature(ops);
  return ops;
}

VectorXd initial_state(const Config& cfg, const OperatorSet& ops, const BlockGenerator& gen) {
  if (cfg.initial_data == "zero") return VectorXd::Zero(gen.dimension());
  const SmoothStateSampler sampler(ops, cfg.modes);
  std::mt19937_64 rng(cfg.seed);
  return gen.layout.has(SlotName::w3) ? sampler.cattaneo(rng) : sampler.fourier(rng);
}

const char* slot_label(SlotName s) {
  switch (s) {
    case SlotName::w1: return "w1";
    case SlotName::w1dot: return "w1dot";
    case SlotName::w2: return "w2";
    case SlotName::w3: return "w3";
  }
  return "?";
}

double slot_norm(const BlockGenerator& gen, const VectorXd& z, const Slot& s) {
  const VectorXd zs = z.segment(s.offset, s.size);
  return std::sqrt(std::max(0.0, zs.dot(gen.metric.M.block(s.offset, s.offset, s.size, s.size) * zs)));
}

CsvTable energy_table(const BlockGenerator& gen, const Trajectory& traj) {
  CsvTable t;
  t.header = {"t", "E", "dissipation"};
  for (const Slot& s : gen.layout.slots) t.header.push_back(std::string("norm_") + slot_label(s.name));
  const EnergyTrace trace = energy_trace(gen, traj);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row{trace.times[k], trace.energy[k], trace.dissipation[k]};
    for (const Slot& s : gen.layout.slots) row.push_back(slot_norm(gen, traj.states[k], s));
    t.add_row(row);
  }
  return t;
}

CommandResult finish(CommandResult res, const Config& cfg, clock_type::time_point t0) {
  res.report.config = cfg.to_json();
  res.report.timing["timestamp"] = utc_timestamp();
  res.report.timing["total_seconds"] = seconds_since(t0);
  const std::string path = out_path(cfg, "report.json");
  write_report(res.report, path);
  res.files.push_back(path);
  res.exit_code = res.report.pass() ? exit_ok : exit_check_failed;
  return res;
}

json fit_json(const ExponentFit& f, const std::vector<double>& spikes) {
  json flags = f.flags;
  if (!spikes.empty() && std::find(f.flags.begin(), f.flags.end(), "spike") == f.flags.end()) {
    flags.push_back("spike");
  }
  return {{"model", "power_law"},
          {"params", {{"exponent", f.exponent}, {"intercept", f.intercept}}},
          {"window", {f.window_min, f.window_max}},
          {"residual", f.residual},
          {"accepted", f.accepted},
          {"flags", flags},
          {"spike_betas", spikes}};
}

json decay_json(const DecayFit& f) {
  json params = f.model == DecayModel::exponential ? json{{"M", f.prefactor}, {"omega", f.rate}}
                                                   : json{{"C", f.prefactor}, {"p", f.rate}, {"alpha_hat", f.alpha_hat}};
  return {{"model", to_string(f.model)},
          {"params", params},
          {"window", {f.t_min, f.t_max}},
          {"residual", f.residual},
          {"accepted", f.accepted}};
}

}  // namespace

CommandResult cmd_simulate(const Config& cfg) {
  const auto t0 = clock_type::now();
  CommandResult res;
  const OperatorSet ops = make_ops(cfg);
  const BlockGenerator gen = assemble_generator(ops, generator_kind_from_string(cfg.kind));
  const VectorXd z0 = initial_state(cfg, ops, gen);

  auto t = clock_type::now();
  const Trajectory traj = simulate(gen, z0, cfg.T, cfg.dt);
  const double sim_seconds = seconds_since(t);

  const std::string energy_csv = out_path(cfg, "energy.csv");
  write_csv(energy_csv, energy_table(gen, traj));
  res.files.push_back(energy_csv);

  CsvTable states;
  states.header = {"t"};
  for (const Slot& s : gen.layout.slots) {
    for (Eigen::Index i = 0; i < s.size; ++i) states.header.push_back(std::string(slot_label(s.name)) + "_" + std::to_string(i));
  }
  for (std::size_t k = 0; k < traj.size(); k += static_cast<std::size_t>(cfg.output_stride)) {
    std::vector<double> row{traj.times[k]};
    row.insert(row.end(), traj.states[k].data(), traj.states[k].data() + traj.states[k].size());
    states.add_row(row);
  }
  const std::string traj_csv = out_path(cfg, "trajectory.csv");
  write_csv(traj_csv, states);
  res.files.push_back(traj_csv);

  CheckRecord law;
  law.name = "discrete_energy_law";
  law.operation = "simulate";
  const double law_res = discrete_energy_law_residual(gen, traj);
  law.values = {{"residual", law_res}, {"steps", traj.size() - 1}};
  law.bound = {{"residual", cfg.tolerance("discrete_energy_law")}};
  law.status = status(law_res <= cfg.tolerance("discrete_energy_law"));
  res.report.add(law, sim_seconds);

  t = clock_type::now();
  CheckRecord bal;
  if (gen.kind == GeneratorKind::conservative_cattaneo) {
    const double E0 = energy(gen, z0);
    double drift = 0.0;
    for (const auto& z : traj.states) drift = std::max(drift, E0 > 0.0 ? std::abs(energy(gen, z) - E0) / E0 : 0.0);
    bal.name = "energy_conservation";
    bal.operation = "simulate";
    bal.values = {{"max_rel_drift", drift}};
    bal.bound = {{"max_rel_drift", cfg.tolerance("conservation_drift")}};
    bal.status = status(drift <= cfg.tolerance("conservation_drift"));
  } else {
    const double r = energy_balance_residual(gen, traj);
    bal.name = "energy_balance";
    bal.operation = "energy_balance_residual";
    bal.values = {{"residual", r}, {"dt", cfg.dt}, {"T", cfg.T}};
    bal.bound = {{"residual", cfg.tolerance("energy_balance")}};
    bal.status = status(r <= cfg.tolerance("energy_balance"));
  }
  bal.values["kind"] = to_string(gen.kind);
  bal.values["initial_energy"] = energy(gen, z0);
  bal.values["final_energy"] = energy(gen, traj.states.back());
  res.report.add(bal, seconds_since(t));
  return finish(std::move(res), cfg, t0);
}

CommandResult cmd_spectrum(const Config& cfg) {
  const auto t0 = clock_type::now();
  CommandResult res;
  const OperatorSet ops = make_ops(cfg);
  const BlockGenerator gen = assemble_generator(ops, generator_kind_from_string(cfg.kind));

  auto t = clock_type::now();
  const Spectrum spec = eigen(gen, false, cfg.eigen_cap);
  CsvTable table;
  table.header = {"re", "im", "residual"};
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    table.add_row({spec.eigenvalues[i].real(), spec.eigenvalues[i].imag(), spec.residuals[i]});
  }
  const std::string spec_csv = out_path(cfg, "spectrum.csv");
  write_csv(spec_csv, table);
  res.files.push_back(spec_csv);

  CheckRecord eig;
  eig.name = "eigen_residual";
  eig.operation = "eigen";
  eig.values = {{"dimension", spec.dimension},
                {"max_residual", spec.max_residual()},
                {"spectral_abscissa", spec.spectral_abscissa()},
                {"kind", to_string(gen.kind)}};
  eig.bound = {{"max_residual", cfg.tolerance("eigen_residual")}};
  eig.status = status(spec.max_residual() <= cfg.tolerance("eigen_residual"));
  res.report.add(eig, seconds_since(t));

  if (gen.kind != GeneratorKind::conservative_cattaneo && ops.subspace == Subspace::zero_mean_temperature) {
    CheckRecord ab;
    ab.name = "spectral_abscissa";
    ab.operation = "eigen";
    ab.values = {{"spectral_abscissa", spec.spectral_abscissa()}};
    ab.bound = {{"spectral_abscissa", "< 0"}};
    ab.status = status(spec.spectral_abscissa() < 0.0);
    res.report.add(ab, 0.0);
  }

  if (cfg.n_max >= 2) {
    t = clock_type::now();
    const GapTable gaps = frequency_gap(cfg.tau, cfg.n_max, FrequencySource::modal_oracle);
    const GapTable shown = frequency_gap(cfg.tau, cfg.n_max, FrequencySource::displayed_set);
    CsvTable gt;
    gt.header = {"branch_i", "branch_j", "n_i", "n_j", "gap"};
    for (const auto& e : gaps.entries) {
      gt.add_row({std::to_string(e.branch_i), std::to_string(e.branch_j), std::to_string(e.n_i),
                  std::to_string(e.n_j), format_double(e.gap)});
    }
    const std::string gap_csv = out_path(cfg, "gaps.csv");
    write_csv(gap_csv, gt);
    res.files.push_back(gap_csv);
    CheckRecord g;
    g.name = "frequency_gap";
    g.operation = "frequency_gap";
    g.values = {{"modal_min_gap", gaps.min_gap},
                {"modal_duplicates", gaps.has_duplicates},
                {"displayed_min_gap", shown.min_gap},
                {"displayed_duplicates", shown.has_duplicates}};
    res.report.add(g, seconds_since(t));
  }

  t = clock_type::now();
  const ExplicitFormulaReport ex = validate_explicit_formulas(cfg.tau, std::min(cfg.n_max, 6), build_grid(cfg.n_interior));
  json rows = json::array();
  for (const auto& r : ex.rows) {
    rows.push_back({{"n", r.n},
                    {"displayed", {r.displayed[0], r.displayed[1]}},
                    {"modal", {r.modal[0], r.modal[1]}},
                    {"discrepancy", r.discrepancy},
                    {"eigenfunction_residual", r.eigenfunction_residual}});
  }
  CheckRecord e;
  e.name = "explicit_frequencies";
  e.operation = "validate_explicit_formulas";
  e.values = {{"tau", cfg.tau}, {"irrational_ratio", ex.tau_hypothesis_holds}, {"rows", rows}};
  res.report.add(e, seconds_since(t));
  return finish(std::move(res), cfg, t0);
}

CommandResult cmd_resolvent(const Config& cfg) {
  const auto t0 = clock_type::now();
  CommandResult res;
  const OperatorSet ops = make_ops(cfg);
  const BlockGenerator gen = assemble_generator(ops, generator_kind_from_string(cfg.kind));
  const std::vector<double> grid = cfg.beta_grid.values();
  const double top = grid.back();
  const ResolventScan scan = resolvent_scan(gen, grid, std::make_pair(std::max(grid.front(), top / 10.0), top));

  CsvTable table;
  table.header = {"beta", "resolvent_norm"};
  for (const auto& p : scan.points) table.add_row({p.beta, p.norm});
  const std::string scan_csv = out_path(cfg, "scan.csv");
  write_csv(scan_csv, table);
  res.files.push_back(scan_csv);

  const json fit = fit_json(scan.fit, scan.spikes);
  const std::string fit_path = out_path(cfg, "fit.json");
  write_file_atomic(fit_path, fit.dump(2) + "\n");
  res.files.push_back(fit_path);

  double worst_cert = 0.0;
  int fallbacks = 0;
  for (const auto& p : scan.points) {
    worst_cert = std::max(worst_cert, p.certificate);
    fallbacks += p.dense_fallback ? 1 : 0;
  }
  const double lb = 1.0 - cfg.tolerance("resolvent_lower_bound");
  CheckRecord r;
  r.name = "resolvent_scan";
  r.operation = "resolvent_scan";
  r.values = {{"kind", to_string(gen.kind)},
              {"fit", fit},
              {"sup_norm", json_number(scan.sup_norm)},
              {"lower_bound_margin", json_number(scan.min_lower_bound_margin)},
              {"max_certificate", worst_cert},
              {"dense_fallbacks", fallbacks}};
  r.bound = {{"lower_bound_margin", lb}};
  r.status = status(scan.min_lower_bound_margin >= lb);
  res.report.add(r, seconds_since(t0));
  return finish(std::move(res), cfg, t0);
}

CommandResult cmd_observability(const Config& cfg) {
  const auto t0 = clock_type::now();
  CommandResult res;
  const OperatorSet ops = make_ops(cfg);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::conservative_cattaneo);

  auto t = clock_type::now();
  const ObservabilityGramian gram = gramian(gen, cfg.T, cfg.dt, cfg.eigen_cap);
  const ObservabilityReport full = observability_constant(gram, gram.metric, false);
  const ObservabilityReport restricted = observability_constant(gram, gram.metric, true);
  const ObservabilityReport weak0 = weak_observability_constant(gram, ops, 0.0);
  const ObservabilityReport weak = weak_observability_constant(gram, ops, cfg.alpha);

  CheckRecord obs;
  obs.name = "observability_constant";
  obs.operation = "observability_constant";
  obs.values = {{"T", cfg.T},
                {"alpha", cfg.alpha},
                {"c_obs", restricted.c_obs},
                {"c_obs_unrestricted", full.c_obs},
                {"c_obs_weak", weak.c_obs},
                {"kernel_dim", restricted.kernel_dim},
                {"minimizing_direction_norms", restricted.minimizing_direction_norms},
                {"trials", cfg.trials},
                {"seed", cfg.seed}};
  if (cfg.T > 2.0) {
    obs.bound = {{"c_obs", "> 0"}, {"c_obs_weak", ">= c_obs at alpha 0"}};
    obs.status = status(restricted.c_obs > 0.0 && weak.c_obs >= weak0.c_obs * (1.0 - 1e-10));
  } else {
    obs.bound = {{"c_obs_weak", ">= c_obs at alpha 0"}};
    obs.status = status(weak.c_obs >= weak0.c_obs * (1.0 - 1e-10));
  }
  res.report.add(obs, seconds_since(t));

  if (cfg.T > 2.0) {
    t = clock_type::now();
    const InghamReport ing = ingham_direct_check(cfg.tau, cfg.T, cfg.n_max, cfg.trials, cfg.seed);
    CheckRecord r;
    r.name = "ingham_direct_check";
    r.operation = "ingham_direct_check";
    r.values = {{"refused", ing.refused},
                {"diagnostic", ing.diagnostic},
                {"min_ratio", ing.min_ratio},
                {"max_ratio", ing.max_ratio},
                {"trials", ing.trials},
                {"seed", ing.seed},
                {"min_gap_modal", ing.min_gap_modal}};
    if (ing.refused) {
      r.status = CheckStatus::report;
    } else {
      r.bound = {{"min_ratio", "> 0"}};
      r.status = status(ing.min_ratio > 0.0);
    }
    res.report.add(r, seconds_since(t));
  }

  const std::string obs_path = out_path(cfg, "observability.json");
  write_file_atomic(obs_path, obs.values.dump(2) + "\n");
  res.files.push_back(obs_path);
  return finish(std::move(res), cfg, t0);
}

CommandResult cmd_decay(const Config& cfg) {
  const auto t0 = clock_type::now();
  CommandResult res;
  const OperatorSet ops = make_ops(cfg);
  GeneratorKind kind = generator_kind_from_string(cfg.kind);
  if (kind == GeneratorKind::conservative_cattaneo || kind == GeneratorKind::adjoint_damped_cattaneo) {
    throw ConfigError("kind", "invalid config key 'kind': decay needs 'damped_cattaneo' or 'fourier'");
  }
  const BlockGenerator gen = assemble_generator(ops, kind);
  const VectorXd z0 = initial_state(cfg, ops, gen);

  auto t = clock_type::now();
  const Trajectory traj = simulate(gen, z0, cfg.T, cfg.dt);
  const std::string decay_csv = out_path(cfg, "decay.csv");
  write_csv(decay_csv, energy_table(gen, traj));
  res.files.push_back(decay_csv);

  CheckRecord fits;
  fits.name = "decay_fit";
  fits.operation = "decay_fit";
  if (energy(gen, z0) > 0.0) {
    const EnergyTrace trace = energy_trace(gen, traj);
    const DecayFit ex = decay_fit(trace, DecayModel::exponential);
    const DecayFit po = decay_fit(trace, DecayModel::polynomial);
    fits.values = {{"exponential", decay_json(ex)},
                   {"polynomial", decay_json(po)},
                   {"preferred", ex.residual < po.residual ? "exponential" : "polynomial"}};
    fits.bound = {{"exponential.omega", "> 0"}};
    fits.status = status(ex.accepted);
  } else {
    fits.values = {{"vacuous", true}};
  }
  res.report.add(fits, seconds_since(t));

  t = clock_type::now();
  CheckRecord rus;
  rus.name = "russell_verify";
  rus.operation = "russell_verify";
  json runs = json::array();
  bool ok = true;
  for (const auto& [C, delta, E0] : {std::array{1.0, 0.0, 1.0}, std::array{0.1, 1.0, 5.0}, std::array{2.0, -0.5, 1.0}}) {
    const RussellRun run = russell_verify(C, delta, E0, cfg.russell_steps);
    runs.push_back({{"C", C},
                    {"delta", delta},
                    {"E0", E0},
                    {"M", run.M},
                    {"bound_holds", run.bound_holds},
                    {"max_recurrence_residual", run.max_recurrence_residual},
                    {"scaled_non_increasing_after_burn_in", run.trend_non_increasing}});
    ok = ok && run.bound_holds && run.max_recurrence_residual <= cfg.tolerance("russell_residual");
  }
  rus.values = {{"runs", runs}, {"K", cfg.russell_steps}};
  rus.bound = {{"recurrence_residual", cfg.tolerance("russell_residual")}};
  rus.status = status(ok);
  res.report.add(rus, seconds_since(t));

  if (kind == GeneratorKind::damped_cattaneo) {
    t = clock_type::now();
    const double interval = cfg.T / cfg.intervals;
    const DecayCertificate cert =
        polynomial_decay_certificate(ops, std::max(cfg.alpha, 1e-6), interval, cfg.dt,
                                     cfg.initial_data == "zero" ? 0 : cfg.ensemble, cfg.intervals, cfg.seed, cfg.modes);
    CheckRecord c;
    c.name = "decay_certificate";
    c.operation = "polynomial_decay_certificate";
    json table = json::array();
    for (const auto& row : cert.normalized) {
      std::vector<double> scaled;
      for (std::size_t k = 0; k < row.size(); ++k) scaled.push_back(row[k] * std::pow(k + 1.0, 1.0 / cert.alpha));
      table.push_back(json_numbers(scaled));
    }
    c.values = {{"alpha", cert.alpha},
                {"interval", interval},
                {"ensemble", cert.ensemble},
                {"vacuous", cert.vacuous},
                {"monotone", cert.monotone},
                {"sup_scaled", cert.sup_scaled},
                {"scaled_table", table},
                {"exponential_preferred", cert.exponential_preferred},
                {"rate_consistent", cert.rate_consistent}};
    c.bound = {{"monotone", true}, {"sup_scaled", "finite"}};
    c.status = status(cert.pass);
    res.report.add(c, seconds_since(t));
  }
  return finish(std::move(res), cfg, t0);
}

CommandResult cmd_verify(const Config& cfg, std::ostream* progress) {
  const auto t0 = clock_type::now();
  CommandResult res;
  res.report = run_verify(cfg, [&](const CheckRecord& r, double secs) {
    if (progress) {
      *progress << "[" << to_string(r.status) << "] " << r.name << " (" << secs << " s) " << summarize(r) << "\n";
      progress->flush();
    }
  });
  return finish(std::move(res), cfg, t0);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "spectrum", "resolvent", "observability", "decay", "verify"};
  return names;
}

int run_command(const std::string& name, const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    CommandResult res;
    if (name == "simulate") res = cmd_simulate(cfg);
    else if (name == "spectrum") res = cmd_spectrum(cfg);
    else if (name == "resolvent") res = cmd_resolvent(cfg);
    else if (name == "observability") res = cmd_observability(cfg);
    else if (name == "decay") res = cmd_decay(cfg);
    else if (name == "verify") res = cmd_verify(cfg, &out);
    else {
      err << "unknown command '" << name << "'\n";
      return exit_usage;
    }
    for (const auto& c : res.report.checks) {
      if (c.status == CheckStatus::fail) err << "check failed: " << c.name << " " << summarize(c) << "\n";
    }
    for (const auto& f : res.files) out << f << "\n";
    out << (res.report.pass() ? "pass" : "FAIL") << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_check_failed;
  }
}

}  // namespace thermolab
