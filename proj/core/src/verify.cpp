#include "thermolab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "thermolab/dynamics.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/observability.hpp"
#include "thermolab/operators.hpp"
#include "thermolab/spectral.hpp"
#include "thermolab/stability.hpp"

namespace thermolab {

using Eigen::VectorXd;
using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

CheckStatus status(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

OperatorSet example(int n, double tau) { return assemble_example1(build_grid(n), tau); }

std::mt19937_64 criterion_rng(const Config& cfg, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

CheckRecord dissipation_identity(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_identity, s.tau);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const SmoothStateSampler sampler(ops, s.n_identity);
  auto rng = criterion_rng(cfg, 1);
  const Slot& flux = gen.layout.slot(SlotName::w3);
  double worst = 0.0;
  for (int i = 0; i < s.identity_samples; ++i) {
    const VectorXd z = sampler.cattaneo(rng);
    const double lhs = gen.metric.inner(gen.G * z, z);
    const double rhs = -ops.quad_weight * z.segment(flux.offset, flux.size).squaredNorm();
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  const double tol = cfg.tolerance("dissipation_identity");
  CheckRecord r;
  r.operation = "assemble_generator";
  r.values = {{"max_rel_error", worst}, {"samples", s.identity_samples}, {"n_interior", s.n_identity}};
  r.bound = {{"max_rel_error", tol}};
  r.status = status(worst <= tol);
  return r;
}

CheckRecord adjoint_identity(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_identity, s.tau);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const BlockGenerator adj = adjoint_generator(ops);
  const SmoothStateSampler sampler(ops, s.n_identity);
  auto rng = criterion_rng(cfg, 2);
  double worst = 0.0;
  for (int i = 0; i < s.identity_samples; ++i) {
    const VectorXd x = sampler.cattaneo(rng);
    const VectorXd y = sampler.cattaneo(rng);
    const double a = gen.metric.inner(gen.G * x, y);
    const double b = gen.metric.inner(x, adj.G * y);
    worst = std::max(worst, relative_gap(a, b));
  }
  const double tol = cfg.tolerance("adjoint_identity");
  CheckRecord r;
  r.operation = "adjoint_generator";
  r.values = {{"max_rel_error", worst}, {"pairs", s.identity_samples}, {"n_interior", s.n_identity}};
  r.bound = {{"max_rel_error", tol}};
  r.status = status(worst <= tol);
  return r;
}

CheckRecord energy_balance(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_dynamics, s.tau);
  const SmoothStateSampler sampler(ops, s.smooth_modes);
  auto rng = criterion_rng(cfg, 3);
  const double tol = cfg.tolerance("energy_balance");
  const double min_order = cfg.tolerance("energy_balance_order");
  json per_kind = json::object();
  bool ok = true;
  const double floor = cfg.tolerance("roundoff_floor");
  for (GeneratorKind kind : {GeneratorKind::damped_cattaneo, GeneratorKind::fourier}) {
    const BlockGenerator gen = assemble_generator(ops, kind);
    const VectorXd z0 = is_cattaneo(kind) ? sampler.cattaneo(rng) : sampler.fourier(rng);
    const Trajectory coarse = simulate(gen, z0, s.T_balance, s.dt);
    const Trajectory fine = simulate(gen, z0, s.T_balance, s.dt / 2);
    // scheme-level balance: exact up to roundoff, so refinement may only stay at the floor
    const double r1 = energy_balance_residual(gen, coarse);
    const double r2 = energy_balance_residual(gen, fine);
    const bool refine_ok = r2 <= std::pow(2.0, -min_order) * r1 + floor;
    // continuous-law consistency of the grid samples: genuine truncation error
    const double g1 = energy_balance_residual(gen, coarse, DissipationQuadrature::grid_states);
    const double g2 = energy_balance_residual(gen, fine, DissipationQuadrature::grid_states);
    const double order = std::log2(g1 / g2);
    per_kind[to_string(kind)] = {{"residual", r1},
                                 {"residual_half_dt", r2},
                                 {"grid_residual", g1},
                                 {"grid_residual_half_dt", g2},
                                 {"grid_order", json_number(order)}};
    ok = ok && r1 <= tol && refine_ok && order >= min_order;
  }
  CheckRecord r;
  r.operation = "energy_balance_residual";
  r.values = {{"kinds", per_kind}, {"dt", s.dt}, {"T", s.T_balance}, {"n_interior", s.n_dynamics}};
  r.bound = {{"residual", tol},
             {"refinement", "r(dt/2) <= 2^-order r(dt) + floor"},
             {"floor", floor},
             {"grid_order_min", min_order}};
  r.status = status(ok);
  return r;
}

CheckRecord conservation(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_dynamics, s.tau);
  const SmoothStateSampler sampler(ops, s.smooth_modes);
  auto rng = criterion_rng(cfg, 4);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  const VectorXd z0 = sampler.cattaneo(rng);
  const Trajectory traj = simulate(gen, z0, s.T_conservation, s.dt);
  const double E0 = energy(gen, z0);
  double drift = 0.0;
  for (const auto& z : traj.states) drift = std::max(drift, std::abs(energy(gen, z) - E0) / E0);
  const double tol = cfg.tolerance("conservation_drift");
  CheckRecord r;
  r.operation = "simulate";
  r.values = {{"max_rel_drift", drift}, {"T", s.T_conservation}, {"dt", s.dt}, {"n_interior", s.n_dynamics}};
  r.bound = {{"max_rel_drift", tol}};
  r.status = status(drift <= tol);
  return r;
}

CheckRecord splitting(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_dynamics, s.tau);
  const SmoothStateSampler sampler(ops, s.smooth_modes);
  auto rng = criterion_rng(cfg, 5);
  const VectorXd z0 = sampler.cattaneo(rng);
  const double r1 = splitting_check(ops, z0, s.T_splitting, s.dt);
  const double r2 = splitting_check(ops, z0, s.T_splitting, s.dt / 2);
  const double tol = cfg.tolerance("splitting");
  const double order = cfg.tolerance("splitting_order");
  const double floor = cfg.tolerance("roundoff_floor");
  const bool refine_ok = r2 <= std::pow(2.0, -order) * r1 + floor;
  CheckRecord r;
  r.operation = "splitting_check";
  r.values = {{"residual", r1}, {"residual_half_dt", r2}, {"dt", s.dt}, {"T", s.T_splitting}};
  r.bound = {{"residual", tol}, {"refinement", "r(dt/2) <= 2^-order r(dt) + floor"}, {"order", order},
             {"floor", floor}};
  r.status = status(r1 <= tol && refine_ok);
  return r;
}

CheckRecord two_sided_inequality(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = example(s.n_dynamics, s.tau);
  const SmoothStateSampler sampler(ops, s.smooth_modes);
  auto rng = criterion_rng(cfg, 6);
  double max_upper[2] = {0.0, 0.0};
  double min_lower[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int i = 0; i < s.inequality_states; ++i) {
    const VectorXd z0 = sampler.cattaneo(rng);
    for (int level = 0; level < 2; ++level) {
      const InegdubRatios q = inegdub_check(ops, z0, s.T_inequality, level == 0 ? s.dt : s.dt / 2);
      max_upper[level] = std::max(max_upper[level], q.upper_ratio);
      min_lower[level] = std::min(min_lower[level], q.lower_ratio);
    }
  }
  const double upper_tol = cfg.tolerance("inegdub_upper");
  const double stab_tol = cfg.tolerance("inegdub_stability");
  const double upper_change = relative_gap(max_upper[0], max_upper[1]);
  const double lower_change = relative_gap(min_lower[0], min_lower[1]);
  CheckRecord r;
  r.operation = "inegdub_check";
  r.values = {{"max_upper_ratio", max_upper[0]}, {"min_lower_ratio", min_lower[0]},
              {"max_upper_ratio_half_dt", max_upper[1]}, {"min_lower_ratio_half_dt", min_lower[1]},
              {"upper_change", upper_change}, {"lower_change", lower_change},
              {"states", s.inequality_states}, {"T", s.T_inequality}};
  r.bound = {{"max_upper_ratio", upper_tol}, {"min_lower_ratio", "> 0"}, {"change", stab_tol}};
  r.status = status(max_upper[0] <= upper_tol && max_upper[1] <= upper_tol && min_lower[0] > 0.0 &&
                    min_lower[1] > 0.0 && upper_change <= stab_tol && lower_change <= stab_tol);
  return r;
}

CheckRecord spectral_order(const Config& cfg, const SuiteScale& s) {
  const auto t0 = clock_type::now();
  const ConvergenceStudy study = spectral_convergence(s.tau, s.convergence_sizes, s.convergence_count);
  const double elapsed = seconds_since(t0);
  const double lo = cfg.tolerance("spectral_order_min");
  const double hi = cfg.tolerance("spectral_order_max");
  json orders = json::array();
  for (const auto& row : study.orders) orders.push_back(json_numbers(row));
  CheckRecord r;
  r.operation = "eigen";
  r.values = {{"sizes", study.sizes}, {"reference", json_numbers(study.modal)}, {"orders", orders},
              {"min_order", study.min_order}, {"max_order", study.max_order}};
  r.bound = {{"order", {lo, hi}}, {"runtime_seconds", s.convergence_time_limit}};
  // Wall time is checked but kept out of the record so reports stay reproducible.
  r.status = status(study.min_order >= lo && study.max_order <= hi && elapsed <= s.convergence_time_limit);
  return r;
}

json fit_json(const ExponentFit& f) {
  return {{"model", "power_law"},
          {"params", {{"exponent", f.exponent}, {"intercept", f.intercept}}},
          {"window", {f.window_min, f.window_max}},
          {"residual", f.residual},
          {"accepted", f.accepted},
          {"flags", f.flags}};
}

CheckRecord resolvent_growth(const Config& cfg, const SuiteScale& s) {
  const OperatorSet ops = restrict_zero_mean_temperature(example(s.n_resolvent, s.tau));
  const std::vector<double> grid = s.beta_grid.values();
  const std::pair<double, double> window{s.beta_grid.min, s.beta_grid.max};
  const ResolventScan cat = resolvent_scan(assemble_generator(ops, GeneratorKind::damped_cattaneo), grid, window);
  const ResolventScan fou = resolvent_scan(assemble_generator(ops, GeneratorKind::fourier), grid, window);
  const ImplicationCheck imp = resolvent_implication(cat, fou, cfg.tolerance("implication_eps"),
                                                     cfg.tolerance("implication_eps_prime"));
  const double max_exp = cfg.tolerance("fourier_exponent_max");
  const double lb = 1.0 - cfg.tolerance("resolvent_lower_bound");
  const bool ok = fou.fit.accepted && fou.fit.exponent <= max_exp && std::isfinite(cat.sup_norm) && imp.holds &&
                  cat.min_lower_bound_margin >= lb && fou.min_lower_bound_margin >= lb;
  CheckRecord r;
  r.operation = "resolvent_scan";
  r.values = {{"fourier_fit", fit_json(fou.fit)},
              {"cattaneo_fit", fit_json(cat.fit)},
              {"cattaneo_sup_norm", json_number(cat.sup_norm)},
              {"fourier_sup_norm", json_number(fou.sup_norm)},
              {"implication", {{"premise", imp.premise}, {"conclusion", imp.conclusion}, {"holds", imp.holds}}},
              {"lower_bound_margin", {cat.min_lower_bound_margin, fou.min_lower_bound_margin}},
              {"n_interior", s.n_resolvent},
              {"points", grid.size()}};
  r.bound = {{"fourier_exponent", max_exp}, {"cattaneo_sup_norm", "finite"}, {"lower_bound_margin", lb}};
  r.status = status(ok);
  return r;
}

std::vector<ObservabilityGramian> observability_series(const SuiteScale& s, OperatorSet& ops_out) {
  ops_out = example(s.n_observability, s.tau);
  const BlockGenerator gen = assemble_generator(ops_out, GeneratorKind::conservative_cattaneo);
  return gramian_series(gen, s.observability_horizons, s.observability_dt);
}

CheckRecord observability(const Config&, const SuiteScale& s) {
  OperatorSet ops;
  const auto series = observability_series(s, ops);
  std::vector<double> c;
  json per_T = json::array();
  for (const auto& g : series) {
    const ObservabilityReport rep = observability_constant(g, g.metric, true);
    c.push_back(rep.c_obs);
    per_T.push_back({{"T", g.T}, {"c_obs", rep.c_obs}, {"kernel_dim", rep.kernel_dim}});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < c.size(); ++i) monotone = monotone && c[i] >= c[i - 1];
  CheckRecord r;
  r.operation = "observability_constant";
  r.values = {{"horizons", per_T}, {"n_interior", s.n_observability}, {"dt", s.observability_dt}};
  r.bound = {{"c_obs_last", "> 0"}, {"monotone_in_T", true}};
  r.status = status(!c.empty() && c.back() > 0.0 && monotone);
  return r;
}

CheckRecord ingham(const Config& cfg, const SuiteScale& s) {
  const InghamReport base = ingham_direct_check(s.tau, s.ingham_T, s.ingham_n_max, s.ingham_trials, cfg.seed);
  const InghamReport doubled = ingham_direct_check(s.tau, s.ingham_T, s.ingham_n_max, 2 * s.ingham_trials, cfg.seed);
  const InghamReport rational = ingham_direct_check(s.ingham_refused_tau, s.ingham_T, s.ingham_n_max, 1, cfg.seed);
  const double change = base.refused || doubled.refused ? std::numeric_limits<double>::infinity()
                                                        : std::abs(doubled.min_ratio - base.min_ratio) / base.min_ratio;
  const double tol = cfg.tolerance("ingham_doubling");
  CheckRecord r;
  r.operation = "ingham_direct_check";
  r.values = {{"min_ratio", base.min_ratio},
              {"min_ratio_doubled", doubled.min_ratio},
              {"relative_change", json_number(change)},
              {"trials", s.ingham_trials},
              {"n_max", s.ingham_n_max},
              {"T", s.ingham_T},
              {"seed", cfg.seed},
              {"min_gap_modal", base.min_gap_modal},
              {"rational_tau", s.ingham_refused_tau},
              {"rational_refused", rational.refused},
              {"rational_diagnostic", rational.diagnostic}};
  r.bound = {{"min_ratio", "> 0"}, {"relative_change", tol}, {"rational_refused", true}};
  r.status = status(!base.refused && base.min_ratio > 0.0 && change < tol && rational.refused);
  return r;
}

CheckRecord russell(const Config& cfg, const SuiteScale& s) {
  const double tol = cfg.tolerance("russell_residual");
  const std::array<std::array<double, 3>, 3> cases{{{1.0, 0.0, 1.0}, {0.1, 1.0, 5.0}, {2.0, -0.5, 1.0}}};
  json runs = json::array();
  bool ok = true;
  for (const auto& [C, delta, E0] : cases) {
    const RussellRun run = russell_verify(C, delta, E0, s.russell_steps);
    runs.push_back({{"C", C},
                    {"delta", delta},
                    {"E0", E0},
                    {"M", json_number(run.M)},
                    {"bound_holds", run.bound_holds},
                    {"strictly_decreasing", run.strictly_decreasing},
                    {"max_recurrence_residual", run.max_recurrence_residual},
                    {"scaled_non_increasing_after_burn_in", run.trend_non_increasing},
                    {"scaled_tail_variation", run.tail_variation}});
    ok = ok && run.bound_holds && std::isfinite(run.M) && run.max_recurrence_residual <= tol &&
         run.strictly_decreasing;
  }
  CheckRecord r;
  r.operation = "russell_verify";
  r.values = {{"runs", runs}, {"K", s.russell_steps}};
  r.bound = {{"recurrence_residual", tol}, {"M", "finite"}};
  r.status = status(ok);
  return r;
}

CheckRecord fractional_sanity(const Config& cfg, const SuiteScale& s) {
  OperatorSet ops;
  SuiteScale single = s;
  single.observability_horizons = {s.observability_horizons.back()};
  const auto series = observability_series(single, ops);
  const Metric frac = fractional_metric(ops, 0.0);
  const Metric energy = energy_metric(ops, GeneratorKind::damped_cattaneo);
  const double metric_gap = (frac.M - energy.M).cwiseAbs().maxCoeff() / energy.M.cwiseAbs().maxCoeff();
  const ObservabilityReport full = observability_constant(series.front(), series.front().metric, true);
  const ObservabilityReport weak = weak_observability_constant(series.front(), ops, 0.0);
  const double const_gap = std::abs(weak.c_obs - full.c_obs) / std::max(full.c_obs, std::numeric_limits<double>::min());
  const double tol_m = cfg.tolerance("fractional_metric");
  const double tol_c = cfg.tolerance("weak_constant");
  CheckRecord r;
  r.operation = "fractional_metric";
  r.values = {{"metric_rel_gap", metric_gap}, {"c_obs", full.c_obs}, {"c_obs_weak_alpha0", weak.c_obs},
              {"constant_rel_gap", const_gap}, {"T", series.front().T}};
  r.bound = {{"metric_rel_gap", tol_m}, {"constant_rel_gap", tol_c}};
  r.status = status(metric_gap <= tol_m && const_gap <= tol_c);
  return r;
}

}  // namespace

SuiteScale suite_scale(const std::string& profile) {
  SuiteScale s;
  if (profile == "full") return s;
  if (profile != "quick") throw InvalidArgument("unknown suite profile '" + profile + "'");
  s.n_identity = 30;
  s.identity_samples = 20;
  s.n_dynamics = 30;
  s.T_balance = 2.0;
  s.T_conservation = 2.0;
  s.T_splitting = 0.5;
  s.inequality_states = 4;
  s.convergence_sizes = {20, 40, 80};
  s.n_resolvent = 60;
  s.beta_grid = BetaGrid{10.0, 1000.0, 41, true, false};
  s.n_observability = 20;
  s.ingham_n_max = 8;
  s.ingham_trials = 50;
  s.russell_steps = 1000;
  s.T_decay = 10.0;
  return s;
}

std::vector<int> criterion_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "dissipation identity";
    case 2: return "adjoint identity";
    case 3: return "energy balance";
    case 4: return "conservative invariance";
    case 5: return "decomposition";
    case 6: return "two-sided flux inequality";
    case 7: return "spectral convergence";
    case 8: return "resolvent growth";
    case 9: return "observability";
    case 10: return "exponential-sum lower bound";
    case 11: return "nonlinear recurrence";
    case 12: return "fractional metric";
    case 13: return "determinism";
    default: return "unknown";
  }
}

CheckRecord run_criterion(int id, const Config& cfg) {
  const SuiteScale s = suite_scale(cfg.profile);
  CheckRecord r;
  switch (id) {
    case 1: r = dissipation_identity(cfg, s); break;
    case 2: r = adjoint_identity(cfg, s); break;
    case 3: r = energy_balance(cfg, s); break;
    case 4: r = conservation(cfg, s); break;
    case 5: r = splitting(cfg, s); break;
    case 6: r = two_sided_inequality(cfg, s); break;
    case 7: r = spectral_order(cfg, s); break;
    case 8: r = resolvent_growth(cfg, s); break;
    case 9: r = observability(cfg, s); break;
    case 10: r = ingham(cfg, s); break;
    case 11: r = russell(cfg, s); break;
    case 12: r = fractional_sanity(cfg, s); break;
    default: throw InvalidArgument("no criterion with id " + std::to_string(id));
  }
  std::ostringstream name;
  name << "criterion_" << (id < 10 ? "0" : "") << id;
  r.name = name.str();
  return r;
}

std::vector<std::pair<CheckRecord, double>> supplementary_records(const Config& cfg) {
  const SuiteScale s = suite_scale(cfg.profile);
  std::vector<std::pair<CheckRecord, double>> out;

  auto t0 = clock_type::now();
  {
    const ExplicitFormulaReport rep = validate_explicit_formulas(s.tau, 6, build_grid(s.n_dynamics));
    json rows = json::array();
    for (const auto& row : rep.rows) {
      rows.push_back({{"n", row.n},
                      {"displayed", {row.displayed[0], row.displayed[1]}},
                      {"modal", {row.modal[0], row.modal[1]}},
                      {"discrepancy", row.discrepancy},
                      {"eigenfunction_residual", row.eigenfunction_residual}});
    }
    CheckRecord r;
    r.name = "explicit_frequencies";
    r.operation = "validate_explicit_formulas";
    r.values = {{"tau", rep.tau}, {"irrational_ratio", rep.tau_hypothesis_holds}, {"rows", rows}};
    out.emplace_back(r, seconds_since(t0));
  }

  t0 = clock_type::now();
  {
    const GapTable modal = frequency_gap(s.tau, s.ingham_n_max, FrequencySource::modal_oracle);
    const GapTable displayed = frequency_gap(s.tau, s.ingham_n_max, FrequencySource::displayed_set);
    CheckRecord r;
    r.name = "frequency_gaps";
    r.operation = "frequency_gap";
    r.values = {{"n_max", s.ingham_n_max},
                {"modal_min_gap", modal.min_gap},
                {"displayed_min_gap", displayed.min_gap},
                {"modal_duplicates", modal.has_duplicates}};
    out.emplace_back(r, seconds_since(t0));
  }

  t0 = clock_type::now();
  {
    const OperatorSet ops = restrict_zero_mean_temperature(example(s.n_dynamics, s.tau));
    const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
    const SmoothStateSampler sampler(ops, s.smooth_modes);
    auto rng = criterion_rng(cfg, 101);
    const EnergyTrace trace = energy_trace(gen, simulate(gen, sampler.cattaneo(rng), s.T_decay, s.decay_dt));
    const DecayFit ex = decay_fit(trace, DecayModel::exponential);
    const DecayFit po = decay_fit(trace, DecayModel::polynomial);
    CheckRecord r;
    r.name = "decay_model_selection";
    r.operation = "decay_fit";
    r.values = {{"exponential", {{"M", ex.prefactor}, {"omega", ex.rate}, {"residual", ex.residual}}},
                {"polynomial", {{"C", po.prefactor}, {"p", po.rate}, {"residual", po.residual}}},
                {"exponential_preferred", ex.accepted && ex.residual < po.residual},
                {"window", {ex.t_min, ex.t_max}}};
    out.emplace_back(r, seconds_since(t0));
  }

  t0 = clock_type::now();
  {
    const OperatorSet ops = restrict_zero_mean_temperature(example(s.n_dynamics, s.tau));
    const DecayCertificate cert =
        polynomial_decay_certificate(ops, 1.0, 1.0, s.decay_dt, 4, 10, cfg.seed, s.smooth_modes);
    CheckRecord r;
    r.name = "decay_certificate";
    r.operation = "polynomial_decay_certificate";
    r.values = {{"alpha", cert.alpha},
                {"monotone", cert.monotone},
                {"sup_scaled", cert.sup_scaled},
                {"exponential_preferred", cert.exponential_preferred},
                {"fitted_power", cert.polynomial.rate},
                {"certificate", cert.pass}};
    out.emplace_back(r, seconds_since(t0));
  }
  return out;
}

Report run_verify(const Config& cfg, const ProgressFn& progress) {
  Report report;
  report.config = cfg.to_json();
  for (int id : criterion_ids()) {
    const auto t0 = clock_type::now();
    CheckRecord r;
    try {
      r = run_criterion(id, cfg);
    } catch (const std::exception& e) {
      r = CheckRecord{};
      std::ostringstream name;
      name << "criterion_" << (id < 10 ? "0" : "") << id;
      r.name = name.str();
      r.operation = "run_criterion";
      r.values = {{"error", e.what()}};
      r.status = CheckStatus::fail;
    }
    const double dt = seconds_since(t0);
    if (progress) progress(r, dt);
    report.add(std::move(r), dt);
  }
  for (auto& [r, dt] : supplementary_records(cfg)) {
    if (progress) progress(r, dt);
    report.add(std::move(r), dt);
  }
  return report;
}

std::string summarize(const CheckRecord& record) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : record.values.items()) {
    if (!(v.is_number() || v.is_boolean() || v.is_string())) continue;
    if (!first) os << ", ";
    first = false;
    os << k << "=";
    if (v.is_string()) {
      os << v.get<std::string>();
    } else {
      os << v.dump();
    }
  }
  return os.str();
}

}  // namespace thermolab
