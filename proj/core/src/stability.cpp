#include "thermolab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "thermolab/errors.hpp"

namespace thermolab {

using Eigen::VectorXd;

std::string to_string(DecayModel model) {
  return model == DecayModel::exponential ? "exponential" : "polynomial";
}

DecayFit decay_fit_window(const std::vector<double>& t, const std::vector<double>& E, DecayModel model, double t_min,
                          double t_max) {
  if (t.size() != E.size()) throw InvalidArgument("decay_fit: time/energy size mismatch");
  DecayFit fit;
  fit.model = model;
  fit.t_min = t_min;
  fit.t_max = t_max;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(E[i] > 0.0)) {
      throw InvalidArgument("decay_fit: non-positive energy " + std::to_string(E[i]) + " at t = " +
                            std::to_string(t[i]));
    }
    x.push_back(model == DecayModel::exponential ? t[i] : std::log1p(t[i]));
    y.push_back(std::log(E[i]));
  }
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) throw InvalidArgument("decay_fit: fewer than two samples in the window");

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("decay_fit: degenerate time window");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - icpt - slope * x[i];
    ss += e * e;
  }
  fit.rate = -slope;
  fit.prefactor = std::exp(icpt);
  fit.residual = std::sqrt(ss / n);
  fit.alpha_hat = model == DecayModel::polynomial && fit.rate > 0.0 ? 1.0 / fit.rate : 0.0;
  fit.accepted = fit.rate > 0.0;
  return fit;
}

DecayFit decay_fit(const EnergyTrace& trace, DecayModel model, double transient_fraction) {
  if (trace.times.empty()) throw InvalidArgument("decay_fit: empty trace");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    throw InvalidArgument("decay_fit: transient fraction must lie in [0, 1)");
  }
  if (!(trace.energy.front() > 0.0)) throw InvalidArgument("decay_fit: E(0) must be > 0");
  const double t0 = trace.times.front();
  const double t1 = trace.times.back();
  return decay_fit_window(trace.times, trace.energy, model, t0 + transient_fraction * (t1 - t0), t1);
}

RussellRun russell_verify(double C, double delta, double E0, long K) {
  if (!(C > 0.0)) throw InvalidArgument("russell_verify: C must be > 0");
  if (!(delta > -1.0)) throw InvalidArgument("russell_verify: delta must be > -1");
  if (!(E0 > 0.0)) throw InvalidArgument("russell_verify: E0 must be > 0");
  if (K < 1) throw InvalidArgument("russell_verify: K must be >= 1");

  RussellRun run;
  run.C = C;
  run.delta = delta;
  run.E0 = E0;
  run.K = K;
  run.power = 1.0 / (1.0 + delta);
  run.E.reserve(static_cast<std::size_t>(K) + 1);
  run.E.push_back(E0);
  const double q = 2.0 + delta;
  auto lhs = [&](double x) { return x + C * std::pow(x, q); };

  for (long k = 0; k < K; ++k) {
    const double target = run.E.back();
    // lhs is increasing with lhs(0) = 0 < target < lhs(target).
    double lo = 0.0, hi = target;
    if (!(lhs(hi) > target)) throw NumericalFailure("russell_verify: bisection bracket failure");
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (lhs(mid) < target ? lo : hi) = mid;
    }
    const double x = std::abs(lhs(lo) - target) <= std::abs(lhs(hi) - target) ? lo : hi;
    if (!(x > 0.0)) throw NumericalFailure("russell_verify: sequence reached zero");
    run.max_recurrence_residual = std::max(run.max_recurrence_residual, std::abs(lhs(x) - target) / target);
    run.E.push_back(x);
  }

  run.strictly_decreasing = true;
  run.scaled.resize(run.E.size());
  for (std::size_t k = 0; k < run.E.size(); ++k) {
    run.scaled[k] = run.E[k] * std::pow(static_cast<double>(k + 1), run.power);
    run.M = std::max(run.M, run.scaled[k]);
    if (k > 0 && !(run.E[k] < run.E[k - 1])) run.strictly_decreasing = false;
  }
  run.bound_holds = std::isfinite(run.M);
  for (std::size_t k = 0; k < run.E.size(); ++k) {
    if (run.E[k] > run.M / std::pow(static_cast<double>(k + 1), run.power) * (1.0 + 1e-15)) run.bound_holds = false;
  }

  run.burn_in = std::max<long>(1, K / 10);
  run.trend_non_increasing = true;
  for (long k = run.burn_in + 1; k <= K; ++k) {
    if (run.scaled[static_cast<std::size_t>(k)] > run.scaled[static_cast<std::size_t>(k - 1)] * (1.0 + 1e-14)) {
      run.trend_non_increasing = false;
      break;
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (long k = K / 2; k <= K; ++k) {
    lo = std::min(lo, run.scaled[static_cast<std::size_t>(k)]);
    hi = std::max(hi, run.scaled[static_cast<std::size_t>(k)]);
  }
  run.tail_variation = (hi - lo) / hi;
  return run;
}

DecayCertificate polynomial_decay_certificate(const OperatorSet& ops, double alpha, double T, double dt, int ensemble,
                                              int intervals, std::uint64_t seed, int modes) {
  if (!(alpha > 0.0)) throw InvalidArgument("polynomial_decay_certificate: alpha must be > 0");
  if (!(T > 0.0)) throw InvalidArgument("polynomial_decay_certificate: T must be > 0");
  if (ensemble < 0) throw InvalidArgument("polynomial_decay_certificate: ensemble must be >= 0");
  if (intervals < 2) throw InvalidArgument("polynomial_decay_certificate: need at least two intervals");

  DecayCertificate cert;
  cert.alpha = alpha;
  cert.T = T;
  cert.dt = dt;
  cert.ensemble = ensemble;
  cert.intervals = intervals;
  if (ensemble == 0) {
    cert.vacuous = true;
    cert.pass = true;
    return cert;
  }

  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const long per_interval = step_count(T, dt);
  const MidpointStepper stepper(gen.G, dt);
  const SmoothStateSampler sampler(ops, modes);
  std::mt19937_64 rng(seed);

  std::vector<double> times, mean_energy(static_cast<std::size_t>(intervals) + 1, 0.0);
  for (int k = 0; k <= intervals; ++k) times.push_back(k * T);

  for (int member = 0; member < ensemble; ++member) {
    VectorXd z = sampler.cattaneo(rng);
    const double graph = gen.metric.norm_squared(z) + gen.metric.norm_squared(gen.G * z);
    std::vector<double> H{energy(gen, z) / graph};
    mean_energy[0] += H.back() / ensemble;
    for (int k = 1; k <= intervals; ++k) {
      for (long s = 0; s < per_interval; ++s) stepper.advance(z);
      H.push_back(energy(gen, z) / graph);
      mean_energy[static_cast<std::size_t>(k)] += H.back() / ensemble;
      if (H[k] > H[k - 1] * (1.0 + 1e-12)) cert.monotone = false;
      cert.sup_scaled = std::max(cert.sup_scaled, H[k] * std::pow(k + 1.0, 1.0 / alpha));
    }
    cert.sup_scaled = std::max(cert.sup_scaled, H[0]);
    cert.normalized.push_back(std::move(H));
  }

  // Skip the first interval as the transient.
  cert.exponential = decay_fit_window(times, mean_energy, DecayModel::exponential, T, intervals * T);
  cert.polynomial = decay_fit_window(times, mean_energy, DecayModel::polynomial, T, intervals * T);
  cert.exponential_preferred = cert.exponential.accepted && cert.exponential.residual < cert.polynomial.residual;
  cert.rate_consistent = cert.polynomial.accepted && cert.polynomial.rate >= 0.5 / alpha;
  cert.pass = cert.monotone && std::isfinite(cert.sup_scaled) && (cert.exponential_preferred || cert.rate_consistent);
  return cert;
}

}  // namespace thermolab
