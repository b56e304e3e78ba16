#pragma once

// Decay-rate fits on energy traces, the extremal sequence of the nonlinear
// recurrence E_{k+1} + C E_{k+1}^{2+delta} = E_k, and the interval-sampled
// polynomial decay certificate.

#include <cstdint>
#include <string>
#include <vector>

#include "thermolab/dynamics.hpp"
#include "thermolab/operators.hpp"

namespace thermolab {

enum class DecayModel { exponential, polynomial };

std::string to_string(DecayModel model);

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  // exponential: E ~ prefactor * exp(-rate t)
  // polynomial:  E ~ prefactor * (1 + t)^(-rate), alpha_hat = 1 / rate
  double prefactor = 0.0;
  double rate = 0.0;
  double alpha_hat = 0.0;
  double residual = 0.0;  // RMS of log E misfit
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  bool accepted = false;
};

/// Fit over t in [t0 + transient_fraction * (t_end - t0), t_end].
DecayFit decay_fit(const EnergyTrace& trace, DecayModel model, double transient_fraction = 0.1);
DecayFit decay_fit_window(const std::vector<double>& t, const std::vector<double>& E, DecayModel model,
                          double t_min, double t_max);

struct RussellRun {
  double C = 1.0;
  double delta = 0.0;
  double E0 = 1.0;
  long K = 0;
  double power = 1.0;  // 1 / (1 + delta)
  std::vector<double> E;
  std::vector<double> scaled;  // E_k (k+1)^power
  double M = 0.0;
  double max_recurrence_residual = 0.0;
  bool strictly_decreasing = false;
  bool bound_holds = false;
  long burn_in = 0;
  bool trend_non_increasing = false;  // scaled sequence after burn-in
  double tail_variation = 0.0;        // relative spread of scaled over the last half
};

/// Extremal sequence with equality in the recurrence, each step solved by
/// bisection to full double precision.
RussellRun russell_verify(double C, double delta, double E0, long K);

struct DecayCertificate {
  double alpha = 1.0;
  double T = 1.0;
  double dt = 0.0;
  int ensemble = 0;
  int intervals = 0;
  bool vacuous = false;
  bool monotone = true;
  // H_k = E(kT) / (||z0||^2 + ||G z0||^2), one row per member.
  std::vector<std::vector<double>> normalized;
  double sup_scaled = 0.0;  // sup_k H_k (k+1)^{1/alpha}
  DecayFit exponential;
  DecayFit polynomial;
  bool exponential_preferred = false;
  bool rate_consistent = false;
  bool pass = false;
};

/// Damped Cattaneo runs from smooth random data, sampled at t = kT,
/// k = 0..intervals.
DecayCertificate polynomial_decay_certificate(const OperatorSet& ops, double alpha, double T, double dt, int ensemble,
                                              int intervals, std::uint64_t seed, int modes = 8);

}  // namespace thermolab
