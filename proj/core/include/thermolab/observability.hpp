#pragma once

// Observability of the conservative Cattaneo flow through the flux slot:
// Gramians, observability constants in the energy and fractional metrics and
// direct checks of the exponential-sum (Ingham) lower bound.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermolab/operators.hpp"

namespace thermolab {

struct ObservabilityGramian {
  double T = 0.0;
  double dt = 0.0;
  Eigen::MatrixXd G;       // x^T G x = int_0^T h |(S(t) x)_flux|^2 dt (trapezoid)
  Eigen::MatrixXd kernel;  // columns: basis of ker(generator), state coordinates
  Metric metric;           // energy metric of the generator
  Layout layout;
  GeneratorKind kind = GeneratorKind::conservative_cattaneo;
};

/// Numerical kernel: right singular vectors of L^T G L^{-T} with singular
/// value below 1e-10 * sigma_max, mapped back to state coordinates.
Eigen::MatrixXd generator_kernel(const BlockGenerator& gen);

ObservabilityGramian gramian(const BlockGenerator& gen_conservative, double T, double dt, Eigen::Index cap = 2000);

/// Gramians at several horizons from a single integration; horizons must be
/// nonnegative multiples of dt, returned in the given order.
std::vector<ObservabilityGramian> gramian_series(const BlockGenerator& gen_conservative,
                                                 const std::vector<double>& horizons, double dt,
                                                 Eigen::Index cap = 2000);

struct ObservabilityReport {
  double T = 0.0;
  double alpha = 0.0;
  double c_obs = 0.0;
  double raw_min_eigenvalue = 0.0;  // before clamping at 0
  MetricLabel metric_label = MetricLabel::H;
  std::string subspace;  // "full" or "kernel complement (dim k)"
  Eigen::Index kernel_dim = 0;
  Eigen::VectorXd minimizing_direction;  // state coordinates, unit metric norm
  std::vector<double> minimizing_direction_norms;  // per slot, metric-weighted
};

/// Smallest generalized eigenvalue of (G_T, M), optionally on the
/// M-orthogonal complement of the gramian's kernel basis.
ObservabilityReport observability_constant(const ObservabilityGramian& gram, const Metric& metric,
                                           bool restrict_kernel);

/// Same quotient with M replaced by the fractional metric of order alpha; the
/// subspace is the energy-metric complement of the kernel so that alpha = 0
/// reproduces observability_constant.
ObservabilityReport weak_observability_constant(const ObservabilityGramian& gram, const OperatorSet& ops,
                                                double alpha);

struct InghamReport {
  double tau = 1.0;
  double T = 0.0;
  int n_max = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool refused = false;
  std::string diagnostic;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<double> ratios;
  double min_gap_modal = 0.0;
  double min_gap_displayed = 0.0;
  bool tau_hypothesis_holds = true;
};

/// Exponential-sum family of the 1D example: per mode n, the four modal
/// eigenvalues and their flux amplitudes for unit displacement.
struct ExponentialFamily {
  std::vector<int> mode;
  std::vector<std::complex<double>> lambda;
  std::vector<std::complex<double>> flux_amplitude;
};

ExponentialFamily modal_exponential_family(double tau, int n_max);

/// 1/2 sum_n int_0^T |sum_j a_{n,j} c_{n,j} exp(lambda_{n,j} t)|^2 dt by
/// composite Gauss-Legendre quadrature.
double ingham_numerator(const ExponentialFamily& family, const Eigen::VectorXcd& coeff, double T);
double ingham_denominator(const ExponentialFamily& family, const Eigen::VectorXcd& coeff);

/// Random complex coefficients per (mode, eigenvalue); refuses when the
/// frequency ratio is rational or the family has coincident frequencies.
InghamReport ingham_direct_check(double tau, double T, int n_max, int trials, std::uint64_t seed);

}  // namespace thermolab
