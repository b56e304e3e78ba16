#pragma once

// Spectra of the block generators, the exact per-mode reduction of the 1D
// example and frequency-gap analysis for Ingham-type estimates.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermolab/operators.hpp"

namespace thermolab {

struct Spectrum {
  Eigen::VectorXcd eigenvalues;   // sorted by (Im, Re)
  Eigen::MatrixXcd eigenvectors;  // state coordinates; empty unless requested
  Eigen::VectorXd residuals;      // ||G v - lambda v||_H / ||v||_H
  GeneratorKind kind = GeneratorKind::damped_cattaneo;
  Eigen::Index dimension = 0;

  double max_residual() const;
  double spectral_abscissa() const;
  /// min |Re lambda| over the spectrum.
  double axis_clearance() const;
  /// Positive imaginary parts above rel_tol * max|lambda|, ascending.
  std::vector<double> positive_frequencies(double rel_tol = 1e-8) const;
};

/// Dense eigensolve of L^T G L^{-T} (M = L L^T), residual certificate per pair.
Spectrum eigen(const BlockGenerator& gen, bool keep_vectors = false, Eigen::Index cap = 2000);

/// Single Fourier mode of the 1D example: w1 = a sin, w1' = v sin, w2 = b cos,
/// w3 = c sin. State order (a, v, b[, c]).
struct ModalSystem {
  int mode = 0;
  double wavenumber = 0.0;
  double tau = 1.0;
  GeneratorKind kind = GeneratorKind::conservative_cattaneo;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd metric_weights;  // diag(k^2, 1, 1[, tau])
  Eigen::VectorXcd eigenvalues;    // sorted by (Im, Re)
  Eigen::MatrixXcd eigenvectors;   // columns normalized to unit displacement amplitude
};

ModalSystem modal_system(double wavenumber, double tau, GeneratorKind kind, int mode = 0);
ModalSystem modal_reduce(int n, double tau, GeneratorKind kind);

/// Symbol of the staggered difference operators on mode m: (2/h) sin(m pi h / 2).
double discrete_wavenumber(int m, double h);

/// Positive frequencies of the conservative modal system, (omega_minus, omega_plus).
std::array<double, 2> modal_frequencies(int n, double tau);
/// The two-branch set n pi sqrt((1+tau)/tau), n pi as (slow, fast).
std::array<double, 2> displayed_frequencies(int n, double tau);

/// True when sqrt(tau/(1+tau)) equals p/q with q <= max_denominator to 1e-12.
bool frequency_ratio_is_rational(double tau, int max_denominator = 1000);

struct ExplicitFormulaRow {
  int n = 0;
  std::array<double, 2> displayed{};
  std::array<double, 2> modal{};
  double discrepancy = 0.0;
  double eigenfunction_residual = 0.0;
};

struct ExplicitFormulaReport {
  double tau = 1.0;
  bool tau_hypothesis_holds = true;  // sqrt(tau/(1+tau)) irrational
  bool displayed_purely_imaginary = true;
  std::vector<ExplicitFormulaRow> rows;
};

/// Report-only comparison of the displayed eigenvalue/eigenfunction formulas
/// with the modal reduction and with the discrete conservative generator.
ExplicitFormulaReport validate_explicit_formulas(double tau, int n_max, const Grid& grid);

struct ConvergenceStudy {
  double tau = 1.0;
  std::vector<int> sizes;
  std::vector<double> modal;                   // reference frequencies
  std::vector<std::vector<double>> discrete;   // per size
  std::vector<std::vector<double>> errors;     // per size
  std::vector<std::vector<double>> orders;     // per refinement step, per frequency
  double min_order = 0.0;
  double max_order = 0.0;
};

ConvergenceStudy spectral_convergence(double tau, const std::vector<int>& sizes, int count);

enum class FrequencySource { displayed_set, modal_oracle };

struct GapEntry {
  int branch_i = 0;
  int branch_j = 0;
  int n_i = 0;
  int n_j = 0;
  double gap = 0.0;
};

struct GapTable {
  double min_gap = 0.0;
  bool has_duplicates = false;
  std::vector<GapEntry> entries;
};

/// Pairwise distances among the positive frequencies of both branches for
/// n = 1..n_max. Branch 0 is the slower branch.
GapTable frequency_gap(double tau, int n_max, FrequencySource source);

}  // namespace thermolab
