#pragma once

// Resolvent norms ||(i beta - G)^{-1}|| in the metric-weighted operator norm,
// scans along the imaginary axis and growth-exponent fits.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermolab/operators.hpp"
#include "thermolab/spectral.hpp"

namespace thermolab {

struct ResolventPoint {
  double beta = 0.0;
  double norm = 0.0;
  double certificate = 0.0;      // relative Ritz residual of the top singular pair
  double distance = 0.0;         // min |i beta - lambda|
  int iterations = 0;
  bool dense_fallback = false;
};

/// Reusable evaluator: one Hessenberg reduction and one eigensolve per
/// generator, then O(N^2) work per solve.
class ResolventEvaluator {
 public:
  explicit ResolventEvaluator(const BlockGenerator& gen);

  /// Throws EigenvalueCollision when i beta is within 1e-12 (relative to the
  /// spectral scale) of an eigenvalue.
  ResolventPoint evaluate(double beta) const;
  double norm(double beta) const { return evaluate(beta).norm; }

  const Spectrum& spectrum() const { return spectrum_; }
  Eigen::Index dimension() const { return H_.rows(); }

 private:
  Eigen::MatrixXd H_;  // upper Hessenberg, orthogonally similar to L^T G L^{-T}
  Spectrum spectrum_;
  double scale_ = 1.0;
};

double resolvent_norm(const BlockGenerator& gen, double beta);

struct BetaGrid {
  double min = 10.0;
  double max = 1000.0;
  int points = 41;
  bool log_spaced = true;
  bool both_signs = false;

  std::vector<double> values() const;
};

struct ExponentFit {
  bool accepted = false;
  double exponent = 0.0;
  double intercept = 0.0;  // log r = intercept + exponent * log beta
  double window_min = 0.0;
  double window_max = 0.0;
  double residual = 0.0;   // RMS in log r
  int points = 0;
  std::vector<std::string> flags;
};

/// Least squares of log r against log beta over beta in [wmin, wmax] (beta > 0).
/// Refused (accepted = false, flag "spike") if an interior local maximum in the
/// window exceeds 10x the window median.
ExponentFit fit_growth_exponent(const std::vector<double>& beta, const std::vector<double>& r,
                                double wmin, double wmax);

struct ResolventScan {
  GeneratorKind kind = GeneratorKind::damped_cattaneo;
  std::vector<ResolventPoint> points;
  double sup_norm = 0.0;
  double min_lower_bound_margin = 0.0;  // min r * dist over points, >= 1 - 1e-6 expected
  std::vector<double> spikes;           // beta values flagged as spikes
  ExponentFit fit;
};

/// Default fit window: the top decade of the grid.
ResolventScan resolvent_scan(const BlockGenerator& gen, const std::vector<double>& beta_grid,
                             std::optional<std::pair<double, double>> window = std::nullopt);
ResolventScan resolvent_scan(const ResolventEvaluator& evaluator, GeneratorKind kind,
                             const std::vector<double>& beta_grid,
                             std::optional<std::pair<double, double>> window = std::nullopt);

/// Bounded Cattaneo resolvent implies at most quadratic Fourier growth:
/// premise  = Cattaneo fit accepted and exponent <= eps,
/// conclusion = Fourier fit accepted and exponent <= 2 + eps_prime.
struct ImplicationCheck {
  double cattaneo_exponent = 0.0;
  double fourier_exponent = 0.0;
  double eps = 0.3;
  double eps_prime = 0.3;
  bool premise = false;
  bool conclusion = false;
  bool holds = false;
};

ImplicationCheck resolvent_implication(const ResolventScan& cattaneo, const ResolventScan& fourier,
                                       double eps = 0.3, double eps_prime = 0.3);

}  // namespace thermolab
