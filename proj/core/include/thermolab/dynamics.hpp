#pragma once

// Time integration of the damped, conservative and forced systems with the
// implicit midpoint (Cayley) rule, energy traces and the trajectory-level
// identities built on top of them.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermolab/operators.hpp"

namespace thermolab {

using StateVector = Eigen::VectorXd;

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  GeneratorKind kind = GeneratorKind::damped_cattaneo;
  double dt = 0.0;
  std::string integrator = "implicit_midpoint";

  std::size_t size() const { return times.size(); }
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;       // E_k = 1/2 z_k^T M z_k
  std::vector<double> dissipation;  // h|w3|^2 (Cattaneo) or h|A2* w2|^2 (Fourier)
};

/// Number of steps for horizon T; T must be an integer multiple of dt up to 1e-9.
long step_count(double T, double dt);

/// z_{k+1} = (I - dt/2 G)^{-1} (I + dt/2 G) z_k with a single LU of (I - dt/2 G).
class MidpointStepper {
 public:
  MidpointStepper(const Eigen::MatrixXd& G, double dt);

  double dt() const { return dt_; }
  const Eigen::MatrixXd& step_matrix() const { return step_; }
  /// (I - dt/2 G)^{-1} applied to a matrix or vector.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

  void advance(StateVector& z) const { z = step_ * z; }

 private:
  double dt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd step_;
};

Trajectory simulate(const BlockGenerator& gen, const StateVector& z0, double T, double dt);

/// z' = A_c z - B g(t), z(0) = 0; g holds step_count(T,dt)+1 samples on the
/// time grid, the forcing of step k is (g_k + g_{k+1})/2.
Trajectory simulate_forced(const BlockGenerator& gen_conservative, const Eigen::MatrixXd& B,
                           const std::vector<Eigen::VectorXd>& g, double T, double dt);

/// Per-sample dissipation rate; the Cattaneo kinds use the flux slot, the
/// Fourier kind the temperature gradient.
double dissipation_rate(const BlockGenerator& gen, const StateVector& z);
double energy(const BlockGenerator& gen, const StateVector& z);

EnergyTrace energy_trace(const BlockGenerator& gen, const Trajectory& traj);

/// Cumulative trapezoid integral of samples on a uniform grid.
std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt);
double trapezoid(const std::vector<double>& f, double dt);

enum class DissipationQuadrature {
  midpoint_states,  // d evaluated at (z_k + z_{k+1})/2, the scheme's own law
  grid_states,      // trapezoid on d(z_k); O(dt^2) consistency with the continuous law
};

/// max_k |E(0) - E(t_k) - int_0^{t_k} d| / E(0). 0 when E(0) = 0.
double energy_balance_residual(const BlockGenerator& gen, const Trajectory& traj,
                               DissipationQuadrature quadrature = DissipationQuadrature::midpoint_states);

/// Largest relative violation of E_{k+1} - E_k = dt <G z_mid, z_mid>_M.
double discrete_energy_law_residual(const BlockGenerator& gen, const Trajectory& traj);

/// max_k ||z_damped - (z_conservative + z_forced)||_H / ||z0||_H, where the
/// forced run is driven by the feedback signal g = B* z_damped.
double splitting_check(const OperatorSet& ops, const StateVector& z0, double T, double dt);

struct InegdubRatios {
  double lower_ratio = 1.0;  // I_phi / I_w
  double upper_ratio = 1.0;  // I_w / I_phi
  double I_w = 0.0;
  double I_phi = 0.0;
};

InegdubRatios inegdub_check(const OperatorSet& ops, const StateVector& z0, double T, double dt);

/// int_0^T ||phi_3||^2 dt / ||z0||_H^2 along the conservative flow; 0 for z0 = 0.
double conservative_trace_bound(const OperatorSet& ops, const StateVector& z0, double T, double dt);

/// L2(0,T;H1) norm of a sampled flux-slot signal.
double flux_signal_l2(const OperatorSet& ops, const std::vector<Eigen::VectorXd>& g, double dt);

/// Samples smooth states: random combinations of the lowest eigenvectors of
/// A1 (displacement, velocity, flux) and of A (temperature, nonzero modes).
/// Displacement coefficients are scaled by lambda^{-1/2} so every slot
/// contributes comparable energy. Such states lie in D(A_d).
class SmoothStateSampler {
 public:
  SmoothStateSampler(const OperatorSet& ops, int modes);

  StateVector cattaneo(std::mt19937_64& rng) const;
  StateVector fourier(std::mt19937_64& rng) const;
  /// A flux-slot signal sample (one time instant).
  Eigen::VectorXd flux(std::mt19937_64& rng) const;

 private:
  StateVector sample(std::mt19937_64& rng, bool with_flux) const;

  Eigen::Index n1_, n2_;
  Eigen::MatrixXd modes1_;  // h-orthonormal eigenvectors of A1
  Eigen::VectorXd lambda1_;
  Eigen::MatrixXd modes2_;  // h-orthonormal eigenvectors of A with nonzero eigenvalue
};

}  // namespace thermolab
