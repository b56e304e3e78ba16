#include "thermolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermolab/errors.hpp"

namespace thermolab {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

long step_count(double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (!(T >= dt) || !std::isfinite(T)) throw InvalidArgument("T must be >= dt");
  const double ratio = T / dt;
  const long steps = std::lround(ratio);
  if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "T = " << T << " is not an integer multiple of dt = " << dt;
    throw InvalidArgument(os.str());
  }
  return steps;
}

MidpointStepper::MidpointStepper(const MatrixXd& G, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("MidpointStepper: dt must be > 0");
  const Index N = G.rows();
  const MatrixXd I = MatrixXd::Identity(N, N);
  lu_.compute(I - 0.5 * dt * G);
  const double rcond = lu_.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << "MidpointStepper: I - dt/2 G is numerically singular (rcond = " << rcond << ")";
    throw NumericalFailure(os.str());
  }
  step_ = lu_.solve(I + 0.5 * dt * G);
}

namespace {

void require_finite(const StateVector& z, long step) {
  if (!z.allFinite()) {
    throw NumericalFailure("non-finite state encountered at step " + std::to_string(step));
  }
}

}  // namespace

Trajectory simulate(const BlockGenerator& gen, const StateVector& z0, double T, double dt) {
  if (z0.size() != gen.dimension()) {
    throw InvalidArgument("simulate: initial state dimension does not match generator layout");
  }
  require_finite(z0, 0);
  const long steps = step_count(T, dt);
  const MidpointStepper stepper(gen.G, dt);

  Trajectory traj;
  traj.kind = gen.kind;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(z0);
  StateVector z = z0;
  for (long k = 1; k <= steps; ++k) {
    stepper.advance(z);
    require_finite(z, k);
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(z);
  }
  return traj;
}

Trajectory simulate_forced(const BlockGenerator& gen_conservative, const MatrixXd& B,
                           const std::vector<VectorXd>& g, double T, double dt) {
  const long steps = step_count(T, dt);
  if (static_cast<long>(g.size()) != steps + 1) {
    throw InvalidArgument("simulate_forced: expected " + std::to_string(steps + 1) +
                          " forcing samples, got " + std::to_string(g.size()));
  }
  if (B.rows() != gen_conservative.dimension()) {
    throw InvalidArgument("simulate_forced: input map does not match generator dimension");
  }
  for (const auto& gk : g) {
    if (gk.size() != B.cols()) throw InvalidArgument("simulate_forced: forcing sample has wrong size");
  }
  const MidpointStepper stepper(gen_conservative.G, dt);
  const MatrixXd F = dt * stepper.solve(B);

  Trajectory traj;
  traj.kind = gen_conservative.kind;
  traj.dt = dt;
  traj.integrator = "implicit_midpoint_forced";
  StateVector z = StateVector::Zero(gen_conservative.dimension());
  traj.times.push_back(0.0);
  traj.states.push_back(z);
  for (long k = 0; k < steps; ++k) {
    const VectorXd g_mid = 0.5 * (g[k] + g[k + 1]);
    z = stepper.step_matrix() * z - F * g_mid;
    require_finite(z, k + 1);
    traj.times.push_back(static_cast<double>(k + 1) * dt);
    traj.states.push_back(z);
  }
  return traj;
}

double dissipation_rate(const BlockGenerator& gen, const StateVector& z) {
  const double h = gen.ops->quad_weight;
  if (gen.kind == GeneratorKind::fourier) {
    const auto w2 = z.segment(gen.layout.slot(SlotName::w2).offset, gen.layout.slot(SlotName::w2).size);
    return h * (gen.ops->A2star * w2).squaredNorm();
  }
  const Slot& w3 = gen.layout.slot(SlotName::w3);
  return h * z.segment(w3.offset, w3.size).squaredNorm();
}

double energy(const BlockGenerator& gen, const StateVector& z) { return 0.5 * gen.metric.norm_squared(z); }

EnergyTrace energy_trace(const BlockGenerator& gen, const Trajectory& traj) {
  EnergyTrace trace;
  trace.times = traj.times;
  trace.energy.reserve(traj.size());
  trace.dissipation.reserve(traj.size());
  for (const auto& z : traj.states) {
    trace.energy.push_back(energy(gen, z));
    trace.dissipation.push_back(dissipation_rate(gen, z));
  }
  return trace;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (f[k - 1] + f[k]);
  return out;
}

double trapezoid(const std::vector<double>& f, double dt) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * dt;
}

double energy_balance_residual(const BlockGenerator& gen, const Trajectory& traj, DissipationQuadrature quadrature) {
  if (gen.kind == GeneratorKind::conservative_cattaneo) {
    throw InvalidArgument("energy_balance_residual: requires a damped generator");
  }
  const EnergyTrace trace = energy_trace(gen, traj);
  const double E0 = trace.energy.front();
  if (E0 == 0.0) return 0.0;
  std::vector<double> dissipated;
  if (quadrature == DissipationQuadrature::grid_states) {
    dissipated = cumulative_trapezoid(trace.dissipation, traj.dt);
  } else {
    dissipated.assign(traj.states.size(), 0.0);
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
      const StateVector mid = 0.5 * (traj.states[k] + traj.states[k + 1]);
      dissipated[k + 1] = dissipated[k] + traj.dt * dissipation_rate(gen, mid);
    }
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.energy.size(); ++k) {
    worst = std::max(worst, std::abs(E0 - trace.energy[k] - dissipated[k]) / E0);
  }
  return worst;
}

double discrete_energy_law_residual(const BlockGenerator& gen, const Trajectory& traj) {
  if (traj.states.empty()) return 0.0;
  const double E0 = energy(gen, traj.states.front());
  if (E0 == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const StateVector mid = 0.5 * (traj.states[k] + traj.states[k + 1]);
    const double lhs = energy(gen, traj.states[k + 1]) - energy(gen, traj.states[k]);
    const double rhs = traj.dt * gen.metric.inner(gen.G * mid, mid);
    worst = std::max(worst, std::abs(lhs - rhs) / E0);
  }
  return worst;
}

double splitting_check(const OperatorSet& ops, const StateVector& z0, double T, double dt) {
  const BlockGenerator damped = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const BlockGenerator conservative = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  const InputMap input = assemble_input_map(ops);

  const double z0_norm = std::sqrt(damped.metric.norm_squared(z0));
  if (z0_norm == 0.0) return 0.0;

  const Trajectory zd = simulate(damped, z0, T, dt);
  const Trajectory zc = simulate(conservative, z0, T, dt);
  std::vector<VectorXd> g;
  g.reserve(zd.size());
  for (const auto& z : zd.states) g.push_back(input.Bstar * z);
  const Trajectory zf = simulate_forced(conservative, input.B, g, T, dt);

  double worst = 0.0;
  for (std::size_t k = 0; k < zd.size(); ++k) {
    const StateVector diff = zd.states[k] - (zc.states[k] + zf.states[k]);
    worst = std::max(worst, std::sqrt(damped.metric.norm_squared(diff)) / z0_norm);
  }
  return worst;
}

namespace {

double flux_integral(const BlockGenerator& gen, const Trajectory& traj) {
  const Slot& w3 = gen.layout.slot(SlotName::w3);
  const double h = gen.ops->quad_weight;
  std::vector<double> f;
  f.reserve(traj.size());
  for (const auto& z : traj.states) f.push_back(h * z.segment(w3.offset, w3.size).squaredNorm());
  return trapezoid(f, traj.dt);
}

}  // namespace

InegdubRatios inegdub_check(const OperatorSet& ops, const StateVector& z0, double T, double dt) {
  const BlockGenerator damped = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const BlockGenerator conservative = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  InegdubRatios r;
  if (damped.metric.norm_squared(z0) == 0.0) return r;

  r.I_w = flux_integral(damped, simulate(damped, z0, T, dt));
  r.I_phi = flux_integral(conservative, simulate(conservative, z0, T, dt));
  if (r.I_phi == 0.0) {
    if (r.I_w != 0.0) {
      throw NumericalFailure("inegdub_check: conservative flux vanishes while damped flux does not");
    }
    return r;
  }
  if (r.I_w == 0.0) {
    r.lower_ratio = std::numeric_limits<double>::infinity();
    r.upper_ratio = 0.0;
    return r;
  }
  r.lower_ratio = r.I_phi / r.I_w;
  r.upper_ratio = r.I_w / r.I_phi;
  return r;
}

double conservative_trace_bound(const OperatorSet& ops, const StateVector& z0, double T, double dt) {
  const BlockGenerator conservative = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  const double z0_sq = conservative.metric.norm_squared(z0);
  if (z0_sq == 0.0) return 0.0;
  const double ratio = flux_integral(conservative, simulate(conservative, z0, T, dt)) / z0_sq;
  if (!std::isfinite(ratio)) throw NumericalFailure("conservative_trace_bound: non-finite ratio");
  return ratio;
}

double flux_signal_l2(const OperatorSet& ops, const std::vector<VectorXd>& g, double dt) {
  std::vector<double> f;
  f.reserve(g.size());
  for (const auto& gk : g) f.push_back(ops.quad_weight * gk.squaredNorm());
  return std::sqrt(trapezoid(f, dt));
}

SmoothStateSampler::SmoothStateSampler(const OperatorSet& ops, int modes)
    : n1_(ops.n1()), n2_(ops.n2()) {
  if (modes < 1) throw InvalidArgument("SmoothStateSampler: modes must be >= 1");
  const double inv_sqrt_h = 1.0 / std::sqrt(ops.quad_weight);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es1(ops.A1);
  const Index k1 = std::min<Index>(modes, n1_);
  modes1_ = inv_sqrt_h * es1.eigenvectors().leftCols(k1);
  lambda1_ = es1.eigenvalues().head(k1);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es2(ops.heat_operator());
  const VectorXd& mu = es2.eigenvalues();
  const double tol = 1e-10 * mu.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < mu.size() && static_cast<int>(keep.size()) < modes; ++i) {
    if (mu[i] > tol) keep.push_back(i);
  }
  modes2_.resize(n2_, static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    modes2_.col(static_cast<Index>(j)) = inv_sqrt_h * es2.eigenvectors().col(keep[j]);
  }
}

StateVector SmoothStateSampler::sample(std::mt19937_64& rng, bool with_flux) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto coeffs = [&](Index k) {
    VectorXd c(k);
    for (Index i = 0; i < k; ++i) c[i] = normal(rng);
    return c;
  };
  const Index k1 = modes1_.cols();
  StateVector z = StateVector::Zero(3 * n1_ + n2_ - (with_flux ? 0 : n1_));
  z.segment(0, n1_) = modes1_ * (coeffs(k1).array() / lambda1_.array().sqrt()).matrix();
  z.segment(n1_, n1_) = modes1_ * coeffs(k1);
  z.segment(2 * n1_, n2_) = modes2_ * coeffs(modes2_.cols());
  if (with_flux) z.segment(2 * n1_ + n2_, n1_) = modes1_ * coeffs(k1);
  return z;
}

StateVector SmoothStateSampler::cattaneo(std::mt19937_64& rng) const { return sample(rng, true); }

StateVector SmoothStateSampler::fourier(std::mt19937_64& rng) const { return sample(rng, false); }

VectorXd SmoothStateSampler::flux(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd c(modes1_.cols());
  for (Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
  return modes1_ * c;
}

}  // namespace thermolab
