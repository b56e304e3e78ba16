#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermolab/dynamics.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/stability.hpp"

using namespace thermolab;

namespace {

EnergyTrace synthetic_trace(double t_end, double dt, double (*f)(double)) {
  EnergyTrace trace;
  for (long k = 0; k <= std::lround(t_end / dt); ++k) {
    const double t = k * dt;
    trace.times.push_back(t);
    trace.energy.push_back(f(t));
    trace.dissipation.push_back(0.0);
  }
  return trace;
}

}  // namespace

TEST(DecayFit, RecoversExponentialRate) {
  const EnergyTrace trace = synthetic_trace(5.0, 1e-2, [](double t) { return std::exp(-3.0 * t); });
  const DecayFit fit = decay_fit(trace, DecayModel::exponential);
  EXPECT_NEAR(fit.rate, 3.0, 1e-6);
  EXPECT_NEAR(fit.prefactor, 1.0, 1e-6);
  EXPECT_TRUE(fit.accepted);
  EXPECT_NEAR(fit.t_min, 0.5, 1e-12);
}

TEST(DecayFit, RecoversPolynomialPower) {
  const EnergyTrace trace = synthetic_trace(100.0, 0.1, [](double t) { return std::pow(1.0 + t, -2.0); });
  const DecayFit fit = decay_fit_window(trace.times, trace.energy, DecayModel::polynomial, 10.0, 100.0);
  EXPECT_NEAR(fit.rate, 2.0, 1e-3);
  EXPECT_NEAR(fit.alpha_hat, 0.5, 1e-3);
  EXPECT_TRUE(fit.accepted);
}

TEST(DecayFit, RejectsNonPositiveEnergy) {
  const EnergyTrace trace = synthetic_trace(1.0, 0.1, [](double t) { return t < 0.5 ? 1.0 : 0.0; });
  EXPECT_THROW(decay_fit(trace, DecayModel::exponential), InvalidArgument);
}

TEST(DecayFit, GrowingTraceNotAccepted) {
  const EnergyTrace trace = synthetic_trace(2.0, 0.1, [](double t) { return std::exp(t); });
  EXPECT_FALSE(decay_fit(trace, DecayModel::exponential).accepted);
}

TEST(DecayFit, DampedCattaneoPrefersExponentialModel) {
  const OperatorSet ops = restrict_zero_mean_temperature(assemble_example1(build_grid(50), 1.0));
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  std::mt19937_64 rng(17);
  const StateVector z0 = SmoothStateSampler(ops, 8).cattaneo(rng);
  const EnergyTrace trace = energy_trace(gen, simulate(gen, z0, 20.0, 1e-2));
  const DecayFit e = decay_fit(trace, DecayModel::exponential);
  const DecayFit p = decay_fit(trace, DecayModel::polynomial);
  EXPECT_TRUE(e.accepted);
  EXPECT_GT(e.rate, 0.0);
  EXPECT_LT(e.residual, p.residual);
}

TEST(Russell, RecurrenceAndBound) {
  struct Case {
    double C, delta, E0;
  };
  for (const Case c : {Case{1, 0, 1}, Case{0.1, 1, 5}, Case{2, -0.5, 1}, Case{1, 8, 1}}) {
    const long K = 10000;
    const RussellRun run = russell_verify(c.C, c.delta, c.E0, K);
    ASSERT_EQ(run.E.size(), static_cast<std::size_t>(K + 1));
    EXPECT_TRUE(std::isfinite(run.M));
    EXPECT_TRUE(run.strictly_decreasing);
    EXPECT_TRUE(run.bound_holds);
    EXPECT_LE(run.max_recurrence_residual, 1e-12);
    // independent recomputation of the recurrence in extended precision
    const long double q = 2.0L + c.delta;
    for (long k = 0; k < K; ++k) {
      const long double next = run.E[static_cast<std::size_t>(k + 1)];
      const long double prev = run.E[static_cast<std::size_t>(k)];
      const long double back = next + static_cast<long double>(c.C) * std::pow(next, q);
      EXPECT_LE(std::abs(static_cast<double>((back - prev) / prev)), 1e-12);
      if (::testing::Test::HasFailure()) return;
    }
    const double p = 1.0 / (1.0 + c.delta);
    for (long k = 0; k <= K; k += 97) {
      EXPECT_LE(run.E[static_cast<std::size_t>(k)], run.M / std::pow(k + 1.0, p) * (1 + 1e-15));
    }
  }
}

TEST(Russell, QuadraticCaseConstantBelowTwiceInitial) {
  const RussellRun run = russell_verify(1.0, 0.0, 1.0, 10000);
  EXPECT_LE(run.M, 2.0);
  EXPECT_TRUE(run.trend_non_increasing);
}

TEST(Russell, LargeDeltaIsNearlyFlat) {
  const RussellRun run = russell_verify(1.0, 8.0, 1.0, 10000);
  EXPECT_NEAR(run.power, 1.0 / 9.0, 1e-15);
  // continuum analogue E' = -E^9 gives E ~ (9k)^(-1/9)
  EXPECT_NEAR(run.E.back(), std::pow(9.0 * 10000.0, -1.0 / 9.0), 0.02);
  EXPECT_TRUE(run.bound_holds);
}

TEST(Russell, RejectsDegenerateInput) {
  EXPECT_THROW(russell_verify(0.0, 0.0, 1.0, 10), InvalidArgument);
  EXPECT_THROW(russell_verify(1.0, -1.0, 1.0, 10), InvalidArgument);
  EXPECT_THROW(russell_verify(1.0, 0.0, 0.0, 10), InvalidArgument);
  EXPECT_THROW(russell_verify(1.0, 0.0, 1.0, 0), InvalidArgument);
}

TEST(Certificate, EmptyEnsembleIsVacuous) {
  const OperatorSet ops = assemble_example1(build_grid(10), 1.0);
  const DecayCertificate c = polynomial_decay_certificate(ops, 1.0, 1.0, 1e-2, 0, 4, 1);
  EXPECT_TRUE(c.vacuous);
  EXPECT_TRUE(c.pass);
}

TEST(Certificate, ExponentiallyStableConfigurationPasses) {
  const OperatorSet ops = restrict_zero_mean_temperature(assemble_example1(build_grid(20), 1.0));
  const DecayCertificate c = polynomial_decay_certificate(ops, 1.0, 2.0, 1e-2, 4, 8, 7, 6);
  EXPECT_FALSE(c.vacuous);
  EXPECT_TRUE(c.monotone);
  EXPECT_TRUE(std::isfinite(c.sup_scaled));
  EXPECT_TRUE(c.pass);
  ASSERT_EQ(c.normalized.size(), 4u);
  for (const auto& row : c.normalized) {
    ASSERT_EQ(row.size(), 9u);
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_LE(row[k], row[k - 1] * (1 + 1e-12));
  }
}
