#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "thermolab/errors.hpp"
#include "thermolab/spectral.hpp"

using namespace thermolab;
using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

OperatorSet example(int n, double tau = 1.0) { return assemble_example1(build_grid(n), tau); }

// Closed-form conservative frequencies: omega^2 are the roots of
// tau w^2 - k^2 (1 + 2 tau) w + k^4 = 0.
std::array<double, 2> closed_form_frequencies(double k, double tau) {
  const double b = (1.0 + 2.0 * tau);
  const double disc = std::sqrt(1.0 + 4.0 * tau * tau);
  const double lo = k * k * (b - disc) / (2.0 * tau);
  const double hi = k * k * (b + disc) / (2.0 * tau);
  return {std::sqrt(lo), std::sqrt(hi)};
}

}  // namespace

TEST(Eigen, ConservativeSpectrumOnAxisWithCertificates) {
  const Spectrum s = eigen(assemble_generator(example(30, 0.5), GeneratorKind::conservative_cattaneo));
  double scale = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) scale = std::max(scale, std::abs(s.eigenvalues[i]));
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) EXPECT_LE(std::abs(s.eigenvalues[i].real()), 1e-9 * scale);
  EXPECT_LE(s.max_residual(), 1e-8 * scale);
  EXPECT_EQ(s.dimension, 4 * 30 + 1);
}

TEST(Eigen, SortedByImaginaryThenReal) {
  const Spectrum s = eigen(assemble_generator(example(15), GeneratorKind::damped_cattaneo));
  for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) {
    const cplx a = s.eigenvalues[i - 1], b = s.eigenvalues[i];
    EXPECT_TRUE(a.imag() < b.imag() || (a.imag() == b.imag() && a.real() <= b.real()));
  }
}

TEST(Eigen, DampedAndFourierStrictlyStableOnRestrictedSpace) {
  const OperatorSet ops = restrict_zero_mean_temperature(example(50));
  for (auto kind : {GeneratorKind::damped_cattaneo, GeneratorKind::fourier}) {
    const Spectrum s = eigen(assemble_generator(ops, kind));
    EXPECT_LT(s.spectral_abscissa(), 0.0) << to_string(kind);
    EXPECT_GT(s.axis_clearance(), 0.0) << to_string(kind);
    EXPECT_LE(s.max_residual(), 1e-8 * std::abs(s.eigenvalues.cwiseAbs().maxCoeff()));
  }
}

TEST(Eigen, FullSpaceHasConstantTemperatureKernel) {
  const Spectrum s = eigen(assemble_generator(example(20), GeneratorKind::damped_cattaneo));
  EXPECT_LE(s.spectral_abscissa(), 1e-10);
  EXPECT_LT(s.axis_clearance(), 1e-9);
}

TEST(Eigen, VectorsSatisfyEigenEquation) {
  const BlockGenerator gen = assemble_generator(example(8, 2.0), GeneratorKind::damped_cattaneo);
  const Spectrum s = eigen(gen, true);
  const Eigen::MatrixXcd G = gen.G.cast<cplx>();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const Eigen::VectorXcd v = s.eigenvectors.col(i);
    EXPECT_LE((G * v - s.eigenvalues[i] * v).norm(), 1e-9 * (1.0 + std::abs(s.eigenvalues[i])) * v.norm());
  }
}

TEST(Eigen, CapEnforced) {
  EXPECT_THROW(eigen(assemble_generator(example(10), GeneratorKind::fourier), false, 5), InvalidArgument);
}

TEST(Modal, DiscreteSpectrumIsUnionOfModalSystems) {
  const int n = 20;
  const double tau = 0.6;
  const Grid grid = build_grid(n);
  const Spectrum s = eigen(assemble_generator(assemble_example1(grid, tau), GeneratorKind::conservative_cattaneo));
  std::vector<double> modal;
  for (int m = 1; m <= n; ++m) {
    const ModalSystem sys = modal_system(discrete_wavenumber(m, grid.h), tau, GeneratorKind::conservative_cattaneo);
    for (Eigen::Index i = 0; i < sys.eigenvalues.size(); ++i) {
      if (sys.eigenvalues[i].imag() > 0) modal.push_back(sys.eigenvalues[i].imag());
    }
  }
  std::sort(modal.begin(), modal.end());
  const std::vector<double> discrete = s.positive_frequencies();
  ASSERT_EQ(discrete.size(), modal.size());
  for (std::size_t i = 0; i < modal.size(); ++i) EXPECT_NEAR(discrete[i], modal[i], 1e-9 * modal.back());
}

TEST(Modal, ConservativeFrequenciesMatchClosedForm) {
  for (double tau : {0.2, 1.0, 3.5}) {
    for (int n = 1; n <= 5; ++n) {
      const auto f = modal_frequencies(n, tau);
      const auto c = closed_form_frequencies(n * pi, tau);
      EXPECT_NEAR(f[0], c[0], 1e-12 * c[1]);
      EXPECT_NEAR(f[1], c[1], 1e-12 * c[1]);
      const ModalSystem sys = modal_reduce(n, tau, GeneratorKind::conservative_cattaneo);
      for (Eigen::Index i = 0; i < 4; ++i) EXPECT_LE(std::abs(sys.eigenvalues[i].real()), 1e-12 * c[1]);
    }
  }
}

TEST(Modal, FourierCubicResidual) {
  const ModalSystem sys = modal_reduce(1, 1.0, GeneratorKind::fourier);
  ASSERT_EQ(sys.matrix.rows(), 3);
  const double k = pi;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const cplx l = sys.eigenvalues[i];
    const cplx p = (l * l + k * k) * (l + k * k) + k * k * l;
    const double scale = std::pow(std::abs(l), 3) + k * k * std::norm(l) + std::pow(k, 4);
    EXPECT_LE(std::abs(p), 1e-12 * scale);
  }
}

TEST(Modal, DampedTraceIsMinusInverseTau) {
  for (double tau : {1.0, 0.25}) {
    const ModalSystem sys = modal_reduce(1, tau, GeneratorKind::damped_cattaneo);
    EXPECT_NEAR(sys.matrix.trace(), -1.0 / tau, 1e-15);
    EXPECT_NEAR(sys.eigenvalues.sum().real(), -1.0 / tau, 1e-12);
  }
}

TEST(Modal, RejectsBadInput) {
  EXPECT_THROW(modal_reduce(0, 1.0, GeneratorKind::fourier), InvalidArgument);
  EXPECT_THROW(modal_reduce(1, 0.0, GeneratorKind::damped_cattaneo), InvalidArgument);
}

TEST(Rationality, ContinuedFractionDetection) {
  EXPECT_TRUE(frequency_ratio_is_rational(1.0 / 3.0));  // ratio 1/2
  EXPECT_TRUE(frequency_ratio_is_rational(9.0 / 16.0));  // ratio 3/5
  EXPECT_FALSE(frequency_ratio_is_rational(1.0));
  EXPECT_FALSE(frequency_ratio_is_rational(2.0));
}

TEST(ExplicitFormulas, ReportOnly) {
  const ExplicitFormulaReport r = validate_explicit_formulas(1.0, 3, build_grid(40));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(r.tau_hypothesis_holds);
  EXPECT_TRUE(r.displayed_purely_imaginary);
  EXPECT_NEAR(r.rows[0].displayed[0], pi, 1e-15);
  EXPECT_NEAR(r.rows[0].displayed[1], pi * std::sqrt(2.0), 1e-14);
  const auto c = closed_form_frequencies(pi, 1.0);
  EXPECT_NEAR(r.rows[0].modal[0], c[0], 1e-12);
  EXPECT_NEAR(r.rows[0].discrepancy,
              std::max(std::abs(pi - c[0]), std::abs(pi * std::sqrt(2.0) - c[1])), 1e-12);
  for (const auto& row : r.rows) EXPECT_TRUE(std::isfinite(row.eigenfunction_residual));
}

TEST(Convergence, SecondOrderAgainstModalOracle) {
  const ConvergenceStudy st = spectral_convergence(1.0, {20, 40, 80}, 6);
  EXPECT_GE(st.min_order, 1.7);
  EXPECT_LE(st.max_order, 2.3);
  ASSERT_EQ(st.orders.size(), 2u);
  EXPECT_THROW(spectral_convergence(1.0, {20}, 6), InvalidArgument);
}

TEST(Gaps, ExhaustivePairScan) {
  const GapTable t = frequency_gap(1.0, 10, FrequencySource::displayed_set);
  double oracle = 1e300;
  for (int m = 1; m <= 10; ++m) {
    for (int n = 1; n <= 10; ++n) oracle = std::min(oracle, pi * std::abs(m * std::sqrt(2.0) - n));
    for (int n = m + 1; n <= 10; ++n) {
      oracle = std::min(oracle, pi * (n - m));
      oracle = std::min(oracle, pi * std::sqrt(2.0) * (n - m));
    }
  }
  EXPECT_NEAR(t.min_gap, oracle, 1e-12);
  EXPECT_FALSE(t.has_duplicates);
}

TEST(Gaps, CountsAndDuplicates) {
  EXPECT_EQ(frequency_gap(1.0, 2, FrequencySource::displayed_set).entries.size(), 6u);
  EXPECT_EQ(frequency_gap(1.0, 2, FrequencySource::modal_oracle).entries.size(), 6u);
  const GapTable rational = frequency_gap(1.0 / 3.0, 4, FrequencySource::displayed_set);
  EXPECT_TRUE(rational.has_duplicates);
  EXPECT_EQ(rational.min_gap, 0.0);
  EXPECT_THROW(frequency_gap(1.0, 1, FrequencySource::displayed_set), InvalidArgument);
}
