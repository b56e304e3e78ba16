#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/operators.hpp"

using namespace thermolab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

OperatorSet example(int n, double tau = 1.0) { return assemble_example1(build_grid(n), tau); }

}  // namespace

TEST(Grid, SpacingAndNodes) {
  const Grid g3 = build_grid(3);
  EXPECT_DOUBLE_EQ(g3.h, 0.25);
  ASSERT_EQ(g3.nodes.size(), 3);
  EXPECT_DOUBLE_EQ(g3.nodes[0], 0.25);
  EXPECT_DOUBLE_EQ(g3.nodes[1], 0.5);
  EXPECT_DOUBLE_EQ(g3.nodes[2], 0.75);
  EXPECT_DOUBLE_EQ(build_grid(2).h, 1.0 / 3.0);
  EXPECT_NEAR(build_grid(199).h, 0.005, 1e-17);
}

TEST(Grid, CoordinatesIncreasingInsideDomain) {
  const Grid g = build_grid(17);
  for (Eigen::Index i = 1; i < g.nodes.size(); ++i) EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
  for (Eigen::Index i = 1; i < g.midpoints.size(); ++i) EXPECT_GT(g.midpoints[i], g.midpoints[i - 1]);
  EXPECT_GT(g.nodes.minCoeff(), 0.0);
  EXPECT_LT(g.nodes.maxCoeff(), 1.0);
  EXPECT_GE(g.midpoints.minCoeff(), 0.0);
  EXPECT_LE(g.midpoints.maxCoeff(), 1.0);
}

TEST(Grid, RejectsDegenerate) {
  EXPECT_THROW(build_grid(1), InvalidArgument);
  EXPECT_THROW(build_grid(0), InvalidArgument);
}

TEST(Assembly, SecondDifferenceStencil) {
  const OperatorSet ops = example(3, 2.5);
  MatrixXd expected(3, 3);
  expected << 32, -16, 0, -16, 32, -16, 0, -16, 32;
  EXPECT_LT((ops.A1 - expected).norm(), 1e-12);
  EXPECT_EQ(ops.A2star.rows(), 3);
  EXPECT_EQ(ops.A2star.cols(), 4);
}

TEST(Assembly, RejectsNonPositiveTau) {
  EXPECT_THROW(assemble_example1(build_grid(5), 0.0), InvalidArgument);
  EXPECT_THROW(assemble_example1(build_grid(5), -1.0), InvalidArgument);
}

TEST(Assembly, AdjointPairsUnderQuadrature) {
  const OperatorSet ops = example(50);
  const double h = ops.quad_weight;
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const VectorXd q = testutil::gaussian(rng, ops.n1());
    const VectorXd th = testutil::gaussian(rng, ops.n2());
    const double lhs = h * (ops.A2 * q).dot(th);
    const double rhs = h * q.dot(ops.A2star * th);
    worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + 1e-300));
    const double c_lhs = h * (ops.C * th).dot(q);
    const double c_rhs = h * th.dot(ops.Cstar * q);
    worst = std::max(worst, std::abs(c_lhs - c_rhs) / (std::abs(c_lhs) + 1e-300));
  }
  EXPECT_LE(worst, 1e-13);
}

TEST(Assembly, HeatOperatorIsPsdAndA1Spd) {
  const OperatorSet ops = example(20);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es1(ops.A1);
  EXPECT_GT(es1.eigenvalues().minCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es2(ops.heat_operator());
  EXPECT_GT(es2.eigenvalues().minCoeff(), -1e-10 * es2.eigenvalues().maxCoeff());
}

TEST(Assembly, Deterministic) {
  const OperatorSet a = example(30, 0.7);
  const OperatorSet b = example(30, 0.7);
  EXPECT_TRUE(a.A1 == b.A1);
  EXPECT_TRUE(a.A2 == b.A2);
  const BlockGenerator ga = assemble_generator(a, GeneratorKind::damped_cattaneo);
  const BlockGenerator gb = assemble_generator(b, GeneratorKind::damped_cattaneo);
  EXPECT_TRUE(ga.G == gb.G);
  EXPECT_TRUE(ga.metric.M == gb.metric.M);
}

TEST(Generator, DissipationIdentity) {
  const OperatorSet ops = example(3);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const Slot& w3 = gen.layout.slot(SlotName::w3);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const VectorXd z = testutil::gaussian(rng, gen.dimension());
    const double lhs = gen.metric.inner(gen.G * z, z);
    const double rhs = -ops.quad_weight * z.segment(w3.offset, w3.size).squaredNorm();
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
  }
}

TEST(Generator, DampingEntryOnlyInDampedKind) {
  const OperatorSet ops = example(4, 2.0);
  const BlockGenerator d = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const BlockGenerator c = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  const Slot& w3 = d.layout.slot(SlotName::w3);
  MatrixXd diff = d.G - c.G;
  EXPECT_LT((diff.block(w3.offset, w3.offset, w3.size, w3.size) + 0.5 * MatrixXd::Identity(4, 4)).norm(), 1e-15);
  diff.block(w3.offset, w3.offset, w3.size, w3.size).setZero();
  EXPECT_EQ(diff.norm(), 0.0);
}

TEST(Generator, ConservativeIsSkewInMetric) {
  for (double tau : {0.3, 1.0, 4.0}) {
    const BlockGenerator gen = assemble_generator(example(25, tau), GeneratorKind::conservative_cattaneo);
    const MatrixXd MG = gen.metric.M * gen.G;
    EXPECT_LE((MG + MG.transpose()).norm(), 1e-12 * MG.norm()) << "tau=" << tau;
  }
}

TEST(Generator, DampedSymmetricPartNegativeSemidefinite) {
  const BlockGenerator gen = assemble_generator(example(12, 0.5), GeneratorKind::damped_cattaneo);
  const MatrixXd MG = gen.metric.M * gen.G;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(MG + MG.transpose());
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-12 * MG.norm());
}

TEST(Generator, FourierThirdDiagonalBlock) {
  const OperatorSet ops = example(6, 3.0);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::fourier);
  const Slot& w2 = gen.layout.slot(SlotName::w2);
  EXPECT_EQ(gen.dimension(), 2 * 6 + 7);
  EXPECT_FALSE(gen.layout.has(SlotName::w3));
  const MatrixXd block = gen.G.block(w2.offset, w2.offset, w2.size, w2.size);
  EXPECT_LT((block + ops.A2 * ops.A2star).norm(), 1e-12 * block.norm());
  // tau does not enter
  const BlockGenerator other = assemble_generator(example(6, 0.1), GeneratorKind::fourier);
  EXPECT_TRUE(gen.G == other.G);
}

TEST(Generator, LayoutSlotsSumToDimension) {
  const OperatorSet ops = example(9);
  for (auto kind : {GeneratorKind::damped_cattaneo, GeneratorKind::conservative_cattaneo, GeneratorKind::fourier}) {
    const BlockGenerator gen = assemble_generator(ops, kind);
    EXPECT_EQ(gen.layout.dimension(), gen.dimension());
    EXPECT_EQ(gen.metric.M.rows(), gen.dimension());
  }
}

TEST(Adjoint, MatchesMetricTransposeOracle) {
  const OperatorSet ops = example(3);
  const BlockGenerator damped = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const BlockGenerator adj = adjoint_generator(ops);
  const MatrixXd& M = damped.metric.M;
  const MatrixXd oracle = M.llt().solve(damped.G.transpose() * M);
  EXPECT_LE((adj.G - oracle).cwiseAbs().maxCoeff(), 1e-10 * oracle.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const VectorXd x = testutil::gaussian(rng, damped.dimension());
    const VectorXd y = testutil::gaussian(rng, damped.dimension());
    const double lhs = damped.metric.inner(damped.G * x, y);
    const double rhs = damped.metric.inner(x, adj.G * y);
    const double scale = std::sqrt(damped.metric.norm_squared(damped.G * x) * damped.metric.norm_squared(y));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
  }
  const VectorXd zero = VectorXd::Zero(damped.dimension());
  EXPECT_EQ(damped.metric.inner(damped.G * zero, zero), 0.0);
  EXPECT_EQ(damped.metric.inner(zero, adj.G * zero), 0.0);
}

TEST(Metric, EnergyBlocks) {
  const OperatorSet ops = example(3, 1.0);
  const Metric m = energy_metric(ops, GeneratorKind::damped_cattaneo);
  const Layout layout = cattaneo_layout(ops);
  const Slot& w3 = layout.slot(SlotName::w3);
  EXPECT_LT((m.M.block(w3.offset, w3.offset, 3, 3) - 0.25 * MatrixXd::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((m.chol * m.chol.transpose() - m.M).norm(), 1e-13 * m.M.norm());
  EXPECT_TRUE(m.chol.isLowerTriangular());

  VectorXd z = VectorXd::Zero(layout.dimension());
  z.head(3) << 0.3, -1.0, 2.0;
  const VectorXd grad = ops.A2 * z.head(3);
  EXPECT_NEAR(m.norm_squared(z), ops.quad_weight * grad.squaredNorm(), 1e-12 * m.norm_squared(z));
}

TEST(Metric, TauScalesFluxContribution) {
  const OperatorSet o1 = example(5, 1.0);
  const OperatorSet o2 = example(5, 2.0);
  const Layout layout = cattaneo_layout(o1);
  const Slot& w3 = layout.slot(SlotName::w3);
  std::mt19937_64 rng(8);
  VectorXd z = VectorXd::Zero(layout.dimension());
  z.segment(w3.offset, w3.size) = testutil::gaussian(rng, w3.size);
  const double e1 = energy_metric(o1, GeneratorKind::damped_cattaneo).norm_squared(z);
  const double e2 = energy_metric(o2, GeneratorKind::damped_cattaneo).norm_squared(z);
  EXPECT_NEAR(e2, 2.0 * e1, 1e-14 * e2);
}

TEST(Metric, FourierLayoutHasThreeBlocks) {
  const OperatorSet ops = example(4);
  const Metric m = energy_metric(ops, GeneratorKind::fourier);
  EXPECT_EQ(m.M.rows(), 4 + 4 + 5);
}

TEST(FractionalMetric, AlphaZeroIsEnergyMetric) {
  const OperatorSet ops = example(10, 0.8);
  const Metric f = fractional_metric(ops, 0.0);
  const Metric e = energy_metric(ops, GeneratorKind::damped_cattaneo);
  EXPECT_LE((f.M - e.M).cwiseAbs().maxCoeff(), 1e-12 * e.M.cwiseAbs().maxCoeff());
}

TEST(FractionalMetric, AlphaOneFirstSlotIdentity) {
  const OperatorSet ops = example(3);
  const Metric f = fractional_metric(ops, 1.0);
  EXPECT_LT((f.M.block(0, 0, 3, 3) - ops.quad_weight * MatrixXd::Identity(3, 3)).norm(), 1e-14);
}

TEST(FractionalMetric, BoundedByExtremeEigenvalues) {
  const OperatorSet ops = example(15, 1.0);
  const double alpha = 0.5;
  const Metric f = fractional_metric(ops, alpha);
  const Metric e = energy_metric(ops, GeneratorKind::damped_cattaneo);
  // Each slot weight is the energy weight times an operator power with
  // exponent -alpha; the kernel of the heat operator keeps weight 1.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es1(ops.A1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es2(ops.heat_operator());
  double lmin = es1.eigenvalues().minCoeff();
  for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i) {
    if (es2.eigenvalues()[i] > 1e-8) lmin = std::min(lmin, es2.eigenvalues()[i]);
  }
  const double c = std::max(1.0, std::pow(lmin, -alpha));
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    const VectorXd z = testutil::gaussian(rng, e.M.rows());
    EXPECT_LE(f.norm_squared(z), c * e.norm_squared(z) * (1 + 1e-12));
  }
}

TEST(FractionalMetric, RejectsNegativeAlpha) {
  EXPECT_THROW(fractional_metric(example(4), -0.1), InvalidArgument);
}

TEST(InputMap, ScalingAndAdjoint) {
  const InputMap m1 = assemble_input_map(example(4, 1.0));
  const Layout layout = cattaneo_layout(example(4, 1.0));
  const Slot& w3 = layout.slot(SlotName::w3);
  EXPECT_TRUE(m1.B.block(w3.offset, 0, 4, 4).isIdentity(0.0));
  EXPECT_EQ(m1.B.topRows(w3.offset).norm(), 0.0);

  const OperatorSet ops = example(20, 4.0);
  const InputMap m4 = assemble_input_map(ops);
  EXPECT_TRUE((m4.B.block(cattaneo_layout(ops).slot(SlotName::w3).offset, 0, 20, 20) -
               0.5 * MatrixXd::Identity(20, 20))
                  .isZero(0.0));

  const Metric metric = energy_metric(ops, GeneratorKind::damped_cattaneo);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const VectorXd kv = testutil::gaussian(rng, ops.n1());
    const VectorXd z = testutil::gaussian(rng, metric.M.rows());
    const double lhs = metric.inner(m4.B * kv, z);
    const double rhs = m4.input_inner(kv, m4.Bstar * z);
    EXPECT_LE(std::abs(lhs - rhs), 1e-13 * std::abs(lhs));
  }
}

TEST(Restriction, RemovesConstantTemperature) {
  const OperatorSet full = example(12);
  const OperatorSet r = restrict_zero_mean_temperature(full);
  EXPECT_EQ(r.n2(), full.n2() - 1);
  const VectorXd ones = VectorXd::Ones(full.n2());
  EXPECT_LT((r.temperature_basis.transpose() * ones).norm(), 1e-12);
  EXPECT_LT((r.temperature_basis.transpose() * r.temperature_basis - MatrixXd::Identity(r.n2(), r.n2())).norm(),
            1e-12);
  // Restricted heat operator is nonsingular.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.heat_operator());
  EXPECT_GT(es.eigenvalues().minCoeff(), 1.0);
  EXPECT_THROW(restrict_zero_mean_temperature(r), InvalidArgument);
}

TEST(SymmetricPower, MatchesDirectProducts) {
  std::mt19937_64 rng(4);
  const MatrixXd X = testutil::gaussian(rng, 6, 6);
  const MatrixXd S = X * X.transpose() + MatrixXd::Identity(6, 6);
  const MatrixXd half = symmetric_power(S, 0.5);
  EXPECT_LT(testutil::rel_diff(half * half, S), 1e-12);
  const MatrixXd inv = symmetric_power(S, -1.0);
  EXPECT_LT(testutil::rel_diff(inv * S, MatrixXd::Identity(6, 6)), 1e-12);
}
