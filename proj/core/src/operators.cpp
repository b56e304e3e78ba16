#include "thermolab/operators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "thermolab/errors.hpp"

namespace thermolab {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

double relative_asymmetry(const MatrixXd& S) {
  const double scale = S.norm();
  if (scale == 0.0) return 0.0;
  return (S - S.transpose()).norm() / scale;
}

MatrixXd lower_cholesky(const MatrixXd& S, const char* what) {
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument(std::string(what) + " is not symmetric positive definite");
  }
  return llt.matrixL();
}

// h * blockdiag(P1, P2, P3[, P4]) together with its block Cholesky factor.
Metric block_metric(const std::vector<const MatrixXd*>& blocks, double h, MetricLabel label,
                    double alpha) {
  Index n = 0;
  for (const auto* b : blocks) n += b->rows();
  Metric metric;
  metric.M = MatrixXd::Zero(n, n);
  metric.chol = MatrixXd::Zero(n, n);
  metric.label = label;
  metric.alpha = alpha;
  const double sqrt_h = std::sqrt(h);
  Index offset = 0;
  for (const auto* b : blocks) {
    const Index m = b->rows();
    metric.M.block(offset, offset, m, m) = h * (*b);
    if (b->isIdentity(0.0)) {
      metric.chol.block(offset, offset, m, m).diagonal().setConstant(sqrt_h);
    } else {
      metric.chol.block(offset, offset, m, m) = sqrt_h * lower_cholesky(*b, "metric block");
    }
    offset += m;
  }
  return metric;
}

}  // namespace

Grid build_grid(int n_interior) {
  if (n_interior < 2) {
    throw InvalidArgument("build_grid: n_interior must be >= 2, got " + std::to_string(n_interior));
  }
  Grid grid;
  grid.n_interior = n_interior;
  grid.h = 1.0 / static_cast<double>(n_interior + 1);
  grid.nodes.resize(n_interior);
  for (int j = 0; j < n_interior; ++j) grid.nodes[j] = static_cast<double>(j + 1) * grid.h;
  grid.midpoints.resize(n_interior + 1);
  for (int j = 0; j <= n_interior; ++j) grid.midpoints[j] = (static_cast<double>(j) + 0.5) * grid.h;
  return grid;
}

OperatorSet assemble_example1(const Grid& grid, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("assemble_example1: tau must be > 0");
  const Index n = grid.n_interior;
  const double inv_h = 1.0 / grid.h;

  // Gradient from cell temperatures to interior nodes.
  MatrixXd grad = MatrixXd::Zero(n, n + 1);
  for (Index j = 0; j < n; ++j) {
    grad(j, j) = -inv_h;
    grad(j, j + 1) = inv_h;
  }

  OperatorSet ops;
  ops.A2star = grad;
  ops.A2 = grad.transpose();
  ops.A1 = ops.A2star * ops.A2;
  ops.C = grad;
  ops.Cstar = grad.transpose();
  ops.tau = tau;
  ops.quad_weight = grid.h;
  ops.subspace = Subspace::full;
  ops.temperature_basis = MatrixXd::Identity(n + 1, n + 1);
  return ops;
}

OperatorSet make_operator_set(MatrixXd A1, MatrixXd A2, MatrixXd C, double tau, double quad_weight) {
  if (!(quad_weight > 0.0)) throw InvalidArgument("make_operator_set: quad_weight must be > 0");
  OperatorSet ops;
  ops.A1 = std::move(A1);
  ops.A2 = std::move(A2);
  ops.C = std::move(C);
  ops.A2star = ops.A2.transpose();
  ops.Cstar = ops.C.transpose();
  ops.tau = tau;
  ops.quad_weight = quad_weight;
  ops.subspace = Subspace::full;
  ops.temperature_basis = MatrixXd::Identity(ops.A2.rows(), ops.A2.rows());
  validate(ops);
  return ops;
}

void validate(const OperatorSet& ops) {
  const Index n1 = ops.A1.rows();
  const Index n2 = ops.A2.rows();
  if (!(ops.tau > 0.0)) throw InvalidArgument("OperatorSet: tau must be > 0");
  if (ops.A1.cols() != n1 || n1 == 0) throw InvalidArgument("OperatorSet: A1 must be square");
  if (ops.A2.cols() != n1) throw InvalidArgument("OperatorSet: A2 must be n2 x n1");
  if (ops.A2star.rows() != n1 || ops.A2star.cols() != n2) {
    throw InvalidArgument("OperatorSet: A2star must be n1 x n2");
  }
  if (ops.C.rows() != n1 || ops.C.cols() != n2) throw InvalidArgument("OperatorSet: C must be n1 x n2");
  if (ops.Cstar.rows() != n2 || ops.Cstar.cols() != n1) {
    throw InvalidArgument("OperatorSet: Cstar must be n2 x n1");
  }
  if (relative_asymmetry(ops.A1) > 1e-12) throw InvalidArgument("OperatorSet: A1 is not symmetric");
  lower_cholesky(ops.A1, "A1");
  const double a2 = ops.A2.norm();
  if ((ops.A2star - ops.A2.transpose()).norm() > 1e-14 * a2) {
    throw InvalidArgument("OperatorSet: A2star is not the adjoint of A2");
  }
  const double c = ops.C.norm();
  if ((ops.Cstar - ops.C.transpose()).norm() > 1e-14 * c) {
    throw InvalidArgument("OperatorSet: Cstar is not the adjoint of C");
  }
}

OperatorSet restrict_zero_mean_temperature(const OperatorSet& ops) {
  if (ops.subspace != Subspace::full) {
    throw InvalidArgument("restrict_zero_mean_temperature: operator set is already restricted");
  }
  const Index n2 = ops.n2();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n2);
  const double scale = std::sqrt(static_cast<double>(n2));
  if ((ops.A2star * ones).norm() > 1e-10 * ops.A2star.norm() * scale ||
      (ops.C * ones).norm() > 1e-10 * ops.C.norm() * scale) {
    throw InvalidArgument(
        "restrict_zero_mean_temperature: constant temperature is not in ker A2* and ker C");
  }

  // Orthonormal discrete cosine modes m = 1..n2-1, all orthogonal to constants.
  MatrixXd V(n2, n2 - 1);
  const double norm = std::sqrt(2.0 / static_cast<double>(n2));
  for (Index m = 1; m < n2; ++m) {
    for (Index c = 0; c < n2; ++c) {
      V(c, m - 1) = norm * std::cos(std::numbers::pi * static_cast<double>(m) *
                                    (static_cast<double>(c) + 0.5) / static_cast<double>(n2));
    }
  }

  OperatorSet out;
  out.A1 = ops.A1;
  out.A2 = V.transpose() * ops.A2;
  out.A2star = out.A2.transpose();
  out.C = ops.C * V;
  out.Cstar = out.C.transpose();
  out.tau = ops.tau;
  out.quad_weight = ops.quad_weight;
  out.subspace = Subspace::zero_mean_temperature;
  out.temperature_basis = ops.temperature_basis * V;
  return out;
}

std::string Metric::describe() const {
  switch (label) {
    case MetricLabel::H:
      return "H";
    case MetricLabel::H0:
      return "H0";
    case MetricLabel::H_minus_alpha: {
      std::ostringstream os;
      os << "H_minus_alpha(" << alpha << ")";
      return os.str();
    }
  }
  return "unknown";
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::damped_cattaneo:
      return "damped_cattaneo";
    case GeneratorKind::conservative_cattaneo:
      return "conservative_cattaneo";
    case GeneratorKind::fourier:
      return "fourier";
    case GeneratorKind::adjoint_damped_cattaneo:
      return "adjoint_damped_cattaneo";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  if (name == "damped_cattaneo" || name == "damped") return GeneratorKind::damped_cattaneo;
  if (name == "conservative_cattaneo" || name == "conservative") return GeneratorKind::conservative_cattaneo;
  if (name == "fourier") return GeneratorKind::fourier;
  if (name == "adjoint_damped_cattaneo") return GeneratorKind::adjoint_damped_cattaneo;
  throw InvalidArgument("unknown generator kind '" + name + "'");
}

bool is_cattaneo(GeneratorKind kind) { return kind != GeneratorKind::fourier; }

Index Layout::dimension() const {
  Index n = 0;
  for (const auto& s : slots) n += s.size;
  return n;
}

const Slot& Layout::slot(SlotName name) const {
  for (const auto& s : slots) {
    if (s.name == name) return s;
  }
  throw InvalidArgument("layout has no such slot");
}

bool Layout::has(SlotName name) const {
  for (const auto& s : slots) {
    if (s.name == name) return true;
  }
  return false;
}

Layout cattaneo_layout(const OperatorSet& ops) {
  const Index n1 = ops.n1();
  const Index n2 = ops.n2();
  return Layout{{{SlotName::w1, 0, n1},
                 {SlotName::w1dot, n1, n1},
                 {SlotName::w2, 2 * n1, n2},
                 {SlotName::w3, 2 * n1 + n2, n1}}};
}

Layout fourier_layout(const OperatorSet& ops) {
  const Index n1 = ops.n1();
  const Index n2 = ops.n2();
  return Layout{{{SlotName::w1, 0, n1}, {SlotName::w1dot, n1, n1}, {SlotName::w2, 2 * n1, n2}}};
}

BlockGenerator assemble_generator(const OperatorSet& ops, GeneratorKind kind) {
  validate(ops);
  if (kind == GeneratorKind::adjoint_damped_cattaneo) return adjoint_generator(ops);

  const Index n1 = ops.n1();
  const Index n2 = ops.n2();
  BlockGenerator gen;
  gen.kind = kind;
  gen.ops = std::make_shared<const OperatorSet>(ops);

  if (kind == GeneratorKind::fourier) {
    gen.layout = fourier_layout(ops);
    const Index N = gen.layout.dimension();
    gen.G = MatrixXd::Zero(N, N);
    gen.G.block(0, n1, n1, n1).setIdentity();
    gen.G.block(n1, 0, n1, n1) = -ops.A1;
    gen.G.block(n1, 2 * n1, n1, n2) = -ops.C;
    gen.G.block(2 * n1, n1, n2, n1) = ops.Cstar;
    gen.G.block(2 * n1, 2 * n1, n2, n2) = -(ops.A2 * ops.A2star);
  } else {
    gen.layout = cattaneo_layout(ops);
    const Index N = gen.layout.dimension();
    const Index q = 2 * n1 + n2;
    const double inv_tau = 1.0 / ops.tau;
    gen.G = MatrixXd::Zero(N, N);
    gen.G.block(0, n1, n1, n1).setIdentity();
    gen.G.block(n1, 0, n1, n1) = -ops.A1;
    gen.G.block(n1, 2 * n1, n1, n2) = -ops.C;
    gen.G.block(2 * n1, n1, n2, n1) = ops.Cstar;
    gen.G.block(2 * n1, q, n2, n1) = -ops.A2;
    gen.G.block(q, 2 * n1, n1, n2) = inv_tau * ops.A2star;
    if (kind == GeneratorKind::damped_cattaneo) {
      gen.G.block(q, q, n1, n1).diagonal().setConstant(-inv_tau);
    }
  }
  gen.metric = energy_metric(ops, kind);
  return gen;
}

MatrixXd metric_similarity(const BlockGenerator& gen) {
  const auto L = gen.metric.chol.triangularView<Eigen::Lower>();
  // G L^{-T} = (L^{-1} G^T)^T
  const MatrixXd right = L.solve(gen.G.transpose()).transpose();
  return L.transpose() * right;
}

BlockGenerator adjoint_generator(const OperatorSet& ops) {
  validate(ops);
  const Index n1 = ops.n1();
  const Index n2 = ops.n2();
  const Index q = 2 * n1 + n2;
  const double inv_tau = 1.0 / ops.tau;

  BlockGenerator gen;
  gen.kind = GeneratorKind::adjoint_damped_cattaneo;
  gen.ops = std::make_shared<const OperatorSet>(ops);
  gen.layout = cattaneo_layout(ops);
  const Index N = gen.layout.dimension();
  gen.G = MatrixXd::Zero(N, N);
  gen.G.block(0, n1, n1, n1).diagonal().setConstant(-1.0);
  gen.G.block(n1, 0, n1, n1) = ops.A1;
  gen.G.block(n1, 2 * n1, n1, n2) = ops.C;
  gen.G.block(2 * n1, n1, n2, n1) = -ops.Cstar;
  gen.G.block(2 * n1, q, n2, n1) = ops.A2;
  gen.G.block(q, 2 * n1, n1, n2) = -inv_tau * ops.A2star;
  gen.G.block(q, q, n1, n1).diagonal().setConstant(-inv_tau);
  gen.metric = energy_metric(ops, GeneratorKind::damped_cattaneo);
  return gen;
}

Metric energy_metric(const OperatorSet& ops, GeneratorKind kind) {
  const Index n1 = ops.n1();
  const Index n2 = ops.n2();
  const MatrixXd I1 = MatrixXd::Identity(n1, n1);
  const MatrixXd I2 = MatrixXd::Identity(n2, n2);
  if (kind == GeneratorKind::fourier) {
    return block_metric({&ops.A1, &I1, &I2}, ops.quad_weight, MetricLabel::H0, 0.0);
  }
  const MatrixXd T1 = ops.tau * I1;
  return block_metric({&ops.A1, &I1, &I2, &T1}, ops.quad_weight, MetricLabel::H, 0.0);
}

Metric fractional_metric(const OperatorSet& ops, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("fractional_metric: alpha must be >= 0");
  const MatrixXd P1 = symmetric_power(ops.A1, 1.0 - alpha);
  const MatrixXd P2 = symmetric_power(ops.A1, -alpha);
  const MatrixXd P3 = symmetric_power(ops.heat_operator(), -alpha);
  const MatrixXd P4 = ops.tau * P2;
  const MetricLabel label = alpha == 0.0 ? MetricLabel::H : MetricLabel::H_minus_alpha;
  return block_metric({&P1, &P2, &P3, &P4}, ops.quad_weight, label, alpha);
}

InputMap assemble_input_map(const OperatorSet& ops) {
  validate(ops);
  const Layout layout = cattaneo_layout(ops);
  const Slot& w3 = layout.slot(SlotName::w3);
  const double s = 1.0 / std::sqrt(ops.tau);
  InputMap map;
  map.B = MatrixXd::Zero(layout.dimension(), ops.n1());
  map.B.block(w3.offset, 0, w3.size, w3.size).diagonal().setConstant(s);
  map.Bstar = map.B.transpose();
  map.input_weight = ops.tau * ops.quad_weight;
  return map;
}

MatrixXd symmetric_power(const MatrixXd& S, double p, double kernel_tol) {
  const Index n = S.rows();
  if (p == 0.0) return MatrixXd::Identity(n, n);
  if (p == 1.0) return S;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric_power: eigensolver failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double tol = kernel_tol * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(lambda[i]) <= tol) {
      w[i] = 1.0;
    } else if (lambda[i] < 0.0) {
      throw InvalidArgument("symmetric_power: matrix is not positive semi-definite");
    } else {
      w[i] = std::pow(lambda[i], p);
    }
  }
  const MatrixXd& V = es.eigenvectors();
  MatrixXd P = V * w.asDiagonal() * V.transpose();
  return 0.5 * (P + P.transpose());
}

}  // namespace thermolab
