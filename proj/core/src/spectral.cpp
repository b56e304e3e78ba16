#include "thermolab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thermolab/errors.hpp"

namespace thermolab {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Index> lexicographic_order(const VectorXcd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (values[a].imag() != values[b].imag()) return values[a].imag() < values[b].imag();
    return values[a].real() < values[b].real();
  });
  return order;
}

}  // namespace

double Spectrum::max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }

double Spectrum::spectral_abscissa() const {
  double s = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < eigenvalues.size(); ++i) s = std::max(s, eigenvalues[i].real());
  return s;
}

double Spectrum::axis_clearance() const {
  double s = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < eigenvalues.size(); ++i) s = std::min(s, std::abs(eigenvalues[i].real()));
  return s;
}

std::vector<double> Spectrum::positive_frequencies(double rel_tol) const {
  double scale = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) scale = std::max(scale, std::abs(eigenvalues[i]));
  std::vector<double> out;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i].imag() > rel_tol * scale) out.push_back(eigenvalues[i].imag());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Spectrum eigen(const BlockGenerator& gen, bool keep_vectors, Index cap) {
  const Index N = gen.dimension();
  if (N > cap) {
    std::ostringstream os;
    os << "eigen: dimension " << N << " exceeds cap " << cap;
    throw InvalidArgument(os.str());
  }
  const MatrixXd S = metric_similarity(gen);
  Eigen::EigenSolver<MatrixXd> es(S, true);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("eigen: QR iteration failed to converge for " + to_string(gen.kind));
  }
  const VectorXcd lambda = es.eigenvalues();
  const MatrixXcd U = es.eigenvectors();

  // Residuals recomputed from scratch in Euclidean (= H) coordinates.
  const MatrixXcd R = S.cast<cplx>() * U - U * lambda.asDiagonal();

  Spectrum spec;
  spec.kind = gen.kind;
  spec.dimension = N;
  const auto order = lexicographic_order(lambda);
  spec.eigenvalues.resize(N);
  spec.residuals.resize(N);
  for (Index i = 0; i < N; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    spec.eigenvalues[i] = lambda[j];
    const double un = U.col(j).norm();
    spec.residuals[i] = un > 0.0 ? R.col(j).norm() / un : std::numeric_limits<double>::infinity();
    if (!std::isfinite(spec.residuals[i])) {
      std::ostringstream os;
      os << "eigen: eigenpair " << i << " (lambda = " << lambda[j] << ") has no valid eigenvector";
      throw NumericalFailure(os.str());
    }
  }
  if (keep_vectors) {
    const auto L = gen.metric.chol.triangularView<Eigen::Lower>();
    spec.eigenvectors.resize(N, N);
    for (Index i = 0; i < N; ++i) {
      const Index j = order[static_cast<std::size_t>(i)];
      // v = L^{-T} u
      const VectorXd re = L.transpose().solve(U.col(j).real());
      const VectorXd im = L.transpose().solve(U.col(j).imag());
      spec.eigenvectors.col(i) = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    }
  }
  return spec;
}

double discrete_wavenumber(int m, double h) { return 2.0 / h * std::sin(m * pi * h / 2.0); }

ModalSystem modal_system(double k, double tau, GeneratorKind kind, int mode) {
  if (!(tau > 0.0)) throw InvalidArgument("modal_system: tau must be > 0");
  ModalSystem sys;
  sys.mode = mode;
  sys.wavenumber = k;
  sys.tau = tau;
  sys.kind = kind;
  if (kind == GeneratorKind::fourier) {
    sys.matrix.resize(3, 3);
    sys.matrix << 0.0, 1.0, 0.0,  //
        -k * k, 0.0, k,           //
        0.0, -k, -k * k;
    sys.metric_weights = VectorXd(3);
    sys.metric_weights << k * k, 1.0, 1.0;
  } else if (kind == GeneratorKind::adjoint_damped_cattaneo) {
    throw InvalidArgument("modal_system: adjoint kind has no modal reduction here");
  } else {
    const double damping = kind == GeneratorKind::damped_cattaneo ? -1.0 / tau : 0.0;
    sys.matrix.resize(4, 4);
    sys.matrix << 0.0, 1.0, 0.0, 0.0,  //
        -k * k, 0.0, k, 0.0,           //
        0.0, -k, 0.0, k,               //
        0.0, 0.0, -k / tau, damping;
    sys.metric_weights = VectorXd(4);
    sys.metric_weights << k * k, 1.0, 1.0, tau;
  }
  Eigen::EigenSolver<MatrixXd> es(sys.matrix, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("modal_system: eigensolver failed");
  const VectorXcd lambda = es.eigenvalues();
  const MatrixXcd V = es.eigenvectors();
  const auto order = lexicographic_order(lambda);
  const Index n = lambda.size();
  sys.eigenvalues.resize(n);
  sys.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    sys.eigenvalues[i] = lambda[j];
    sys.eigenvectors.col(i) = V.col(j) / V(0, j);
  }
  return sys;
}

ModalSystem modal_reduce(int n, double tau, GeneratorKind kind) {
  if (n < 1) throw InvalidArgument("modal_reduce: mode index must be >= 1");
  return modal_system(n * pi, tau, kind, n);
}

std::array<double, 2> modal_frequencies(int n, double tau) {
  const ModalSystem sys = modal_reduce(n, tau, GeneratorKind::conservative_cattaneo);
  std::vector<double> f;
  for (Index i = 0; i < sys.eigenvalues.size(); ++i) {
    if (sys.eigenvalues[i].imag() > 0.0) f.push_back(sys.eigenvalues[i].imag());
  }
  if (f.size() != 2) throw NumericalFailure("modal_frequencies: expected two positive frequencies");
  std::sort(f.begin(), f.end());
  return {f[0], f[1]};
}

std::array<double, 2> displayed_frequencies(int n, double tau) {
  return {n * pi, n * pi * std::sqrt((1.0 + tau) / tau)};
}

bool frequency_ratio_is_rational(double tau, int max_denominator) {
  const double x = std::sqrt(tau / (1.0 + tau));
  // Continued-fraction convergents p/q.
  double p_prev = 1.0, p = std::floor(x);
  double q_prev = 0.0, q = 1.0;
  double r = x - std::floor(x);
  for (int iter = 0; iter < 64 && q <= max_denominator; ++iter) {
    if (std::abs(x - p / q) <= 1e-12 * std::max(1.0, x)) return true;
    if (r < 1e-15) break;
    const double inv = 1.0 / r;
    const double a = std::floor(inv);
    r = inv - a;
    const double p_next = a * p + p_prev;
    const double q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return false;
}

ExplicitFormulaReport validate_explicit_formulas(double tau, int n_max, const Grid& grid) {
  if (n_max < 1) throw InvalidArgument("validate_explicit_formulas: n_max must be >= 1");
  ExplicitFormulaReport report;
  report.tau = tau;
  report.tau_hypothesis_holds = !frequency_ratio_is_rational(tau);

  const OperatorSet ops = assemble_example1(grid, tau);
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::conservative_cattaneo);
  const Layout& layout = gen.layout;
  const MatrixXcd G = gen.G.cast<cplx>();
  const MatrixXcd M = gen.metric.M.cast<cplx>();

  for (int n = 1; n <= n_max; ++n) {
    ExplicitFormulaRow row;
    row.n = n;
    row.displayed = displayed_frequencies(n, tau);
    row.modal = modal_frequencies(n, tau);
    row.discrepancy = std::max(std::abs(row.displayed[0] - row.modal[0]), std::abs(row.displayed[1] - row.modal[1]));

    // Displayed eigenfunction, evaluated on the staggered grid.
    const double k = n * pi;
    for (double freq : row.displayed) {
      const cplx lambda(0.0, freq);
      const cplx flux_amp = (lambda - k / lambda) / tau;
      const cplx temp_amp = -k * ((lambda - k / lambda) / (tau * lambda) + 1.0);
      VectorXcd phi = VectorXcd::Zero(layout.dimension());
      const Slot& s1 = layout.slot(SlotName::w1);
      const Slot& s2 = layout.slot(SlotName::w1dot);
      const Slot& s3 = layout.slot(SlotName::w2);
      const Slot& s4 = layout.slot(SlotName::w3);
      for (Index j = 0; j < s1.size; ++j) {
        const double sn = std::sin(k * grid.nodes[j]);
        phi[s1.offset + j] = sn;
        phi[s2.offset + j] = lambda * sn;
        phi[s4.offset + j] = flux_amp * sn;
      }
      for (Index j = 0; j < s3.size; ++j) phi[s3.offset + j] = temp_amp * std::cos(k * grid.midpoints[j]);
      const VectorXcd res = G * phi - lambda * phi;
      const double num = std::sqrt(std::abs((res.adjoint() * M * res)(0, 0)));
      const double den = std::sqrt(std::abs((phi.adjoint() * M * phi)(0, 0)));
      row.eigenfunction_residual = std::max(row.eigenfunction_residual, num / den);
    }
    report.rows.push_back(row);
  }
  return report;
}

ConvergenceStudy spectral_convergence(double tau, const std::vector<int>& sizes, int count) {
  if (sizes.size() < 2) throw InvalidArgument("spectral_convergence: need at least two grid sizes");
  if (count < 1) throw InvalidArgument("spectral_convergence: count must be >= 1");
  ConvergenceStudy study;
  study.tau = tau;
  study.sizes = sizes;

  for (int m = 1; m <= count; ++m) {
    const auto f = modal_frequencies(m, tau);
    study.modal.push_back(f[0]);
    study.modal.push_back(f[1]);
  }
  std::sort(study.modal.begin(), study.modal.end());
  study.modal.resize(static_cast<std::size_t>(count));

  for (int n : sizes) {
    const Grid grid = build_grid(n);
    const OperatorSet ops = assemble_example1(grid, tau);
    const Spectrum spec = eigen(assemble_generator(ops, GeneratorKind::conservative_cattaneo));
    std::vector<double> f = spec.positive_frequencies();
    if (static_cast<int>(f.size()) < count) throw NumericalFailure("spectral_convergence: too few frequencies");
    f.resize(static_cast<std::size_t>(count));
    std::vector<double> e(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) e[i] = std::abs(f[i] - study.modal[i]);
    study.discrete.push_back(f);
    study.errors.push_back(e);
  }

  study.min_order = std::numeric_limits<double>::infinity();
  study.max_order = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < sizes.size(); ++s) {
    const double h_ratio = static_cast<double>(sizes[s] + 1) / static_cast<double>(sizes[s - 1] + 1);
    std::vector<double> orders;
    for (int i = 0; i < count; ++i) {
      const double o = std::log(study.errors[s - 1][i] / study.errors[s][i]) / std::log(h_ratio);
      orders.push_back(o);
      study.min_order = std::min(study.min_order, o);
      study.max_order = std::max(study.max_order, o);
    }
    study.orders.push_back(orders);
  }
  return study;
}

GapTable frequency_gap(double tau, int n_max, FrequencySource source) {
  if (n_max < 2) throw InvalidArgument("frequency_gap: n_max must be >= 2");
  struct Entry {
    int branch;
    int n;
    double freq;
  };
  std::vector<Entry> family;
  for (int n = 1; n <= n_max; ++n) {
    const auto f = source == FrequencySource::displayed_set ? displayed_frequencies(n, tau) : modal_frequencies(n, tau);
    family.push_back({0, n, f[0]});
    family.push_back({1, n, f[1]});
  }
  GapTable table;
  table.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      GapEntry e{family[i].branch, family[j].branch, family[i].n, family[j].n,
                 std::abs(family[i].freq - family[j].freq)};
      const double scale = std::max(family[i].freq, family[j].freq);
      if (e.gap <= 1e-12 * scale) {
        e.gap = 0.0;
        table.has_duplicates = true;
      }
      table.min_gap = std::min(table.min_gap, e.gap);
      table.entries.push_back(e);
    }
  }
  return table;
}

}  // namespace thermolab
