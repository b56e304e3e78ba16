#include "thermolab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "thermolab/dynamics.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/spectral.hpp"

namespace thermolab {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {

long horizon_steps(double T, double dt) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("gramian: T must be >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("gramian: dt must be > 0");
  return T == 0.0 ? 0 : step_count(T, dt);
}

// Gauss-Legendre rule on [-1, 1] by Golub-Welsch.
void gauss_legendre(int m, VectorXd& nodes, VectorXd& weights) {
  MatrixXd J = MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

}  // namespace

MatrixXd generator_kernel(const BlockGenerator& gen) {
  const MatrixXd S = metric_similarity(gen);
  Eigen::BDCSVD<MatrixXd> svd(S, Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  const double thresh = 1e-10 * (sigma.size() ? sigma[0] : 0.0);
  Index k = 0;
  for (Index i = sigma.size() - 1; i >= 0 && sigma[i] < thresh; --i) ++k;
  const MatrixXd U = svd.matrixV().rightCols(k);
  const auto L = gen.metric.chol.triangularView<Eigen::Lower>();
  return L.transpose().solve(U);
}

std::vector<ObservabilityGramian> gramian_series(const BlockGenerator& gen, const std::vector<double>& horizons,
                                                 double dt, Index cap) {
  if (gen.kind != GeneratorKind::conservative_cattaneo) {
    throw InvalidArgument("gramian: requires the conservative Cattaneo generator, got " + to_string(gen.kind));
  }
  const Index N = gen.dimension();
  if (N > cap) {
    std::ostringstream os;
    os << "gramian: dimension " << N << " exceeds cap " << cap;
    throw InvalidArgument(os.str());
  }
  if (horizons.empty()) throw InvalidArgument("gramian: no horizons");
  std::vector<long> steps;
  for (double T : horizons) steps.push_back(horizon_steps(T, dt));
  const long K = *std::max_element(steps.begin(), steps.end());

  const Slot& flux = gen.layout.slot(SlotName::w3);
  const Index n = flux.size;
  const double h = gen.ops ? gen.ops->quad_weight : 1.0;
  const MatrixXd kernel = generator_kernel(gen);

  MatrixXd O = MatrixXd::Zero(n, N);
  O.middleCols(flux.offset, n).setIdentity();
  const MatrixXd O0 = O;

  MatrixXd R;
  if (K > 0) R = MidpointStepper(gen.G, dt).step_matrix();

  // S_k = sum_{j <= k} O_j^T O_j, accumulated in batches through rank updates
  // of the lower triangle.
  constexpr Index batch = 8;
  MatrixXd S = MatrixXd::Zero(N, N);
  MatrixXd stack(batch * n, N);
  Index filled = 0;
  auto flush = [&] {
    if (filled == 0) return;
    S.selfadjointView<Eigen::Lower>().rankUpdate(stack.topRows(filled * n).transpose());
    filled = 0;
  };

  std::vector<ObservabilityGramian> out(horizons.size());
  auto snapshot = [&](long k, const MatrixXd& Ok) {
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      if (steps[i] != k) continue;
      flush();
      MatrixXd G = S.selfadjointView<Eigen::Lower>();
      G -= 0.5 * (O0.transpose() * O0 + Ok.transpose() * Ok);
      G *= h * dt;
      ObservabilityGramian& g = out[i];
      g.T = horizons[i];
      g.dt = dt;
      g.G = 0.5 * (G + G.transpose());
      g.kernel = kernel;
      g.metric = gen.metric;
      g.kind = gen.kind;
      g.layout = gen.layout;
    }
  };

  stack.topRows(n) = O;
  filled = 1;
  snapshot(0, O);
  for (long k = 1; k <= K; ++k) {
    O = O * R;
    if (!O.allFinite()) throw NumericalFailure("gramian: non-finite output flow");
    if (filled == batch) flush();
    stack.middleRows(filled * n, n) = O;
    ++filled;
    snapshot(k, O);
  }
  return out;
}

ObservabilityGramian gramian(const BlockGenerator& gen, double T, double dt, Index cap) {
  return gramian_series(gen, {T}, dt, cap).front();
}

namespace {

// Orthonormal basis of {x : K^T W x = 0}, or the identity without restriction.
MatrixXd complement_basis(const MatrixXd& kernel, const MatrixXd& W, Index N) {
  if (kernel.cols() == 0) return MatrixXd::Identity(N, N);
  const MatrixXd WK = W * kernel;
  Eigen::HouseholderQR<MatrixXd> qr(WK);
  const MatrixXd Q = qr.householderQ();
  return Q.rightCols(N - kernel.cols());
}

ObservabilityReport generalized_minimum(const ObservabilityGramian& gram, const Metric& metric, const MatrixXd& Q,
                                        Index kernel_dim, const Layout& layout) {
  const MatrixXd A = Q.transpose() * gram.G * Q;
  const MatrixXd B = Q.transpose() * metric.M * Q;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()), 0.5 * (B + B.transpose()));
  if (es.info() != Eigen::Success) throw NumericalFailure("observability: generalized eigensolve failed");
  ObservabilityReport rep;
  rep.T = gram.T;
  rep.alpha = metric.alpha;
  rep.metric_label = metric.label;
  rep.kernel_dim = kernel_dim;
  rep.raw_min_eigenvalue = es.eigenvalues()[0];
  rep.c_obs = std::max(0.0, rep.raw_min_eigenvalue);
  VectorXd x = Q * es.eigenvectors().col(0);
  x /= std::sqrt(metric.norm_squared(x));
  if (x.cwiseAbs().maxCoeff() > 0.0) {
    Index imax;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0.0) x = -x;
  }
  rep.minimizing_direction = x;
  for (const Slot& s : layout.slots) {
    const VectorXd xs = x.segment(s.offset, s.size);
    rep.minimizing_direction_norms.push_back(
        std::sqrt(std::max(0.0, xs.dot(metric.M.block(s.offset, s.offset, s.size, s.size) * xs))));
  }
  std::ostringstream os;
  if (kernel_dim > 0) {
    os << "kernel complement (dim " << Q.cols() << ")";
  } else {
    os << "full";
  }
  rep.subspace = os.str();
  return rep;
}

}  // namespace

ObservabilityReport observability_constant(const ObservabilityGramian& gram, const Metric& metric,
                                           bool restrict_kernel) {
  const Index N = gram.G.rows();
  if (metric.M.rows() != N) throw InvalidArgument("observability_constant: metric dimension mismatch");
  const MatrixXd empty(N, 0);
  const MatrixXd& kernel = restrict_kernel ? gram.kernel : empty;
  const MatrixXd Q = complement_basis(kernel, metric.M, N);
  return generalized_minimum(gram, metric, Q, kernel.cols(), gram.layout);
}

ObservabilityReport weak_observability_constant(const ObservabilityGramian& gram, const OperatorSet& ops,
                                                double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("weak_observability_constant: alpha must be >= 0");
  const Metric weak = fractional_metric(ops, alpha);
  const Index N = gram.G.rows();
  if (weak.M.rows() != N) throw InvalidArgument("weak_observability_constant: operator set does not match gramian");
  const MatrixXd Q = complement_basis(gram.kernel, gram.metric.M, N);
  return generalized_minimum(gram, weak, Q, gram.kernel.cols(), gram.layout);
}

ExponentialFamily modal_exponential_family(double tau, int n_max) {
  if (n_max < 1) throw InvalidArgument("ingham: n_max must be >= 1");
  ExponentialFamily fam;
  for (int n = 1; n <= n_max; ++n) {
    const ModalSystem sys = modal_reduce(n, tau, GeneratorKind::conservative_cattaneo);
    for (Index j = 0; j < sys.eigenvalues.size(); ++j) {
      fam.mode.push_back(n);
      fam.lambda.push_back(sys.eigenvalues[j]);
      fam.flux_amplitude.push_back(sys.eigenvectors(3, j));
    }
  }
  return fam;
}

double ingham_numerator(const ExponentialFamily& fam, const VectorXcd& coeff, double T) {
  const std::size_t m = fam.lambda.size();
  if (static_cast<std::size_t>(coeff.size()) != m) throw InvalidArgument("ingham: coefficient size mismatch");
  if (!(T > 0.0)) throw InvalidArgument("ingham: T must be > 0");
  double wmax = 0.0;
  for (const cplx& l : fam.lambda) wmax = std::max(wmax, std::abs(l));
  constexpr int order = 16;
  VectorXd xg, wg;
  gauss_legendre(order, xg, wg);
  // About one panel per half period of the fastest oscillation of |S|^2.
  const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * wmax * T / std::numbers::pi)));
  const double hp = T / panels;

  double total = 0.0;
  std::size_t j = 0;
  while (j < m) {
    const int mode = fam.mode[j];
    std::size_t end = j;
    while (end < m && fam.mode[end] == mode) ++end;
    double integral = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = p * hp;
      for (int q = 0; q < order; ++q) {
        const double t = a + 0.5 * hp * (xg[q] + 1.0);
        cplx s = 0.0;
        for (std::size_t i = j; i < end; ++i) s += coeff[static_cast<Index>(i)] * fam.flux_amplitude[i] * std::exp(fam.lambda[i] * t);
        integral += 0.5 * hp * wg[q] * std::norm(s);
      }
    }
    total += 0.5 * integral;
    j = end;
  }
  return total;
}

double ingham_denominator(const ExponentialFamily& fam, const VectorXcd& coeff) {
  double d = 0.0;
  for (std::size_t i = 0; i < fam.lambda.size(); ++i) d += std::norm(fam.lambda[i] * coeff[static_cast<Index>(i)]);
  return d;
}

InghamReport ingham_direct_check(double tau, double T, int n_max, int trials, std::uint64_t seed) {
  if (!(tau > 0.0)) throw InvalidArgument("ingham: tau must be > 0");
  if (!(T > 2.0)) throw InvalidArgument("ingham: T must be > 2");
  if (n_max < 1) throw InvalidArgument("ingham: n_max must be >= 1");
  if (trials < 1) throw InvalidArgument("ingham: trials must be >= 1");
  InghamReport rep;
  rep.tau = tau;
  rep.T = T;
  rep.n_max = n_max;
  rep.trials = trials;
  rep.seed = seed;
  rep.tau_hypothesis_holds = !frequency_ratio_is_rational(tau);
  if (n_max >= 2) {
    const GapTable modal = frequency_gap(tau, n_max, FrequencySource::modal_oracle);
    const GapTable displayed = frequency_gap(tau, n_max, FrequencySource::displayed_set);
    rep.min_gap_modal = modal.min_gap;
    rep.min_gap_displayed = displayed.min_gap;
    if (modal.has_duplicates) {
      rep.refused = true;
      rep.diagnostic = "coincident frequencies in the modal family; the uniform gap hypothesis fails";
    }
  }
  if (!rep.tau_hypothesis_holds) {
    rep.refused = true;
    std::ostringstream os;
    os << "sqrt(tau/(1+tau)) is rational for tau = " << tau
       << "; the two frequency branches share a common subsequence and no uniform gap exists";
    rep.diagnostic = os.str();
  }
  if (rep.refused) return rep;

  const ExponentialFamily fam = modal_exponential_family(tau, n_max);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Index m = static_cast<Index>(fam.lambda.size());
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    VectorXcd a(m);
    for (Index i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a[i] = cplx(re, im);
    }
    const double ratio = ingham_numerator(fam, a, T) / ingham_denominator(fam, a);
    rep.ratios.push_back(ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

}  // namespace thermolab
