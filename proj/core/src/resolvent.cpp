#include "thermolab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "thermolab/errors.hpp"

namespace thermolab {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {

// LU of the complex upper Hessenberg matrix K = i beta I - H with pivoting
// restricted to adjacent rows. Stores U in place plus one multiplier and one
// swap flag per elimination step.
class HessenbergLU {
 public:
  HessenbergLU(const MatrixXd& H, double beta) : U_(H.rows(), H.cols()), mult_(H.rows()), swap_(H.rows(), 0) {
    const Index N = H.rows();
    U_ = -H.cast<cplx>();
    U_.diagonal().array() += cplx(0.0, beta);
    for (Index j = 0; j + 1 < N; ++j) {
      if (std::abs(U_(j + 1, j)) > std::abs(U_(j, j))) {
        U_.row(j).segment(j, N - j).swap(U_.row(j + 1).segment(j, N - j));
        swap_[j] = 1;
      }
      const cplx piv = U_(j, j);
      const cplx m = piv == cplx(0.0) ? cplx(0.0) : U_(j + 1, j) / piv;
      mult_[j] = m;
      U_(j + 1, j) = 0.0;
      if (m != cplx(0.0)) U_.row(j + 1).segment(j + 1, N - j - 1) -= m * U_.row(j).segment(j + 1, N - j - 1);
    }
  }

  double min_abs_pivot() const { return U_.diagonal().cwiseAbs().minCoeff(); }

  // K^{-1} b
  VectorXcd solve(VectorXcd b) const {
    const Index N = U_.rows();
    for (Index j = 0; j + 1 < N; ++j) {
      if (swap_[j]) std::swap(b[j], b[j + 1]);
      b[j + 1] -= mult_[j] * b[j];
    }
    return U_.triangularView<Eigen::Upper>().solve(b);
  }

  // K^{-*} c
  VectorXcd solve_adjoint(const VectorXcd& c) const {
    const Index N = U_.rows();
    VectorXcd y = U_.triangularView<Eigen::Upper>().adjoint().solve(c);
    for (Index j = N - 2; j >= 0; --j) {
      y[j] -= std::conj(mult_[j]) * y[j + 1];
      if (swap_[j]) std::swap(y[j], y[j + 1]);
    }
    return y;
  }

 private:
  MatrixXcd U_;
  VectorXcd mult_;
  std::vector<char> swap_;
};

struct LanczosResult {
  double theta = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of K^{-*} K^{-1} by Lanczos with full reorthogonalisation.
LanczosResult top_singular_squared(const HessenbergLU& lu, Index N, double tol) {
  const int max_iter = static_cast<int>(std::min<Index>(N, 400));
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> normal;
  VectorXcd q(N);
  for (Index i = 0; i < N; ++i) q[i] = cplx(normal(rng), normal(rng));
  q.normalize();

  MatrixXcd Q(N, max_iter + 1);
  Q.col(0) = q;
  std::vector<double> alpha, beta;
  LanczosResult out;
  for (int k = 0; k < max_iter; ++k) {
    VectorXcd w = lu.solve_adjoint(lu.solve(Q.col(k)));
    const double a = Q.col(k).dot(w).real();
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against all previous vectors.
    for (int pass = 0; pass < 2; ++pass) {
      const VectorXcd coeff = Q.leftCols(k + 1).adjoint() * w;
      w.noalias() -= Q.leftCols(k + 1) * coeff;
    }
    const double b = w.norm();

    const int m = k + 1;
    const bool check = m == max_iter || m % 5 == 0 || b == 0.0 || m == N;
    if (check) {
      MatrixXd T = MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
      const double theta = es.eigenvalues()[m - 1];
      const double res = std::abs(b * es.eigenvectors()(m - 1, m - 1)) / theta;
      out.theta = theta;
      out.residual = res;
      out.iterations = m;
      if (res <= tol || b <= tol * theta) {
        out.residual = std::min(res, b / theta);
        out.converged = true;
        return out;
      }
    }
    if (b == 0.0) break;
    beta.push_back(b);
    Q.col(k + 1) = w / b;
  }
  return out;
}

double dense_inverse_norm(const HessenbergLU& lu, Index N) {
  MatrixXcd inv(N, N);
  for (Index j = 0; j < N; ++j) inv.col(j) = lu.solve(VectorXcd::Unit(N, j));
  Eigen::BDCSVD<MatrixXcd> svd(inv);
  return svd.singularValues()[0];
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

ResolventEvaluator::ResolventEvaluator(const BlockGenerator& gen) {
  const MatrixXd S = metric_similarity(gen);
  Eigen::HessenbergDecomposition<MatrixXd> hd(S);
  H_ = hd.matrixH();
  spectrum_ = eigen(gen);
  scale_ = 1.0;
  for (Index i = 0; i < spectrum_.eigenvalues.size(); ++i) scale_ = std::max(scale_, std::abs(spectrum_.eigenvalues[i]));
}

ResolventPoint ResolventEvaluator::evaluate(double beta) const {
  if (!std::isfinite(beta)) throw InvalidArgument("resolvent: beta must be finite");
  ResolventPoint p;
  p.beta = beta;
  const cplx ib(0.0, beta);
  p.distance = std::numeric_limits<double>::infinity();
  cplx nearest = 0.0;
  for (Index i = 0; i < spectrum_.eigenvalues.size(); ++i) {
    const double d = std::abs(ib - spectrum_.eigenvalues[i]);
    if (d < p.distance) {
      p.distance = d;
      nearest = spectrum_.eigenvalues[i];
    }
  }
  auto collision = [&] {
    std::ostringstream os;
    os.precision(17);
    os << "resolvent: i*beta (beta = " << beta << ") collides with eigenvalue " << nearest.real()
       << (nearest.imag() < 0 ? " - " : " + ") << std::abs(nearest.imag()) << "i";
    return EigenvalueCollision(beta, nearest, os.str());
  };
  if (p.distance <= 1e-12 * scale_) throw collision();

  const Index N = H_.rows();
  const HessenbergLU lu(H_, beta);
  if (lu.min_abs_pivot() <= 1e-15 * scale_) throw collision();

  const LanczosResult lr = top_singular_squared(lu, N, 1e-10);
  p.iterations = lr.iterations;
  if (lr.converged) {
    p.norm = std::sqrt(lr.theta);
    p.certificate = lr.residual;
  } else {
    p.norm = dense_inverse_norm(lu, N);
    p.certificate = 0.0;
    p.dense_fallback = true;
  }
  if (!std::isfinite(p.norm)) throw collision();
  return p;
}

double resolvent_norm(const BlockGenerator& gen, double beta) { return ResolventEvaluator(gen).norm(beta); }

std::vector<double> BetaGrid::values() const {
  if (points < 1) throw InvalidArgument("beta grid: points must be >= 1");
  if (!(max >= min)) throw InvalidArgument("beta grid: max must be >= min");
  if (log_spaced && !(min > 0.0)) throw InvalidArgument("beta grid: log spacing needs min > 0");
  std::vector<double> v;
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    v.push_back(log_spaced ? std::exp(std::log(min) + s * (std::log(max) - std::log(min))) : min + s * (max - min));
  }
  if (both_signs) {
    std::vector<double> neg;
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
      if (*it != 0.0) neg.push_back(-*it);
    }
    v.insert(v.begin(), neg.begin(), neg.end());
  }
  return v;
}

ExponentFit fit_growth_exponent(const std::vector<double>& beta, const std::vector<double>& r, double wmin,
                                double wmax) {
  if (beta.size() != r.size()) throw InvalidArgument("fit_growth_exponent: size mismatch");
  ExponentFit fit;
  fit.window_min = wmin;
  fit.window_max = wmax;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] > 0.0 && beta[i] >= wmin && beta[i] <= wmax) {
      if (!(r[i] > 0.0)) throw InvalidArgument("fit_growth_exponent: non-positive resolvent value");
      x.push_back(std::log(beta[i]));
      y.push_back(std::log(r[i]));
    }
  }
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) {
    fit.flags.emplace_back("too_few_points");
    return fit;
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    fit.flags.emplace_back("degenerate_window");
    return fit;
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.exponent * x[i];
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / x.size());

  std::vector<double> rw;
  for (double v : y) rw.push_back(std::exp(v));
  const double med = median(rw);
  bool spike = false;
  for (std::size_t i = 1; i + 1 < rw.size(); ++i) {
    if (rw[i] > rw[i - 1] && rw[i] > rw[i + 1] && rw[i] > 10.0 * med) spike = true;
  }
  if (spike) fit.flags.emplace_back("spike");
  fit.accepted = !spike;
  return fit;
}

ResolventScan resolvent_scan(const ResolventEvaluator& evaluator, GeneratorKind kind,
                             const std::vector<double>& beta_grid, std::optional<std::pair<double, double>> window) {
  if (beta_grid.empty()) throw InvalidArgument("resolvent_scan: empty beta grid");
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) throw InvalidArgument("resolvent_scan: grid must be sorted");
  ResolventScan scan;
  scan.kind = kind;
  scan.min_lower_bound_margin = std::numeric_limits<double>::infinity();
  std::vector<double> b, r;
  for (double beta : beta_grid) {
    const ResolventPoint p = evaluator.evaluate(beta);
    scan.points.push_back(p);
    scan.sup_norm = std::max(scan.sup_norm, p.norm);
    scan.min_lower_bound_margin = std::min(scan.min_lower_bound_margin, p.norm * p.distance);
    b.push_back(beta);
    r.push_back(p.norm);
  }
  double wmin, wmax;
  if (window) {
    wmin = window->first;
    wmax = window->second;
  } else {
    wmax = beta_grid.back();
    wmin = wmax / 10.0;
  }
  scan.fit = fit_growth_exponent(b, r, wmin, wmax);

  std::vector<double> rw;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] >= wmin && b[i] <= wmax) rw.push_back(r[i]);
  }
  const double med = median(rw);
  for (std::size_t i = 1; i + 1 < b.size(); ++i) {
    if (r[i] > r[i - 1] && r[i] > r[i + 1] && r[i] > 10.0 * med) scan.spikes.push_back(b[i]);
  }
  return scan;
}

ResolventScan resolvent_scan(const BlockGenerator& gen, const std::vector<double>& beta_grid,
                             std::optional<std::pair<double, double>> window) {
  const ResolventEvaluator evaluator(gen);
  return resolvent_scan(evaluator, gen.kind, beta_grid, window);
}

ImplicationCheck resolvent_implication(const ResolventScan& cattaneo, const ResolventScan& fourier, double eps,
                                       double eps_prime) {
  ImplicationCheck c;
  c.eps = eps;
  c.eps_prime = eps_prime;
  c.cattaneo_exponent = cattaneo.fit.exponent;
  c.fourier_exponent = fourier.fit.exponent;
  c.premise = cattaneo.fit.accepted && cattaneo.fit.exponent <= eps;
  c.conclusion = fourier.fit.accepted && fourier.fit.exponent <= 2.0 + eps_prime;
  c.holds = !c.premise || c.conclusion;
  return c;
}

}  // namespace thermolab
