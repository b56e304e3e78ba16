#pragma once

// Discrete realizations of the thermo-elastic state spaces, operators, metrics
// and block generators.
//
// Abstract setting: H1 carries displacement/velocity and the heat flux, H2 the
// temperature. For the 1D example H1 lives on the n interior nodes of (0,1)
// (Dirichlet) and H2 on the n+1 cell midpoints, all L2 products use the
// uniform quadrature weight h, so every adjoint is a plain transpose.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace thermolab {

struct Grid {
  int n_interior = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;      // x_j = j h, j = 1..n
  Eigen::VectorXd midpoints;  // (j + 1/2) h, j = 0..n
};

Grid build_grid(int n_interior);

enum class Subspace { full, zero_mean_temperature };

/// A1 : H1 -> H1, A2 : H1 -> H2, A2star : H2 -> H1, C : H2 -> H1, Cstar : H1 -> H2.
struct OperatorSet {
  Eigen::MatrixXd A1;
  Eigen::MatrixXd A2;
  Eigen::MatrixXd A2star;
  Eigen::MatrixXd C;
  Eigen::MatrixXd Cstar;
  double tau = 1.0;
  double quad_weight = 1.0;
  Subspace subspace = Subspace::full;
  // Columns map reduced temperature coordinates back to nodal (cell) values.
  // Identity for the full space.
  Eigen::MatrixXd temperature_basis;

  Eigen::Index n1() const { return A1.rows(); }
  Eigen::Index n2() const { return A2.rows(); }
  /// A = A2 A2*, the heat operator of the Fourier-law system.
  Eigen::MatrixXd heat_operator() const { return A2 * A2star; }
};

/// Example of the 1D problem on (0,1) with relaxation time tau.
OperatorSet assemble_example1(const Grid& grid, double tau);

/// User supplied abstract operators; adjoints are taken as transposes under
/// the uniform weight. Validates symmetry/definiteness and shapes.
OperatorSet make_operator_set(Eigen::MatrixXd A1, Eigen::MatrixXd A2, Eigen::MatrixXd C,
                              double tau, double quad_weight);

/// Restriction to the invariant subspace of zero-mean temperature. Requires the
/// constant temperature to lie in ker A2* and ker C.
OperatorSet restrict_zero_mean_temperature(const OperatorSet& ops);

/// Throws InvalidArgument if an OperatorSet invariant fails.
void validate(const OperatorSet& ops);

enum class MetricLabel { H, H0, H_minus_alpha };

struct Metric {
  Eigen::MatrixXd M;
  Eigen::MatrixXd chol;  // lower triangular, M = chol chol^T
  MetricLabel label = MetricLabel::H;
  double alpha = 0.0;

  std::string describe() const;
  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return x.dot(M * y); }
  double norm_squared(const Eigen::VectorXd& x) const { return x.dot(M * x); }
};

enum class GeneratorKind { damped_cattaneo, conservative_cattaneo, fourier, adjoint_damped_cattaneo };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);
bool is_cattaneo(GeneratorKind kind);

enum class SlotName { w1, w1dot, w2, w3 };

struct Slot {
  SlotName name;
  Eigen::Index offset;
  Eigen::Index size;
};

struct Layout {
  std::vector<Slot> slots;

  Eigen::Index dimension() const;
  const Slot& slot(SlotName name) const;
  bool has(SlotName name) const;
};

struct BlockGenerator {
  Eigen::MatrixXd G;
  Layout layout;
  GeneratorKind kind = GeneratorKind::damped_cattaneo;
  Metric metric;
  std::shared_ptr<const OperatorSet> ops;

  Eigen::Index dimension() const { return G.rows(); }

  template <class Vec>
  auto segment(Vec& z, SlotName name) const {
    const Slot& s = layout.slot(name);
    return z.segment(s.offset, s.size);
  }
};

Layout cattaneo_layout(const OperatorSet& ops);
Layout fourier_layout(const OperatorSet& ops);

BlockGenerator assemble_generator(const OperatorSet& ops, GeneratorKind kind);

/// L^T G L^{-T} with M = L L^T: the generator in coordinates where the metric
/// is Euclidean. Operator norms and spectra in H are those of this matrix.
Eigen::MatrixXd metric_similarity(const BlockGenerator& gen);

/// H-adjoint of the damped Cattaneo generator assembled block by block.
BlockGenerator adjoint_generator(const OperatorSet& ops);

/// Energy inner product: h*blockdiag(A1, I, I, tau I) (Cattaneo) or
/// h*blockdiag(A1, I, I) (Fourier).
Metric energy_metric(const OperatorSet& ops, GeneratorKind kind);

/// Weak metric H_{-alpha}: slots carry A1^{1-alpha}, A1^{-alpha}, A^{-alpha},
/// tau*A1^{-alpha}. On ker A (constant temperature) slot 3 keeps weight 1.
Metric fractional_metric(const OperatorSet& ops, double alpha);

/// Input map B k = (0,0,0,k/sqrt(tau)) and its H-adjoint B* z = w3/sqrt(tau),
/// where the input space carries the inner product tau*h*<k,l>.
struct InputMap {
  Eigen::MatrixXd B;      // N x n1
  Eigen::MatrixXd Bstar;  // n1 x N
  double input_weight = 1.0;

  double input_inner(const Eigen::VectorXd& k, const Eigen::VectorXd& l) const {
    return input_weight * k.dot(l);
  }
};

InputMap assemble_input_map(const OperatorSet& ops);

/// Symmetric matrix power through an eigendecomposition. Eigenvalues with
/// |lambda| <= kernel_tol * max|lambda| are mapped to 1.
Eigen::MatrixXd symmetric_power(const Eigen::MatrixXd& S, double p, double kernel_tol = 1e-12);

}  // namespace thermolab
