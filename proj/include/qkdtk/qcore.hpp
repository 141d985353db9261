#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "qkdtk/cinfo.hpp"

// Small dense complex-matrix quantum core: density operators, POVMs,
// measurement statistics, trace distance, quantum operations and entropies.

namespace qkdtk::qcore {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-9;

/// A positive unit-trace operator on a finite-dimensional Hilbert space.
struct DensityOperator {
  Matrix mat;

  DensityOperator() = default;
  explicit DensityOperator(Matrix m);

  Eigen::Index dim() const { return mat.rows(); }
  static DensityOperator pure(const Vector& psi);
  static DensityOperator maximally_mixed(Eigen::Index d);

  /// Eigenvalues clamped to [0,1] and renormalized, descending order.
  std::vector<double> eigenvalues() const;

  void validate() const;
};

/// POVM: positive elements summing to identity. If `orthogonal` is set the
/// elements must be rank-1 projectors onto an orthonormal basis.
struct Povm {
  std::vector<Matrix> elements;
  std::vector<std::string> labels;
  bool orthogonal = false;

  Eigen::Index dim() const { return elements.empty() ? 0 : elements[0].rows(); }
  std::size_t size() const { return elements.size(); }

  static Povm computational(Eigen::Index d);
  /// Orthogonal POVM from the columns of a unitary.
  static Povm from_basis(const Matrix& basis, std::vector<std::string> labels);

  /// Basis vector of an orthogonal element (largest eigenvector).
  Vector basis_vector(std::size_t z) const;

  void validate() const;
};

/// Kraus family E_z with sum E_z^dag E_z = id.
struct QuantumOperation {
  std::vector<Matrix> kraus;

  static QuantumOperation identity(Eigen::Index d);
  static QuantumOperation dephasing(Eigen::Index d);
  static QuantumOperation depolarizing_qubit(double p);

  void validate() const;
};

/// Convex set of single-system density operators, given either as explicit
/// extreme points or as the measurement-statistics constraint set.
struct DensityRangeSpec {
  std::vector<DensityOperator> extreme_points;
  // constraint form: all rho with measure(rho, F) == target
  bool constraint_form = false;
  Povm constraint_povm;
  cinfo::ProbDist constraint_target;
};

// ---------------------------------------------------------------------------

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

cinfo::ProbDist measure(const DensityOperator& rho, const Povm& f);

DensityOperator apply_operation(const QuantumOperation& e,
                                const DensityOperator& rho);

/// Conditioning of a state on H (x) H' on outcome z of a POVM on H'.
DensityOperator condition_on_outcome(const DensityOperator& rho,
                                     Eigen::Index dim_a, const Povm& f,
                                     std::size_t z);

/// Partial trace over the second factor of H (x) H'.
Matrix partial_trace_b(const Matrix& m, Eigen::Index dim_a, Eigen::Index dim_b);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron_vec(const Vector& a, const Vector& b);

/// (Smooth) Renyi entropy of rho: the entropy of its eigenvalue distribution,
/// smoothed over commuting (same-eigenbasis) perturbations.
double q_entropy(const DensityOperator& rho, double alpha,
                 const cinfo::SmoothingParam& s = cinfo::SmoothingParam{});

/// Constructive steering: a state sigma with measure(sigma,F) = Q and
/// trace_distance(rho,sigma) <= sqrt(2 delta(P,Q)), built from the maximal
/// coupling of P = measure(rho,F) and Q.
DensityOperator steer_to_distribution(const DensityOperator& rho, const Povm& f,
                                      const cinfo::ProbDist& q);

/// Schur majorization check: measurement probabilities are majorized by the
/// eigenvalues. Always true for valid inputs; exposed for direct testing.
bool schur_check(const DensityOperator& rho, const Povm& f);

/// Bell-diagonal two-qubit state, basis order (psi+, psi-, phi+, phi-).
DensityOperator bell_diagonal_state(const std::array<double, 4>& lambda);

/// The four Bell vectors in the fixed order (psi+, psi-, phi+, phi-).
const std::array<Vector, 4>& bell_basis();

/// Single-qubit measurement bases 1..3 (computational, diagonal, circular),
/// as 2x2 unitaries whose columns are the basis vectors.
Matrix qubit_basis(int which);

}  // namespace qkdtk::qcore
