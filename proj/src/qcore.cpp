#include "qkdtk/qcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qkdtk::qcore {

using std::complex;
namespace ci = qkdtk::cinfo;

// ---------------------------------------------------------------- DensityOperator

DensityOperator::DensityOperator(Matrix m) : mat(std::move(m)) { validate(); }

DensityOperator DensityOperator::pure(const Vector& psi) {
  Vector n = psi / psi.norm();
  return DensityOperator(n * n.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

void DensityOperator::validate() const {
  if (mat.rows() != mat.cols() || mat.rows() == 0)
    throw std::invalid_argument("DensityOperator: not square");
  if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(mat.trace().real() - 1.0) > 1e-8 ||
      std::abs(mat.trace().imag()) > kHermTol)
    throw std::invalid_argument("DensityOperator: trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kHermTol)
    throw std::invalid_argument("DensityOperator: negative eigenvalue");
}

std::vector<double> DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + dim());
  double sum = 0.0;
  for (double& v : ev) {
    v = std::clamp(v, 0.0, 1.0);
    sum += v;
  }
  for (double& v : ev) v /= sum;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// --------------------------------------------------------------------------- Povm

Povm Povm::computational(Eigen::Index d) {
  Povm f;
  f.orthogonal = true;
  for (Eigen::Index i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    f.elements.push_back(e);
    f.labels.push_back(std::to_string(i));
  }
  return f;
}

Povm Povm::from_basis(const Matrix& basis, std::vector<std::string> labels) {
  Povm f;
  f.orthogonal = true;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    Vector v = basis.col(i);
    f.elements.push_back(v * v.adjoint());
  }
  if (labels.empty())
    for (Eigen::Index i = 0; i < basis.cols(); ++i)
      f.labels.push_back(std::to_string(i));
  else
    f.labels = std::move(labels);
  return f;
}

Vector Povm::basis_vector(std::size_t z) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(elements.at(z));
  Eigen::Index imax;
  es.eigenvalues().maxCoeff(&imax);
  return es.eigenvectors().col(imax);
}

void Povm::validate() const {
  if (elements.empty()) throw std::invalid_argument("Povm: empty");
  if (labels.size() != elements.size())
    throw std::invalid_argument("Povm: label count mismatch");
  const Eigen::Index d = dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : elements) {
    if (e.rows() != d || e.cols() != d)
      throw std::invalid_argument("Povm: element dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kHermTol)
      throw std::invalid_argument("Povm: element not PSD");
    sum += e;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("Povm: elements do not sum to identity");
  if (orthogonal) {
    for (std::size_t i = 0; i < elements.size(); ++i)
      for (std::size_t j = i + 1; j < elements.size(); ++j)
        if ((elements[i] * elements[j]).cwiseAbs().maxCoeff() > kHermTol)
          throw std::invalid_argument("Povm: orthogonality violated");
  }
}

// ---------------------------------------------------------------- QuantumOperation

QuantumOperation QuantumOperation::identity(Eigen::Index d) {
  return QuantumOperation{{Matrix::Identity(d, d)}};
}

QuantumOperation QuantumOperation::dephasing(Eigen::Index d) {
  QuantumOperation e;
  for (Eigen::Index i = 0; i < d; ++i) {
    Matrix k = Matrix::Zero(d, d);
    k(i, i) = 1.0;
    e.kraus.push_back(k);
  }
  return e;
}

QuantumOperation QuantumOperation::depolarizing_qubit(double p) {
  Matrix id = Matrix::Identity(2, 2);
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
  sz << 1, 0, 0, -1;
  QuantumOperation e;
  e.kraus.push_back(std::sqrt(1.0 - p) * id);
  e.kraus.push_back(std::sqrt(p / 3.0) * sx);
  e.kraus.push_back(std::sqrt(p / 3.0) * sy);
  e.kraus.push_back(std::sqrt(p / 3.0) * sz);
  return e;
}

void QuantumOperation::validate() const {
  if (kraus.empty()) throw std::invalid_argument("QuantumOperation: empty");
  const Eigen::Index d = kraus[0].rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("QuantumOperation: Kraus family not trace-preserving");
}

// --------------------------------------------------------------------- operations

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat - sigma.mat,
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

cinfo::ProbDist measure(const DensityOperator& rho, const Povm& f) {
  if (rho.dim() != f.dim())
    throw std::invalid_argument("measure: dimension mismatch");
  std::vector<double> p(f.size());
  for (std::size_t z = 0; z < f.size(); ++z)
    p[z] = std::max(0.0, (f.elements[z] * rho.mat).trace().real());
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return cinfo::ProbDist(f.labels, p);
}

DensityOperator apply_operation(const QuantumOperation& e,
                                const DensityOperator& rho) {
  e.validate();
  if (e.kraus[0].rows() != rho.dim())
    throw std::invalid_argument("apply_operation: dimension mismatch");
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : e.kraus) out += k * rho.mat * k.adjoint();
  return DensityOperator(out);
}

Matrix partial_trace_b(const Matrix& m, Eigen::Index da, Eigen::Index db) {
  Matrix out = Matrix::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k)
        out(i, j) += m(i * db + k, j * db + k);
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
  return out;
}

DensityOperator condition_on_outcome(const DensityOperator& rho,
                                     Eigen::Index dim_a, const Povm& f,
                                     std::size_t z) {
  const Eigen::Index dim_b = f.dim();
  if (rho.dim() != dim_a * dim_b)
    throw std::invalid_argument("condition_on_outcome: dimension mismatch");
  Matrix proj = kron(Matrix::Identity(dim_a, dim_a), f.elements.at(z));
  Matrix weighted = proj * rho.mat;
  double c = weighted.trace().real();
  if (c <= 1e-12)
    throw std::invalid_argument("condition_on_outcome: zero-probability outcome");
  Matrix red = partial_trace_b(weighted, dim_a, dim_b) / c;
  // symmetrize away floating asymmetry from the one-sided projection
  red = 0.5 * (red + red.adjoint().eval());
  return DensityOperator(red);
}

double q_entropy(const DensityOperator& rho, double alpha,
                 const cinfo::SmoothingParam& s) {
  std::vector<double> ev = rho.eigenvalues();
  std::vector<std::string> alpha_names;
  for (std::size_t i = 0; i < ev.size(); ++i)
    alpha_names.push_back(std::to_string(i));
  cinfo::ProbDist lam(alpha_names, ev);
  return cinfo::smooth_renyi(lam, alpha, s);
}

DensityOperator steer_to_distribution(const DensityOperator& rho, const Povm& f,
                                      const cinfo::ProbDist& q) {
  if (!f.orthogonal)
    throw std::invalid_argument("steer_to_distribution: POVM must be orthogonal");
  if (q.size() != f.size())
    throw std::invalid_argument("steer_to_distribution: alphabet mismatch");
  cinfo::ProbDist p = measure(rho, f);
  const std::size_t m = f.size();

  // maximal coupling of P and Q: pi(z,z) = min(P,Q), excess spread
  // proportionally over the deficit entries
  std::vector<double> over(m, 0.0), under(m, 0.0);
  double delta = 0.0;
  for (std::size_t z = 0; z < m; ++z) {
    double d = p.probs[z] - q.probs[z];
    if (d > 0)
      over[z] = d, delta += d;
    else
      under[z] = -d;
  }
  // row-stochastic transition p_{z,z'} = P(Z'=z'|Z=z)
  std::vector<std::vector<double>> trans(m, std::vector<double>(m, 0.0));
  for (std::size_t z = 0; z < m; ++z) {
    if (p.probs[z] <= 1e-15) {
      trans[z][z] = 1.0;  // never occurs; keep the family trace-preserving
      continue;
    }
    double stay = std::min(p.probs[z], q.probs[z]);
    trans[z][z] = stay / p.probs[z];
    if (over[z] > 0.0 && delta > 0.0) {
      for (std::size_t zp = 0; zp < m; ++zp)
        if (zp != z)
          trans[z][zp] = (over[z] * under[zp] / delta) / p.probs[z];
    }
  }

  std::vector<Vector> basis(m);
  for (std::size_t z = 0; z < m; ++z) basis[z] = f.basis_vector(z);

  const Eigen::Index d = rho.dim();
  QuantumOperation op;
  Matrix e0 = Matrix::Zero(d, d);
  for (std::size_t z = 0; z < m; ++z)
    e0 += std::sqrt(trans[z][z]) * (basis[z] * basis[z].adjoint());
  op.kraus.push_back(e0);
  for (std::size_t z = 0; z < m; ++z)
    for (std::size_t zp = 0; zp < m; ++zp)
      if (z != zp && trans[z][zp] > 0.0)
        op.kraus.push_back(std::sqrt(trans[z][zp]) *
                           (basis[zp] * basis[z].adjoint()));
  return apply_operation(op, rho);
}

bool schur_check(const DensityOperator& rho, const Povm& f) {
  cinfo::ProbDist p = measure(rho, f);
  return cinfo::majorizes(rho.eigenvalues(), p.probs);
}

const std::array<Vector, 4>& bell_basis() {
  static const std::array<Vector, 4> basis = [] {
    std::array<Vector, 4> b;
    const double s = 1.0 / std::sqrt(2.0);
    b[0] = Vector(4);  // psi+ = (|00> + |11>)/sqrt(2)
    b[0] << s, 0, 0, s;
    b[1] = Vector(4);  // psi- = (|00> - |11>)/sqrt(2)
    b[1] << s, 0, 0, -s;
    b[2] = Vector(4);  // phi+ = (|01> + |10>)/sqrt(2)
    b[2] << 0, s, s, 0;
    b[3] = Vector(4);  // phi- = (|01> - |10>)/sqrt(2)
    b[3] << 0, s, -s, 0;
    return b;
  }();
  return basis;
}

DensityOperator bell_diagonal_state(const std::array<double, 4>& lambda) {
  double sum = 0.0;
  for (double l : lambda) {
    if (l < -1e-12)
      throw std::invalid_argument("bell_diagonal_state: negative weight");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("bell_diagonal_state: weights do not sum to 1");
  Matrix m = Matrix::Zero(4, 4);
  const auto& bb = bell_basis();
  for (int i = 0; i < 4; ++i)
    m += std::max(lambda[i], 0.0) * (bb[i] * bb[i].adjoint());
  return DensityOperator(m);
}

Matrix qubit_basis(int which) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix b(2, 2);
  switch (which) {
    case 1:
      b << 1, 0, 0, 1;
      break;
    case 2:  // |+>, |->
      b << s, s, s, -s;
      break;
    case 3:  // |+i>, |-i>
      b << s, s, complex<double>(0, s), complex<double>(0, -s);
      break;
    default:
      throw std::invalid_argument("qubit_basis: which must be 1..3");
  }
  return b;
}

}  // namespace qkdtk::qcore
