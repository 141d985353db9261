#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qkdtk/cinfo.hpp"
#include "qkdtk/qcore.hpp"
#include "qkdtk/randkit.hpp"

using namespace qkdtk;
using qcore::DensityOperator;
using qcore::Matrix;
using qcore::Povm;
using qcore::Vector;

namespace {

double gauss(randkit::Stream& s) {
  double u1 = 1.0 - s.next_double();
  double u2 = s.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix random_complex(randkit::Stream& s, Eigen::Index d) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = std::complex<double>(gauss(s), gauss(s));
  return g;
}

DensityOperator random_state(randkit::Stream& s, Eigen::Index d) {
  Matrix g = random_complex(s, d);
  Matrix m = g * g.adjoint();
  return DensityOperator(m / m.trace().real());
}

Matrix random_unitary(randkit::Stream& s, Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(random_complex(s, d));
  return qr.householderQ();
}

// random target distribution inside the simplex, mixed toward the measured
// distribution so small and large perturbations both occur
cinfo::ProbDist random_target(randkit::Stream& s, const cinfo::ProbDist& p) {
  std::vector<double> w(p.size());
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - s.next_double());
    sum += x;
  }
  double t = s.next_double();
  std::vector<double> mix(p.size());
  for (std::size_t z = 0; z < p.size(); ++z)
    mix[z] = (1.0 - t) * p.probs[z] + t * w[z] / sum;
  return cinfo::ProbDist(p.alphabet, mix);
}

}  // namespace

TEST_CASE("DensityOperator validation") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, -0.5, 0.0;
  CHECK_THROWS_AS(DensityOperator{bad}, std::invalid_argument);
  Matrix neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityOperator{neg}, std::invalid_argument);
  auto mm = DensityOperator::maximally_mixed(3);
  auto ev = mm.eigenvalues();
  for (double v : ev) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("trace distance: pure-state formula, bounds, triangle") {
  randkit::Stream s(101);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::Index d = 2 + s.below(3);
    Matrix u = random_unitary(s, d);
    Vector psi = u.col(0);
    Vector phi(d);
    for (Eigen::Index i = 0; i < d; ++i)
      phi(i) = std::complex<double>(gauss(s), gauss(s));
    phi.normalize();
    auto rp = DensityOperator::pure(psi);
    auto rq = DensityOperator::pure(phi);
    double ov = std::abs(psi.dot(phi));  // Eigen dot conjugates the lhs
    CHECK(qcore::trace_distance(rp, rq) ==
          doctest::Approx(std::sqrt(std::max(0.0, 1.0 - ov * ov)))
              .epsilon(1e-9));
    auto a = random_state(s, d);
    auto b = random_state(s, d);
    auto c = random_state(s, d);
    double ab = qcore::trace_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab == doctest::Approx(qcore::trace_distance(b, a)).epsilon(1e-12));
    CHECK(ab <= qcore::trace_distance(a, c) + qcore::trace_distance(c, b) + 1e-9);
  }
}

TEST_CASE("measurement statistics contract under the trace distance") {
  randkit::Stream s(202);
  std::size_t violations = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Eigen::Index d = 2 + s.below(3);
    auto rho = random_state(s, d);
    auto sig = random_state(s, d);
    Povm f = Povm::from_basis(random_unitary(s, d), {});
    double lhs = cinfo::variational_distance(qcore::measure(rho, f),
                                             qcore::measure(sig, f));
    if (lhs > qcore::trace_distance(rho, sig) + 1e-10) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("eigenvalues majorize every orthogonal measurement") {
  randkit::Stream s(303);
  std::size_t violations = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Eigen::Index d = 2 + s.below(3);
    auto rho = random_state(s, d);
    Povm f = Povm::from_basis(random_unitary(s, d), {});
    if (!qcore::schur_check(rho, f)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("steering to a target distribution") {
  randkit::Stream s(404);
  std::size_t violations = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Eigen::Index d = 2 + s.below(2);
    auto rho = random_state(s, d);
    Povm f = Povm::from_basis(random_unitary(s, d), {});
    cinfo::ProbDist p = qcore::measure(rho, f);
    cinfo::ProbDist q = random_target(s, p);
    auto sigma = qcore::steer_to_distribution(rho, f, q);
    cinfo::ProbDist got = qcore::measure(sigma, f);
    if (cinfo::variational_distance(got, q) > 1e-10) ++violations;
    double dist = qcore::trace_distance(rho, sigma);
    double budget = std::sqrt(2.0 * cinfo::variational_distance(p, q));
    if (dist > budget + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("POVM validation") {
  Povm f = Povm::computational(3);
  CHECK_NOTHROW(f.validate());
  f.elements[0] *= 0.5;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  Povm g = Povm::from_basis(qcore::qubit_basis(2), {"plus", "minus"});
  CHECK_NOTHROW(g.validate());
  CHECK(g.labels[0] == "plus");
}

TEST_CASE("quantum operations") {
  auto dep = qcore::QuantumOperation::depolarizing_qubit(0.75);
  CHECK_NOTHROW(dep.validate());
  auto rho = DensityOperator::pure((Vector(2) << 1, 0).finished());
  auto out = qcore::apply_operation(dep, rho);
  // full depolarizing: any input lands on the maximally mixed state
  CHECK(qcore::trace_distance(out, DensityOperator::maximally_mixed(2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  auto deph = qcore::QuantumOperation::dephasing(2);
  auto plus = DensityOperator::pure((Vector(2) << 1, 1).finished());
  auto dephased = qcore::apply_operation(deph, plus);
  CHECK(std::abs(dephased.mat(0, 1)) == doctest::Approx(0.0));
}

TEST_CASE("kron and partial trace round trip") {
  randkit::Stream s(505);
  auto a = random_state(s, 2);
  auto b = random_state(s, 3);
  Matrix joint = qcore::kron(a.mat, b.mat);
  Matrix back = qcore::partial_trace_b(joint, 2, 3);
  CHECK((back - a.mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  Vector va = a.mat.col(0).normalized(), vb = b.mat.col(0).normalized();
  Vector kv = qcore::kron_vec(va, vb);
  CHECK(kv.size() == 6);
  CHECK(std::abs(kv(4) - va(1) * vb(1)) < 1e-15);
}

TEST_CASE("conditioning on an outcome") {
  // psi+ conditioned on Bob's computational outcome 0 leaves Alice in |0>
  auto psi_plus = DensityOperator::pure(qcore::bell_basis()[0]);
  auto cond = qcore::condition_on_outcome(psi_plus, 2, Povm::computational(2), 0);
  CHECK(std::abs(cond.mat(0, 0).real() - 1.0) < 1e-12);
  CHECK_THROWS_AS(
      qcore::condition_on_outcome(
          DensityOperator::pure((Vector(4) << 1, 0, 0, 0).finished()), 2,
          Povm::computational(2), 1),
      std::invalid_argument);  // zero-probability outcome
}

TEST_CASE("operator entropies") {
  CHECK(qcore::q_entropy(DensityOperator::maximally_mixed(4), 1.0, {}) ==
        doctest::Approx(2.0));
  CHECK(qcore::q_entropy(DensityOperator::pure((Vector(2) << 1, 0).finished()),
                         1.0, {}) == doctest::Approx(0.0).epsilon(1e-9));
  auto bd = qcore::bell_diagonal_state({0.7, 0.1, 0.1, 0.1});
  double h4 = -(0.7 * std::log2(0.7) + 3 * 0.1 * std::log2(0.1));
  CHECK(qcore::q_entropy(bd, 1.0, {}) == doctest::Approx(h4).epsilon(1e-9));
}

TEST_CASE("Bell-diagonal states") {
  auto bd = qcore::bell_diagonal_state({0.85, 0.05, 0.05, 0.05});
  auto ev = bd.eigenvalues();
  CHECK(ev[0] == doctest::Approx(0.85));
  CHECK(ev[3] == doctest::Approx(0.05));
  // both reduced states are maximally mixed
  Matrix red = qcore::partial_trace_b(bd.mat, 2, 2);
  CHECK((red - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(qcore::bell_diagonal_state({0.5, 0.5, 0.5, -0.5}),
                  std::invalid_argument);
  // the four Bell vectors are orthonormal
  const auto& bb = qcore::bell_basis();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(bb[i].dot(bb[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("qubit measurement bases") {
  for (int which : {1, 2, 3}) {
    Matrix u = qcore::qubit_basis(which);
    CHECK((u.adjoint() * u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
  }
  CHECK_THROWS_AS(qcore::qubit_basis(4), std::invalid_argument);
}
