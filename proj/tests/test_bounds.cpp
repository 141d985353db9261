#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qkdtk/bounds.hpp"
#include "qkdtk/cinfo.hpp"

using namespace qkdtk;
using cinfo::ProbDist;

namespace {

// Pascal-triangle binomial table, exact up to n = 20
double log2_binomial(int n, int k) {
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) {
    c[i][0] = 1.0;
    for (int j = 1; j <= i; ++j)
      c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0.0);
  }
  return std::log2(c[n][k]);
}

}  // namespace

TEST_CASE("frequency sampling failure bound") {
  auto r = bounds::freq_sampling_bound(2, 1000, 0.05);
  CHECK(r.raw == doctest::Approx(4.0 * std::exp(-1000.0 * 0.0025 / 2.0)));
  CHECK(r.bound <= 1.0);
  // monotone: more samples, smaller failure probability
  double prev = 1e9;
  for (std::size_t n : {10, 100, 1000, 10000}) {
    double b = bounds::freq_sampling_bound(3, n, 0.1).raw;
    CHECK(b < prev);
    prev = b;
  }
  // trivial for tiny n: bound clamps at 1
  CHECK(bounds::freq_sampling_bound(4, 1, 0.01).bound == doctest::Approx(1.0));
}

TEST_CASE("two-POVM tomography failure bound") {
  auto r = bounds::quanttom_bound(2, 2, 512, 0.35);
  CHECK(r.raw ==
        doctest::Approx(std::pow(2.0, 4.0) * std::exp(-512.0 * 0.1225 / 8.0)));
  CHECK(r.bound <= 1.0);
  CHECK(bounds::quanttom_bound(2, 2, 2048, 0.35).raw < r.raw);
}

TEST_CASE("exchangeable min-entropy: exact multinomial dominates the bound") {
  for (int n = 2; n <= 20; ++n) {
    for (int k = 0; k <= n; ++k) {
      ProbDist q({"0", "1"}, {double(n - k) / n, double(k) / n});
      auto rep = bounds::hinf_exchangeable(std::size_t(n), q);
      REQUIRE(rep.exact.has_value());
      CHECK(*rep.exact == doctest::Approx(log2_binomial(n, k)).epsilon(1e-9));
      CHECK(*rep.exact >= rep.bound - 1e-9);
    }
  }
  // non-integral counts: only the closed-form bound is available
  ProbDist frac({"0", "1"}, {0.73, 0.27});
  auto rep = bounds::hinf_exchangeable(10, frac);
  CHECK_FALSE(rep.exact.has_value());
  CHECK(rep.bound == doctest::Approx(10.0 * cinfo::binary_entropy(0.27) -
                                     2.0 * (std::log2(10.0) + 1.0)));
}

TEST_CASE("reconciliation failure bound") {
  auto r = bounds::ir_failure_bound(4.0, 10.0, 1e-3);
  CHECK(r.raw == doctest::Approx(std::pow(2.0, -6.0) + 1e-3));
  CHECK(r.bound <= 1.0);
  CHECK(bounds::ir_failure_bound(4.0, 12.0, 1e-3).raw < r.raw);
  CHECK(bounds::ir_failure_bound(9.0, 10.0, 0.0).bound <= 1.0);
}

TEST_CASE("privacy amplification distance bound") {
  auto r = bounds::pa_distance_bound(100.0, 20.0, 30.0, 1e-3, 1e-3);
  CHECK(r.raw == doctest::Approx(0.75 * std::pow(2.0, -25.0) + 2e-3));
  CHECK(r.bound <= 1.0);
  // shrinking the key improves the distance
  CHECK(bounds::pa_distance_bound(100.0, 20.0, 10.0, 1e-3, 1e-3).raw < r.raw);
}

TEST_CASE("min-entropy chain rule") {
  CHECK(bounds::chain_rule_bound(50.0, 10.0, 1e-3) ==
        doctest::Approx(40.0 - std::log2(1000.0)));
  CHECK_THROWS_AS(bounds::chain_rule_bound(50.0, 10.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("worst-case Bell eigenvalues: free parameter at equal error rates") {
  for (double e : {0.01, 0.05, 0.1}) {
    auto w = bounds::worst_case_bell_bb84(e, e);
    CHECK(w.lambdas[3] == doctest::Approx(e * e).epsilon(1e-6));
    CHECK(w.entropy ==
          doctest::Approx(2.0 * cinfo::binary_entropy(e)).epsilon(1e-9));
    double sum = 0.0;
    for (double l : w.lambdas) sum += l;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.lambdas[1] + w.lambdas[3] == doctest::Approx(e).epsilon(1e-9));
    CHECK(w.lambdas[2] + w.lambdas[3] == doctest::Approx(e).epsilon(1e-9));
  }
  // unequal rates still respect the per-basis constraints
  auto w = bounds::worst_case_bell_bb84(0.04, 0.08);
  CHECK(w.lambdas[2] + w.lambdas[3] == doctest::Approx(0.04).epsilon(1e-9));
  CHECK(w.lambdas[1] + w.lambdas[3] == doctest::Approx(0.08).epsilon(1e-9));
  // fixing any interior lambda4 never beats the reported maximum
  for (double l4 : {0.0005, 0.001, 0.0015, 0.002}) {
    std::array<double, 4> trial{1.0 - 0.12 + l4, 0.08 - l4, 0.04 - l4, l4};
    double h = 0.0;
    for (double l : trial)
      if (l > 0.0) h -= l * std::log2(l);
    CHECK(h <= w.entropy + 1e-9);
  }
}

TEST_CASE("worst-case Bell eigenvalues: three error rates pin the state") {
  for (double e : {0.02, 0.08, 0.12}) {
    auto w = bounds::worst_case_bell_six_state(e, e, e);
    CHECK(w.lambdas[0] == doctest::Approx(1.0 - 1.5 * e).epsilon(1e-9));
    CHECK(w.lambdas[1] == doctest::Approx(e / 2.0).epsilon(1e-9));
    CHECK(w.lambdas[2] == doctest::Approx(e / 2.0).epsilon(1e-9));
    CHECK(w.lambdas[3] == doctest::Approx(e / 2.0).epsilon(1e-9));
  }
  // infeasible rates (total error weight above 1) must be rejected
  CHECK_THROWS_AS(bounds::worst_case_bell_six_state(0.9, 0.9, 0.9),
                  std::invalid_argument);
}

TEST_CASE("H0-type sampling bounds") {
  bounds::SamplingH0Params params;
  params.n = 1000;
  params.p = 0.1;
  params.eps = 0.02;
  params.abar_size = 900;
  params.observed = ProbDist::binary(0.05);
  auto rep =
      bounds::sampling_H0_bound(bounds::SamplingVariant::Classical, params);
  // the per-symbol term is the ball-maximal entropy at the widened radius
  double widened = params.eps / (params.p * (1.0 - params.p));
  CHECK(rep.hmax_ball == doctest::Approx(cinfo::max_entropy_ball(
                             params.observed, widened)));
  CHECK(rep.entropy_bound ==
        doctest::Approx(900.0 * rep.hmax_ball + std::log2(900.0)));
  CHECK(rep.mu_raw ==
        doctest::Approx(std::pow(2.0, 4.0) *
                        std::exp(-1000.0 * params.eps * params.eps / 2.0)));

  // quantum variant: worst-case Bell search at the widened error rates
  params.qber_basis1 = 0.05;
  params.qber_basis2 = 0.05;
  params.dim_h = 4;
  auto qrep = bounds::sampling_H0_bound(bounds::SamplingVariant::Quantum, params);
  CHECK(qrep.entropy_bound >= 900.0 * 2.0 * cinfo::binary_entropy(0.05) - 1e-6);
  CHECK(qrep.mu_raw == doctest::Approx(std::pow(2.0, 3.0) *
                                       std::exp(-1000.0 * params.eps *
                                                params.eps / 16.0)));
}
