#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qkdtk/cinfo.hpp"
#include "qkdtk/randkit.hpp"

using namespace qkdtk;
using cinfo::ProbDist;
using cinfo::SmoothingParam;

namespace {

// Independent oracle for the smoothed order-infinity entropy: the optimal
// smoothed distribution caps the largest probabilities at a common level c.
// Solve sum_z (P_z - c)+ = eps exactly on the piecewise-linear segments
// instead of bisecting, then clamp at the uniform level.
double oracle_smooth_hinf(const ProbDist& p, double eps) {
  std::vector<double> v = p.probs;
  std::sort(v.begin(), v.end(), std::greater<>());
  const std::size_t q = v.size();
  double uniform = 1.0 / double(q);
  double excess_at_uniform = 0.0;
  for (double x : v) excess_at_uniform += std::max(0.0, x - uniform);
  if (excess_at_uniform <= eps) return std::log2(double(q));
  double prefix = 0.0;
  double c = v[0];
  for (std::size_t k = 1; k <= q; ++k) {
    prefix += v[k - 1];
    double lower = k < q ? v[k] : 0.0;
    double cand = (prefix - eps) / double(k);  // excess(c) = prefix - k c
    if (cand >= lower - 1e-15 && cand <= v[k - 1] + 1e-15) {
      c = cand;
      break;
    }
  }
  c = std::max(c, uniform);
  return -std::log2(c);
}

// Independent oracle for the smoothed order-zero entropy: enumerate every
// support subset, keep those whose complement carries at most eps mass,
// minimize log2 of the surviving support size.
double oracle_smooth_h0(const ProbDist& p, double eps) {
  const std::size_t q = p.size();
  std::size_t best = q;
  for (std::size_t mask = 1; mask < (1u << q); ++mask) {
    double outside = 0.0;
    std::size_t support = 0;
    for (std::size_t z = 0; z < q; ++z) {
      if (mask & (1u << z)) {
        if (p.probs[z] > 0.0) ++support;
      } else {
        outside += p.probs[z];
      }
    }
    if (outside <= eps + 1e-12 && support >= 1) best = std::min(best, support);
  }
  return std::log2(double(best));
}

ProbDist random_dist(randkit::Stream& s, std::size_t q) {
  std::vector<double> w(q);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - s.next_double());
    sum += x;
  }
  for (double& x : w) x /= sum;
  std::vector<std::string> alpha;
  for (std::size_t i = 0; i < q; ++i) alpha.push_back(std::to_string(i));
  return ProbDist(alpha, w);
}

}  // namespace

TEST_CASE("binary entropy endpoints and symmetry") {
  CHECK(cinfo::binary_entropy(0.0) == doctest::Approx(0.0));
  CHECK(cinfo::binary_entropy(1.0) == doctest::Approx(0.0));
  CHECK(cinfo::binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(cinfo::binary_entropy(0.11) ==
        doctest::Approx(cinfo::binary_entropy(0.89)).epsilon(1e-12));
}

TEST_CASE("ProbDist invariants") {
  CHECK_THROWS_AS(ProbDist({"a"}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ProbDist({"a", "a"}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ProbDist({"a", "b"}, {1.5, -0.5}), std::invalid_argument);
  ProbDist u = ProbDist::uniform(4);
  CHECK(u.p_max() == doctest::Approx(0.25));
  CHECK(u.support_size() == 4);
  ProbDist pt = ProbDist::point_mass({"x", "y", "z"}, 1);
  CHECK(pt.probs[1] == 1.0);
  CHECK(pt.support_size() == 1);
}

TEST_CASE("Renyi entropies: order monotonicity and special orders") {
  randkit::Stream s(42);
  for (int trial = 0; trial < 200; ++trial) {
    ProbDist p = random_dist(s, 2 + s.below(4));
    double prev = 1e300;
    for (double alpha : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      double h = cinfo::renyi_entropy(p, alpha);
      CHECK(h <= prev + 1e-9);
      prev = h;
    }
    CHECK(cinfo::renyi_infinity(p) <= prev + 1e-9);
    CHECK(cinfo::renyi_infinity(p) ==
          doctest::Approx(-std::log2(p.p_max())).epsilon(1e-12));
    CHECK(cinfo::renyi_entropy(p, 0.0) ==
          doctest::Approx(std::log2(double(p.support_size()))));
    CHECK(cinfo::renyi_entropy(p, 1.0) ==
          doctest::Approx(cinfo::shannon_entropy(p.probs)).epsilon(1e-12));
    CHECK(cinfo::renyi_entropy(p, 2.0) ==
          doctest::Approx(-std::log2(std::inner_product(
              p.probs.begin(), p.probs.end(), p.probs.begin(), 0.0))));
  }
}

TEST_CASE("smooth entropies match the exhaustive oracles") {
  randkit::Stream s(7);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t q = 2 + s.below(2);  // alphabets of size 2 and 3
    ProbDist p = random_dist(s, q);
    double eps = 0.6 * s.next_double();
    SmoothingParam sp(eps);
    double hinf = cinfo::smooth_renyi(p, cinfo::kAlphaInf, sp);
    CHECK(hinf == doctest::Approx(oracle_smooth_hinf(p, eps)).epsilon(1e-6));
    double h0 = cinfo::smooth_renyi(p, 0.0, sp);
    CHECK(h0 == doctest::Approx(oracle_smooth_h0(p, eps)).epsilon(1e-9));
  }
}

TEST_CASE("smooth entropy limits and monotonicity") {
  randkit::Stream s(11);
  for (int trial = 0; trial < 100; ++trial) {
    ProbDist p = random_dist(s, 3);
    CHECK(cinfo::smooth_renyi(p, cinfo::kAlphaInf, SmoothingParam(0.0)) ==
          doctest::Approx(cinfo::renyi_infinity(p)).epsilon(1e-9));
    CHECK(cinfo::smooth_renyi(p, 0.0, SmoothingParam(0.0)) ==
          doctest::Approx(cinfo::renyi_entropy(p, 0.0)));
    // smoothing past the non-uniformity reaches the uniform distribution
    double d = cinfo::non_uniformity(p);
    CHECK(cinfo::smooth_renyi(p, cinfo::kAlphaInf, SmoothingParam(d + 1e-9)) ==
          doctest::Approx(std::log2(3.0)).epsilon(1e-6));
    // larger radius never hurts
    double prev_inf = -1.0, prev_zero = 1e300;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      double hi = cinfo::smooth_renyi(p, cinfo::kAlphaInf, SmoothingParam(eps));
      double hz = cinfo::smooth_renyi(p, 0.0, SmoothingParam(eps));
      CHECK(hi >= prev_inf - 1e-9);
      CHECK(hz <= prev_zero + 1e-9);
      prev_inf = hi;
      prev_zero = hz;
    }
  }
}

TEST_CASE("max_entropy_ball: binary closed form and properties") {
  randkit::Stream s(5);
  for (int trial = 0; trial < 500; ++trial) {
    double p1 = s.next_double();
    double eps = 0.6 * s.next_double();
    ProbDist p = ProbDist::binary(p1);
    double got = cinfo::max_entropy_ball(p, eps);
    // binary variational ball: move p1 toward 1/2 by at most eps
    double q1 = p1 < 0.5 ? std::min(0.5, p1 + eps) : std::max(0.5, p1 - eps);
    CHECK(got == doctest::Approx(cinfo::binary_entropy(q1)).epsilon(1e-9));
  }
  for (int trial = 0; trial < 200; ++trial) {
    ProbDist p = random_dist(s, 2 + s.below(3));
    double eps = 0.5 * s.next_double();
    double got = cinfo::max_entropy_ball(p, eps);
    CHECK(got >= cinfo::shannon_entropy(p.probs) - 1e-9);
    CHECK(got <= std::log2(double(p.size())) + 1e-12);
    if (eps >= cinfo::non_uniformity(p))
      CHECK(got == doctest::Approx(std::log2(double(p.size()))));
    // grid of ball members never beats the reported maximum
    for (int g = 0; g < 20; ++g) {
      ProbDist r = random_dist(s, p.size());
      double t = s.next_double();
      std::vector<double> mix(p.size());
      for (std::size_t z = 0; z < p.size(); ++z)
        mix[z] = (1.0 - t) * p.probs[z] + t * r.probs[z];
      ProbDist q(p.alphabet, mix);
      if (cinfo::variational_distance(p, q) <= eps)
        CHECK(cinfo::shannon_entropy(q.probs) <= got + 1e-9);
    }
  }
}

TEST_CASE("majorization") {
  CHECK(cinfo::majorizes({0.5, 0.3, 0.2}, {0.4, 0.35, 0.25}));
  CHECK_FALSE(cinfo::majorizes({0.4, 0.35, 0.25}, {0.5, 0.3, 0.2}));
  CHECK(cinfo::majorizes({1.0, 0.0}, {0.6, 0.4}));
  CHECK(cinfo::majorizes({0.7, 0.3}, {0.7, 0.3}));
  // order of the entries must not matter
  CHECK(cinfo::majorizes({0.2, 0.5, 0.3}, {0.25, 0.4, 0.35}));
}

TEST_CASE("typical set: exact enumeration cross-check") {
  for (std::size_t n : {2, 4, 6}) {
    for (double r : {0.3, 0.6, 0.9, 1.0}) {
      auto rep = cinfo::typical_set(2, n, r);
      REQUIRE(rep.exact.has_value());
      // independent enumeration over binary tuples
      std::uint64_t count = 0;
      for (std::uint64_t t = 0; t < (1ull << n); ++t) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) ones += (t >> i) & 1;
        if (cinfo::binary_entropy(double(ones) / double(n)) <= r + 1e-12)
          ++count;
      }
      CHECK(*rep.exact == count);
      CHECK(double(count) <= rep.bound + 1e-9);
    }
  }
  auto big = cinfo::typical_set(4, 100, 0.5, false);
  CHECK_FALSE(big.exact.has_value());
  CHECK(big.bound == doctest::Approx(std::pow(2.0, 50.0) * std::pow(100.0, 3.0)));
}

TEST_CASE("joint distributions") {
  auto j = cinfo::JointDist::binary_symmetric(0.1);
  CHECK(j.marginal_x().probs[0] == doctest::Approx(0.5));
  CHECK(j.marginal_y().probs[0] == doctest::Approx(0.5));
  CHECK(j.xor_marginal().probs[1] == doctest::Approx(0.1));
  CHECK(cinfo::cond_entropy_x_given_y(j) ==
        doctest::Approx(cinfo::binary_entropy(0.1)).epsilon(1e-12));
  CHECK(cinfo::mutual_information(j) ==
        doctest::Approx(1.0 - cinfo::binary_entropy(0.1)).epsilon(1e-12));

  // independent product: zero mutual information
  cinfo::JointDist ind({"0", "1"}, {"0", "1"},
                       {0.21, 0.09, 0.49, 0.21});
  CHECK(cinfo::mutual_information(ind) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conditional min-entropy") {
  auto j = cinfo::JointDist::binary_symmetric(0.1);
  // every Y=y slice is (0.9, 0.1): min-entropy -log2(0.9)
  CHECK(cinfo::min_entropy_cond(j) == doctest::Approx(-std::log2(0.9)));
  double base = cinfo::min_entropy_cond(j);
  double sm = cinfo::smooth_min_entropy_cond(j, SmoothingParam(0.05));
  CHECK(sm >= base - 1e-9);
  CHECK(cinfo::smooth_min_entropy_cond(j, SmoothingParam(0.0)) ==
        doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("frequency distributions") {
  auto q = cinfo::frequency_distribution({"a", "b", "a", "a"}, {"a", "b", "c"});
  CHECK(q.probs[0] == doctest::Approx(0.75));
  CHECK(q.probs[1] == doctest::Approx(0.25));
  CHECK(q.probs[2] == doctest::Approx(0.0));
  auto qb = cinfo::frequency_distribution_bits({1, 0, 1, 1});
  CHECK(qb.probs[1] == doctest::Approx(0.75));
}

TEST_CASE("variational distance") {
  ProbDist a = ProbDist::binary(0.2);
  ProbDist b = ProbDist::binary(0.35);
  CHECK(cinfo::variational_distance(a, b) == doctest::Approx(0.15));
  CHECK(cinfo::variational_distance(a, a) == doctest::Approx(0.0));
  CHECK(cinfo::non_uniformity(ProbDist::binary(0.5)) == doctest::Approx(0.0));
}
