#include "qkdtk/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace qkdtk::bounds {

namespace ci = qkdtk::cinfo;

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Golden-section maximization of a concave function on [lo, hi].
double golden_max(double lo, double hi, const std::function<double(double)>& f,
                  double tol = 1e-9) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double entropy4(const std::array<double, 4>& l) {
  double h = 0.0;
  for (double v : l)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace

BoundReport freq_sampling_bound(std::size_t q, std::size_t n, double eps) {
  BoundReport r;
  r.lemma = "freq";
  r.inputs = {{"q", double(q)}, {"n", double(n)}, {"eps", eps}};
  r.raw = std::pow(2.0, double(q)) * std::exp(-double(n) * eps * eps / 2.0);
  r.bound = clamp01(r.raw);
  return r;
}

BoundReport quanttom_bound(std::size_t z_size, std::size_t zbar_size,
                           std::size_t n, double eps) {
  BoundReport r;
  r.lemma = "quanttom";
  r.inputs = {{"|Z|", double(z_size)},
              {"|Zbar|", double(zbar_size)},
              {"n", double(n)},
              {"eps", eps}};
  r.raw = std::pow(2.0, double(z_size + zbar_size)) *
          std::exp(-double(n) * eps * eps / 8.0);
  r.bound = clamp01(r.raw);
  return r;
}

WorstCaseBell worst_case_bell_bb84(double qber1, double qber2) {
  if (qber1 < 0 || qber2 < 0 || qber1 > 0.5 || qber2 > 0.5)
    throw std::invalid_argument("worst_case_bell_bb84: error rate outside [0,0.5]");
  auto lambdas_at = [&](double l4) {
    std::array<double, 4> l;
    l[3] = l4;
    l[2] = qber1 - l4;  // basis-1 errors: lambda3 + lambda4
    l[1] = qber2 - l4;  // basis-2 errors: lambda2 + lambda4
    l[0] = 1.0 - l[1] - l[2] - l[3];
    return l;
  };
  double hi = std::min(qber1, qber2);
  double l4 = hi == 0.0 ? 0.0
                        : golden_max(0.0, hi, [&](double x) {
                            return entropy4(lambdas_at(x));
                          });
  WorstCaseBell w;
  w.lambdas = lambdas_at(l4);
  w.entropy = entropy4(w.lambdas);
  return w;
}

WorstCaseBell worst_case_bell_six_state(double qber1, double qber2,
                                        double qber3) {
  // lambda3+lambda4 = e1, lambda2+lambda4 = e2, lambda2+lambda3 = e3
  WorstCaseBell w;
  double l2 = (qber2 + qber3 - qber1) / 2.0;
  double l3 = (qber1 + qber3 - qber2) / 2.0;
  double l4 = (qber1 + qber2 - qber3) / 2.0;
  l2 = std::max(l2, 0.0);
  l3 = std::max(l3, 0.0);
  l4 = std::max(l4, 0.0);
  double l1 = 1.0 - l2 - l3 - l4;
  if (l1 < -1e-9)
    throw std::invalid_argument("worst_case_bell_six_state: infeasible rates");
  w.lambdas = {std::max(l1, 0.0), l2, l3, l4};
  w.entropy = entropy4(w.lambdas);
  return w;
}

SamplingH0Report sampling_H0_bound(SamplingVariant variant,
                                   const SamplingH0Params& params) {
  SamplingH0Report rep;
  const double n = double(params.n);
  switch (variant) {
    case SamplingVariant::Classical: {
      const std::size_t zq = params.observed.size();
      double radius =
          params.p > 0.0 && params.p < 1.0
              ? params.eps / (params.p * (1.0 - params.p))
              : params.eps;
      rep.hmax_ball = ci::max_entropy_ball(params.observed, radius);
      rep.entropy_bound = double(params.abar_size) * rep.hmax_ball +
                          std::log2(double(std::max<std::size_t>(params.abar_size, 2))) *
                              (double(zq) - 1.0);
      rep.mu_raw = std::pow(2.0, 2.0 * double(zq)) *
                   std::exp(-n * params.eps * params.eps / 2.0);
      break;
    }
    case SamplingVariant::ClassicalConditional: {
      params.channel.validate();
      const std::size_t xq = params.channel.output_alphabet.size();
      const std::size_t yq = params.channel.input_alphabet.size();
      double radius =
          params.p > 0.0 && params.p < 1.0
              ? params.eps / (params.p * (1.0 - params.p))
              : params.eps;
      double r = 0.0;
      for (std::size_t y = 0; y < yq; ++y)
        r += params.y_frequencies.probs.at(y) *
             ci::max_entropy_ball(params.channel.row(y), radius);
      rep.hmax_ball = r;
      rep.entropy_bound =
          n * (r + params.eps * double(yq) * std::log2(double(xq))) +
          std::log2(std::max(n, 2.0)) * (double(xq) - 1.0);
      // the proof's exponent (eps^3) is the one used
      rep.mu_raw = double(yq) * std::pow(2.0, 2.0 * double(xq)) *
                   std::exp(-n * std::pow(params.eps, 3) / 2.0);
      break;
    }
    case SamplingVariant::Quantum: {
      // Bell-protocol symmetry route: the constraint set is parameterized by
      // Bell-diagonal states; the ball inflates the observed error rates.
      double ball = params.p > 0.0 ? params.eps / params.p : params.eps;
      double best = 0.0;
      const int steps = 10;
      for (int i = -steps; i <= steps; ++i) {
        double d1 = ball * double(i) / double(steps);
        double e1 = std::clamp(params.qber_basis1 + d1, 0.0, 0.5);
        for (int j = -steps; j <= steps; ++j) {
          double d2 = ball * double(j) / double(steps);
          double e2 = std::clamp(params.qber_basis2 + d2, 0.0, 0.5);
          double h;
          if (params.six_state) {
            double e3 = std::clamp(params.qber_basis3, 0.0, 0.5);
            try {
              h = worst_case_bell_six_state(e1, e2, e3).entropy;
            } catch (const std::invalid_argument&) {
              continue;
            }
          } else {
            h = worst_case_bell_bb84(e1, e2).entropy;
          }
          best = std::max(best, h);
        }
      }
      rep.hmax_ball = best;
      rep.entropy_bound = double(params.abar_size) * best +
                          std::log2(double(std::max<std::size_t>(params.abar_size, 2))) *
                              (double(params.dim_h) - 1.0);
      rep.mu_raw = std::pow(2.0, double(params.dim_h + 2) / 2.0) *
                   std::exp(-n * params.eps * params.eps / 16.0);
      break;
    }
  }
  rep.mu_bound = clamp01(rep.mu_raw);
  return rep;
}

HinfExchangeableReport hinf_exchangeable(std::size_t n,
                                         const cinfo::ProbDist& q) {
  HinfExchangeableReport rep;
  const double dn = double(n);
  rep.bound = dn * ci::shannon_entropy(q.probs) -
              double(q.size()) * (std::log2(dn) + 1.0);
  // exact mode requires integral counts
  bool integral = true;
  double log2_fact = std::lgamma(dn + 1.0) / std::log(2.0);
  for (double p : q.probs) {
    double c = p * dn;
    if (std::abs(c - std::round(c)) > 1e-9) {
      integral = false;
      break;
    }
    log2_fact -= std::lgamma(std::round(c) + 1.0) / std::log(2.0);
  }
  if (integral) rep.exact = log2_fact;
  return rep;
}

BoundReport ir_failure_bound(double r, double s, double eps) {
  BoundReport rep;
  rep.lemma = "infrec";
  rep.inputs = {{"r", r}, {"s", s}, {"eps", eps}};
  rep.raw = std::pow(2.0, -(s - r)) + eps;
  rep.bound = clamp01(rep.raw);
  rep.note =
      "conservative reading: failure <= 2^-(s-r) + eps (the lemma's statement "
      "carries a plus sign on eps)";
  return rep;
}

BoundReport pa_distance_bound(double n, double r, double s, double eps,
                              double eps_prime) {
  BoundReport rep;
  rep.lemma = "qmem";
  rep.inputs = {{"n", n}, {"r", r}, {"s", s}, {"eps", eps}, {"eps'", eps_prime}};
  rep.raw = 0.75 * std::pow(2.0, -(n - r - s) / 2.0) + eps + eps_prime;
  rep.bound = clamp01(rep.raw);
  return rep;
}

double chain_rule_bound(double hinf_zw, double h0_w, double eps_dprime) {
  if (eps_dprime <= 0.0)
    throw std::invalid_argument("chain_rule_bound: eps'' must be > 0");
  return hinf_zw - h0_w - std::log2(1.0 / eps_dprime);
}

}  // namespace qkdtk::bounds
