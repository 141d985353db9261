#include "qkdtk/analyzers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "qkdtk/cinfo.hpp"

namespace qkdtk::analyzers {

namespace {

using cinfo::binary_entropy;

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

std::array<double, 4> bb84_lambdas(double eps, double l4) {
  return {1.0 - 2.0 * eps + l4, eps - l4, eps - l4, l4};
}

// Entropy of the adversary's state given the announced error string
// W = X xor Y: (1-e) h(l1/(1-e)) + e h(l2/e). Equals H(lambda) - h(e) at
// every l4, which the tests assert at the common maximizer.
double bb84_cond_entropy(double eps, double l4) {
  double a = eps < 1.0 ? (1.0 - 2.0 * eps + l4) / (1.0 - eps) : 0.0;
  double term1 = (1.0 - eps) * binary_entropy(std::clamp(a, 0.0, 1.0));
  double term2 =
      eps > 0.0 ? eps * binary_entropy(std::clamp((eps - l4) / eps, 0.0, 1.0))
                : 0.0;
  return term1 + term2;
}

// Root of f on [lo, hi] by bisection; requires a sign change.
double bisect_root(double lo, double hi, const std::function<double(double)>& f,
                   double tol = 1e-6) {
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0)
    throw std::invalid_argument("threshold: no sign change in bracket");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

B92Chain b92_chain(double delta, double gamma, double alpha,
                   double re_e_etilde) {
  B92Chain c;
  c.alpha = alpha;
  c.delta = delta;
  c.gamma = gamma;
  c.re_e_etilde = re_e_etilde;
  double beta2 = 1.0 - alpha * alpha;
  c.eta = 4.0 * alpha * alpha * beta2;
  c.accept_rate = (gamma + delta) / 2.0;
  c.eps_cond = gamma + delta > 0.0 ? delta / (gamma + delta) : 0.0;
  if (delta > 0.0) {
    c.nu = (1.0 - delta) * (1.0 - c.eta) / (4.0 * delta * c.eta);
    c.e_overlap = (c.nu - 1.0) / (c.nu + 1.0);
  } else {
    // noiseless limit: the unitarity constraint forces <e+|e-> = 1
    c.nu = std::numeric_limits<double>::infinity();
    c.e_overlap = 1.0;
  }
  double bma2 = (beta2 - alpha * alpha) * (beta2 - alpha * alpha);
  // <f+|f-> is increasing in <e+|e->, which is only bounded from below; the
  // adversary picks the value in [e_overlap, 1] minimizing |<f+|f->|
  double f_lo = gamma > 0.0 ? ((1.0 - delta) * c.e_overlap - bma2) / gamma : 1.0;
  double f_hi = gamma > 0.0 ? ((1.0 - delta) - bma2) / gamma : 1.0;
  // f estimates a state overlap; sampled delta/gamma can push it out of range
  f_lo = std::clamp(f_lo, -1.0, 1.0);
  f_hi = std::clamp(f_hi, -1.0, 1.0);
  c.f_overlap = f_lo;
  double f_abs = f_lo >= 0.0 ? f_lo : (f_hi <= 0.0 ? -f_hi : 0.0);
  c.x = (1.0 + f_abs) / 2.0;
  if (c.x < -1e-6 || c.x > 1.0 + 1e-6)
    throw std::invalid_argument("b92: eigenvalue x far outside [0,1]");
  c.x = std::clamp(c.x, 0.0, 1.0);
  return c;
}

double b92_rate_from_chain(const B92Chain& c) {
  // S(sigma~) <= 1 accounts for the eps * 1 term
  return c.accept_rate *
         (1.0 - binary_entropy(c.eps_cond) - c.eps_cond -
          (1.0 - c.eps_cond) * binary_entropy(c.x));
}

}  // namespace

RateReport bb84_rate(double eps, bool conditioned) {
  if (eps < 0.0 || eps >= 0.5)
    throw std::invalid_argument("bb84_rate: eps outside [0, 0.5)");
  RateReport r;
  r.protocol = "bb84";
  r.noise = eps;
  r.conditioned = conditioned;
  auto objective = [&](double l4) {
    return conditioned ? bb84_cond_entropy(eps, l4)
                       : entropy4(bb84_lambdas(eps, l4));
  };
  double l4 = eps == 0.0 ? 0.0 : golden_max(0.0, eps, objective);
  r.lambda4 = l4;
  r.lambdas = bb84_lambdas(eps, l4);
  r.adversary_entropy = objective(l4);
  r.rate = 1.0 - binary_entropy(eps) - r.adversary_entropy;
  return r;
}

RateReport six_state_rate(double eps, bool conditioned) {
  if (eps < 0.0 || eps >= 2.0 / 3.0)
    throw std::invalid_argument("six_state_rate: eps outside [0, 2/3)");
  RateReport r;
  r.protocol = "six-state";
  r.noise = eps;
  r.conditioned = conditioned;
  r.lambdas = {1.0 - 1.5 * eps, eps / 2.0, eps / 2.0, eps / 2.0};
  r.lambda4 = eps / 2.0;
  double h4 = entropy4(r.lambdas);
  r.adversary_entropy = conditioned ? h4 - binary_entropy(eps) : h4;
  r.rate = 1.0 - binary_entropy(eps) - r.adversary_entropy;
  return r;
}

RateReport b92_rate_depolarizing(double p, double alpha) {
  if (p < 0.0 || p > 0.25)
    throw std::invalid_argument("b92_rate_depolarizing: p outside [0, 0.25]");
  if (alpha <= 0.0 || alpha >= 1.0 / std::sqrt(2.0))
    throw std::invalid_argument(
        "b92_rate_depolarizing: alpha outside (0, 1/sqrt(2))");
  double delta = 2.0 * p / 3.0;
  double beta2 = 1.0 - alpha * alpha;
  double eta = 4.0 * alpha * alpha * beta2;
  // acceptance statistics of the depolarizing channel; Re<e|e~> = 0
  double gamma = (1.0 - 2.0 * delta) * eta + delta;
  RateReport r;
  r.protocol = "b92";
  r.noise = p;
  r.conditioned = true;  // the chain conditions on the error variable
  r.b92 = b92_chain(delta, gamma, alpha, 0.0);
  r.rate = b92_rate_from_chain(*r.b92);
  return r;
}

RateReport b92_general_bound(double p00, double p01, double p10, double p11,
                             double alpha, double re_e_etilde) {
  if (std::abs(p00 - p11) > 1e-12 || std::abs(p01 - p10) > 1e-12)
    throw std::invalid_argument(
        "b92_general_bound: requires symmetrized statistics p00 = p11 and "
        "p01 = p10 (randomly flip bits of the lower-error set, or abort)");
  double delta = 4.0 * p01;
  double gamma = 4.0 * p00;
  if (delta < 0.0 || delta > 1.0 || gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("b92_general_bound: delta or gamma outside [0,1]");
  if (alpha <= 0.0 || alpha >= 1.0 / std::sqrt(2.0))
    throw std::invalid_argument(
        "b92_general_bound: alpha outside (0, 1/sqrt(2))");
  if (std::abs(re_e_etilde) > 1e-9)
    throw std::invalid_argument(
        "b92_general_bound: only the Re<e|e~> = 0 overlap chain is supported");
  RateReport r;
  r.protocol = "b92";
  r.noise = delta;
  r.conditioned = true;
  r.b92 = b92_chain(delta, gamma, alpha, re_e_etilde);
  r.rate = b92_rate_from_chain(*r.b92);
  return r;
}

ThresholdReport threshold(const std::string& protocol, bool conditioned) {
  ThresholdReport rep;
  rep.protocol = protocol;
  rep.conditioned = conditioned;
  if (protocol == "bb84" || protocol == "six-state") {
    auto rate = [&](double e) {
      return protocol == "bb84" ? bb84_rate(e, conditioned).rate
                                : six_state_rate(e, conditioned).rate;
    };
    rep.threshold = bisect_root(1e-6, 0.4999, rate);
    if (protocol == "bb84")
      rep.equation = conditioned ? "1 - 2 h(e) = 0" : "1 - 3 h(e) = 0";
    else
      rep.equation = conditioned ? "1 - H4(e) = 0" : "1 - h(e) - H4(e) = 0";
    return rep;
  }
  if (protocol == "b92") {
    auto root_at = [&](double alpha) -> double {
      auto rate = [&](double p) {
        return b92_rate_depolarizing(p, alpha).rate;
      };
      if (rate(1e-6) <= 0.0) return 0.0;
      double hi = 0.24;
      while (rate(hi) > 0.0 && hi < 0.2499) hi = std::min(0.2499, hi + 0.005);
      if (rate(hi) > 0.0) return hi;
      return bisect_root(1e-6, hi, rate);
    };
    double best_alpha = 0.0, best_root = -1.0;
    for (double a = 0.05; a < 0.705; a += 0.005) {
      double root = root_at(a);
      if (root > best_root) {
        best_root = root;
        best_alpha = a;
      }
    }
    double lo = std::max(0.01, best_alpha - 0.005);
    double hi = std::min(0.705, best_alpha + 0.005);
    double alpha_star = golden_max(lo, hi, root_at, 1e-6);
    rep.alpha_star = alpha_star;
    rep.threshold = root_at(alpha_star);
    rep.equation = "R(p, alpha) = 0, maximized over alpha";
    return rep;
  }
  throw std::invalid_argument("threshold: unknown protocol " + protocol);
}

}  // namespace qkdtk::analyzers
