#pragma once

#include <array>
#include <optional>
#include <string>

// Closed-form key-rate and threshold computations for BB84, the six-state
// protocol, and B92, including the worst-case eigenvalue search and the B92
// overlap-estimation chain.

namespace qkdtk::analyzers {

/// Scalar values of the B92 estimation chain, kept for reporting.
struct B92Chain {
  double alpha = 0.0;
  double delta = 0.0;      // flip-and-accept probability, 4 p01
  double gamma = 0.0;      // correct-and-accept probability, 4 p00
  double eta = 0.0;        // (2 alpha beta)^2
  double nu = 0.0;         // (1-delta)(1-eta)/(4 delta eta)
  double e_overlap = 0.0;  // lower bound on <e+|e->
  double f_overlap = 0.0;  // <f+|f->
  double x = 0.0;          // larger eigenvalue of sigma, (1+|f_overlap|)/2
  double eps_cond = 0.0;   // error rate conditioned on acceptance
  double accept_rate = 0.0;
  double re_e_etilde = 0.0;
};

struct RateReport {
  std::string protocol;
  double noise = 0.0;  // QBER (Bell protocols) or depolarizing p (B92)
  bool conditioned = false;
  double rate = 0.0;
  // Bell protocols: worst-case eigenvalues and the free parameter
  std::array<double, 4> lambdas{};
  double lambda4 = 0.0;
  double adversary_entropy = 0.0;  // the maximized entropy term
  // B92
  std::optional<B92Chain> b92;
};

struct ThresholdReport {
  std::string protocol;
  bool conditioned = false;
  double threshold = 0.0;
  std::optional<double> alpha_star;  // B92 only
  double tol = 1e-6;
  std::string equation;  // root equation solved, for the record
};

/// BB84 rate at error rate eps. The adversarial entropy is maximized
/// numerically over lambda4 in [0, eps] (golden section, tol 1e-9).
/// basic: R = 1 - h(eps) - max H(Z); conditioned: the entropy term is taken
/// given the announced error string W = X xor Y.
RateReport bb84_rate(double eps, bool conditioned);

/// Six-state rate; the extra constraint pins all four eigenvalues, so there
/// is no free parameter. eps in [0, 2/3).
RateReport six_state_rate(double eps, bool conditioned);

/// B92 over the depolarizing channel with parameter p and signal overlap
/// parameter alpha in (0, 1/sqrt(2)).
RateReport b92_rate_depolarizing(double p, double alpha);

/// B92 bound from measured acceptance statistics p_xy (requires the
/// symmetrized form p00 = p11, p01 = p10) and an estimate of
/// Re<e|e~> (0 for the depolarizing channel).
RateReport b92_general_bound(double p00, double p01, double p10, double p11,
                             double alpha, double re_e_etilde);

/// Noise threshold: bisection to the rate's root with tol 1e-6. For B92 the
/// root is additionally maximized over alpha (grid step 0.005, golden-section
/// refinement); conditioned flag is ignored for B92.
ThresholdReport threshold(const std::string& protocol, bool conditioned);

}  // namespace qkdtk::analyzers
