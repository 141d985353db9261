#pragma once

#include <map>
#include <optional>
#include <string>

#include "qkdtk/cinfo.hpp"
#include "qkdtk/qcore.hpp"

// Closed-form evaluators for the finite-n sampling, reconciliation and
// privacy-amplification bounds, usable standalone or inside the engine.

namespace qkdtk::bounds {

struct BoundReport {
  std::string lemma;
  std::map<std::string, double> inputs;
  double bound = 0.0;            // clamped to [0,1] only where noted
  double raw = 0.0;              // unclamped value
  std::optional<double> empirical;
  bool satisfied = true;
  std::string note;
};

/// Failure probability of the frequency-sampling bound: 2^q e^{-n eps^2/2}.
BoundReport freq_sampling_bound(std::size_t q, std::size_t n, double eps);

/// mu = 2^{|Z|+|Zbar|} e^{-n eps^2/8} for the two-POVM tomography bound.
BoundReport quanttom_bound(std::size_t z_size, std::size_t zbar_size,
                           std::size_t n, double eps);

enum class SamplingVariant { Classical, ClassicalConditional, Quantum };

struct SamplingH0Params {
  std::size_t n = 0;
  double p = 0.0;       // selection probability
  double eps = 0.0;
  std::size_t abar_size = 0;  // |a-bar| (estimate of unsampled size)
  // classical variant
  cinfo::ProbDist observed;   // Q-hat
  // classical-conditional variant
  cinfo::CondChannel channel;       // Q-hat(.|y)
  cinfo::ProbDist y_frequencies;    // Q_Y
  // quantum variant (Bell-protocol symmetry route)
  double qber_basis1 = 0.0;   // observed error rates feeding the
  double qber_basis2 = 0.0;   // worst-case Bell-diagonal search
  bool six_state = false;
  double qber_basis3 = 0.0;
  std::size_t dim_h = 4;
};

struct SamplingH0Report {
  double entropy_bound = 0.0;  // the H_0-type bound
  double mu_bound = 0.0;       // accompanying E[mu] bound (clamped)
  double mu_raw = 0.0;
  double hmax_ball = 0.0;      // the H^max term alone (per-symbol)
};

/// H_0-type sampling bounds (classical, classical-conditional, quantum).
SamplingH0Report sampling_H0_bound(SamplingVariant variant,
                                   const SamplingH0Params& params);

struct HinfExchangeableReport {
  double bound = 0.0;                // n H(Q) - |Z| (log n + 1)
  std::optional<double> exact;       // log2 of the multinomial coefficient
};

HinfExchangeableReport hinf_exchangeable(std::size_t n,
                                         const cinfo::ProbDist& q);

/// Information-reconciliation failure bound 2^{-(s-r)} + eps (conservative
/// reading of the lemma's sign; see report note).
BoundReport ir_failure_bound(double r, double s, double eps);

/// Privacy-amplification distance bound (3/4) 2^{-(n-r-s)/2} + eps + eps'.
BoundReport pa_distance_bound(double n, double r, double s, double eps,
                              double eps_prime);

/// Chain rule: H_inf^{e+e'+e''}(Z|W) >= Hinf_ZW - H0_W - log(1/e'').
double chain_rule_bound(double hinf_zw, double h0_w, double eps_dprime);

/// Worst-case Bell-diagonal eigenvalues compatible with per-basis error
/// rates; BB84 leaves lambda4 free, the six-state constraints pin it.
struct WorstCaseBell {
  std::array<double, 4> lambdas{};
  double entropy = 0.0;  // H of the eigenvalue tuple (bits)
};
WorstCaseBell worst_case_bell_bb84(double qber1, double qber2);
WorstCaseBell worst_case_bell_six_state(double qber1, double qber2,
                                        double qber3);

}  // namespace qkdtk::bounds
