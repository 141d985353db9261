#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdtk/qcore.hpp"
#include "qkdtk/randkit.hpp"

// End-to-end protocol simulator: attack generation, measurement sampling,
// parameter estimation, information reconciliation, privacy amplification,
// and an exact eavesdropper-side security evaluation at tiny n.

namespace qkdtk::engine {

enum class Protocol { BB84, SixState, B92 };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

struct AttackModel {
  enum class Kind { BellDiagonal, Depolarizing, B92Unitary };
  Kind kind = Kind::BellDiagonal;
  std::array<double, 4> lambdas{1.0, 0.0, 0.0, 0.0};  // (psi+, psi-, phi+, phi-)
  double depol_p = 0.0;
  double b92_alpha = 0.0;
  double b92_delta = 0.0;  // flip-and-accept probability

  static AttackModel bell_diagonal(const std::array<double, 4>& lambdas);
  static AttackModel depolarizing(double p);
  /// B92 interaction realized as the unitary dilation of the depolarizing
  /// channel with p = 3 delta / 2, so the unitarity constraint holds exactly.
  static AttackModel b92_unitary(double alpha, double delta);

  /// Bell-diagonal eigenvalues (depolarizing maps to its Bell-diagonal form).
  std::array<double, 4> effective_lambdas() const;
  void validate() const;
};

struct ProtocolConfig {
  Protocol protocol = Protocol::BB84;
  std::size_t n = 0;
  /// Estimation-sampling probability p = n^{-sampling_alpha} unless
  /// overridden by sampling_p.
  double sampling_alpha = 1.0 / 3.0;
  std::optional<double> sampling_p;
  AttackModel attack;
  std::uint64_t seed = 0;
  double eps = 1e-3;
  double eps_prime = 1e-3;
  double eps_dprime = 1e-3;
  bool exact_eve = false;          // only valid for n <= 6
  std::optional<long long> force_s_prime;  // tiny-n studies bypass the box formulas

  double p() const;
  void validate() const;
};

struct EveRecord {
  /// Per-position Pauli labels 0..3 (Bell-diagonal modes); empty otherwise.
  std::vector<int> pauli_labels;
  bool exact = false;
};

struct Transcript {
  int schema = 1;
  Protocol protocol = Protocol::BB84;
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::array<double, 4> attack_lambdas{};

  std::vector<std::size_t> sel_t, sel_tprime, sel_s;  // sorted index sets
  randkit::Bits x, y;               // raw outcome tuples
  std::vector<int> basis_a, basis_b;  // 1..3 per position (B92: 1..2 for Bob)
  std::vector<bool> conclusive;     // B92 acceptance mask (empty otherwise)
  std::vector<std::size_t> announced;  // S union T

  // parameter estimation
  double qber1 = 0.0, qber2 = 0.0, qber3 = 0.0;
  double h_x = 0.0, h_x_given_y = 0.0;
  std::array<double, 4> worst_lambdas{};
  double worst_entropy = 0.0;
  long long r = 0, t = 0, u = 0, s = 0;

  // sifting, reconciliation, amplification
  std::vector<std::size_t> sifted;  // kept key positions
  randkit::Bits x_sifted, y_sifted, x_reconciled;
  std::size_t n_prime = 0;
  long long r_prime = 0, s_prime = 0;
  std::vector<std::string> ir_hash_hex;  // per-block syndrome hash diagonals
  std::vector<int> ir_block_out;         // per-block syndrome lengths
  randkit::Bits syndrome;
  std::string check_hash_hex;  // reconciliation-confirmation hash
  std::string pa_hash_hex;
  std::vector<std::size_t> pa_perm;
  randkit::Bits key_a, key_b;

  bool aborted = false;
  std::string abort_reason;
  bool reconcile_success = false;

  EveRecord eve;

  void validate() const;
};

// ---------------------------------------------------------------------------

/// Per-position joint description of the attack. Bell protocols: the 4x4
/// Bell-diagonal state on A (x) B. B92: the post-interaction pure state
/// |Psi_(bit)> on qubit (x) 4-dim environment.
qcore::DensityOperator attack_state(const AttackModel& model,
                                    Protocol protocol, int b92_bit = 0);

/// Raw tuples X, Y plus per-position bases and Eve's record, all derived from
/// the labeled streams of config.seed. Bell-diagonal sampling uses the
/// Pauli-label error table.
void sample_measurements(const ProtocolConfig& config, Transcript& tr);

/// Same distribution via explicit POVM statistics on the 4x4 state; used to
/// cross-check the error-table path.
void sample_measurements_povm(const ProtocolConfig& config, Transcript& tr);

/// Fills the estimation fields and the r/t/u/s parameters; sets the abort
/// flag on empty estimation subsets.
void estimate_parameters(const ProtocolConfig& config, Transcript& tr);

struct ReconcileResult {
  randkit::Bits x_bar;
  randkit::Bits syndrome;
  std::vector<std::string> hash_hex;
  std::vector<int> block_out;
  long long r_prime = 0;
  bool success = false;     // x_bar == x (omniscient; reporting only)
  bool infeasible = false;  // enumeration cap exceeded
};

/// One-way reconciliation: Alice sends per-block Toeplitz syndromes, Bob
/// decodes by likelihood-ordered (increasing-weight) error-pattern
/// enumeration, capped at weight 4 or 2^16 candidates per block.
/// qber_est sizes the per-block syndromes.
ReconcileResult reconcile(const randkit::Bits& x_prime,
                          const randkit::Bits& y_prime, double qber_est,
                          std::uint64_t seed);

/// Privacy amplification: seeded permutation, then Toeplitz hash to s_prime
/// bits. s_prime = 0 yields the empty key.
randkit::Bits amplify(const randkit::Bits& bits, long long s_prime,
                      std::uint64_t seed);

Transcript run_protocol(const ProtocolConfig& config);

/// Exact non-uniformity of the final key given Eve's retained purification
/// and every announced classical value. Bell-diagonal attacks, n <= 6 only.
double eve_distance_exact(const Transcript& tr, const AttackModel& attack);

}  // namespace qkdtk::engine
