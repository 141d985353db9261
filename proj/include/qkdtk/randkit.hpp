#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Seeded randomness utilities. Everything here is deterministic given a
// 64-bit master seed: per-role streams are derived from (seed, label) so any
// component of a run can be regenerated in isolation. Not cryptographic.

namespace qkdtk::randkit {

using Bits = std::vector<std::uint8_t>;

/// splitmix64-based generator; portable across platforms by construction.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0,1) with 53 bits of precision.
  double next_double();
  bool bernoulli(double p);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::uint8_t bit() { return static_cast<std::uint8_t>(next_u64() >> 63); }

 private:
  std::uint64_t state_;
};

/// Derive an independent stream for a named role from the master seed.
Stream derive_stream(std::uint64_t master_seed, std::string_view label);

/// Derive a fresh 64-bit seed (e.g. per Monte-Carlo trial).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                          std::uint64_t index = 0);

// ---------------------------------------------------------------------------

/// Two-universal Toeplitz hash over GF(2). Bit order: index 0 of the input is
/// the most significant position; output bit i is the inner product of the
/// diag window [i, i + n_in) (reversed) with x.
struct ToeplitzHash {
  int n_in = 0;
  int n_out = 0;
  Bits diag;  // length n_in + n_out - 1

  static ToeplitzHash random(int n_in, int n_out, Stream& stream);
  static ToeplitzHash from_diag(int n_in, int n_out, Bits diag);

  Bits apply(const Bits& x) const;
  std::string diag_hex() const;
  static Bits diag_from_hex(int length, const std::string& hex);

  void validate() const;
};

/// Exhaustive worst-pair collision probability of the Toeplitz family:
/// max over distinct (x,x') of Prob_diag[h(x) = h(x')]. Exact (computed via
/// GF(2) rank of the difference map); must equal 2^-n_out.
double collision_probability_exhaustive(int n_in, int n_out);

/// A p-random subset of {0,...,n-1}; reproducible from (p, n, seed).
struct PRandomSelection {
  double p = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> included;  // sorted

  static PRandomSelection generate(double p, std::size_t n, std::uint64_t seed);
  /// p-random selection restricted to a ground subset (others never included).
  static PRandomSelection generate_on(double p, std::size_t n,
                                      const std::vector<bool>& ground,
                                      std::uint64_t seed);

  std::vector<bool> mask() const;
};

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b);
std::vector<std::size_t> unite(const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b);
std::vector<std::size_t> complement(const std::vector<std::size_t>& a,
                                    std::size_t n);

/// Seeded uniformly random permutation of {0,...,n-1} (Fisher-Yates).
struct SeededPermutation {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> perm;

  static SeededPermutation generate(std::size_t n, std::uint64_t seed);
  Bits apply(const Bits& x) const;
};

/// Parse a seed given as decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

}  // namespace qkdtk::randkit
