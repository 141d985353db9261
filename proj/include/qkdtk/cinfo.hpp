#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Classical probability and information-theory core: finite distributions,
// distances, Renyi and smooth Renyi entropies, majorization, typical sets.
// All logarithms are base 2 and 0*log(0) is taken to be 0.

namespace qkdtk::cinfo {

inline constexpr double kSimplexTol = 1e-9;

double log2_safe(double x);

/// Binary entropy h(e) = -e log e - (1-e) log(1-e), e in [0,1].
double binary_entropy(double eps);

/// Shannon entropy of an arbitrary nonnegative weight vector that sums to 1.
double shannon_entropy(const std::vector<double>& probs);

// ---------------------------------------------------------------------------

/// A probability distribution over a small ordered alphabet.
struct ProbDist {
  std::vector<std::string> alphabet;
  std::vector<double> probs;

  ProbDist() = default;
  ProbDist(std::vector<std::string> alpha, std::vector<double> p);

  static ProbDist uniform(std::size_t q);
  /// P_bin(p): binary distribution with P(1) = p, alphabet {"0","1"}.
  static ProbDist binary(double p_one);
  static ProbDist point_mass(std::vector<std::string> alpha, std::size_t at);

  std::size_t size() const { return probs.size(); }
  double p_max() const;
  std::size_t support_size() const;
  bool same_alphabet(const ProbDist& other) const;

  /// Throws std::invalid_argument if the simplex invariants are violated.
  void validate() const;
};

/// Conditional distribution ("channel") from alphabet Y to alphabet X.
struct CondChannel {
  std::vector<std::string> input_alphabet;   // Y
  std::vector<std::string> output_alphabet;  // X
  std::vector<std::vector<double>> rows;     // rows[y][x]

  void validate() const;
  ProbDist row(std::size_t y) const;
};

/// Joint distribution over a product alphabet X x Y, stored row-major.
struct JointDist {
  std::vector<std::string> x_alphabet;
  std::vector<std::string> y_alphabet;
  std::vector<double> probs;  // probs[x * ny + y]

  JointDist() = default;
  JointDist(std::vector<std::string> xa, std::vector<std::string> ya,
            std::vector<double> p);

  std::size_t nx() const { return x_alphabet.size(); }
  std::size_t ny() const { return y_alphabet.size(); }
  double p(std::size_t x, std::size_t y) const { return probs[x * ny() + y]; }

  ProbDist marginal_x() const;
  ProbDist marginal_y() const;
  ProbDist conditional_x_given_y(std::size_t y) const;
  /// Flattened view over the product alphabet "x,y".
  ProbDist flatten() const;
  /// For binary x/y alphabets: distribution of W = X xor Y.
  ProbDist xor_marginal() const;

  /// Binary symmetric joint: X uniform, Y = X flipped with probability flip.
  static JointDist binary_symmetric(double flip);

  void validate() const;
};

/// Smoothing radii used by the smooth-entropy machinery.
struct SmoothingParam {
  double eps = 0.0;
  double eps_prime = 0.0;
  double eps_dprime = 0.0;

  SmoothingParam() = default;
  explicit SmoothingParam(double e, double ep = 0.0, double epp = 0.0);
};

// ---------------------------------------------------------------------------
// Operations

/// Variational distance delta(P,Q) = 1/2 sum |P(z) - Q(z)|.
double variational_distance(const ProbDist& p, const ProbDist& q);

/// Non-uniformity d(P) = delta(P, U).
double non_uniformity(const ProbDist& p);

/// Frequency distribution Q_z of a tuple over a declared alphabet.
/// Entries are exact integer counts divided once by n.
ProbDist frequency_distribution(const std::vector<std::string>& tuple,
                                const std::vector<std::string>& alphabet);
ProbDist frequency_distribution_bits(const std::vector<std::uint8_t>& bits);

/// Renyi entropy H_alpha(P), alpha >= 0 or infinity (pass alpha < 0 never;
/// use renyi_infinity() for the order-infinity entropy).
double renyi_entropy(const ProbDist& p, double alpha);
inline constexpr double kAlphaInf = -1.0;  // sentinel accepted by smooth_renyi
double renyi_infinity(const ProbDist& p);

/// Smooth Renyi entropy for alpha in {0, infinity}.
/// alpha = 0: subset deletion; alpha = kAlphaInf (or std::numeric_limits
/// infinity): level-cut water filling. eps = 0 reduces to the plain entropy.
double smooth_renyi(const ProbDist& p, double alpha, const SmoothingParam& s);

/// Unsmoothed conditional min-entropy min_w H_inf(Z|W=w).
double min_entropy_cond(const JointDist& pzw);

/// Smooth conditional min-entropy by numerical optimization over the
/// eps-ball of joint distributions. Exact mode only for alphabets <= 4.
double smooth_min_entropy_cond(const JointDist& pzw, const SmoothingParam& s);

/// Mutual information I(X;Y) = H(X) - H(X|Y).
double mutual_information(const JointDist& pxy);

/// Conditional Shannon entropy H(X|Y).
double cond_entropy_x_given_y(const JointDist& pxy);

/// True iff z is majorized by zp (every top-k partial sum of z is dominated).
bool majorizes(const std::vector<double>& zp, const std::vector<double>& z);

struct TypicalSetReport {
  std::optional<std::uint64_t> exact;  // present when enumeration feasible
  double bound;                        // 2^{n r} n^{q-1}
};

/// r-typical set over an alphabet of size q: exact count by enumeration when
/// q^n <= 2^20, plus the closed-form size bound.
TypicalSetReport typical_set(std::size_t q, std::size_t n, double r,
                             bool want_exact = true);

/// Maximum Shannon entropy over the eps-ball around P (used by the bound
/// calculators): exact two-level water filling toward uniform.
double max_entropy_ball(const ProbDist& p, double eps);

}  // namespace qkdtk::cinfo
