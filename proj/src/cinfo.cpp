#include "qkdtk/cinfo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace qkdtk::cinfo {

double log2_safe(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

double binary_entropy(double eps) {
  if (eps < -1e-12 || eps > 1.0 + 1e-12)
    throw std::invalid_argument("binary_entropy: argument outside [0,1]");
  eps = std::clamp(eps, 0.0, 1.0);
  return -eps * log2_safe(eps) - (1.0 - eps) * log2_safe(1.0 - eps);
}

double shannon_entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// --------------------------------------------------------------------- ProbDist

ProbDist::ProbDist(std::vector<std::string> alpha, std::vector<double> p)
    : alphabet(std::move(alpha)), probs(std::move(p)) {
  validate();
}

ProbDist ProbDist::uniform(std::size_t q) {
  ProbDist d;
  for (std::size_t i = 0; i < q; ++i) d.alphabet.push_back(std::to_string(i));
  d.probs.assign(q, 1.0 / static_cast<double>(q));
  return d;
}

ProbDist ProbDist::binary(double p_one) {
  return ProbDist({"0", "1"}, {1.0 - p_one, p_one});
}

ProbDist ProbDist::point_mass(std::vector<std::string> alpha, std::size_t at) {
  std::vector<double> p(alpha.size(), 0.0);
  p.at(at) = 1.0;
  return ProbDist(std::move(alpha), std::move(p));
}

double ProbDist::p_max() const {
  return *std::max_element(probs.begin(), probs.end());
}

std::size_t ProbDist::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
}

bool ProbDist::same_alphabet(const ProbDist& other) const {
  return alphabet == other.alphabet;
}

void ProbDist::validate() const {
  if (alphabet.size() != probs.size())
    throw std::invalid_argument("ProbDist: alphabet/probs size mismatch");
  if (probs.empty()) throw std::invalid_argument("ProbDist: empty");
  double sum = 0.0;
  for (double p : probs) {
    if (p < -kSimplexTol) throw std::invalid_argument("ProbDist: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("ProbDist: entries do not sum to 1");
  std::unordered_map<std::string, int> seen;
  for (const auto& s : alphabet)
    if (++seen[s] > 1)
      throw std::invalid_argument("ProbDist: duplicate alphabet symbol");
}

// ------------------------------------------------------------------ CondChannel

void CondChannel::validate() const {
  if (rows.size() != input_alphabet.size())
    throw std::invalid_argument("CondChannel: row count mismatch");
  for (const auto& r : rows) {
    ProbDist d(output_alphabet, r);  // validates
    (void)d;
  }
}

ProbDist CondChannel::row(std::size_t y) const {
  return ProbDist(output_alphabet, rows.at(y));
}

// -------------------------------------------------------------------- JointDist

JointDist::JointDist(std::vector<std::string> xa, std::vector<std::string> ya,
                     std::vector<double> p)
    : x_alphabet(std::move(xa)), y_alphabet(std::move(ya)), probs(std::move(p)) {
  validate();
}

void JointDist::validate() const {
  if (probs.size() != nx() * ny())
    throw std::invalid_argument("JointDist: size mismatch");
  flatten().validate();
}

ProbDist JointDist::marginal_x() const {
  std::vector<double> m(nx(), 0.0);
  for (std::size_t x = 0; x < nx(); ++x)
    for (std::size_t y = 0; y < ny(); ++y) m[x] += p(x, y);
  return ProbDist(x_alphabet, m);
}

ProbDist JointDist::marginal_y() const {
  std::vector<double> m(ny(), 0.0);
  for (std::size_t x = 0; x < nx(); ++x)
    for (std::size_t y = 0; y < ny(); ++y) m[y] += p(x, y);
  return ProbDist(y_alphabet, m);
}

ProbDist JointDist::conditional_x_given_y(std::size_t y) const {
  double py = 0.0;
  for (std::size_t x = 0; x < nx(); ++x) py += p(x, y);
  if (py <= 0.0)
    throw std::invalid_argument("conditional_x_given_y: zero-probability y");
  std::vector<double> c(nx());
  for (std::size_t x = 0; x < nx(); ++x) c[x] = p(x, y) / py;
  return ProbDist(x_alphabet, c);
}

ProbDist JointDist::flatten() const {
  ProbDist d;
  for (std::size_t x = 0; x < nx(); ++x)
    for (std::size_t y = 0; y < ny(); ++y)
      d.alphabet.push_back(x_alphabet[x] + "," + y_alphabet[y]);
  d.probs = probs;
  return d;
}

ProbDist JointDist::xor_marginal() const {
  if (nx() != 2 || ny() != 2)
    throw std::invalid_argument("xor_marginal: binary alphabets required");
  return ProbDist({"0", "1"},
                  {p(0, 0) + p(1, 1), p(0, 1) + p(1, 0)});
}

JointDist JointDist::binary_symmetric(double flip) {
  double a = 0.5 * (1.0 - flip), b = 0.5 * flip;
  return JointDist({"0", "1"}, {"0", "1"}, {a, b, b, a});
}

SmoothingParam::SmoothingParam(double e, double ep, double epp)
    : eps(e), eps_prime(ep), eps_dprime(epp) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("SmoothingParam: eps outside [0,1]");
}

// ------------------------------------------------------------------- operations

double variational_distance(const ProbDist& p, const ProbDist& q) {
  if (!p.same_alphabet(q))
    throw std::invalid_argument("variational_distance: alphabet mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * s;
}

double non_uniformity(const ProbDist& p) {
  ProbDist u = ProbDist::uniform(p.size());
  u.alphabet = p.alphabet;
  return variational_distance(p, u);
}

ProbDist frequency_distribution(const std::vector<std::string>& tuple,
                                const std::vector<std::string>& alphabet) {
  if (tuple.empty())
    throw std::invalid_argument("frequency_distribution: empty tuple");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) index[alphabet[i]] = i;
  std::vector<std::uint64_t> counts(alphabet.size(), 0);
  for (const auto& s : tuple) {
    auto it = index.find(s);
    if (it == index.end())
      throw std::invalid_argument("frequency_distribution: symbol not in alphabet");
    ++counts[it->second];
  }
  std::vector<double> p(alphabet.size());
  const double n = static_cast<double>(tuple.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / n;
  return ProbDist(alphabet, p);
}

ProbDist frequency_distribution_bits(const std::vector<std::uint8_t>& bits) {
  if (bits.empty())
    throw std::invalid_argument("frequency_distribution: empty tuple");
  std::uint64_t ones = 0;
  for (auto b : bits) ones += (b != 0);
  double n = static_cast<double>(bits.size());
  return ProbDist::binary(static_cast<double>(ones) / n);
}

double renyi_infinity(const ProbDist& p) { return -std::log2(p.p_max()); }

double renyi_entropy(const ProbDist& p, double alpha) {
  if (alpha == kAlphaInf || std::isinf(alpha)) return renyi_infinity(p);
  if (alpha < 0.0) throw std::invalid_argument("renyi_entropy: alpha < 0");
  if (alpha == 0.0)
    return std::log2(static_cast<double>(p.support_size()));
  if (std::abs(alpha - 1.0) < 1e-12) return shannon_entropy(p.probs);
  double s = 0.0;
  for (double q : p.probs)
    if (q > 0.0) s += std::pow(q, alpha);
  return std::log2(s) / (1.0 - alpha);
}

namespace {

// Smooth min-entropy: the largest H_inf in the eps-ball is -log2(lam*) where
// lam* is the smallest achievable maximum probability. Lowering all entries
// above a level lam costs exactly sum (P-lam)^+ in variational distance.
double smooth_hinf(const ProbDist& p, double eps) {
  const std::size_t q = p.size();
  std::vector<double> sorted = p.probs;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  auto excess = [&](double lam) {
    double e = 0.0;
    for (double v : sorted) {
      if (v <= lam) break;
      e += v - lam;
    }
    return e;
  };
  const double uni = 1.0 / static_cast<double>(q);
  if (excess(uni) <= eps) return std::log2(static_cast<double>(q));
  // bisection on the cut level
  double lo = uni, hi = sorted.front();
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (excess(mid) > eps ? lo : hi) = mid;
  }
  return -std::log2(0.5 * (lo + hi));
}

// Smooth H_0: delete lowest-probability symbols with total deleted mass <= eps.
double smooth_h0(const ProbDist& p, double eps) {
  std::vector<double> sorted;
  for (double v : p.probs)
    if (v > 0.0) sorted.push_back(v);
  std::sort(sorted.begin(), sorted.end());
  double deleted = 0.0;
  std::size_t removed = 0;
  for (double v : sorted) {
    if (deleted + v > eps + 1e-12) break;
    deleted += v;
    ++removed;
  }
  std::size_t support = sorted.size() - removed;
  if (support == 0) support = 1;  // cannot delete the whole distribution
  return std::log2(static_cast<double>(support));
}

}  // namespace

double smooth_renyi(const ProbDist& p, double alpha, const SmoothingParam& s) {
  if (s.eps < 0.0 || s.eps > 1.0)
    throw std::invalid_argument("smooth_renyi: eps outside [0,1]");
  if (s.eps == 0.0) return renyi_entropy(p, alpha);
  if (alpha == kAlphaInf || std::isinf(alpha)) return smooth_hinf(p, s.eps);
  if (alpha == 0.0) return smooth_h0(p, s.eps);
  throw std::invalid_argument(
      "smooth_renyi: only alpha in {0, infinity} supported for eps > 0");
}

double min_entropy_cond(const JointDist& pzw) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < pzw.ny(); ++w) {
    double pw = 0.0, pmax = 0.0;
    for (std::size_t z = 0; z < pzw.nx(); ++z) {
      pw += pzw.p(z, w);
      pmax = std::max(pmax, pzw.p(z, w));
    }
    if (pw <= 1e-15) continue;
    worst = std::min(worst, -std::log2(pmax / pw));
  }
  return worst;
}

// Maximize min_w H_inf(Z'|W'=w) over joints within eps in variational
// distance. Small alphabets only; stochastic projected search with
// annealed pairwise mass transfers.
double smooth_min_entropy_cond(const JointDist& pzw, const SmoothingParam& s) {
  if (pzw.nx() > 4 || pzw.ny() > 4)
    throw std::invalid_argument(
        "smooth_min_entropy_cond: alphabet too large for exact mode; use the "
        "bound calculators in the bounds module");
  if (s.eps == 0.0) return min_entropy_cond(pzw);

  const std::size_t cells = pzw.probs.size();
  auto objective = [&](const std::vector<double>& v) {
    // largest conditional probability P(z|w); smaller is better
    double worst = 0.0;
    for (std::size_t w = 0; w < pzw.ny(); ++w) {
      double pw = 0.0, pmax = 0.0;
      for (std::size_t z = 0; z < pzw.nx(); ++z) {
        pw += v[z * pzw.ny() + w];
        pmax = std::max(pmax, v[z * pzw.ny() + w]);
      }
      if (pw > 1e-15) worst = std::max(worst, pmax / pw);
    }
    return worst;
  };
  auto l1_half = [&](const std::vector<double>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < cells; ++i) d += std::abs(v[i] - pzw.probs[i]);
    return 0.5 * d;
  };

  std::vector<double> best = pzw.probs;
  double best_obj = objective(best);
  std::uint64_t rng = 0x2545F4914F6CDD1DULL;
  auto next = [&rng]() {
    rng ^= rng << 13;
    rng ^= rng >> 7;
    rng ^= rng << 17;
    return rng;
  };
  std::vector<double> cur = best;
  double cur_obj = best_obj;
  double step = s.eps;
  for (int round = 0; round < 60; ++round) {
    for (int it = 0; it < 4000; ++it) {
      std::size_t i = next() % cells, j = next() % cells;
      if (i == j) continue;
      double t = step * static_cast<double>(next() % 1024) / 1024.0;
      t = std::min(t, cur[i]);
      if (t <= 0.0) continue;
      std::vector<double> cand = cur;
      cand[i] -= t;
      cand[j] += t;
      if (l1_half(cand) > s.eps + 1e-12) continue;
      double o = objective(cand);
      if (o <= cur_obj) {
        cur = std::move(cand);
        cur_obj = o;
        if (cur_obj < best_obj) {
          best_obj = cur_obj;
          best = cur;
        }
      }
    }
    step *= 0.7;
  }
  return -std::log2(best_obj);
}

double cond_entropy_x_given_y(const JointDist& pxy) {
  double h = 0.0;
  for (std::size_t y = 0; y < pxy.ny(); ++y) {
    double py = 0.0;
    for (std::size_t x = 0; x < pxy.nx(); ++x) py += pxy.p(x, y);
    if (py <= 0.0) continue;
    double hy = 0.0;
    for (std::size_t x = 0; x < pxy.nx(); ++x) {
      double c = pxy.p(x, y) / py;
      if (c > 0.0) hy -= c * std::log2(c);
    }
    h += py * hy;
  }
  return h;
}

double mutual_information(const JointDist& pxy) {
  return shannon_entropy(pxy.marginal_x().probs) - cond_entropy_x_given_y(pxy);
}

bool majorizes(const std::vector<double>& zp, const std::vector<double>& z) {
  if (zp.size() != z.size())
    throw std::invalid_argument("majorizes: length mismatch");
  std::vector<double> a = zp, b = z;
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    if (sb > sa + 1e-12) return false;
  }
  return true;
}

TypicalSetReport typical_set(std::size_t q, std::size_t n, double r,
                             bool want_exact) {
  if (q < 2 || n < 1 || r < 0.0)
    throw std::invalid_argument("typical_set: bad parameters");
  TypicalSetReport rep;
  rep.bound = std::pow(2.0, static_cast<double>(n) * r) *
              std::pow(static_cast<double>(n), static_cast<double>(q) - 1.0);
  double total = std::pow(static_cast<double>(q), static_cast<double>(n));
  if (want_exact) {
    if (total > static_cast<double>(1u << 20))
      throw std::invalid_argument("typical_set: enumeration above cap");
    std::uint64_t count = 0;
    std::vector<std::size_t> tuple(n, 0);
    std::vector<std::uint64_t> counts(q, 0);
    // odometer enumeration of all q^n tuples
    bool done = false;
    while (!done) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[tuple[i]];
      double h = 0.0;
      for (std::size_t z = 0; z < q; ++z) {
        double f = static_cast<double>(counts[z]) / static_cast<double>(n);
        if (f > 0.0) h -= f * std::log2(f);
      }
      if (h <= r + 1e-12) ++count;
      std::size_t pos = 0;
      while (pos < n && ++tuple[pos] == q) tuple[pos++] = 0;
      done = (pos == n);
    }
    rep.exact = count;
  }
  return rep;
}

double max_entropy_ball(const ProbDist& p, double eps) {
  if (eps < 0.0) throw std::invalid_argument("max_entropy_ball: eps < 0");
  const std::size_t q = p.size();
  if (eps >= non_uniformity(p) - 1e-15)
    return std::log2(static_cast<double>(q));
  // Move exactly eps mass: cap the largest entries at level c and raise the
  // smallest to level f, with sum(P-c)^+ = sum(f-P)^+ = eps.
  auto excess_above = [&](double c) {
    double e = 0.0;
    for (double v : p.probs) e += std::max(v - c, 0.0);
    return e;
  };
  auto deficit_below = [&](double f) {
    double e = 0.0;
    for (double v : p.probs) e += std::max(f - v, 0.0);
    return e;
  };
  double lo = 1.0 / static_cast<double>(q);
  double hi = *std::max_element(p.probs.begin(), p.probs.end());
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (excess_above(mid) > eps ? lo : hi) = mid;
  }
  double cap = 0.5 * (lo + hi);
  lo = *std::min_element(p.probs.begin(), p.probs.end());
  hi = 1.0 / static_cast<double>(q);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (deficit_below(mid) > eps ? hi : lo) = mid;
  }
  double floor_lvl = 0.5 * (lo + hi);
  std::vector<double> out(q);
  for (std::size_t i = 0; i < q; ++i)
    out[i] = std::clamp(p.probs[i], floor_lvl, cap);
  double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= sum;  // absorb bisection residue
  return shannon_entropy(out);
}

}  // namespace qkdtk::cinfo
