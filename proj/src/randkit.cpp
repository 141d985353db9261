#include "qkdtk/randkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdtk::randkit {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Stream::next_u64() { return splitmix_next(state_); }

double Stream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Stream::bernoulli(double p) { return next_double() < p; }

std::uint64_t Stream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Stream::below: n == 0");
  // rejection sampling; bias-free
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

Stream derive_stream(std::uint64_t master_seed, std::string_view label) {
  return Stream(derive_seed(master_seed, label));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                          std::uint64_t index) {
  std::uint64_t s = master_seed ^ fnv1a(label);
  s = splitmix_next(s);
  s ^= 0x9E3779B97F4A7C15ULL * (index + 1);
  return splitmix_next(s);
}

// ------------------------------------------------------------------ ToeplitzHash

ToeplitzHash ToeplitzHash::random(int n_in, int n_out, Stream& stream) {
  ToeplitzHash h;
  h.n_in = n_in;
  h.n_out = n_out;
  h.diag.resize(static_cast<std::size_t>(n_in + n_out - 1));
  for (auto& b : h.diag) b = stream.bit();
  h.validate();
  return h;
}

ToeplitzHash ToeplitzHash::from_diag(int n_in, int n_out, Bits diag) {
  ToeplitzHash h;
  h.n_in = n_in;
  h.n_out = n_out;
  h.diag = std::move(diag);
  h.validate();
  return h;
}

void ToeplitzHash::validate() const {
  if (n_out < 1 || n_out > n_in)
    throw std::invalid_argument("ToeplitzHash: require 1 <= n_out <= n_in");
  if (diag.size() != static_cast<std::size_t>(n_in + n_out - 1))
    throw std::invalid_argument("ToeplitzHash: diag length mismatch");
}

Bits ToeplitzHash::apply(const Bits& x) const {
  if (x.size() != static_cast<std::size_t>(n_in))
    throw std::invalid_argument("ToeplitzHash::apply: input length mismatch");
  Bits out(static_cast<std::size_t>(n_out), 0);
  // M[i][j] = diag[i - j + n_in - 1]
  for (int i = 0; i < n_out; ++i) {
    std::uint8_t acc = 0;
    for (int j = 0; j < n_in; ++j)
      acc ^= static_cast<std::uint8_t>(diag[static_cast<std::size_t>(i - j + n_in - 1)] & x[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(i)] = acc & 1;
  }
  return out;
}

std::string ToeplitzHash::diag_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  int nibble = 0, count = 0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    nibble = (nibble << 1) | diag[i];
    if (++count == 4) {
      s.push_back(digits[nibble]);
      nibble = count = 0;
    }
  }
  if (count > 0) s.push_back(digits[nibble << (4 - count)]);
  return s;
}

Bits ToeplitzHash::diag_from_hex(int length, const std::string& hex) {
  Bits bits;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      throw std::invalid_argument("diag_from_hex: bad hex digit");
    for (int k = 3; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((v >> k) & 1));
  }
  if (bits.size() < static_cast<std::size_t>(length))
    throw std::invalid_argument("diag_from_hex: hex string too short");
  bits.resize(static_cast<std::size_t>(length));
  return bits;
}

double collision_probability_exhaustive(int n_in, int n_out) {
  if (n_in < 1 || n_out < 1 || n_out > n_in || n_in > 10)
    throw std::invalid_argument(
        "collision_probability_exhaustive: size over cap (n_in <= 10)");
  const int len = n_in + n_out - 1;
  // The hash is linear in x, so Prob[h(x) = h(x')] = Prob[h(d) = 0] for the
  // difference d = x ^ x'. For fixed d != 0, diag -> M_diag * d is linear in
  // the diag bits; the number of diagonals mapping d to zero is
  // 2^(len - rank). Worst pair = minimum rank over d.
  int min_rank = n_out;
  for (std::uint32_t d = 1; d < (1u << n_in); ++d) {
    std::vector<std::uint32_t> rows(static_cast<std::size_t>(n_out), 0);
    for (int i = 0; i < n_out; ++i)
      for (int j = 0; j < n_in; ++j)
        if ((d >> (n_in - 1 - j)) & 1)
          rows[static_cast<std::size_t>(i)] ^= 1u << (i - j + n_in - 1);
    // Gaussian elimination over GF(2)
    int rank = 0;
    for (int col = 0; col < len && rank < n_out; ++col) {
      int pivot = -1;
      for (int r = rank; r < n_out; ++r)
        if ((rows[static_cast<std::size_t>(r)] >> col) & 1) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
      for (int r = 0; r < n_out; ++r)
        if (r != rank && ((rows[static_cast<std::size_t>(r)] >> col) & 1))
          rows[static_cast<std::size_t>(r)] ^= rows[static_cast<std::size_t>(rank)];
      ++rank;
    }
    min_rank = std::min(min_rank, rank);
  }
  return std::ldexp(1.0, -min_rank);
}

// -------------------------------------------------------------- PRandomSelection

PRandomSelection PRandomSelection::generate(double p, std::size_t n,
                                            std::uint64_t seed) {
  return generate_on(p, n, std::vector<bool>(n, true), seed);
}

PRandomSelection PRandomSelection::generate_on(double p, std::size_t n,
                                               const std::vector<bool>& ground,
                                               std::uint64_t seed) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("PRandomSelection: p outside [0,1]");
  PRandomSelection sel;
  sel.p = p;
  sel.n = n;
  sel.seed = seed;
  Stream s(seed);
  for (std::size_t i = 0; i < n; ++i) {
    bool pick = s.bernoulli(p);  // always consume one draw per index
    if (pick && ground[i]) sel.included.push_back(i);
  }
  return sel;
}

std::vector<bool> PRandomSelection::mask() const {
  std::vector<bool> m(n, false);
  for (auto i : included) m[i] = true;
  return m;
}

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<std::size_t> unite(const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& a,
                                    std::size_t n) {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < a.size() && a[k] == i)
      ++k;
    else
      out.push_back(i);
  }
  return out;
}

SeededPermutation SeededPermutation::generate(std::size_t n, std::uint64_t seed) {
  SeededPermutation p;
  p.n = n;
  p.seed = seed;
  p.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.perm[i] = i;
  Stream s(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(p.perm[i - 1], p.perm[s.below(i)]);
  return p;
}

Bits SeededPermutation::apply(const Bits& x) const {
  if (x.size() != n)
    throw std::invalid_argument("SeededPermutation::apply: length mismatch");
  Bits out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[perm[i]];
  return out;
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    return std::stoull(text.substr(2), nullptr, 16);
  return std::stoull(text, nullptr, 10);
}

}  // namespace qkdtk::randkit
