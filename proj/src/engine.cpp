#include "qkdtk/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "qkdtk/analyzers.hpp"
#include "qkdtk/bounds.hpp"
#include "qkdtk/cinfo.hpp"

namespace qkdtk::engine {

namespace {

namespace rk = qkdtk::randkit;
namespace ci = qkdtk::cinfo;
namespace qc = qkdtk::qcore;

// Error table of the Pauli labels, basis order (psi+, psi-, phi+, phi-):
// basis-1 errors for labels {2,3}, basis-2 for {1,3}, basis-3 for {1,2}
// (basis 3 includes Bob's bit-flip convention).
bool label_error(int basis, int label) {
  switch (basis) {
    case 1: return label == 2 || label == 3;
    case 2: return label == 1 || label == 3;
    case 3: return label == 1 || label == 2;
  }
  throw std::invalid_argument("label_error: basis outside 1..3");
}

int sample_label(const std::array<double, 4>& lambdas, rk::Stream& s) {
  double v = s.next_double();
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += lambdas[static_cast<std::size_t>(k)];
    if (v < acc) return k;
  }
  return 3;
}

std::size_t sample_index(const std::vector<double>& probs, rk::Stream& s) {
  double v = s.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (v < acc) return i;
  }
  return probs.size() - 1;
}

// B92 signal and conclusive-outcome vectors: u(0/1) = beta|0> +- alpha|1>,
// conclusive projector for Bob's measurement m is |u~_-| (m=1, bit 0) or
// |u~_+| (m=2, bit 1) with u~(+-) = alpha|0> -+ beta|1>.
qc::Vector b92_signal(double alpha, int bit) {
  double beta = std::sqrt(1.0 - alpha * alpha);
  qc::Vector v(2);
  v << beta, (bit == 0 ? alpha : -alpha);
  return v;
}

qc::Vector b92_conclusive(double alpha, int bob_bit) {
  double beta = std::sqrt(1.0 - alpha * alpha);
  qc::Vector v(2);
  // bob_bit 0 <-> u~_-, bob_bit 1 <-> u~_+
  v << alpha, (bob_bit == 0 ? beta : -beta);
  return v;
}

void fill_selections(const ProtocolConfig& config, Transcript& tr) {
  double p = config.p();
  tr.sel_t = rk::PRandomSelection::generate(
                 p, config.n, rk::derive_seed(config.seed, "selection T"))
                 .included;
  tr.sel_tprime =
      rk::PRandomSelection::generate(
          p, config.n, rk::derive_seed(config.seed, "selection Tprime"))
          .included;
}

void fill_bases(const ProtocolConfig& config, Transcript& tr) {
  const std::size_t n = config.n;
  tr.basis_a.assign(n, 1);
  tr.basis_b.assign(n, 1);
  auto split_a = rk::derive_stream(config.seed, "basis split A");
  auto split_b = rk::derive_stream(config.seed, "basis split B");
  auto t_mask = rk::PRandomSelection{config.p(), n, 0, tr.sel_t}.mask();
  auto tp_mask = rk::PRandomSelection{config.p(), n, 0, tr.sel_tprime}.mask();
  bool six = config.protocol == Protocol::SixState;
  for (std::size_t i = 0; i < n; ++i) {
    // consume one split draw per position so streams stay aligned
    int sub_a = six ? 2 + split_a.bit() : 2;
    int sub_b = six ? 2 + split_b.bit() : 2;
    if (t_mask[i]) tr.basis_a[i] = sub_a;
    if (tp_mask[i]) tr.basis_b[i] = sub_b;
  }
}

void sample_bell_common(const ProtocolConfig& config, Transcript& tr,
                        bool povm_path) {
  const std::size_t n = config.n;
  const auto lambdas = config.attack.effective_lambdas();
  fill_bases(config, tr);
  tr.x.assign(n, 0);
  tr.y.assign(n, 0);
  tr.eve.pauli_labels.assign(n, 0);
  auto noise = rk::derive_stream(config.seed, "channel noise");
  auto alice = rk::derive_stream(config.seed, "alice outcome");
  auto mismatch = rk::derive_stream(config.seed, "bob mismatch");
  qc::DensityOperator rho = qc::bell_diagonal_state(lambdas);
  for (std::size_t i = 0; i < n; ++i) {
    int a = tr.basis_a[i], b = tr.basis_b[i];
    if (!povm_path) {
      int label = sample_label(lambdas, noise);
      tr.eve.pauli_labels[i] = label;
      tr.x[i] = alice.bit();
      std::uint8_t mm = mismatch.bit();
      if (a == b)
        tr.y[i] = tr.x[i] ^ static_cast<std::uint8_t>(label_error(b, label));
      else
        tr.y[i] = mm;
    } else {
      qc::Matrix ua = qc::qubit_basis(a), ub = qc::qubit_basis(b);
      std::vector<double> probs(4);
      for (int xa = 0; xa < 2; ++xa)
        for (int yb = 0; yb < 2; ++yb) {
          qc::Vector v = qc::kron_vec(ua.col(xa), ub.col(yb));
          probs[static_cast<std::size_t>(2 * xa + yb)] =
              std::real((v.adjoint() * rho.mat * v)(0, 0));
        }
      std::size_t out = sample_index(probs, noise);
      tr.x[i] = static_cast<std::uint8_t>(out >> 1);
      tr.y[i] = static_cast<std::uint8_t>(out & 1);
      if (b == 3) tr.y[i] ^= 1;  // bit-flip convention of basis 3
    }
  }
}

void sample_b92(const ProtocolConfig& config, Transcript& tr) {
  const std::size_t n = config.n;
  const double alpha = config.attack.b92_alpha;
  tr.x.assign(n, 0);
  tr.y.assign(n, 0);
  tr.basis_a.assign(n, 0);
  tr.basis_b.assign(n, 0);
  tr.conclusive.assign(n, false);
  auto alice = rk::derive_stream(config.seed, "alice outcome");
  auto bob_basis = rk::derive_stream(config.seed, "bob basis");
  auto noise = rk::derive_stream(config.seed, "channel noise");
  // conclusive probability given (alice bit, bob measurement)
  double p_conc[2][2];
  for (int bit = 0; bit < 2; ++bit) {
    qc::DensityOperator psi = attack_state(config.attack, Protocol::B92, bit);
    Eigen::Index env = psi.dim() / 2;
    for (int m = 0; m < 2; ++m) {
      // measurement m = 1/2 accepts outcome u~(-/+), i.e. bob bit m
      qc::Vector v = b92_conclusive(alpha, m);
      qc::Matrix proj =
          qc::kron(v * v.adjoint(), qc::Matrix::Identity(env, env));
      p_conc[bit][m] = std::real((psi.mat * proj).trace());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    tr.x[i] = alice.bit();
    int m = bob_basis.bit();  // 0 -> measurement 1, 1 -> measurement 2
    tr.basis_b[i] = m + 1;
    if (noise.next_double() < p_conc[tr.x[i]][m]) {
      tr.conclusive[i] = true;
      tr.y[i] = static_cast<std::uint8_t>(m);
    }
  }
}

double observed_qber(const Transcript& tr, const std::vector<std::size_t>& idx,
                     int want_basis, std::size_t& count) {
  std::size_t errs = 0;
  count = 0;
  for (auto i : idx) {
    if (want_basis != 0 &&
        (tr.basis_a[i] != want_basis || tr.basis_b[i] != want_basis))
      continue;
    ++count;
    if (tr.x[i] != tr.y[i]) ++errs;
  }
  return count ? double(errs) / double(count) : 0.0;
}

void estimate_bell_from_model(const ProtocolConfig& config, Transcript& tr) {
  // tiny-n study mode: estimation sets are usually empty there, so the
  // box parameters are filled from the attack model's true error rates
  auto l = config.attack.effective_lambdas();
  tr.qber1 = std::min(l[2] + l[3], 0.5);
  tr.qber2 = std::min(l[1] + l[3], 0.5);
  tr.qber3 = std::min(l[1] + l[2], 0.5);
  tr.h_x = 1.0;
  tr.h_x_given_y = ci::binary_entropy(tr.qber1);
  bool six = config.protocol == Protocol::SixState;
  auto worst = six ? bounds::worst_case_bell_six_state(tr.qber1, tr.qber2,
                                                       tr.qber3)
                   : bounds::worst_case_bell_bb84(tr.qber1, tr.qber2);
  tr.worst_lambdas = worst.lambdas;
  tr.worst_entropy = worst.entropy;
  double n = double(config.n);
  tr.r = static_cast<long long>(std::ceil(n * tr.h_x_given_y));
  tr.t = static_cast<long long>(std::floor(n * tr.h_x));
  tr.u = static_cast<long long>(std::ceil(n * tr.worst_entropy));
  tr.s = tr.t - tr.r - tr.u;
}

void estimate_bell(const ProtocolConfig& config, Transcript& tr) {
  if (config.force_s_prime) {
    estimate_bell_from_model(config, tr);
    return;
  }
  auto not_tprime = rk::complement(tr.sel_tprime, config.n);
  auto e1 = rk::intersect(tr.sel_s, not_tprime);     // both basis 1
  auto e2 = rk::intersect(tr.sel_t, tr.sel_tprime);  // both non-key bases
  if (e1.empty() || e2.empty()) {
    tr.aborted = true;
    tr.abort_reason = "estimation set empty";
    return;
  }
  // joint frequency on the basis-1 estimation set
  std::array<double, 4> counts{};
  for (auto i : e1) counts[static_cast<std::size_t>(2 * tr.x[i] + tr.y[i])] += 1.0;
  for (auto& c : counts) c /= double(e1.size());
  ci::JointDist qhat({"0", "1"}, {"0", "1"},
                     {counts[0], counts[1], counts[2], counts[3]});
  tr.qber1 = counts[1] + counts[2];
  tr.h_x = ci::shannon_entropy(qhat.marginal_x().probs);
  tr.h_x_given_y = ci::cond_entropy_x_given_y(qhat);
  std::size_t c2 = 0, c3 = 0;
  double q2 = observed_qber(tr, e2, 2, c2);
  double q3 = observed_qber(tr, e2, 3, c3);
  bool six = config.protocol == Protocol::SixState;
  if (six) {
    if (c2 == 0 && c3 == 0) {
      tr.aborted = true;
      tr.abort_reason = "estimation set empty";
      return;
    }
    if (c2 == 0) q2 = q3;
    if (c3 == 0) q3 = q2;
  }
  tr.qber2 = std::min(q2, 0.5);
  tr.qber3 = std::min(q3, 0.5);
  auto worst =
      six ? bounds::worst_case_bell_six_state(std::min(tr.qber1, 0.5), tr.qber2,
                                              tr.qber3)
          : bounds::worst_case_bell_bb84(std::min(tr.qber1, 0.5), tr.qber2);
  tr.worst_lambdas = worst.lambdas;
  tr.worst_entropy = worst.entropy;
  double n = double(config.n);
  tr.r = static_cast<long long>(std::ceil(n * tr.h_x_given_y));
  tr.t = static_cast<long long>(std::floor(n * tr.h_x));
  tr.u = static_cast<long long>(std::ceil(n * tr.worst_entropy));
  tr.s = tr.t - tr.r - tr.u;
}

void estimate_b92(const ProtocolConfig& config, Transcript& tr) {
  if (tr.sel_s.empty()) {
    tr.aborted = true;
    tr.abort_reason = "estimation set empty";
    return;
  }
  std::size_t cnt = 0;
  double eps_hat = observed_qber(tr, tr.sel_s, 0, cnt);
  std::size_t n_conc = 0;
  for (bool c : tr.conclusive) n_conc += c;
  double accept_hat = double(n_conc) / double(config.n);
  tr.qber1 = eps_hat;
  tr.h_x = 1.0;
  tr.h_x_given_y = ci::binary_entropy(eps_hat);
  double delta_hat = std::min(2.0 * accept_hat * eps_hat, 0.19);
  double gamma_hat = std::max(2.0 * accept_hat - delta_hat, 0.0);
  long long np = 0;  // sifted length: conclusive minus announced
  for (std::size_t i = 0; i < config.n; ++i)
    if (tr.conclusive[i]) ++np;
  np -= static_cast<long long>(tr.sel_s.size());
  double cond_entropy;
  try {
    auto rep = analyzers::b92_general_bound(gamma_hat / 4.0, delta_hat / 4.0,
                                            delta_hat / 4.0, gamma_hat / 4.0,
                                            config.attack.b92_alpha, 0.0);
    cond_entropy = rep.b92->eps_cond + (1.0 - rep.b92->eps_cond) *
                                           ci::binary_entropy(rep.b92->x);
  } catch (const std::invalid_argument&) {
    tr.aborted = true;
    tr.abort_reason = "no extractable key";
    return;
  }
  // r/t/u/s over the sifted length for B92
  double dn = double(std::max<long long>(np, 0));
  tr.r = static_cast<long long>(std::ceil(dn * tr.h_x_given_y));
  tr.t = static_cast<long long>(std::floor(dn * tr.h_x));
  tr.u = static_cast<long long>(std::ceil(dn * cond_entropy));
  tr.s = tr.t - tr.r - tr.u;
  tr.worst_entropy = cond_entropy;
}

// Weight-ordered error-pattern decoding of one block. Returns true and sets
// x_bar on a syndrome match within the cap; false when the cap is exceeded.
bool decode_block(const rk::ToeplitzHash& hash, const rk::Bits& y_block,
                  const rk::Bits& target, rk::Bits& x_bar) {
  const int nb = hash.n_in;
  const std::size_t cap = 1u << 16;
  std::size_t tried = 0;
  // syndromes of the unit patterns; pattern syndrome = xor of its units
  std::vector<rk::Bits> unit(static_cast<std::size_t>(nb));
  rk::Bits base = hash.apply(y_block);
  for (int j = 0; j < nb; ++j) {
    rk::Bits e(static_cast<std::size_t>(nb), 0);
    e[static_cast<std::size_t>(j)] = 1;
    unit[static_cast<std::size_t>(j)] = hash.apply(e);
  }
  auto matches = [&](const std::vector<int>& flips) {
    for (std::size_t b = 0; b < target.size(); ++b) {
      std::uint8_t v = base[b];
      for (int j : flips) v ^= unit[static_cast<std::size_t>(j)][b];
      if (v != target[b]) return false;
    }
    return true;
  };
  std::vector<int> flips;
  // weight 0..4, lexicographic within each weight
  std::function<bool(int, int)> rec = [&](int start, int remaining) -> bool {
    if (remaining == 0) {
      if (++tried > cap) return false;
      if (matches(flips)) {
        x_bar = y_block;
        for (int j : flips) x_bar[static_cast<std::size_t>(j)] ^= 1;
        return true;
      }
      return false;
    }
    for (int j = start; j <= nb - remaining; ++j) {
      flips.push_back(j);
      if (rec(j + 1, remaining - 1)) return true;
      flips.pop_back();
      if (tried > cap) return false;
    }
    return false;
  };
  for (int w = 0; w <= std::min(nb, 4); ++w) {
    flips.clear();
    if (rec(0, w)) return true;
    if (tried > cap) return false;
  }
  return false;
}

}  // namespace

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::BB84: return "bb84";
    case Protocol::SixState: return "six-state";
    case Protocol::B92: return "b92";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "bb84") return Protocol::BB84;
  if (name == "six-state" || name == "six_state") return Protocol::SixState;
  if (name == "b92") return Protocol::B92;
  throw std::invalid_argument("unknown protocol: " + name);
}

AttackModel AttackModel::bell_diagonal(const std::array<double, 4>& lambdas) {
  AttackModel m;
  m.kind = Kind::BellDiagonal;
  m.lambdas = lambdas;
  m.validate();
  return m;
}

AttackModel AttackModel::depolarizing(double p) {
  AttackModel m;
  m.kind = Kind::Depolarizing;
  m.depol_p = p;
  m.validate();
  return m;
}

AttackModel AttackModel::b92_unitary(double alpha, double delta) {
  AttackModel m;
  m.kind = Kind::B92Unitary;
  m.b92_alpha = alpha;
  m.b92_delta = delta;
  m.validate();
  return m;
}

std::array<double, 4> AttackModel::effective_lambdas() const {
  if (kind == Kind::Depolarizing) {
    double e = depol_p / 2.0;  // induced symmetric error rate
    return {1.0 - 1.5 * e, e / 2.0, e / 2.0, e / 2.0};
  }
  return lambdas;
}

void AttackModel::validate() const {
  switch (kind) {
    case Kind::BellDiagonal: {
      double sum = 0.0;
      for (double l : lambdas) {
        if (l < -ci::kSimplexTol)
          throw std::invalid_argument("AttackModel: negative eigenvalue");
        sum += l;
      }
      if (std::abs(sum - 1.0) > ci::kSimplexTol)
        throw std::invalid_argument("AttackModel: eigenvalues must sum to 1");
      break;
    }
    case Kind::Depolarizing:
      if (depol_p < 0.0 || depol_p > 1.0)
        throw std::invalid_argument("AttackModel: depolarizing p outside [0,1]");
      break;
    case Kind::B92Unitary: {
      if (b92_alpha <= 0.0 || b92_alpha >= 1.0 / std::sqrt(2.0))
        throw std::invalid_argument("AttackModel: alpha outside (0, 1/sqrt 2)");
      if (b92_delta < 0.0 || b92_delta > 1.0 / 6.0)
        throw std::invalid_argument("AttackModel: delta outside [0, 1/6]");
      // the dilation realizes the interaction unitarily: <u+|u-> = <Psi+|Psi->
      qc::DensityOperator p0 = attack_state(*this, Protocol::B92, 0);
      (void)p0;
      break;
    }
  }
}

double ProtocolConfig::p() const {
  if (sampling_p) return *sampling_p;
  return std::pow(double(n), -sampling_alpha);
}

void ProtocolConfig::validate() const {
  if (n < 4) throw std::invalid_argument("ProtocolConfig: n must be >= 4");
  double pp = p();
  if (pp <= 0.0 || pp >= 1.0)
    throw std::invalid_argument("ProtocolConfig: p must lie in (0,1)");
  if (exact_eve && n > 6)
    throw std::invalid_argument("ProtocolConfig: exact-Eve mode requires n <= 6");
  attack.validate();
  if (protocol == Protocol::B92 && attack.kind != AttackModel::Kind::B92Unitary)
    throw std::invalid_argument("ProtocolConfig: B92 needs a b92_unitary attack");
  if (protocol != Protocol::B92 && attack.kind == AttackModel::Kind::B92Unitary)
    throw std::invalid_argument(
        "ProtocolConfig: b92_unitary attack is B92-only");
}

void Transcript::validate() const {
  if (s != t - r - u) throw std::logic_error("Transcript: s != t - r - u");
  if (protocol != Protocol::B92) {
    auto su = rk::unite(sel_s, rk::unite(sel_t, sel_tprime));
    if (!aborted && n_prime != n - su.size())
      throw std::logic_error("Transcript: n' != n - |S u T u T'|");
  }
  if (!aborted && (key_a.size() != static_cast<std::size_t>(s_prime) ||
                   key_b.size() != static_cast<std::size_t>(s_prime)))
    throw std::logic_error("Transcript: key length != s'");
}

qc::DensityOperator attack_state(const AttackModel& model, Protocol protocol,
                                 int b92_bit) {
  if (protocol == Protocol::B92) {
    if (model.kind != AttackModel::Kind::B92Unitary)
      throw std::invalid_argument("attack_state: B92 needs b92_unitary");
    // unitary dilation of depolarizing(p = 3 delta / 2) on the signal
    auto op = qc::QuantumOperation::depolarizing_qubit(1.5 * model.b92_delta);
    qc::Vector u = b92_signal(model.b92_alpha, b92_bit);
    qc::Vector psi = qc::Vector::Zero(2 * static_cast<Eigen::Index>(op.kraus.size()));
    for (std::size_t k = 0; k < op.kraus.size(); ++k) {
      qc::Vector env = qc::Vector::Zero(static_cast<Eigen::Index>(op.kraus.size()));
      env(static_cast<Eigen::Index>(k)) = 1.0;
      psi += qc::kron_vec(op.kraus[k] * u, env);
    }
    return qc::DensityOperator::pure(psi);
  }
  return qc::bell_diagonal_state(model.effective_lambdas());
}

void sample_measurements(const ProtocolConfig& config, Transcript& tr) {
  if (config.protocol == Protocol::B92)
    sample_b92(config, tr);
  else
    sample_bell_common(config, tr, false);
}

void sample_measurements_povm(const ProtocolConfig& config, Transcript& tr) {
  if (config.protocol == Protocol::B92)
    sample_b92(config, tr);
  else
    sample_bell_common(config, tr, true);
}

void estimate_parameters(const ProtocolConfig& config, Transcript& tr) {
  if (config.protocol == Protocol::B92)
    estimate_b92(config, tr);
  else
    estimate_bell(config, tr);
}

ReconcileResult reconcile(const randkit::Bits& x_prime,
                          const randkit::Bits& y_prime, double qber_est,
                          std::uint64_t seed) {
  if (x_prime.size() != y_prime.size())
    throw std::invalid_argument("reconcile: length mismatch");
  ReconcileResult res;
  const std::size_t np = x_prime.size();
  if (np == 0) {
    res.success = true;
    return res;
  }
  const bool single = np <= 24;
  const std::size_t block = single ? np : 16;
  // blockwise slack sized so that a same-weight syndrome collision (a wrong
  // decode) is rare across ~n'/16 blocks; tiny single-block runs keep the
  // syndrome short so a nonempty key range remains
  const int slack = single ? 1 : 8;
  double q = std::clamp(qber_est, 0.0, 0.499);
  double h = ci::binary_entropy(q);
  res.x_bar.clear();
  for (std::size_t off = 0, bidx = 0; off < np; off += block, ++bidx) {
    const std::size_t nb = std::min(block, np - off);
    int out = std::min<int>(static_cast<int>(nb),
                            static_cast<int>(std::ceil(double(nb) * h)) + slack);
    out = std::max(out, 1);
    auto stream = rk::Stream(rk::derive_seed(seed, "ir hash", bidx));
    auto hash = rk::ToeplitzHash::random(static_cast<int>(nb), out, stream);
    rk::Bits xb(x_prime.begin() + static_cast<long>(off),
                x_prime.begin() + static_cast<long>(off + nb));
    rk::Bits yb(y_prime.begin() + static_cast<long>(off),
                y_prime.begin() + static_cast<long>(off + nb));
    rk::Bits syn = hash.apply(xb);
    rk::Bits xbar_b;
    if (!decode_block(hash, yb, syn, xbar_b)) {
      res.infeasible = true;
      return res;
    }
    res.syndrome.insert(res.syndrome.end(), syn.begin(), syn.end());
    res.hash_hex.push_back(hash.diag_hex());
    res.block_out.push_back(out);
    res.x_bar.insert(res.x_bar.end(), xbar_b.begin(), xbar_b.end());
    res.r_prime += out;
  }
  res.success = res.x_bar == x_prime;
  return res;
}

randkit::Bits amplify(const randkit::Bits& bits, long long s_prime,
                      std::uint64_t seed) {
  if (s_prime < 0) throw std::invalid_argument("amplify: negative s'");
  if (s_prime == 0) return {};
  if (static_cast<std::size_t>(s_prime) > bits.size())
    throw std::invalid_argument("amplify: s' exceeds input length");
  auto perm = rk::SeededPermutation::generate(
      bits.size(), rk::derive_seed(seed, "permutation P"));
  auto stream = rk::Stream(rk::derive_seed(seed, "hash G"));
  auto hash = rk::ToeplitzHash::random(static_cast<int>(bits.size()),
                                       static_cast<int>(s_prime), stream);
  return hash.apply(perm.apply(bits));
}

Transcript run_protocol(const ProtocolConfig& config) {
  config.validate();
  Transcript tr;
  tr.protocol = config.protocol;
  tr.n = config.n;
  tr.p = config.p();
  tr.seed = config.seed;
  tr.attack_lambdas = config.attack.effective_lambdas();
  tr.eve.exact = config.exact_eve;

  if (config.protocol == Protocol::B92) {
    sample_measurements(config, tr);
    std::vector<bool> ground(tr.conclusive.begin(), tr.conclusive.end());
    tr.sel_s = rk::PRandomSelection::generate_on(
                   tr.p, config.n, ground,
                   rk::derive_seed(config.seed, "selection S"))
                   .included;
    tr.announced = tr.sel_s;
  } else {
    fill_selections(config, tr);
    std::vector<bool> ground(config.n, true);
    for (auto i : tr.sel_t) ground[i] = false;
    tr.sel_s = rk::PRandomSelection::generate_on(
                   tr.p, config.n, ground,
                   rk::derive_seed(config.seed, "selection S"))
                   .included;
    sample_measurements(config, tr);
    tr.announced = rk::unite(tr.sel_s, tr.sel_t);
  }

  estimate_parameters(config, tr);
  if (tr.aborted) return tr;

  // sift
  if (config.protocol == Protocol::B92) {
    std::vector<bool> drop(config.n, false);
    for (auto i : tr.sel_s) drop[i] = true;
    for (std::size_t i = 0; i < config.n; ++i)
      if (tr.conclusive[i] && !drop[i]) tr.sifted.push_back(i);
  } else {
    auto su = rk::unite(tr.sel_s, rk::unite(tr.sel_t, tr.sel_tprime));
    tr.sifted = rk::complement(su, config.n);
  }
  tr.n_prime = tr.sifted.size();
  for (auto i : tr.sifted) {
    tr.x_sifted.push_back(tr.x[i]);
    tr.y_sifted.push_back(tr.y[i]);
  }

  // key length: s scales with the length its box formulas used
  long long scale = config.protocol == Protocol::B92
                        ? std::max<long long>(static_cast<long long>(tr.n_prime), 1)
                        : static_cast<long long>(config.n);
  if (config.force_s_prime)
    tr.s_prime = std::min<long long>(*config.force_s_prime,
                                     static_cast<long long>(tr.n_prime));
  else
    tr.s_prime = static_cast<long long>(tr.n_prime) * tr.s / scale;
  if (tr.s_prime <= 0 && !config.force_s_prime) {
    tr.aborted = true;
    tr.abort_reason = "no extractable key";
    return tr;
  }

  // reconciliation; the syndrome is sized with a floor on the estimated
  // error rate so an optimistic small-sample estimate cannot starve it
  // (tiny-n forced runs keep the raw estimate to preserve a key range)
  double q_ir = config.force_s_prime ? tr.qber1 : std::max(tr.qber1, 0.05);
  auto rec = reconcile(tr.x_sifted, tr.y_sifted, q_ir,
                       rk::derive_seed(config.seed, "reconcile"));
  if (rec.infeasible) {
    tr.aborted = true;
    tr.abort_reason = "reconciliation infeasible";
    return tr;
  }
  tr.x_reconciled = rec.x_bar;
  tr.syndrome = rec.syndrome;
  tr.ir_hash_hex = rec.hash_hex;
  tr.ir_block_out = rec.block_out;
  tr.r_prime = rec.r_prime;
  tr.reconcile_success = rec.success;

  // confirmation hash; mismatch is a detected failure, not a key mismatch
  if (tr.n_prime > 0) {
    int cb = static_cast<int>(std::min<std::size_t>(32, tr.n_prime));
    auto cstream = rk::Stream(rk::derive_seed(config.seed, "check hash"));
    auto chash = rk::ToeplitzHash::random(static_cast<int>(tr.n_prime), cb, cstream);
    tr.check_hash_hex = chash.diag_hex();
    if (chash.apply(tr.x_sifted) != chash.apply(tr.x_reconciled)) {
      tr.aborted = true;
      tr.abort_reason = "reconciliation failed";
      return tr;
    }
  }

  // privacy amplification: both parties permute, then hash
  std::uint64_t pa_seed = rk::derive_seed(config.seed, "pa");
  tr.key_a = amplify(tr.x_sifted, tr.s_prime, pa_seed);
  tr.key_b = amplify(tr.x_reconciled, tr.s_prime, pa_seed);
  if (tr.s_prime > 0) {
    tr.pa_perm = rk::SeededPermutation::generate(
                     tr.n_prime, rk::derive_seed(pa_seed, "permutation P"))
                     .perm;
    auto gstream = rk::Stream(rk::derive_seed(pa_seed, "hash G"));
    tr.pa_hash_hex = rk::ToeplitzHash::random(static_cast<int>(tr.n_prime),
                                              static_cast<int>(tr.s_prime),
                                              gstream)
                         .diag_hex();
  }
  tr.validate();
  return tr;
}

double eve_distance_exact(const Transcript& tr, const AttackModel& attack) {
  if (attack.kind == AttackModel::Kind::B92Unitary)
    throw std::invalid_argument("eve_distance_exact: Bell-diagonal attacks only");
  if (tr.n > 6)
    throw std::invalid_argument("eve_distance_exact: n must be <= 6");
  if (tr.aborted || tr.s_prime <= 0) return 0.0;
  const std::size_t np = tr.n_prime;
  if (np > 6) throw std::invalid_argument("eve_distance_exact: dimension cap");

  const auto lambdas = attack.effective_lambdas();
  const auto& bells = qc::bell_basis();

  // Eve's conditional operator per key bit value: sigma(x) = 2 sum_y w w^dag
  // with w(x,y)_k = sqrt(lambda_k) <x y|bell_k> (both parties in basis 1).
  std::array<qc::Matrix, 2> sigma;
  for (int x = 0; x < 2; ++x) {
    qc::Matrix m = qc::Matrix::Zero(4, 4);
    for (int y = 0; y < 2; ++y) {
      qc::Vector w(4);
      for (int k = 0; k < 4; ++k)
        w(k) = std::sqrt(lambdas[static_cast<std::size_t>(k)]) *
               std::conj(bells[static_cast<std::size_t>(k)](2 * x + y));
      m += 2.0 * (w * w.adjoint());
    }
    sigma[static_cast<std::size_t>(x)] = m;
  }

  // rebuild the announced linear maps
  std::vector<rk::ToeplitzHash> ir;
  {
    const bool single = np <= 24;
    const std::size_t block = single ? np : 16;
    std::size_t off = 0;
    for (std::size_t b = 0; b < tr.ir_hash_hex.size(); ++b) {
      int nb = static_cast<int>(std::min(block, np - off));
      int out = tr.ir_block_out[b];
      ir.push_back(rk::ToeplitzHash::from_diag(
          nb, out,
          rk::ToeplitzHash::diag_from_hex(nb + out - 1, tr.ir_hash_hex[b])));
      off += static_cast<std::size_t>(nb);
    }
  }
  rk::SeededPermutation perm;
  perm.n = np;
  perm.perm = tr.pa_perm;
  auto pa_hash = rk::ToeplitzHash::from_diag(
      static_cast<int>(np), static_cast<int>(tr.s_prime),
      rk::ToeplitzHash::diag_from_hex(
          static_cast<int>(np + static_cast<std::size_t>(tr.s_prime)) - 1,
          tr.pa_hash_hex));

  auto syndrome_index = [&](const rk::Bits& xp) {
    std::size_t idx = 0, off = 0;
    for (const auto& h : ir) {
      rk::Bits blockbits(xp.begin() + static_cast<long>(off),
                         xp.begin() + static_cast<long>(off) + h.n_in);
      for (auto b : h.apply(blockbits)) idx = (idx << 1) | b;
      off += static_cast<std::size_t>(h.n_in);
    }
    return idx;
  };
  auto key_index = [&](const rk::Bits& xp) {
    std::size_t idx = 0;
    for (auto b : pa_hash.apply(perm.apply(xp))) idx = (idx << 1) | b;
    return idx;
  };

  const std::size_t dim = static_cast<std::size_t>(std::pow(4.0, double(np)));
  const std::size_t n_syn = static_cast<std::size_t>(1)
                            << static_cast<std::size_t>(tr.r_prime);
  const std::size_t n_key = static_cast<std::size_t>(1)
                            << static_cast<std::size_t>(tr.s_prime);
  // unnormalized accumulators rho[c][s], each weighted by 2^-n'
  std::vector<std::vector<qc::Matrix>> acc(
      n_syn, std::vector<qc::Matrix>(
                 n_key, qc::Matrix::Zero(static_cast<Eigen::Index>(dim),
                                         static_cast<Eigen::Index>(dim))));
  const double w = std::pow(0.5, double(np));
  for (std::size_t v = 0; v < (static_cast<std::size_t>(1) << np); ++v) {
    rk::Bits xp(np);
    for (std::size_t i = 0; i < np; ++i) xp[i] = (v >> (np - 1 - i)) & 1;
    qc::Matrix rho = qc::Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < np; ++i) rho = qc::kron(rho, sigma[xp[i]]);
    acc[syndrome_index(xp)][key_index(xp)] += w * rho;
  }
  double d = 0.0;
  for (std::size_t c = 0; c < n_syn; ++c) {
    qc::Matrix total = qc::Matrix::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < n_key; ++s) total += acc[c][s];
    for (std::size_t s = 0; s < n_key; ++s) {
      qc::Matrix diff = acc[c][s] - total / double(n_key);
      Eigen::SelfAdjointEigenSolver<qc::Matrix> es(
          (diff + diff.adjoint()) / 2.0);
      d += 0.5 * es.eigenvalues().cwiseAbs().sum();
    }
  }
  return d;
}

}  // namespace qkdtk::engine
