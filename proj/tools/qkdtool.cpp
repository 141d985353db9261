// qkdtool: batch frontend for rates, thresholds, simulations, entropy
// utilities, and the bound-verification suites.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkdtk/analyzers.hpp"
#include "qkdtk/bounds.hpp"
#include "qkdtk/cinfo.hpp"
#include "qkdtk/engine.hpp"
#include "qkdtk/json_io.hpp"
#include "qkdtk/mc.hpp"
#include "qkdtk/randkit.hpp"

namespace ci = qkdtk::cinfo;
namespace qc = qkdtk::qcore;
namespace rk = qkdtk::randkit;
namespace an = qkdtk::analyzers;
namespace bd = qkdtk::bounds;
namespace en = qkdtk::engine;
namespace jio = qkdtk::json_io;
using jio::json;

namespace {

struct Output {
  std::string format = "table";
  std::string path;

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
  }
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "a:b:c" sweep or a single value; inclusive endpoints within step/2
std::vector<double> parse_sweep(const std::string& text) {
  auto first = text.find(':');
  if (first == std::string::npos) return {std::stod(text)};
  auto second = text.find(':', first + 1);
  if (second == std::string::npos)
    throw std::invalid_argument("sweep must be start:stop:step");
  double start = std::stod(text.substr(0, first));
  double stop = std::stod(text.substr(first + 1, second - first - 1));
  double step = std::stod(text.substr(second + 1));
  if (step <= 0.0) throw std::invalid_argument("sweep step must be > 0");
  std::vector<double> vals;
  for (double v = start; v <= stop + step / 2.0; v += step) vals.push_back(v);
  return vals;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QKDTK_SEED")) return rk::parse_seed(env);
  return 0;
}

std::string render_rates(const std::vector<an::RateReport>& reports,
                         const Output& out) {
  if (out.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(jio::to_json(r));
    return (reports.size() == 1 ? jio::to_json(reports[0]) : arr).dump(2) +
           "\n";
  }
  std::ostringstream os;
  if (out.format == "csv") {
    os << "protocol,noise,conditioned,rate\n";
    for (const auto& r : reports)
      os << r.protocol << ',' << fmt6(r.noise) << ','
         << (r.conditioned ? 1 : 0) << ',' << fmt6(r.rate) << '\n';
    return os.str();
  }
  os << "protocol    noise       conditioned rate\n";
  for (const auto& r : reports)
    os << r.protocol << std::string(12 - std::min<std::size_t>(11, r.protocol.size()), ' ')
       << fmt6(r.noise) << "  " << (r.conditioned ? "yes" : "no ") << "        "
       << fmt6(r.rate) << '\n';
  return os.str();
}

int cmd_rate(const std::string& protocol, const std::string& qber,
             const std::string& depol, double alpha, bool conditioned,
             const Output& out) {
  std::vector<an::RateReport> reports;
  if (protocol == "b92") {
    for (double p : parse_sweep(depol.empty() ? qber : depol))
      reports.push_back(an::b92_rate_depolarizing(p, alpha));
  } else {
    for (double e : parse_sweep(qber)) {
      reports.push_back(protocol == "bb84" ? an::bb84_rate(e, conditioned)
                                           : an::six_state_rate(e, conditioned));
    }
  }
  out.emit(render_rates(reports, out));
  return 0;
}

int cmd_threshold(const std::string& protocol, bool conditioned,
                  const Output& out) {
  auto rep = an::threshold(protocol, conditioned);
  if (out.format == "json") {
    out.emit(jio::to_json(rep).dump(2) + "\n");
  } else if (out.format == "csv") {
    std::ostringstream os;
    os << "protocol,conditioned,threshold,alpha_star,tol\n"
       << rep.protocol << ',' << (rep.conditioned ? 1 : 0) << ','
       << fmt6(rep.threshold) << ','
       << (rep.alpha_star ? fmt6(*rep.alpha_star) : "") << ',' << fmt6(rep.tol)
       << '\n';
    out.emit(os.str());
  } else {
    std::ostringstream os;
    os << rep.protocol << (rep.conditioned ? " (conditioned)" : "")
       << " threshold = " << fmt6(rep.threshold);
    if (rep.alpha_star) os << " at alpha = " << fmt6(*rep.alpha_star);
    os << "  (tol " << fmt6(rep.tol) << ", root of " << rep.equation << ")\n";
    out.emit(os.str());
  }
  return 0;
}

int cmd_simulate(const en::ProtocolConfig& config, const Output& out) {
  auto tr = en::run_protocol(config);
  if (out.format == "json") {
    out.emit(jio::to_json(tr).dump(2) + "\n");
  } else {
    std::ostringstream os;
    if (out.format == "csv") {
      os << "protocol,n,seed,n_prime,r_prime,s_prime,aborted,abort_reason\n"
         << en::protocol_name(tr.protocol) << ',' << tr.n << ',' << tr.seed
         << ',' << tr.n_prime << ',' << tr.r_prime << ',' << tr.s_prime << ','
         << (tr.aborted ? 1 : 0) << ',' << tr.abort_reason << '\n';
    } else {
      os << en::protocol_name(tr.protocol) << " n=" << tr.n
         << " seed=" << tr.seed << ": n'=" << tr.n_prime
         << " r'=" << tr.r_prime << " s'=" << tr.s_prime << ' '
         << (tr.aborted ? "ABORT (" + tr.abort_reason + ")" : "ok") << '\n';
    }
    out.emit(os.str());
  }
  return 0;
}

// ------------------------------------------------------------------ verify

void verify_hashing(std::vector<bd::BoundReport>& reports) {
  bd::BoundReport r;
  r.lemma = "two-universal";
  r.note = "exhaustive collision probability equals 2^-n_out";
  r.satisfied = true;
  double worst = 0.0;
  for (int n_in = 1; n_in <= 10; ++n_in)
    for (int n_out = 1; n_out <= n_in; ++n_out) {
      double got = rk::collision_probability_exhaustive(n_in, n_out);
      double want = std::ldexp(1.0, -n_out);
      worst = std::max(worst, std::abs(got - want));
      if (got != want) r.satisfied = false;
    }
  r.bound = 0.0;
  r.raw = worst;
  r.empirical = worst;
  reports.push_back(r);
}

void verify_lemmas(std::vector<bd::BoundReport>& reports, std::size_t trials,
                   std::uint64_t seed) {
  // frequency sampling at two block lengths
  for (std::size_t n : {std::size_t{100}, std::size_t{1000}}) {
    const double eps = 0.1;
    ci::ProbDist p({"0", "1", "2"}, {0.5, 0.3, 0.2});
    auto hits = qkdtk::mc::count_successes(
        trials, seed, "verify freq", [&](std::size_t, rk::Stream& s) {
          std::vector<double> counts(3, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            double v = s.next_double();
            counts[v < 0.5 ? 0 : v < 0.8 ? 1 : 2] += 1.0;
          }
          double dist = 0.0;
          for (int z = 0; z < 3; ++z)
            dist += std::abs(counts[static_cast<std::size_t>(z)] / double(n) -
                             p.probs[static_cast<std::size_t>(z)]);
          return dist / 2.0 > eps;
        });
    auto rep = bd::freq_sampling_bound(3, n, eps);
    rep.empirical = double(hits) / double(trials);
    rep.satisfied = *rep.empirical <= rep.bound;
    reports.push_back(rep);
  }
  // two-POVM tomography on the BB84 measurement pair, Bell-diagonal state
  {
    const std::size_t n = 512;
    const double eps = 0.35;
    const std::array<double, 4> lambdas{0.85, 0.05, 0.05, 0.05};
    qc::DensityOperator rho = qc::bell_diagonal_state(lambdas);
    std::array<std::vector<double>, 2> truth;
    for (int b = 1; b <= 2; ++b) {
      qc::Matrix u = qc::qubit_basis(b);
      for (int xa = 0; xa < 2; ++xa)
        for (int yb = 0; yb < 2; ++yb) {
          qc::Vector v = qc::kron_vec(u.col(xa), u.col(yb));
          truth[static_cast<std::size_t>(b - 1)].push_back(
              std::real((v.adjoint() * rho.mat * v)(0, 0)));
        }
    }
    auto hits = qkdtk::mc::count_successes(
        trials, seed, "verify quanttom", [&](std::size_t, rk::Stream& s) {
          for (const auto& pz : truth) {
            std::vector<double> counts(4, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
              double v = s.next_double(), acc = 0.0;
              std::size_t out = 3;
              for (std::size_t z = 0; z < 4; ++z) {
                acc += pz[z];
                if (v < acc) {
                  out = z;
                  break;
                }
              }
              counts[out] += 1.0;
            }
            double dist = 0.0;
            for (std::size_t z = 0; z < 4; ++z)
              dist += std::abs(counts[z] / double(n) - pz[z]);
            if (dist / 2.0 > eps) return true;
          }
          return false;
        });
    auto rep = bd::quanttom_bound(4, 4, n, eps);
    rep.empirical = double(hits) / double(trials);
    rep.satisfied = *rep.empirical <= rep.bound;
    reports.push_back(rep);
  }
}

void verify_smooth(std::vector<bd::BoundReport>& reports, std::size_t trials,
                   std::uint64_t seed) {
  bd::BoundReport r;
  r.lemma = "smooth-entropy";
  r.note = "order/monotonicity properties of the smoothed entropies";
  r.satisfied = true;
  rk::Stream s(rk::derive_seed(seed, "verify smooth"));
  double worst = 0.0;
  for (std::size_t t = 0; t < std::max<std::size_t>(trials, 1); ++t) {
    std::size_t q = 2 + s.below(2);
    std::vector<double> probs(q);
    double sum = 0.0;
    for (auto& v : probs) sum += (v = -std::log(1.0 - s.next_double()));
    for (auto& v : probs) v /= sum;
    std::vector<std::string> alpha;
    for (std::size_t i = 0; i < q; ++i) alpha.push_back(std::to_string(i));
    ci::ProbDist p(alpha, probs);
    double e1 = 0.05, e2 = 0.15;
    double hi0 = ci::smooth_renyi(p, ci::kAlphaInf, ci::SmoothingParam(0.0));
    double hi1 = ci::smooth_renyi(p, ci::kAlphaInf, ci::SmoothingParam(e1));
    double hi2 = ci::smooth_renyi(p, ci::kAlphaInf, ci::SmoothingParam(e2));
    double h00 = ci::smooth_renyi(p, 0.0, ci::SmoothingParam(0.0));
    double h01 = ci::smooth_renyi(p, 0.0, ci::SmoothingParam(e1));
    double h02 = ci::smooth_renyi(p, 0.0, ci::SmoothingParam(e2));
    // smoothing raises H_inf toward log q and lowers H_0
    worst = std::max({worst, hi0 - hi1, hi1 - hi2, h01 - h00, h02 - h01,
                      hi2 - std::log2(double(q)), -h02});
    if (worst > 1e-9) r.satisfied = false;
  }
  r.raw = worst;
  r.empirical = worst;
  r.bound = 1e-9;
  reports.push_back(r);
}

void verify_pa(std::vector<bd::BoundReport>& reports, std::uint64_t seed) {
  en::ProtocolConfig config;
  config.protocol = en::Protocol::BB84;
  config.n = 4;
  config.sampling_p = 0.02;
  config.attack = en::AttackModel::bell_diagonal({0.85, 0.05, 0.05, 0.05});
  config.seed = seed;
  config.exact_eve = true;
  config.force_s_prime = 1;
  auto tr = en::run_protocol(config);
  double d = en::eve_distance_exact(tr, config.attack);
  auto rep = bd::pa_distance_bound(double(tr.n_prime) - double(tr.r_prime),
                                   0.0, double(tr.s_prime), config.eps,
                                   config.eps_prime);
  rep.empirical = d;
  rep.satisfied = d <= rep.bound + 1e-12;
  rep.note = "exact Eve non-uniformity at n=4 vs the clamped distance bound";
  reports.push_back(rep);
}

int cmd_verify(const std::string& suite, std::size_t trials,
               std::uint64_t seed, const Output& out) {
  std::vector<bd::BoundReport> reports;
  if (suite == "hashing" || suite == "all") verify_hashing(reports);
  if (suite == "lemmas" || suite == "all")
    verify_lemmas(reports, std::max<std::size_t>(trials, 100), seed);
  if (suite == "smooth" || suite == "all")
    verify_smooth(reports, std::max<std::size_t>(trials, 100), seed);
  if (suite == "pa" || suite == "all") verify_pa(reports, seed);

  bool ok = true;
  json arr = json::array();
  for (const auto& r : reports) {
    ok = ok && r.satisfied;
    arr.push_back(jio::to_json(r));
  }
  if (out.format == "json") {
    out.emit(arr.dump(2) + "\n");
  } else {
    std::ostringstream os;
    for (const auto& r : reports)
      os << (r.satisfied ? "pass  " : "FAIL  ") << r.lemma
         << "  bound=" << fmt6(r.bound)
         << (r.empirical ? "  empirical=" + fmt6(*r.empirical) : "") << '\n';
    out.emit(os.str());
  }
  return ok ? 0 : 1;
}

int cmd_entropy(const std::string& input, const std::string& alpha_text,
                double eps, const Output& out) {
  std::ifstream f(input);
  if (!f) throw CLI::ValidationError("--input", "cannot open " + input);
  json j = json::parse(f);
  double alpha = alpha_text == "inf" ? ci::kAlphaInf : std::stod(alpha_text);
  double value;
  if (j.contains("probs")) {
    auto p = jio::prob_dist_from_json(j);
    value = ci::smooth_renyi(p, alpha, ci::SmoothingParam(eps));
  } else {
    auto rho = jio::density_from_json(j);
    value = qc::q_entropy(rho, alpha == ci::kAlphaInf ? ci::kAlphaInf : alpha,
                          ci::SmoothingParam(eps));
  }
  if (out.format == "json") {
    out.emit(json{{"entropy", value}}.dump(2) + "\n");
  } else {
    out.emit(fmt6(value) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-key-distribution security toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Output out;
  std::string seed_text;
  app.add_option("--format", out.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--out", out.path, "output path (default: stdout)");
  app.add_option("--seed", seed_text, "seed, decimal or 0x-hex");

  // rate
  auto* rate = app.add_subcommand("rate", "key rate for a protocol");
  std::string protocol, qber = "0", depol;
  double alpha = 0.38;
  bool conditioned = false;
  rate->add_option("--protocol", protocol)->required()
      ->check(CLI::IsMember({"bb84", "six-state", "b92"}));
  rate->add_option("--qber", qber, "error rate, value or start:stop:step");
  rate->add_option("--depol", depol, "depolarizing p (b92), value or sweep");
  rate->add_option("--alpha", alpha, "b92 signal overlap parameter");
  rate->add_flag("--conditioned", conditioned,
                 "condition on the announced error string");

  // threshold
  auto* thr = app.add_subcommand("threshold", "noise threshold");
  std::string thr_protocol;
  bool thr_conditioned = false;
  thr->add_option("--protocol", thr_protocol)->required()
      ->check(CLI::IsMember({"bb84", "six-state", "b92"}));
  thr->add_flag("--conditioned", thr_conditioned);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the protocol end to end");
  std::string sim_protocol = "bb84", lambdas_text;
  double sim_depol = -1.0, b92_alpha = 0.38, b92_delta = 0.0, sampling_p = -1.0;
  std::size_t sim_n = 256;
  bool exact_eve = false;
  long long force_s_prime = -1;
  sim->add_option("--protocol", sim_protocol)
      ->check(CLI::IsMember({"bb84", "six-state", "b92"}));
  sim->add_option("--n", sim_n, "number of transmitted systems");
  sim->add_option("--lambdas", lambdas_text, "Bell-diagonal l1,l2,l3,l4");
  sim->add_option("--depol", sim_depol, "depolarizing attack parameter");
  sim->add_option("--b92-alpha", b92_alpha);
  sim->add_option("--b92-delta", b92_delta);
  sim->add_option("--sampling-p", sampling_p, "estimation sampling probability");
  sim->add_flag("--exact-eve", exact_eve, "track Eve exactly (n <= 6)");
  sim->add_option("--force-s-prime", force_s_prime, "fixed key length (tiny n)");

  // verify
  auto* ver = app.add_subcommand("verify", "bound verification suites");
  std::string suite = "all";
  std::size_t trials = 10000;
  ver->add_option("--suite", suite)
      ->check(CLI::IsMember({"lemmas", "hashing", "smooth", "pa", "all"}));
  ver->add_option("--trials", trials);

  // entropy
  auto* ent = app.add_subcommand("entropy", "(smooth) Renyi entropy of an input");
  std::string ent_input, ent_alpha = "1";
  double ent_eps = 0.0;
  ent->add_option("--input", ent_input, "JSON distribution or density operator")
      ->required();
  ent->add_option("--alpha", ent_alpha, "order (number or 'inf')");
  ent->add_option("--eps", ent_eps, "smoothing radius");

  CLI11_PARSE(app, argc, argv);

  try {
    std::uint64_t seed =
        seed_text.empty() ? default_seed() : rk::parse_seed(seed_text);
    if (rate->parsed())
      return cmd_rate(protocol, qber, depol, alpha, conditioned, out);
    if (thr->parsed()) return cmd_threshold(thr_protocol, thr_conditioned, out);
    if (sim->parsed()) {
      en::ProtocolConfig config;
      config.protocol = en::protocol_from_name(sim_protocol);
      config.n = sim_n;
      config.seed = seed;
      if (sampling_p > 0.0) config.sampling_p = sampling_p;
      config.exact_eve = exact_eve;
      if (force_s_prime >= 0) config.force_s_prime = force_s_prime;
      if (config.protocol == en::Protocol::B92) {
        config.attack = en::AttackModel::b92_unitary(b92_alpha, b92_delta);
      } else if (!lambdas_text.empty()) {
        std::array<double, 4> l{};
        std::stringstream ss(lambdas_text);
        std::string tok;
        for (auto& v : l) {
          if (!std::getline(ss, tok, ','))
            throw CLI::ValidationError("--lambdas", "need four values");
          v = std::stod(tok);
        }
        config.attack = en::AttackModel::bell_diagonal(l);
      } else if (sim_depol >= 0.0) {
        config.attack = en::AttackModel::depolarizing(sim_depol);
      } else {
        config.attack = en::AttackModel::bell_diagonal({1.0, 0.0, 0.0, 0.0});
      }
      return cmd_simulate(config, out);
    }
    if (ver->parsed()) return cmd_verify(suite, trials, seed, out);
    if (ent->parsed()) return cmd_entropy(ent_input, ent_alpha, ent_eps, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
