#include "qkdtk/json_io.hpp"

#include <stdexcept>

namespace qkdtk::json_io {

std::string bits_to_string(const randkit::Bits& b) {
  std::string s;
  s.reserve(b.size());
  for (auto v : b) s.push_back(v ? '1' : '0');
  return s;
}

randkit::Bits bits_from_string(const std::string& s) {
  randkit::Bits b;
  b.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bits_from_string: expected 0/1 string");
    b.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return b;
}

json to_json(const cinfo::ProbDist& p) {
  return json{{"alphabet", p.alphabet}, {"probs", p.probs}};
}

cinfo::ProbDist prob_dist_from_json(const json& j) {
  cinfo::ProbDist p(j.at("alphabet").get<std::vector<std::string>>(),
                    j.at("probs").get<std::vector<double>>());
  p.validate();
  return p;
}

json to_json(const qcore::DensityOperator& rho) {
  const auto d = rho.dim();
  std::vector<std::vector<double>> re(static_cast<std::size_t>(d)),
      im(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) {
      re[static_cast<std::size_t>(i)].push_back(std::real(rho.mat(i, k)));
      im[static_cast<std::size_t>(i)].push_back(std::imag(rho.mat(i, k)));
    }
  return json{{"dim", d}, {"re", re}, {"im", im}};
}

qcore::DensityOperator density_from_json(const json& j) {
  const auto d = j.at("dim").get<Eigen::Index>();
  auto re = j.at("re").get<std::vector<std::vector<double>>>();
  auto im = j.at("im").get<std::vector<std::vector<double>>>();
  qcore::Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k)
      m(i, k) = {re.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)),
                 im.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k))};
  qcore::DensityOperator rho(m);
  rho.validate();
  return rho;
}

json to_json(const bounds::BoundReport& r) {
  json j{{"lemma", r.lemma},
         {"inputs", r.inputs},
         {"bound", r.bound},
         {"raw", r.raw},
         {"satisfied", r.satisfied}};
  if (r.empirical) j["empirical"] = *r.empirical;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const analyzers::RateReport& r) {
  json j{{"protocol", r.protocol},
         {"noise", r.noise},
         {"conditioned", r.conditioned},
         {"rate", r.rate}};
  if (r.b92) {
    const auto& c = *r.b92;
    j["chain"] = json{{"alpha", c.alpha},     {"delta", c.delta},
                      {"gamma", c.gamma},     {"eta", c.eta},
                      {"nu", c.nu},           {"e_overlap", c.e_overlap},
                      {"f_overlap", c.f_overlap}, {"x", c.x},
                      {"eps_cond", c.eps_cond},
                      {"accept_rate", c.accept_rate}};
  } else {
    j["lambdas"] = r.lambdas;
    j["lambda4"] = r.lambda4;
    j["adversary_entropy"] = r.adversary_entropy;
  }
  return j;
}

json to_json(const analyzers::ThresholdReport& r) {
  json j{{"protocol", r.protocol},
         {"conditioned", r.conditioned},
         {"threshold", r.threshold},
         {"tol", r.tol},
         {"equation", r.equation}};
  if (r.alpha_star) j["alpha_star"] = *r.alpha_star;
  return j;
}

json to_json(const engine::Transcript& t) {
  json j;
  j["schema"] = t.schema;
  j["protocol"] = engine::protocol_name(t.protocol);
  j["n"] = t.n;
  j["p"] = t.p;
  j["seed"] = t.seed;
  j["attack_lambdas"] = t.attack_lambdas;
  j["sel_t"] = t.sel_t;
  j["sel_tprime"] = t.sel_tprime;
  j["sel_s"] = t.sel_s;
  j["x"] = bits_to_string(t.x);
  j["y"] = bits_to_string(t.y);
  j["basis_a"] = t.basis_a;
  j["basis_b"] = t.basis_b;
  if (!t.conclusive.empty()) {
    std::string c;
    for (bool v : t.conclusive) c.push_back(v ? '1' : '0');
    j["conclusive"] = c;
  }
  j["announced"] = t.announced;
  j["qber"] = {t.qber1, t.qber2, t.qber3};
  j["h_x"] = t.h_x;
  j["h_x_given_y"] = t.h_x_given_y;
  j["worst_lambdas"] = t.worst_lambdas;
  j["worst_entropy"] = t.worst_entropy;
  j["r"] = t.r;
  j["t"] = t.t;
  j["u"] = t.u;
  j["s"] = t.s;
  j["sifted"] = t.sifted;
  j["x_sifted"] = bits_to_string(t.x_sifted);
  j["y_sifted"] = bits_to_string(t.y_sifted);
  j["x_reconciled"] = bits_to_string(t.x_reconciled);
  j["n_prime"] = t.n_prime;
  j["r_prime"] = t.r_prime;
  j["s_prime"] = t.s_prime;
  j["ir_hash_hex"] = t.ir_hash_hex;
  j["ir_block_out"] = t.ir_block_out;
  j["syndrome"] = bits_to_string(t.syndrome);
  j["check_hash_hex"] = t.check_hash_hex;
  j["pa_hash_hex"] = t.pa_hash_hex;
  j["pa_perm"] = t.pa_perm;
  j["key_a"] = bits_to_string(t.key_a);
  j["key_b"] = bits_to_string(t.key_b);
  j["aborted"] = t.aborted;
  j["abort_reason"] = t.abort_reason;
  j["reconcile_success"] = t.reconcile_success;
  j["eve_pauli_labels"] = t.eve.pauli_labels;
  j["eve_exact"] = t.eve.exact;
  return j;
}

engine::Transcript transcript_from_json(const json& j) {
  engine::Transcript t;
  t.schema = j.at("schema").get<int>();
  if (t.schema != 1)
    throw std::invalid_argument("transcript_from_json: unknown schema");
  t.protocol = engine::protocol_from_name(j.at("protocol").get<std::string>());
  t.n = j.at("n").get<std::size_t>();
  t.p = j.at("p").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.attack_lambdas = j.at("attack_lambdas").get<std::array<double, 4>>();
  t.sel_t = j.at("sel_t").get<std::vector<std::size_t>>();
  t.sel_tprime = j.at("sel_tprime").get<std::vector<std::size_t>>();
  t.sel_s = j.at("sel_s").get<std::vector<std::size_t>>();
  t.x = bits_from_string(j.at("x").get<std::string>());
  t.y = bits_from_string(j.at("y").get<std::string>());
  t.basis_a = j.at("basis_a").get<std::vector<int>>();
  t.basis_b = j.at("basis_b").get<std::vector<int>>();
  if (j.contains("conclusive")) {
    auto c = j.at("conclusive").get<std::string>();
    t.conclusive.assign(c.size(), false);
    for (std::size_t i = 0; i < c.size(); ++i) t.conclusive[i] = c[i] == '1';
  }
  t.announced = j.at("announced").get<std::vector<std::size_t>>();
  auto q = j.at("qber").get<std::array<double, 3>>();
  t.qber1 = q[0];
  t.qber2 = q[1];
  t.qber3 = q[2];
  t.h_x = j.at("h_x").get<double>();
  t.h_x_given_y = j.at("h_x_given_y").get<double>();
  t.worst_lambdas = j.at("worst_lambdas").get<std::array<double, 4>>();
  t.worst_entropy = j.at("worst_entropy").get<double>();
  t.r = j.at("r").get<long long>();
  t.t = j.at("t").get<long long>();
  t.u = j.at("u").get<long long>();
  t.s = j.at("s").get<long long>();
  t.sifted = j.at("sifted").get<std::vector<std::size_t>>();
  t.x_sifted = bits_from_string(j.at("x_sifted").get<std::string>());
  t.y_sifted = bits_from_string(j.at("y_sifted").get<std::string>());
  t.x_reconciled = bits_from_string(j.at("x_reconciled").get<std::string>());
  t.n_prime = j.at("n_prime").get<std::size_t>();
  t.r_prime = j.at("r_prime").get<long long>();
  t.s_prime = j.at("s_prime").get<long long>();
  t.ir_hash_hex = j.at("ir_hash_hex").get<std::vector<std::string>>();
  t.ir_block_out = j.at("ir_block_out").get<std::vector<int>>();
  t.syndrome = bits_from_string(j.at("syndrome").get<std::string>());
  t.check_hash_hex = j.at("check_hash_hex").get<std::string>();
  t.pa_hash_hex = j.at("pa_hash_hex").get<std::string>();
  t.pa_perm = j.at("pa_perm").get<std::vector<std::size_t>>();
  t.key_a = bits_from_string(j.at("key_a").get<std::string>());
  t.key_b = bits_from_string(j.at("key_b").get<std::string>());
  t.aborted = j.at("aborted").get<bool>();
  t.abort_reason = j.at("abort_reason").get<std::string>();
  t.reconcile_success = j.at("reconcile_success").get<bool>();
  t.eve.pauli_labels = j.at("eve_pauli_labels").get<std::vector<int>>();
  t.eve.exact = j.at("eve_exact").get<bool>();
  return t;
}

}  // namespace qkdtk::json_io
