#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <map>

#include "qkdtk/bounds.hpp"
#include "qkdtk/cinfo.hpp"
#include "qkdtk/engine.hpp"
#include "qkdtk/json_io.hpp"
#include "qkdtk/randkit.hpp"

using namespace qkdtk;
using engine::AttackModel;
using engine::Protocol;
using engine::ProtocolConfig;
using engine::Transcript;
using randkit::Bits;

namespace {

// upper chi-square quantile, Wilson-Hilferty; z = 3.0902 is the p = 1e-3 tail
double chi2_crit_p001(double df) {
  const double z = 3.0902;
  double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

ProtocolConfig basic_config(Protocol proto, std::size_t n, std::uint64_t seed,
                            const AttackModel& attack) {
  ProtocolConfig c;
  c.protocol = proto;
  c.n = n;
  c.seed = seed;
  c.attack = attack;
  return c;
}

Bits random_bits(randkit::Stream& s, std::size_t n) {
  Bits b(n);
  for (auto& x : b) x = s.bit();
  return b;
}

}  // namespace

TEST_CASE("noiseless run produces matching keys") {
  auto cfg = basic_config(Protocol::BB84, 512, 3,
                          AttackModel::bell_diagonal({1.0, 0.0, 0.0, 0.0}));
  auto tr = engine::run_protocol(cfg);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.qber1 == 0.0);
  CHECK(tr.reconcile_success);
  CHECK(tr.s_prime > 0);
  CHECK(tr.key_a == tr.key_b);
  CHECK(tr.x_sifted == tr.y_sifted);
  CHECK(tr.n_prime == tr.x_sifted.size());
}

TEST_CASE("transcripts are bit-identical across reruns") {
  auto cfg = basic_config(Protocol::BB84, 256, 12345,
                          AttackModel::depolarizing(0.04));
  auto a = engine::run_protocol(cfg);
  auto b = engine::run_protocol(cfg);
  CHECK(json_io::to_json(a).dump() == json_io::to_json(b).dump());
}

TEST_CASE("transcript JSON round trip") {
  auto cfg = basic_config(Protocol::SixState, 256, 9,
                          AttackModel::depolarizing(0.02));
  auto tr = engine::run_protocol(cfg);
  auto j = json_io::to_json(tr);
  auto back = json_io::transcript_from_json(j);
  CHECK(json_io::to_json(back).dump() == j.dump());
}

TEST_CASE("error-rate estimates concentrate; hopeless noise aborts") {
  auto cfg = basic_config(Protocol::BB84, 10000, 21,
                          AttackModel::bell_diagonal({0.85, 0.05, 0.05, 0.05}));
  auto tr = engine::run_protocol(cfg);
  // basis-1 error rate lambda3 + lambda4 = 0.1; above the one-way cliff, so
  // no key survives, but the estimate itself must concentrate
  CHECK(tr.qber1 == doctest::Approx(0.1).epsilon(0.3));
  CHECK(std::abs(tr.qber1 - 0.1) < 0.03);
  CHECK(tr.aborted);
  CHECK(tr.abort_reason == "no extractable key");
}

TEST_CASE("noisy run below the cliff still agrees after reconciliation") {
  // qber 0.02; a minority of seeds abort on a detected decode failure, which
  // is allowed, but a surviving run must never carry mismatched keys
  std::size_t survived = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = basic_config(Protocol::BB84, 1024, seed,
                            AttackModel::depolarizing(0.04));
    auto tr = engine::run_protocol(cfg);
    if (tr.aborted) continue;
    ++survived;
    CHECK(tr.key_a == tr.key_b);
    CHECK(tr.x_reconciled == tr.x_sifted);
  }
  CHECK(survived >= 5);
}

TEST_CASE("error-table and POVM samplers draw from the same distribution") {
  const std::size_t n = 100000;
  for (Protocol proto : {Protocol::BB84, Protocol::SixState}) {
    auto attack = AttackModel::bell_diagonal({0.85, 0.07, 0.05, 0.03});
    auto c1 = basic_config(proto, n, 1001, attack);
    auto c2 = basic_config(proto, n, 2002, attack);
    c1.sampling_p = 0.5;
    c2.sampling_p = 0.5;
    Transcript t1, t2;
    // selections drive the basis choices; use the same ones on both sides
    auto sel_t = randkit::PRandomSelection::generate(0.5, n, 5);
    auto sel_tp = randkit::PRandomSelection::generate(0.5, n, 6);
    t1.sel_t = t2.sel_t = sel_t.included;
    t1.sel_tprime = t2.sel_tprime = sel_tp.included;
    engine::sample_measurements(c1, t1);
    engine::sample_measurements_povm(c2, t2);

    std::map<std::array<int, 4>, std::array<double, 2>> cells;
    for (std::size_t i = 0; i < n; ++i) {
      cells[{t1.basis_a[i], t1.basis_b[i], t1.x[i], t1.y[i]}][0] += 1.0;
      cells[{t2.basis_a[i], t2.basis_b[i], t2.x[i], t2.y[i]}][1] += 1.0;
    }
    double stat = 0.0;
    std::size_t df = 0;
    for (auto& [cell, ab] : cells) {
      double a = ab[0], b = ab[1];
      stat += (a - b) * (a - b) / (a + b);
      ++df;
    }
    REQUIRE(df >= 2);
    CHECK(stat < chi2_crit_p001(double(df - 1)));
  }
}

TEST_CASE("reconciliation: identical and lightly corrupted strings") {
  randkit::Stream s(77);
  Bits x = random_bits(s, 20);
  auto same = engine::reconcile(x, x, 0.05, 42);
  CHECK(same.success);
  CHECK(same.x_bar == x);
  CHECK(same.r_prime == static_cast<long long>(same.syndrome.size()));

  Bits y = x;
  y[7] ^= 1;
  auto one = engine::reconcile(x, y, 0.05, 42);
  CHECK(one.success);
  CHECK(one.x_bar == x);

  // blockwise path with scattered errors
  Bits xb = random_bits(s, 64);
  Bits yb = xb;
  yb[3] ^= 1;
  yb[40] ^= 1;
  auto blocks = engine::reconcile(xb, yb, 0.05, 43);
  CHECK(blocks.success);
  CHECK(blocks.x_bar == xb);
  CHECK(blocks.hash_hex.size() == 4);

  // determinism
  auto again = engine::reconcile(xb, yb, 0.05, 43);
  CHECK(again.syndrome == blocks.syndrome);
  CHECK(again.x_bar == blocks.x_bar);

  CHECK_THROWS_AS(engine::reconcile(x, xb, 0.05, 1), std::invalid_argument);
}

TEST_CASE("reconciliation failure stays under its bound") {
  const std::size_t np = 16;
  const double q = 0.05;
  const int trials = 2000;
  int failures = 0;
  double out_bits = 0.0;
  randkit::Stream s(123);
  for (int t = 0; t < trials; ++t) {
    Bits x = random_bits(s, np);
    Bits y = x;
    for (auto& b : y)
      if (s.bernoulli(q)) b ^= 1;
    auto rec = engine::reconcile(x, y, q, randkit::derive_seed(9, "trial", t));
    if (!rec.success) ++failures;
    if (rec.r_prime > 0) out_bits = double(rec.r_prime);
  }
  // syndrome length s, source uncertainty r = n h(q)
  auto bound = bounds::ir_failure_bound(double(np) * cinfo::binary_entropy(q),
                                        out_bits, 0.0);
  CHECK(double(failures) / trials <= bound.bound);
}

TEST_CASE("privacy amplification is linear and seeded") {
  randkit::Stream s(55);
  Bits x = random_bits(s, 40), y = random_bits(s, 40), xy(40);
  for (int i = 0; i < 40; ++i) xy[i] = x[i] ^ y[i];
  auto kx = engine::amplify(x, 12, 7);
  auto ky = engine::amplify(y, 12, 7);
  auto kxy = engine::amplify(xy, 12, 7);
  REQUIRE(kx.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(kxy[i] == (kx[i] ^ ky[i]));
  CHECK(engine::amplify(x, 12, 7) == kx);
  CHECK(engine::amplify(x, 0, 7).empty());
  CHECK_THROWS_AS(engine::amplify(x, 41, 7), std::invalid_argument);
  CHECK_THROWS_AS(engine::amplify(x, -1, 7), std::invalid_argument);
}

TEST_CASE("exact adversary distance vanishes without eavesdropping") {
  auto cfg = basic_config(Protocol::BB84, 4, 0,
                          AttackModel::bell_diagonal({1.0, 0.0, 0.0, 0.0}));
  cfg.exact_eve = true;
  cfg.force_s_prime = 1;
  // the key must be exactly uniform once the one-bit amplification hash is
  // linearly independent of the announced syndrome map; a degenerate seed
  // (key determined by the transcript) legitimately reports d = 1/2
  Transcript tr;
  double d = 1.0;
  bool found = false;
  for (std::uint64_t seed = 1; seed <= 64 && !found; ++seed) {
    cfg.seed = seed;
    tr = engine::run_protocol(cfg);
    if (tr.aborted || tr.s_prime != 1 || tr.n_prime < 2) continue;
    d = engine::eve_distance_exact(tr, cfg.attack);
    CHECK((d <= 1e-9 || d == doctest::Approx(0.5)));
    if (d <= 1e-9) found = true;
  }
  REQUIRE(found);
  CHECK(engine::eve_distance_exact(tr, cfg.attack) == d);
}

TEST_CASE("two-state protocol end to end") {
  auto cfg = basic_config(Protocol::B92, 512, 4,
                          AttackModel::b92_unitary(0.38, 0.0));
  auto tr = engine::run_protocol(cfg);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.qber1 == 0.0);
  CHECK(tr.key_a == tr.key_b);
  CHECK(tr.s_prime > 0);
  // every sifted position was conclusive and unannounced
  for (auto i : tr.sifted) CHECK(tr.conclusive[i]);

  auto noisy = basic_config(Protocol::B92, 2048, 4,
                            AttackModel::b92_unitary(0.38, 0.01));
  auto trn = engine::run_protocol(noisy);
  if (!trn.aborted) CHECK(trn.key_a == trn.key_b);
}

TEST_CASE("configuration validation") {
  auto ok = basic_config(Protocol::BB84, 256, 1, AttackModel::depolarizing(0.0));
  CHECK_NOTHROW(ok.validate());
  auto small = ok;
  small.n = 2;
  CHECK_THROWS_AS(small.validate(), std::invalid_argument);
  auto exact = ok;
  exact.exact_eve = true;
  CHECK_THROWS_AS(exact.validate(), std::invalid_argument);  // n too large
  auto wrong = ok;
  wrong.attack = AttackModel::b92_unitary(0.38, 0.0);
  CHECK_THROWS_AS(wrong.validate(), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::bell_diagonal({0.5, 0.5, 0.5, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::depolarizing(1.5), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::b92_unitary(0.9, 0.0), std::invalid_argument);
  CHECK(engine::protocol_from_name("bb84") == Protocol::BB84);
  CHECK(engine::protocol_name(Protocol::SixState) == "six-state");
  CHECK_THROWS_AS(engine::protocol_from_name("bb85"), std::invalid_argument);
}
