// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>

#include <doctest/doctest.h>
#include "oracle.hpp"

using namespace secsci;
using namespace secsci::test;

namespace {

Rational q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Rational row_sum(const std::vector<Rational>& r) { return std::accumulate(r.begin(), r.end(), Rational(0)); }

Rational pick_quarter(Gen& g) { return q(g.below(5), 4); }

// Random channel on a0, a1 (A) and b0 (B) with two outputs and quarter probabilities.
ProbSharedChannel random_prob(Gen& g, int max_states) {
  ProbSharedChannel m;
  auto& t = m.t;
  const int ns = 1 + g.below(max_states);
  for (int s = 0; s < ns; ++s) t.states.push_back("s" + std::to_string(s));
  t.inputs = {"a0", "a1", "b0"};
  t.outputs = {"0", "1"};
  t.delta.assign(static_cast<std::size_t>(ns), std::vector<std::vector<ProbTransducer::Edge>>(3));
  for (auto& row : t.delta)
    for (auto& edges : row) {
      Rational p = pick_quarter(g);
      if (p != 0) edges.push_back({g.below(ns), 0, p});
      if (p != 1) edges.push_back({g.below(ns), 1, 1 - p});
    }
  m.subjects = {"A", "B"};
  m.owner = {"A", "A", "B"};
  m.levels = Poset::from_covers({"LA", "LB"}, {});
  m.pl = {"LA", "LA", "LB"};
  m.cl = {{"A", "LA"}, {"B", "LB"}};
  Source src;
  src.symbols = t.inputs;
  src.states = {"s"};
  src.emit = {{q(1, 3), q(1, 3), q(1, 3)}};
  src.next = {{0, 0, 0}};
  m.source = src;
  return m;
}

Source random_source(Gen& g) {
  Source s;
  s.symbols = {"x", "y", "z"};
  const int ns = 1 + g.below(3);
  for (int i = 0; i < ns; ++i) {
    s.states.push_back("s" + std::to_string(i));
    long a = g.below(5), b = g.below(5 - static_cast<int>(a));
    s.emit.push_back({q(a, 4), q(b, 4), q(4 - a - b, 4)});
    s.next.push_back({g.below(ns), g.below(ns), g.below(ns)});
  }
  return s;
}

// Product of emission probabilities along the walk, written out directly.
Rational walk(const Source& s, const Word& context, const Word& cont) {
  int st = s.initial;
  for (Letter a : context) st = s.next[static_cast<std::size_t>(st)][static_cast<std::size_t>(a)];
  Rational p = 1;
  for (Letter a : cont) {
    p *= s.emit[static_cast<std::size_t>(st)][static_cast<std::size_t>(a)];
    st = s.next[static_cast<std::size_t>(st)][static_cast<std::size_t>(a)];
  }
  return p;
}

// Local-view oracle: product over cleared steps of the path mass whose last edge emits the next y.
Rational local_view_oracle(const ProbSharedChannel& m, const std::string& u, const Word& x, const Word& y) {
  Rational acc = 1;
  std::size_t j = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (m.pl[static_cast<std::size_t>(x[k])] != m.cl.at(u)) continue;
    if (j == y.size()) return 0;
    acc *= path_last(m.t, Word(x.begin(), x.begin() + static_cast<long>(k) + 1), y[j++]);
  }
  return j == y.size() ? acc : Rational(0);
}

Cipher random_cipher(Gen& g, int nk, int nm, int nc) {
  std::vector<std::string> keys, msgs, cts;
  for (int i = 0; i < nk; ++i) keys.push_back("k" + std::to_string(i));
  for (int i = 0; i < nm; ++i) msgs.push_back("m" + std::to_string(i));
  for (int i = 0; i < nc; ++i) cts.push_back("c" + std::to_string(i));
  std::vector<std::vector<int>> E;
  for (int k = 0; k < nk; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(nc));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.engine());
    perm.resize(static_cast<std::size_t>(nm));
    E.push_back(perm);
  }
  return make_cipher(keys, msgs, cts, E);
}

Distribution uniform(std::size_t n) { return Distribution(n, q(1, static_cast<long>(n))); }

}  // namespace

TEST_CASE("frequency estimates") {
  auto e = estimate_from_samples({{"c", "H"}, {"c", "H"}, {"c", "T"}, {"c", "H"}});
  CHECK(e.channel.at(0, static_cast<std::size_t>(e.channel.output_index("H"))) == q(3, 4));

  std::vector<std::pair<std::string, std::string>> fair;
  for (int i = 0; i < 4; ++i) {
    fair.emplace_back("c", "H");
    fair.emplace_back("c", "T");
  }
  auto f = estimate_from_samples(fair);
  CHECK(f.channel.at(0, 0) == q(1, 2));
  CHECK(f.output_marginal == Distribution{q(1, 2), q(1, 2)});

  auto u = estimate_from_samples({{"c", "H"}}, {"c", "d"});
  CHECK(u.undefined_rows == std::vector<std::string>{"d"});
  CHECK_FALSE(u.channel.rows[1]);

  Gen g(3);
  for (int n = 0; n < 100; ++n) {
    std::vector<std::pair<std::string, std::string>> s;
    std::map<std::pair<std::string, std::string>, long> count;
    std::map<std::string, long> ctx;
    for (int i = 0, len = 1 + g.below(30); i < len; ++i) {
      std::string x = "x" + std::to_string(g.below(3)), y = "y" + std::to_string(g.below(4));
      s.emplace_back(x, y);
      ++count[{x, y}];
      ++ctx[x];
    }
    auto r = estimate_from_samples(s);
    CHECK(r.channel.row_stochastic());
    CHECK(row_sum(r.output_marginal) == 1);
    for (std::size_t x = 0; x < r.channel.inputs.size(); ++x)
      for (std::size_t y = 0; y < r.channel.outputs.size(); ++y) {
        const auto& xs = r.channel.inputs[x];
        auto it = count.find({xs, r.channel.outputs[y]});
        CHECK(r.channel.at(x, y) == q(it == count.end() ? 0 : it->second, ctx[xs]));
      }
  }
}

TEST_CASE("coin sequents") {
  auto fair = coin(q(1, 2));
  for (int d = 0; d <= 6; ++d)
    for (const auto& y : words_upto(2, d))
      if (static_cast<int>(y.size()) == d) {
        Rational expect = 1;
        for (int i = 0; i < d; ++i) expect /= 2;
        CHECK(marginal(fair, y) == expect);
      }
  CHECK(marginal(fair, {0, 1, 1}) == q(1, 8));

  auto biased = coin(q(3, 4));
  for (const auto& y : words_upto(2, 5)) {
    long h = std::count(y.begin(), y.end(), 0);
    Rational expect = 1;
    for (long i = 0; i < h; ++i) expect *= 3;
    for (std::size_t i = 0; i < y.size(); ++i) expect /= 4;
    CHECK(marginal(biased, y) == expect);
  }
  CHECK(cumulative_probability(biased, {0, 1}, {}) == 1);

  auto three = io::source_from_json(load_fixture("three-flips.json"));
  CHECK(marginal(three, {0, 0, 0}) == q(1, 8));
}

TEST_CASE("chain law and normalization of sources") {
  Gen g(41);
  for (int n = 0; n < 60; ++n) {
    auto s = random_source(g);
    for (const auto& x : words_upto(3, 2))
      for (const auto& y : words_upto(3, 2))
        for (const auto& z : words_upto(3, 1)) {
          Word yz = y;
          yz.insert(yz.end(), z.begin(), z.end());
          Word xy = x;
          xy.insert(xy.end(), y.begin(), y.end());
          CHECK(cumulative_probability(s, x, yz) == cumulative_probability(s, x, y) * cumulative_probability(s, xy, z));
          CHECK(cumulative_probability(s, x, yz) == walk(s, x, yz));
        }
    for (int len = 0; len <= 4; ++len) {
      Rational total = 0;
      for (const auto& w : words_upto(3, len))
        if (static_cast<int>(w.size()) == len) total += marginal(s, w);
      CHECK(total == 1);
    }
  }
}

TEST_CASE("Monty Hall inversion") {
  auto f = io::stochastic_from_json(load_fixture("montyhall.json"));
  const auto& ch = f.channel;
  CHECK(ch.row_stochastic());
  auto inv = bayes_invert(ch, *f.prior);
  const auto& r = inv.inverse;
  auto at = [&](const char* y, const char* x) {
    return r.at(static_cast<std::size_t>(r.input_index(y)), static_cast<std::size_t>(r.output_index(x)));
  };
  CHECK_FALSE(r.rows[static_cast<std::size_t>(r.input_index("G0"))]);
  CHECK(at("G1", "C0") == q(1, 3));
  CHECK(at("G1", "C2") == q(2, 3));
  CHECK(at("G1", "C1") == 0);
  CHECK(at("G2", "C0") == q(1, 3));
  CHECK(at("G2", "C1") == q(2, 3));
  CHECK(inv.output_marginal == Distribution{0, q(1, 2), q(1, 2)});
  CHECK(r.row_stochastic());
}

TEST_CASE("car rental inversion") {
  auto f = io::stochastic_from_json(load_fixture("car-rental.json"));
  auto inv = bayes_invert(f.channel, *f.prior);
  const auto& r = inv.inverse;
  auto p = static_cast<std::size_t>(r.input_index("p")), np = static_cast<std::size_t>(r.input_index("not_p"));
  auto a = static_cast<std::size_t>(r.output_index("a"));
  CHECK(r.at(p, a) == q(2, 11));
  CHECK(r.at(np, a) == q(8, 9));
  CHECK(inv.output_marginal == Distribution{q(11, 20), q(9, 20)});
}

TEST_CASE("Bayes laws") {
  StochasticChannel id{{"x", "y"}, {"x", "y"}, {std::vector<Rational>{1, 0}, std::vector<Rational>{0, 1}}};
  auto ii = bayes_invert(id, {q(1, 3), q(2, 3)});
  CHECK(ii.inverse.rows == id.rows);
  CHECK(ii.output_marginal == Distribution{q(1, 3), q(2, 3)});
  CHECK_THROWS_AS(bayes_invert(id, {q(1, 2), q(1, 3)}), Error);

  Gen g(77);
  for (int n = 0; n < 200; ++n) {
    const std::size_t nx = 1 + static_cast<std::size_t>(g.below(3)), ny = 1 + static_cast<std::size_t>(g.below(3));
    StochasticChannel ch;
    for (std::size_t x = 0; x < nx; ++x) ch.inputs.push_back("x" + std::to_string(x));
    for (std::size_t y = 0; y < ny; ++y) ch.outputs.push_back("y" + std::to_string(y));
    for (std::size_t x = 0; x < nx; ++x) {
      std::vector<long> w(ny);
      long tot = 0;
      for (auto& v : w) tot += (v = g.below(4));
      if (tot == 0) w[0] = tot = 1;
      std::vector<Rational> row;
      for (long v : w) row.push_back(q(v, tot));
      ch.rows.emplace_back(row);
    }
    Distribution prior;
    long tot = 0;
    std::vector<long> w(nx);
    for (auto& v : w) tot += (v = 1 + g.below(3));
    for (long v : w) prior.push_back(q(v, tot));

    auto inv = bayes_invert(ch, prior);
    CHECK(inv.inverse.row_stochastic());
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        // [x]<x|y> = [y]<y|x> wherever [y] > 0.
        if (inv.output_marginal[y] != 0) CHECK(prior[x] * ch.at(x, y) == inv.output_marginal[y] * inv.inverse.at(y, x));
        else CHECK_FALSE(inv.inverse.rows[y]);
      }
    // Inverting back with the computed marginal recovers the rows.
    Distribution marg;
    std::vector<std::size_t> live;
    for (std::size_t y = 0; y < ny; ++y) marg.push_back(inv.output_marginal[y]);
    StochasticChannel defined = inv.inverse;
    for (std::size_t y = 0; y < ny; ++y)
      if (!defined.rows[y]) defined.rows[y] = std::vector<Rational>(nx, 0);
    auto back = bayes_invert(defined, marg);
    for (std::size_t x = 0; x < nx; ++x) CHECK(*back.inverse.rows[x] == *ch.rows[x]);
    CHECK(back.output_marginal == prior);
  }
}

TEST_CASE("entropy") {
  auto fair = entropy(io::distribution_from_json(load_fixture("fair-coin.json")).p);
  CHECK(fair.bits == 1.0);
  REQUIRE(fair.symbolic);
  CHECK(fair.symbolic->first == 1);
  CHECK(fair.symbolic->second == 0);

  Distribution flips;
  auto three = io::source_from_json(load_fixture("three-flips.json"));
  for (const auto& w : words_upto(2, 3))
    if (w.size() == 3) flips.push_back(marginal(three, w));
  auto h3 = entropy(flips);
  CHECK(h3.bits == 3.0);
  CHECK(h3.symbolic->first == 3);

  auto b = entropy(io::distribution_from_json(load_fixture("biased-coin.json")).p);
  CHECK(std::abs(b.bits - (2 - 0.75 * std::log2(3.0))) < 1e-12);
  CHECK(std::abs(b.bits - 0.811278124459) < 1e-11);
  REQUIRE(b.symbolic);
  CHECK(b.symbolic->first == 2);
  CHECK(b.symbolic->second == q(-3, 4));
  CHECK(b.show().find("log2(3)") != std::string::npos);

  CHECK_FALSE(entropy({q(1, 5), q(4, 5)}).symbolic);
  CHECK(entropy({1, 0}).bits == 0.0);
  CHECK_THROWS_AS(entropy({q(1, 2)}), Error);

  Gen g(13);
  for (int n = 0; n < 300; ++n) {
    const long k = 1 + g.below(6);
    std::vector<long> w(static_cast<std::size_t>(k));
    long tot = 0;
    for (auto& v : w) tot += (v = g.below(5));
    if (tot == 0) w[0] = tot = 1;
    Distribution d;
    double direct = 0;
    for (long v : w) {
      d.push_back(q(v, tot));
      if (v) direct -= double(v) / double(tot) * std::log2(double(v) / double(tot));
    }
    auto h = entropy(d);
    CHECK(h.bits >= -1e-12);
    CHECK(h.bits <= std::log2(double(k)) + 1e-12);
    CHECK(std::abs(h.bits - direct) < 1e-9);
    CHECK(std::abs(entropy(uniform(static_cast<std::size_t>(k))).bits - std::log2(double(k))) < 1e-12);
  }
}

TEST_CASE("probabilistic runs against path sums") {
  Gen g(88);
  for (int n = 0; n < 50; ++n) {
    auto m = random_prob(g, 3);
    m.validate();
    for (const auto& x : words_upto(3, 3)) {
      Rational tot = 0;
      for (const auto& y : words_upto(2, 3)) {
        auto p = prob_run(m.t, x, y);
        CHECK(p == path_sum(m.t, x, y));
        if (y.size() == x.size()) tot += p;
      }
      CHECK(tot == 1);
      if (!x.empty())
        for (int v = 0; v < 2; ++v) CHECK(prob_last(m.t, x, v) == path_last(m.t, x, v));
      for (const char* u : {"A", "B"})
        for (const auto& y : words_upto(2, 3)) CHECK(prob_local_view(m, u, x, y) == local_view_oracle(m, u, x, y));
    }
  }
}

TEST_CASE("0/1 embedding reproduces relational verdicts") {
  auto elev = io::channel_from_json(load_fixture("elevator.json"));
  auto pe = embed(elev);
  auto rel = check_noninterference(elev, "B", NonintMode::Bounded, 3);
  auto pr = check_prob_noninterference(pe, "B", 3);
  REQUIRE(pr.interferes);
  CHECK(pr.x == rel.x);
  CHECK(pr.lhs != pr.rhs);

  Gen g(99);
  int interfering = 0;
  for (int n = 0; n < 80; ++n) {
    auto m = g.shared_channel(3);
    auto p = embed(m);
    for (const char* u : {"A", "B"}) {
      bool r = check_noninterference(m, u, NonintMode::Bounded, 4).interferes;
      CHECK(check_prob_noninterference(p, u, 4).interferes == r);
      interfering += r;
    }
  }
  CHECK(interfering > 0);
}

TEST_CASE("probabilistic noninterference fixtures") {
  auto echo = io::prob_channel_from_json(load_fixture("noisy-echo.json"));
  auto leak = io::prob_channel_from_json(load_fixture("noisy-leak.json"));
  for (const char* u : {"A", "B"}) {
    CHECK_FALSE(check_prob_noninterference(echo, u, 4).interferes);
    CHECK(prob_condition_a(echo, u, 3));
  }
  auto r = check_prob_noninterference(leak, "B", 4);
  REQUIRE(r.interferes);
  CHECK(r.lhs == local_view_oracle(leak, "B", r.x, r.y));
  CHECK(r.rhs == local_view_oracle(leak, "B", leak.purge(r.x, "B"), r.y));
  CHECK_FALSE(prob_condition_a(leak, "B", 3));

  // One subject only: nothing to interfere with.
  auto solo = echo;
  solo.subjects = {"A"};
  solo.owner.assign(4, "A");
  solo.pl.assign(4, "LA");
  solo.cl = {{"A", "LA"}};
  CHECK_FALSE(check_prob_noninterference(solo, "A", 4).interferes);
  CHECK_THROWS_AS(check_prob_noninterference(echo, "C", 2), Error);

  // Stateful single-subject channels too.
  Gen g(8);
  for (int n = 0; n < 20; ++n) {
    auto m = random_prob(g, 3);
    m.subjects = {"A"};
    m.owner.assign(3, "A");
    m.pl.assign(3, "LA");
    m.cl = {{"A", "LA"}};
    CHECK_FALSE(check_prob_noninterference(m, "A", 3).interferes);
    CHECK(prob_condition_a(m, "A", 3));
  }
}

TEST_CASE("characterization (c) implies (a) on random models") {
  Gen g(111);
  int nonint = 0;
  for (int n = 0; n < 40; ++n) {
    auto m = random_prob(g, 2);
    for (const char* u : {"A", "B"}) {
      bool c = !check_prob_noninterference(m, u, 3).interferes;
      if (c) {
        CHECK(prob_condition_a(m, u, 3));
        ++nonint;
      }
    }
  }
  CHECK(nonint > 0);
}

TEST_CASE("zero-mass local histories are skipped") {
  Gen g(5);
  auto m = random_prob(g, 1);
  m.source->emit = {{q(1, 2), 0, q(1, 2)}};  // a1 never happens
  auto r = check_prob_noninterference(m, "A", 2);
  CHECK(std::find(r.skipped.begin(), r.skipped.end(), Word{1}) != r.skipped.end());
  std::vector<Word> skipped;
  prob_condition_a(m, "A", 2, &skipped);
  CHECK(std::find(skipped.begin(), skipped.end(), Word{1}) != skipped.end());
}

TEST_CASE("guessing channels") {
  auto otp = io::cipher_from_json(load_fixture("otp.json"));
  auto g = guessing_channel(otp.cipher);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t m = 0; m < 2; ++m) CHECK(g.at(c, m) == q(1, 2));

  auto one = make_cipher({"k"}, {"a", "b"}, {"x", "y", "z"}, {{2, 0}});
  auto g1 = guessing_channel(one);
  CHECK(g1.at(2, 0) == 1);
  CHECK(g1.at(0, 1) == 1);
  CHECK_FALSE(g1.rows[1]);
  CHECK_THROWS_AS(make_cipher({"k"}, {"a", "b"}, {"x"}, {{0, 0}}), Error);

  Gen gen(21);
  for (int n = 0; n < 100; ++n) {
    auto c = random_cipher(gen, 2, 2 + gen.below(2), 3);
    auto gc = guessing_channel(c);
    for (std::size_t x = 0; x < c.ciphertexts.size(); ++x)
      for (std::size_t m = 0; m < c.messages.size(); ++m) {
        long hits = 0;
        for (std::size_t k = 0; k < c.keys.size(); ++k) hits += c.E[k][m] == static_cast<int>(x);
        if (gc.rows[x]) CHECK(gc.at(x, m) == q(hits, 2));
        else CHECK(hits == 0);
      }
    for (std::size_t k = 0; k < c.keys.size(); ++k)
      for (std::size_t m = 0; m < c.messages.size(); ++m)
        CHECK(c.D[k][static_cast<std::size_t>(c.E[k][m])] == static_cast<int>(m));
  }
}

TEST_CASE("perfect secrecy") {
  auto otp = io::cipher_from_json(load_fixture("otp.json"));
  auto r = check_perfect_secrecy(otp.cipher, otp.prior);
  CHECK(r.pointwise);
  CHECK(r.projector);
  CHECK(r.secret());

  auto id = io::cipher_from_json(load_fixture("identity-cipher.json"));
  auto s = check_perfect_secrecy(id.cipher, id.prior);
  CHECK_FALSE(s.pointwise);
  CHECK_FALSE(s.projector);
  REQUIRE(s.pointwise_witness);
  CHECK(s.pointwise_witness == s.projector_witness);
  CHECK(s.pointwise_lhs == 1);
  CHECK(s.pointwise_rhs == q(1, 2));

  // Square ciphers with a uniform prior: the two checks agree.
  Gen g(31);
  int secret = 0;
  for (int n = 0; n < 300; ++n) {
    const int size = 2 + g.below(2);
    auto c = random_cipher(g, 1 + g.below(4), size, size);
    auto rep = check_perfect_secrecy(c, uniform(static_cast<std::size_t>(size)));
    CHECK(rep.pointwise == rep.projector);
    secret += rep.secret();
    if (c.keys.size() < c.messages.size()) CHECK_FALSE(rep.secret());
    if (rep.pointwise_witness) {
      auto [x, m] = *rep.pointwise_witness;
      long hits = 0;
      for (std::size_t k = 0; k < c.keys.size(); ++k) hits += c.E[k][static_cast<std::size_t>(m)] == x;
      CHECK(rep.pointwise_lhs == q(hits, static_cast<long>(c.keys.size())));
    }
  }
  CHECK(secret > 0);
}

TEST_CASE("retraction identity on toy tables") {
  CHECK(retraction_identity({1, 0, 1}, {1, 0}));
  CHECK_FALSE(retraction_identity({1, 0}, {1, 1}));
  CHECK_FALSE(retraction_identity({2}, {0}));
}
