// SPDX-License-Identifier: Apache-2.0
#include "secsci/prob.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace secsci {

Rational parse_rational(const std::string& s) {
  Rational q;
  try {
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      // Decimal literal: scale by a power of ten.
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      std::string den = "1" + std::string(s.size() - dot - 1, '0');
      q = Rational(digits + "/" + den, 10);
    } else {
      q = Rational(s, 10);
    }
  } catch (const std::exception&) {
    throw Error("not a rational: " + s);
  }
  if (q.get_den() == 0) throw Error("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

namespace {

int index_of(const std::vector<std::string>& v, std::string_view id, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == id) return static_cast<int>(i);
  throw Error(std::string("unknown ") + what + " " + std::string(id));
}

void check_unit(const Rational& p, const std::string& where) {
  if (p < 0 || p > 1) throw Error("probability out of [0,1] at " + where);
}

}  // namespace

void StochasticChannel::validate() const {
  if (rows.size() != inputs.size()) throw Error("channel has wrong number of rows");
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (!rows[x]) continue;
    if (rows[x]->size() != outputs.size()) throw Error("row " + inputs[x] + " has wrong width");
    for (std::size_t y = 0; y < outputs.size(); ++y) check_unit((*rows[x])[y], inputs[x] + "/" + outputs[y]);
  }
}

bool StochasticChannel::row_stochastic() const {
  for (const auto& r : rows) {
    if (!r) continue;
    Rational s = 0;
    for (const auto& p : *r) s += p;
    if (s != 1) return false;
  }
  return true;
}

int StochasticChannel::input_index(std::string_view id) const { return index_of(inputs, id, "input"); }
int StochasticChannel::output_index(std::string_view id) const { return index_of(outputs, id, "output"); }

Estimate estimate_from_samples(const std::vector<std::pair<std::string, std::string>>& samples,
                               std::vector<std::string> contexts) {
  std::vector<std::string> outputs;
  for (const auto& [x, y] : samples) {
    if (std::find(contexts.begin(), contexts.end(), x) == contexts.end()) contexts.push_back(x);
    if (std::find(outputs.begin(), outputs.end(), y) == outputs.end()) outputs.push_back(y);
  }
  std::sort(outputs.begin(), outputs.end());
  Estimate e;
  e.channel.inputs = contexts;
  e.channel.outputs = outputs;
  std::vector<std::vector<long>> counts(contexts.size(), std::vector<long>(outputs.size(), 0));
  std::vector<long> ycount(outputs.size(), 0);
  for (const auto& [x, y] : samples) {
    auto xi = static_cast<std::size_t>(index_of(contexts, x, "context"));
    auto yi = static_cast<std::size_t>(index_of(outputs, y, "output"));
    ++counts[xi][yi];
    ++ycount[yi];
  }
  for (std::size_t x = 0; x < contexts.size(); ++x) {
    long total = 0;
    for (long c : counts[x]) total += c;
    if (total == 0) {
      e.channel.rows.emplace_back(std::nullopt);
      e.undefined_rows.push_back(contexts[x]);
      continue;
    }
    std::vector<Rational> row;
    for (long c : counts[x]) row.emplace_back(Rational(c, total));
    for (auto& q : row) q.canonicalize();
    e.channel.rows.emplace_back(std::move(row));
  }
  for (long c : ycount) {
    Rational q(c, static_cast<long>(samples.size()));
    q.canonicalize();
    e.output_marginal.push_back(q);
  }
  return e;
}

void Source::validate() const {
  if (states.empty()) throw Error("source has no states");
  if (initial < 0 || initial >= static_cast<int>(states.size())) throw Error("source initial state out of range");
  if (emit.size() != states.size() || next.size() != states.size()) throw Error("source tables have wrong size");
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (emit[s].size() != symbols.size() || next[s].size() != symbols.size()) throw Error("source row has wrong width");
    Rational sum = 0;
    for (std::size_t a = 0; a < symbols.size(); ++a) {
      check_unit(emit[s][a], states[s]);
      sum += emit[s][a];
      if (next[s][a] < 0 || next[s][a] >= static_cast<int>(states.size())) throw Error("source target out of range");
    }
    if (sum != 1) throw Error("source row " + states[s] + " does not sum to 1");
  }
  if (depth < 0) throw Error("negative truncation depth");
}

int Source::state_after(const Word& x) const {
  int s = initial;
  for (Letter a : x) s = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  return s;
}

Rational cumulative_probability(const Source& s, const Word& context, const Word& continuation) {
  if (static_cast<int>(context.size() + continuation.size()) > s.depth) throw Error("history exceeds truncation depth");
  int q = s.state_after(context);
  Rational p = 1;
  for (Letter a : continuation) {
    p *= s.emit[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
    q = s.next[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
  }
  return p;
}

Rational marginal(const Source& s, const Word& x) { return cumulative_probability(s, {}, x); }

Source coin(const Rational& heads) {
  Source s;
  s.symbols = {"H", "T"};
  s.states = {"c"};
  s.emit = {{heads, Rational(1) - heads}};
  s.next = {{0, 0}};
  s.validate();
  return s;
}

Inversion bayes_invert(const StochasticChannel& ch, const Distribution& prior) {
  ch.validate();
  if (prior.size() != ch.inputs.size()) throw Error("prior has wrong size");
  Rational total = 0;
  for (const auto& p : prior) {
    check_unit(p, "prior");
    total += p;
  }
  if (total != 1) throw Error("prior does not sum to 1");
  const std::size_t nx = ch.inputs.size(), ny = ch.outputs.size();
  Inversion r;
  r.inverse.inputs = ch.outputs;
  r.inverse.outputs = ch.inputs;
  r.output_marginal.assign(ny, Rational(0));
  r.joint_flat.assign(nx * ny, Rational(0));
  for (std::size_t x = 0; x < nx; ++x) {
    if (!ch.rows[x]) {
      if (prior[x] != 0) throw Error("undefined row " + ch.inputs[x] + " has positive prior");
      continue;
    }
    for (std::size_t y = 0; y < ny; ++y) {
      r.joint_flat[x * ny + y] = prior[x] * ch.at(x, y);
      r.output_marginal[y] += r.joint_flat[x * ny + y];
    }
  }
  for (std::size_t y = 0; y < ny; ++y) {
    if (r.output_marginal[y] == 0) {
      r.inverse.rows.emplace_back(std::nullopt);
      continue;
    }
    std::vector<Rational> row(nx);
    for (std::size_t x = 0; x < nx; ++x) row[x] = r.joint_flat[x * ny + y] / r.output_marginal[y];
    r.inverse.rows.emplace_back(std::move(row));
  }
  return r;
}

namespace {

// p = 2^i · 3^j with integer exponents, if possible.
std::optional<std::pair<long, long>> two_three(const Rational& p) {
  mpz_class num = p.get_num(), den = p.get_den();
  long i = 0, j = 0;
  auto strip = [](mpz_class& z, unsigned long f, long& e, long sign) {
    while (z % f == 0) {
      z /= f;
      e += sign;
    }
  };
  strip(num, 2, i, 1);
  strip(num, 3, j, 1);
  strip(den, 2, i, -1);
  strip(den, 3, j, -1);
  if (num != 1 || den != 1) return std::nullopt;
  return std::make_pair(i, j);
}

}  // namespace

Entropy entropy(const Distribution& d) {
  Rational total = 0;
  for (const auto& p : d) {
    check_unit(p, "distribution");
    total += p;
  }
  if (total != 1) throw Error("distribution does not sum to 1");
  Entropy h;
  Rational a = 0, b = 0;
  bool exact = true;
  for (const auto& p : d) {
    if (p == 0) continue;
    h.bits -= p.get_d() * std::log2(p.get_d());
    if (auto e = two_three(p)) {
      a -= p * e->first;
      b -= p * e->second;
    } else {
      exact = false;
    }
  }
  if (exact) {
    h.symbolic = std::make_pair(a, b);
    h.bits = a.get_d() + b.get_d() * std::log2(3.0);
  }
  return h;
}

std::string Entropy::show() const {
  std::ostringstream os;
  os.precision(12);
  if (symbolic) {
    const auto& [a, b] = *symbolic;
    if (b == 0) {
      os << a.get_str();
    } else {
      if (a != 0) os << a.get_str() << (b > 0 ? " + " : " - ");
      else if (b < 0) os << "-";
      Rational mb = abs(b);
      if (mb != 1) os << "(" << mb.get_str() << ")";
      os << "log2(3)";
    }
    os << " = ";
  }
  os << bits;
  return os.str();
}

void ProbTransducer::validate() const {
  const int ns = static_cast<int>(states.size());
  if (ns == 0) throw Error("transducer has no states");
  if (initial < 0 || initial >= ns) throw Error("initial state out of range");
  if (delta.size() != states.size()) throw Error("transition table has wrong number of states");
  for (std::size_t s = 0; s < delta.size(); ++s) {
    if (delta[s].size() != inputs.size()) throw Error("transition table has wrong number of inputs");
    for (std::size_t x = 0; x < inputs.size(); ++x) {
      Rational sum = 0;
      for (const auto& e : delta[s][x]) {
        if (e.to < 0 || e.to >= ns) throw Error("transition target out of range");
        if (e.output < 0 || e.output >= static_cast<int>(outputs.size())) throw Error("output out of range");
        check_unit(e.p, states[s] + "/" + inputs[x]);
        sum += e.p;
      }
      if (sum != 1) throw Error("transitions from " + states[s] + " on " + inputs[x] + " do not sum to 1");
    }
  }
}

namespace {

using Mass = std::vector<Rational>;

Mass step_mass(const ProbTransducer& t, const Mass& cur, int x, int want) {
  Mass nxt(t.states.size(), Rational(0));
  for (std::size_t s = 0; s < cur.size(); ++s) {
    if (cur[s] == 0) continue;
    for (const auto& e : t.delta[s][static_cast<std::size_t>(x)])
      if (want < 0 || e.output == want) nxt[static_cast<std::size_t>(e.to)] += cur[s] * e.p;
  }
  return nxt;
}

Mass start(const ProbTransducer& t) {
  Mass m(t.states.size(), Rational(0));
  m[static_cast<std::size_t>(t.initial)] = 1;
  return m;
}

Rational total(const Mass& m) {
  Rational s = 0;
  for (const auto& q : m) s += q;
  return s;
}

}  // namespace

Rational prob_run(const ProbTransducer& t, const Word& x, const Word& y) {
  if (x.size() != y.size()) return 0;
  Mass m = start(t);
  for (std::size_t k = 0; k < x.size(); ++k) m = step_mass(t, m, x[k], y[k]);
  return total(m);
}

Rational prob_last(const ProbTransducer& t, const Word& x, int v) {
  if (x.empty()) throw Error("single-output channel needs a nonempty input");
  Mass m = start(t);
  for (std::size_t k = 0; k + 1 < x.size(); ++k) m = step_mass(t, m, x[k], -1);
  return total(step_mass(t, m, x.back(), v));
}

void ProbSharedChannel::validate() const {
  t.validate();
  if (owner.size() != t.inputs.size() || pl.size() != t.inputs.size())
    throw Error("every input needs an owner and a location");
  for (const auto& o : owner)
    if (std::find(subjects.begin(), subjects.end(), o) == subjects.end()) throw Error("unknown owner " + o);
  for (const auto& l : pl) levels.at(l);
  for (const auto& u : subjects) {
    auto it = cl.find(u);
    if (it == cl.end()) throw Error("subject " + u + " has no clearance");
    levels.at(it->second);
  }
  if (source) {
    source->validate();
    if (source->symbols != t.inputs) throw Error("source symbols must be the channel inputs");
  }
}

bool ProbSharedChannel::cleared(int x, std::string_view u) const {
  auto it = cl.find(std::string(u));
  if (it == cl.end()) throw Error("unknown subject " + std::string(u));
  return levels.leq(pl[static_cast<std::size_t>(x)], it->second);
}

Word ProbSharedChannel::purge(const Word& h, std::string_view u) const {
  Word out;
  for (Letter x : h)
    if (cleared(x, u)) out.push_back(x);
  return out;
}

Rational prob_local_view(const ProbSharedChannel& m, std::string_view u, const Word& x, const Word& y) {
  Rational p = 1;
  std::size_t j = 0;
  Word prefix;
  for (Letter a : x) {
    prefix.push_back(a);
    if (!m.cleared(a, u)) continue;
    if (j >= y.size()) return 0;
    p *= prob_last(m.t, prefix, y[j++]);
    if (p == 0) return 0;
  }
  return j == y.size() ? p : Rational(0);
}

ProbInterference prob_interference(const ProbSharedChannel& m, std::string_view u, const Word& local, int n) {
  if (!m.source) throw Error("interference channel needs a source distribution");
  ProbInterference r;
  std::vector<std::pair<Word, Rational>> world;
  Rational mass = 0;
  for_each_word_upto(static_cast<int>(m.t.inputs.size()), n, [&](const Word& x) {
    if (m.purge(x, u) != local) return;
    Rational px = marginal(*m.source, x);
    if (px == 0) return;
    world.emplace_back(x, px);
    mass += px;
  });
  if (mass == 0) {
    r.defined = false;
    return r;
  }
  for_each_word(static_cast<int>(m.t.outputs.size()), static_cast<int>(local.size()), [&](const Word& y) {
    Rational v = 0;
    for (const auto& [x, px] : world) v += px / mass * prob_local_view(m, u, x, y);
    r.values[y] = v;
  });
  return r;
}

ProbNonintResult check_prob_noninterference(const ProbSharedChannel& m, std::string_view u, int n) {
  m.validate();
  if (std::find(m.subjects.begin(), m.subjects.end(), u) == m.subjects.end())
    throw Error("unknown subject " + std::string(u));
  ProbNonintResult r;
  std::set<Word> skipped;
  for_each_word_upto(static_cast<int>(m.t.inputs.size()), n, [&](const Word& x) {
    if (r.interferes) return;
    Word p = m.purge(x, u);
    if (m.source && marginal(*m.source, p) == 0 && !p.empty()) {
      // Conditioning on a local history the source never produces.
      bool any = false;
      for_each_word_upto(static_cast<int>(m.t.inputs.size()), static_cast<int>(x.size()), [&](const Word& w) {
        if (!any && m.purge(w, u) == p && marginal(*m.source, w) != 0) any = true;
      });
      if (!any) {
        skipped.insert(p);
        return;
      }
    }
    for_each_word(static_cast<int>(m.t.outputs.size()), static_cast<int>(p.size()), [&](const Word& y) {
      if (r.interferes) return;
      Rational lhs = prob_local_view(m, u, x, y);
      // The purged history read through the same single-output lens.
      Rational rhs = prob_local_view(m, u, p, y);
      if (lhs != rhs) {
        r.interferes = true;
        r.x = x;
        r.y = y;
        r.lhs = lhs;
        r.rhs = rhs;
      }
    });
  });
  r.skipped.assign(skipped.begin(), skipped.end());
  return r;
}

bool prob_condition_a(const ProbSharedChannel& m, std::string_view u, int n, std::vector<Word>* skipped) {
  m.validate();
  std::vector<int> mine;
  for (int x = 0; x < static_cast<int>(m.t.inputs.size()); ++x)
    if (m.cleared(x, u)) mine.push_back(x);
  bool ok = true;
  for (int len = 0; len <= n && ok; ++len)
    for_each_word(static_cast<int>(mine.size()), len, [&](const Word& idx) {
      if (!ok) return;
      Word local;
      for (Letter i : idx) local.push_back(mine[static_cast<std::size_t>(i)]);
      auto lhs = prob_interference(m, u, local, n);
      if (!lhs.defined) {
        if (skipped) skipped->push_back(local);
        return;
      }
      for (const auto& [y, v] : lhs.values)
        if (v != prob_local_view(m, u, local, y)) {
          ok = false;
          return;
        }
    });
  return ok;
}

ProbSharedChannel embed(const SharedChannel& m) {
  if (!m.t.deterministic()) throw Error("only deterministic channels embed as 0/1 matrices");
  ProbSharedChannel p;
  p.t.inputs = m.t.inputs;
  p.t.outputs = m.t.outputs;
  p.t.states = m.t.states;
  p.t.initial = m.t.initial;
  p.t.delta.resize(m.t.delta.size());
  for (std::size_t s = 0; s < m.t.delta.size(); ++s)
    for (const auto& edges : m.t.delta[s]) {
      const auto& e = edges.front();
      if (e.output < 0) throw Error("0/1 embedding needs an output on every step");
      p.t.delta[s].push_back({{e.to, e.output, Rational(1)}});
    }
  p.subjects = m.subjects;
  p.owner = m.owner;
  p.levels = m.levels;
  p.pl = m.pl;
  p.cl = m.cl;
  return p;
}

void Cipher::validate() const {
  const int nm = static_cast<int>(messages.size()), nc = static_cast<int>(ciphertexts.size());
  if (E.size() != keys.size() || D.size() != keys.size()) throw Error("cipher tables have wrong number of keys");
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (E[k].size() != messages.size()) throw Error("encryption row has wrong width");
    if (D[k].size() != ciphertexts.size()) throw Error("decryption row has wrong width");
    for (int m = 0; m < nm; ++m) {
      int c = E[k][static_cast<std::size_t>(m)];
      if (c < 0 || c >= nc) throw Error("ciphertext out of range");
      if (D[k][static_cast<std::size_t>(c)] != m)
        throw Error("decryption does not invert encryption under key " + keys[k]);
    }
  }
}

Cipher make_cipher(std::vector<std::string> keys, std::vector<std::string> messages, std::vector<std::string> ciphertexts,
                   std::vector<std::vector<int>> E) {
  Cipher c{std::move(keys), std::move(messages), std::move(ciphertexts), std::move(E), {}};
  c.D.assign(c.keys.size(), std::vector<int>(c.ciphertexts.size(), -1));
  for (std::size_t k = 0; k < c.E.size(); ++k)
    for (std::size_t m = 0; m < c.E[k].size(); ++m) {
      int x = c.E[k][m];
      if (x < 0 || x >= static_cast<int>(c.ciphertexts.size())) throw Error("ciphertext out of range");
      if (c.D[k][static_cast<std::size_t>(x)] >= 0) throw Error("encryption under key " + c.keys[k] + " is not injective");
      c.D[k][static_cast<std::size_t>(x)] = static_cast<int>(m);
    }
  c.validate();
  return c;
}

StochasticChannel guessing_channel(const Cipher& c) {
  c.validate();
  StochasticChannel g;
  g.inputs = c.ciphertexts;
  g.outputs = c.messages;
  const long nk = static_cast<long>(c.keys.size());
  for (std::size_t x = 0; x < c.ciphertexts.size(); ++x) {
    std::vector<Rational> row(c.messages.size());
    bool reachable = false;
    for (std::size_t m = 0; m < c.messages.size(); ++m) {
      long count = 0;
      for (std::size_t k = 0; k < c.keys.size(); ++k)
        if (c.E[k][m] == static_cast<int>(x)) ++count;
      row[m] = Rational(count, nk);
      row[m].canonicalize();
      if (count) reachable = true;
    }
    if (reachable) g.rows.emplace_back(std::move(row));
    else g.rows.emplace_back(std::nullopt);
  }
  return g;
}

SecrecyReport check_perfect_secrecy(const Cipher& c, const Distribution& prior) {
  if (prior.size() != c.messages.size()) throw Error("prior has wrong size");
  Rational sum = 0;
  for (const auto& p : prior) sum += p;
  if (sum != 1) throw Error("prior does not sum to 1");
  auto g = guessing_channel(c);
  const std::size_t nc = c.ciphertexts.size(), nm = c.messages.size();
  SecrecyReport r;
  for (std::size_t x = 0; x < nc && r.pointwise; ++x) {
    if (!g.rows[x]) continue;
    for (std::size_t m = 0; m < nm; ++m)
      if (g.at(x, m) != prior[m]) {
        r.pointwise = false;
        r.pointwise_witness = {static_cast<int>(x), static_cast<int>(m)};
        r.pointwise_lhs = g.at(x, m);
        r.pointwise_rhs = prior[m];
        break;
      }
  }
  // Point distribution χ_c versus the uniform one, pushed through the averaged channel.
  auto entry = [&](std::size_t x, std::size_t m) { return g.rows[x] ? g.at(x, m) : Rational(0); };
  for (std::size_t m = 0; m < nm && r.projector; ++m) {
    Rational uniform = 0;
    for (std::size_t x = 0; x < nc; ++x) uniform += entry(x, m);
    uniform /= static_cast<long>(nc);
    for (std::size_t x = 0; x < nc; ++x)
      if (entry(x, m) != uniform) {
        r.projector = false;
        r.projector_witness = {static_cast<int>(x), static_cast<int>(m)};
        r.projector_lhs = entry(x, m);
        r.projector_rhs = uniform;
        break;
      }
  }
  return r;
}

bool retraction_identity(const std::vector<int>& E, const std::vector<int>& A) {
  for (std::size_t x = 0; x < E.size(); ++x) {
    int y = E[x];
    if (y < 0 || static_cast<std::size_t>(y) >= A.size()) return false;
    int back = A[static_cast<std::size_t>(y)];
    if (back < 0 || static_cast<std::size_t>(back) >= E.size() || E[static_cast<std::size_t>(back)] != y) return false;
  }
  return true;
}

}  // namespace secsci
