// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#ifndef SECSCI_FIXTURE_DIR
#error "SECSCI_FIXTURE_DIR must point at the fixture directory"
#endif

namespace secsci::test {

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(SECSCI_FIXTURE_DIR) / name; }

json load_fixture(const std::string& name) { return io::read_json(fixture(name)); }

std::vector<Word> words_upto(int letters, int n) {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (int len = 1; len <= n; ++len) {
    std::vector<Word> nxt;
    for (const auto& w : layer)
      for (Letter a = 0; a < letters; ++a) {
        auto v = w;
        v.push_back(a);
        nxt.push_back(v);
      }
    out.insert(out.end(), nxt.begin(), nxt.end());
    layer = std::move(nxt);
  }
  return out;
}

std::vector<Letter> letters_of(const json& alphabet, const std::string& u) {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i].at("subject").get<std::string>() == u) out.push_back(static_cast<Letter>(i));
  return out;
}

Word keep_subject(const json& alphabet, const Word& w, const std::string& u) {
  Word out;
  for (Letter a : w)
    if (alphabet[static_cast<std::size_t>(a)].at("subject").get<std::string>() == u) out.push_back(a);
  return out;
}

namespace {

int letter_index(const json& alphabet, const std::string& id) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i].at("id").get<std::string>() == id) return static_cast<int>(i);
  throw std::runtime_error("oracle: unknown letter " + id);
}

std::vector<bool> letter_mask(const json& alphabet, const json& ids) {
  std::vector<bool> m(alphabet.size(), false);
  for (const auto& id : ids) m[static_cast<std::size_t>(letter_index(alphabet, id.get<std::string>()))] = true;
  return m;
}

bool in(const std::vector<bool>& m, Letter a) { return m[static_cast<std::size_t>(a)]; }

}  // namespace

// ---------------------------------------------------------------- direct evaluation

bool pattern_member(const json& p, const json& alphabet, const Word& w) {
  if (p.is_string()) {
    auto s = p.get<std::string>();
    if (s == "all") return true;
    if (s == "any") return w.size() == 1;
    if (s == "epsilon") return w.empty();
    if (s == "empty") return false;
    throw std::runtime_error("oracle: pattern " + s);
  }
  const auto& [key, arg] = *p.items().begin();
  const std::size_t n = w.size();
  if (key == "letters") return n == 1 && in(letter_mask(alphabet, arg), w[0]);
  if (key == "word") {
    if (n != arg.size()) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] != letter_index(alphabet, arg[i].get<std::string>())) return false;
    return true;
  }
  if (key == "occurs") {
    auto c = letter_mask(alphabet, arg);
    return std::any_of(w.begin(), w.end(), [&](Letter a) { return in(c, a); });
  }
  if (key == "before" || key == "eventually_follows" || key == "always_preceded") {
    auto c = letter_mask(alphabet, arg.at("c")), d = letter_mask(alphabet, arg.at("d"));
    if (key == "before") {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (in(c, w[i]) && in(d, w[j])) return true;
      return false;
    }
    if (key == "eventually_follows") {
      for (std::size_t i = 0; i < n; ++i) {
        if (!in(c, w[i])) continue;
        bool later = false;
        for (std::size_t j = i + 1; j < n; ++j) later = later || in(d, w[j]);
        if (!later) return false;
      }
      return true;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!in(d, w[j])) continue;
      bool earlier = false;
      for (std::size_t i = 0; i < j; ++i) earlier = earlier || in(c, w[i]);
      if (!earlier) return false;
    }
    return true;
  }
  if (key == "not") return !pattern_member(arg, alphabet, w);
  if (key == "and") {
    for (const auto& q : arg)
      if (!pattern_member(q, alphabet, w)) return false;
    return true;
  }
  if (key == "or") {
    for (const auto& q : arg)
      if (pattern_member(q, alphabet, w)) return true;
    return false;
  }
  // Split points, tried exhaustively.
  std::function<bool(std::size_t, std::size_t)> concat = [&](std::size_t k, std::size_t from) -> bool {
    if (k == arg.size()) return from == n;
    for (std::size_t to = from; to <= n; ++to)
      if (pattern_member(arg[k], alphabet, Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(to))) &&
          concat(k + 1, to))
        return true;
    return false;
  };
  if (key == "concat") return concat(0, 0);
  if (key == "star") {
    std::function<bool(std::size_t)> rest = [&](std::size_t from) -> bool {
      if (from == n) return true;
      for (std::size_t to = from + 1; to <= n; ++to)
        if (pattern_member(arg, alphabet, Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(to))) &&
            rest(to))
          return true;
      return false;
    };
    return rest(0);
  }
  throw std::runtime_error("oracle: pattern operator " + key);
}

// ---------------------------------------------------------------- derivatives

namespace {

struct Rx;
using RxP = std::shared_ptr<const Rx>;

struct Rx {
  enum K { Empty, Eps, Set, Top, Cat, Star, Or, And, Not } k = Empty;
  std::vector<bool> set;
  std::vector<RxP> kids;
  std::string key;
};

class Rxs {
 public:
  explicit Rxs(int letters) : k_(letters) {}

  RxP empty() const { return leaf(Rx::Empty, "0"); }
  RxP eps() const { return leaf(Rx::Eps, "e"); }
  RxP top() const { return leaf(Rx::Top, "T"); }

  RxP set(std::vector<bool> m) const {
    if (std::none_of(m.begin(), m.end(), [](bool b) { return b; })) return empty();
    auto r = std::make_shared<Rx>();
    r->k = Rx::Set;
    r->key = "[";
    for (bool b : m) r->key += b ? '1' : '0';
    r->key += "]";
    r->set = std::move(m);
    return r;
  }
  RxP full() const { return set(std::vector<bool>(static_cast<std::size_t>(k_), true)); }

  RxP cat(const RxP& a, const RxP& b) const {
    if (a->k == Rx::Empty || b->k == Rx::Empty) return empty();
    if (a->k == Rx::Eps) return b;
    if (b->k == Rx::Eps) return a;
    if (a->k == Rx::Top && b->k == Rx::Top) return a;
    if (a->k == Rx::Cat) return cat(a->kids[0], cat(a->kids[1], b));
    return node(Rx::Cat, {a, b}, "(" + a->key + "." + b->key + ")");
  }
  RxP star(const RxP& a) const {
    if (a->k == Rx::Star || a->k == Rx::Top) return a;
    if (a->k == Rx::Eps || a->k == Rx::Empty) return eps();
    if (a->k == Rx::Set && std::all_of(a->set.begin(), a->set.end(), [](bool b) { return b; })) return top();
    return node(Rx::Star, {a}, "(" + a->key + ")*");
  }
  RxP alt(std::vector<RxP> xs) const { return lattice(Rx::Or, std::move(xs)); }
  RxP both(std::vector<RxP> xs) const { return lattice(Rx::And, std::move(xs)); }
  RxP neg(const RxP& a) const {
    if (a->k == Rx::Not) return a->kids[0];
    if (a->k == Rx::Empty) return top();
    if (a->k == Rx::Top) return empty();
    return node(Rx::Not, {a}, "~" + a->key);
  }

  bool nullable(const RxP& r) const {
    switch (r->k) {
      case Rx::Empty: case Rx::Set: return false;
      case Rx::Eps: case Rx::Top: case Rx::Star: return true;
      case Rx::Cat: return nullable(r->kids[0]) && nullable(r->kids[1]);
      case Rx::Or: return std::any_of(r->kids.begin(), r->kids.end(), [&](const RxP& x) { return nullable(x); });
      case Rx::And: return std::all_of(r->kids.begin(), r->kids.end(), [&](const RxP& x) { return nullable(x); });
      case Rx::Not: return !nullable(r->kids[0]);
    }
    return false;
  }

  RxP deriv(const RxP& r, Letter a) const {
    switch (r->k) {
      case Rx::Empty: case Rx::Eps: return empty();
      case Rx::Top: return r;
      case Rx::Set: return r->set[static_cast<std::size_t>(a)] ? eps() : empty();
      case Rx::Cat: {
        auto first = cat(deriv(r->kids[0], a), r->kids[1]);
        return nullable(r->kids[0]) ? alt({first, deriv(r->kids[1], a)}) : first;
      }
      case Rx::Star: return cat(deriv(r->kids[0], a), r);
      case Rx::Or: case Rx::And: {
        std::vector<RxP> ds;
        for (const auto& x : r->kids) ds.push_back(deriv(x, a));
        return r->k == Rx::Or ? alt(ds) : both(ds);
      }
      case Rx::Not: return neg(deriv(r->kids[0], a));
    }
    return empty();
  }

 private:
  RxP leaf(Rx::K k, const char* key) const {
    auto r = std::make_shared<Rx>();
    r->k = k;
    r->key = key;
    return r;
  }
  RxP node(Rx::K k, std::vector<RxP> kids, std::string key) const {
    auto r = std::make_shared<Rx>();
    r->k = k;
    r->kids = std::move(kids);
    r->key = std::move(key);
    return r;
  }
  RxP lattice(Rx::K k, std::vector<RxP> xs) const {
    const bool is_or = k == Rx::Or;
    std::map<std::string, RxP> flat;
    std::function<void(const RxP&)> add = [&](const RxP& x) {
      if (x->k == k) {
        for (const auto& y : x->kids) add(y);
        return;
      }
      flat.emplace(x->key, x);
    };
    for (const auto& x : xs) add(x);
    if (flat.count(is_or ? "T" : "0")) return is_or ? top() : empty();
    flat.erase(is_or ? "0" : "T");
    if (flat.empty()) return is_or ? empty() : top();
    if (flat.size() == 1) return flat.begin()->second;
    std::vector<RxP> kids;
    std::string key = is_or ? "(|" : "(&";
    for (auto& [kk, v] : flat) {
      key += kk + ",";
      kids.push_back(v);
    }
    return node(k, std::move(kids), key + ")");
  }
  int k_;
};

RxP to_rx(const Rxs& f, const json& p, const json& alphabet) {
  const std::size_t k = alphabet.size();
  auto sigma_star = f.top();
  auto not_in = [&](std::vector<bool> m) {
    for (std::size_t i = 0; i < k; ++i) m[i] = !m[i];
    return m;
  };
  if (p.is_string()) {
    auto s = p.get<std::string>();
    if (s == "all") return f.top();
    if (s == "any") return f.full();
    if (s == "epsilon") return f.eps();
    return f.empty();
  }
  const auto& [key, arg] = *p.items().begin();
  if (key == "letters") return f.set(letter_mask(alphabet, arg));
  if (key == "word") {
    RxP r = f.eps();
    for (auto it = arg.rbegin(); it != arg.rend(); ++it) {
      std::vector<bool> m(k, false);
      m[static_cast<std::size_t>(letter_index(alphabet, it->get<std::string>()))] = true;
      r = f.cat(f.set(m), r);
    }
    return r;
  }
  if (key == "occurs") return f.cat(sigma_star, f.cat(f.set(letter_mask(alphabet, arg)), sigma_star));
  if (key == "before" || key == "eventually_follows" || key == "always_preceded") {
    auto c = letter_mask(alphabet, arg.at("c")), d = letter_mask(alphabet, arg.at("d"));
    if (key == "before")
      return f.cat(sigma_star, f.cat(f.set(c), f.cat(sigma_star, f.cat(f.set(d), sigma_star))));
    if (key == "eventually_follows")  // no C occurrence left without a later D
      return f.neg(f.cat(sigma_star, f.cat(f.set(c), f.star(f.set(not_in(d))))));
    return f.neg(f.cat(f.star(f.set(not_in(c))), f.cat(f.set(d), sigma_star)));
  }
  if (key == "not") return f.neg(to_rx(f, arg, alphabet));
  if (key == "star") return f.star(to_rx(f, arg, alphabet));
  std::vector<RxP> xs;
  for (const auto& q : arg) xs.push_back(to_rx(f, q, alphabet));
  if (key == "and") return f.both(xs);
  if (key == "or") return f.alt(xs);
  RxP r = f.eps();
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) r = f.cat(*it, r);
  return r;
}

}  // namespace

int LangGraph::run(const Word& w, int from) const {
  int s = from;
  for (Letter a : w) s = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  return s;
}

void LangGraph::finish() {
  const std::size_t n = next.size();
  live = accepting;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s)
      if (!live[s])
        for (int t : next[s])
          if (live[static_cast<std::size_t>(t)]) {
            live[s] = changed = true;
            break;
          }
  }
  std::vector<bool> bad(n);
  for (std::size_t s = 0; s < n; ++s) bad[s] = !accepting[s];
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s)
      if (!bad[s])
        for (int t : next[s])
          if (bad[static_cast<std::size_t>(t)]) {
            bad[s] = changed = true;
            break;
          }
  }
  all_good.resize(n);
  for (std::size_t s = 0; s < n; ++s) all_good[s] = !bad[s];
}

bool LangGraph::image(const std::vector<bool>& mine, const Word& w, bool then_extend) const {
  // Search (node, matched) pairs; letters outside `mine` never advance the match.
  const std::size_t n = next.size();
  std::vector<std::vector<bool>> seen(w.size() + 1, std::vector<bool>(n, false));
  std::deque<std::pair<int, std::size_t>> work{{0, 0}};
  seen[0][0] = true;
  while (!work.empty()) {
    auto [s, i] = work.front();
    work.pop_front();
    if (i == w.size() && (then_extend ? live : accepting)[static_cast<std::size_t>(s)]) return true;
    for (Letter a = 0; a < letters; ++a) {
      std::size_t j = i;
      if (mine[static_cast<std::size_t>(a)]) {
        if (i == w.size() || w[i] != a) continue;
        j = i + 1;
      }
      int t = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      if (!seen[j][static_cast<std::size_t>(t)]) {
        seen[j][static_cast<std::size_t>(t)] = true;
        work.emplace_back(t, j);
      }
    }
  }
  return false;
}

bool LangGraph::local_extendable(const std::vector<bool>& mine, const Word& w) const { return image(mine, w, true); }

LangGraph derivative_graph(const json& pattern, const json& alphabet) {
  const int k = static_cast<int>(alphabet.size());
  Rxs f(k);
  LangGraph g;
  g.letters = k;
  std::map<std::string, int> index;
  std::vector<RxP> nodes{to_rx(f, pattern, alphabet)};
  index[nodes[0]->key] = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes.size() > 200000) throw std::runtime_error("oracle: derivative graph too large");
    std::vector<int> row;
    for (Letter a = 0; a < k; ++a) {
      auto d = f.deriv(nodes[i], a);
      auto [it, fresh] = index.emplace(d->key, static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back(d);
      row.push_back(it->second);
    }
    g.next.push_back(std::move(row));
    g.accepting.push_back(f.nullable(nodes[i]));
  }
  g.finish();
  return g;
}

LangGraph automaton_graph(const json& file) {
  const auto& events = file.at("events");
  const int k = static_cast<int>(events.size());
  std::vector<std::string> names = file.at("states").get<std::vector<std::string>>();
  auto idx = [&](const std::string& s) {
    return static_cast<int>(std::find(names.begin(), names.end(), s) - names.begin());
  };
  std::set<int> acc;
  for (const auto& a : file.at("accepting")) acc.insert(idx(a.get<std::string>()));
  std::map<std::pair<int, int>, std::set<int>> step;
  for (const auto& t : file.at("transitions"))
    step[{idx(t.at("from").get<std::string>()), letter_index(events, t.at("event").get<std::string>())}].insert(
        idx(t.at("to").get<std::string>()));
  LangGraph g;
  g.letters = k;
  std::map<std::set<int>, int> index;
  std::vector<std::set<int>> nodes{{idx(file.at("initial").get<std::string>())}};
  index[nodes[0]] = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<int> row;
    for (int a = 0; a < k; ++a) {
      std::set<int> nx;
      for (int q : nodes[i]) {
        auto it = step.find({q, a});
        if (it != step.end()) nx.insert(it->second.begin(), it->second.end());
      }
      auto [it, fresh] = index.emplace(nx, static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back(nx);
      row.push_back(it->second);
    }
    g.next.push_back(std::move(row));
    g.accepting.push_back(std::any_of(nodes[i].begin(), nodes[i].end(), [&](int q) { return acc.count(q) > 0; }));
  }
  g.finish();
  return g;
}

// ---------------------------------------------------------------- channels

OutSeq run_paths(const Transducer& t, const Word& h) {
  OutSeq out(h.size());
  std::function<void(int, std::size_t)> walk = [&](int s, std::size_t k) {
    if (k == h.size()) return;
    for (const auto& e : t.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(h[k])]) {
      if (e.output >= 0) out[k].insert(e.output);
      walk(e.to, k + 1);
    }
  };
  walk(t.initial, 0);
  return out;
}

Rational path_sum(const ProbTransducer& t, const Word& x, const Word& y) {
  if (x.size() != y.size()) return 0;
  std::function<Rational(int, std::size_t)> walk = [&](int s, std::size_t k) -> Rational {
    if (k == x.size()) return 1;
    Rational acc = 0;
    for (const auto& e : t.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x[k])])
      if (e.output == y[k]) acc += e.p * walk(e.to, k + 1);
    return acc;
  };
  return walk(t.initial, 0);
}

Rational path_last(const ProbTransducer& t, const Word& x, int v) {
  if (x.empty()) return 0;
  std::function<Rational(int, std::size_t)> walk = [&](int s, std::size_t k) -> Rational {
    Rational acc = 0;
    for (const auto& e : t.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x[k])]) {
      if (k + 1 == x.size()) {
        if (e.output == v) acc += e.p;
      } else {
        acc += e.p * walk(e.to, k + 1);
      }
    }
    return acc;
  };
  return walk(t.initial, 0);
}

// ---------------------------------------------------------------- generators

AlphabetPtr two_subject_alphabet() {
  return std::make_shared<const Alphabet>(
      std::vector<Event>{{"a0", "A", {}, {}, {}}, {"a1", "A", {}, {}, {}}, {"b0", "B", {}, {}, {}}});
}

RegularProperty Gen::property(const AlphabetPtr& sigma, int max_states) {
  const int k = static_cast<int>(sigma->size());
  const int n = 1 + below(max_states);
  Dfa d(k);
  for (int s = 0; s < n; ++s) d.add_state(coin());
  for (int s = 0; s < n; ++s)
    for (Letter a = 0; a < k; ++a) d.set(s, a, below(n));
  return make_property(sigma, d);
}

namespace {

Matrix random_matrix(Gen& g, std::size_t ns, std::size_t no, const std::vector<std::string>& actions, double p) {
  Matrix m(ns, std::vector<ActionSet>(no));
  for (auto& row : m)
    for (auto& cell : row)
      for (const auto& a : actions)
        if (g.coin(p)) cell.insert(a);
  return m;
}

}  // namespace

AcModel Gen::ac_model() {
  AcModel m;
  const int ns = 1 + below(3), no = 1 + below(3);
  for (int u = 0; u < ns; ++u) m.subjects.push_back("u" + std::to_string(u));
  for (int i = 0; i < no; ++i) m.objects.push_back("o" + std::to_string(i));
  m.actions = {"r", "w", "x"};
  m.M = random_matrix(*this, m.subjects.size(), m.objects.size(), m.actions, 0.6);
  // Accesses mostly inside permissions so both verdicts occur.
  m.B = random_matrix(*this, m.subjects.size(), m.objects.size(), m.actions, 0.3);
  if (coin(0.5))
    for (std::size_t u = 0; u < m.subjects.size(); ++u)
      for (std::size_t i = 0; i < m.objects.size(); ++i) {
        ActionSet keep;
        for (const auto& a : m.B[u][i])
          if (m.M[u][i].count(a)) keep.insert(a);
        m.B[u][i] = keep;
      }
  return m;
}

AuthorizationModel Gen::authorization_model() {
  AuthorizationModel am;
  am.ac = ac_model();
  am.ac.actions = {"r", "w"};
  for (auto* mat : {&am.ac.M, &am.ac.B})
    for (auto& row : *mat)
      for (auto& cell : row) cell.erase("x");
  const int nl = 1 + below(4);
  std::vector<std::string> lv;
  for (int l = 0; l < nl; ++l) lv.push_back("l" + std::to_string(l));
  std::vector<std::pair<std::string, std::string>> covers;
  for (int a = 0; a < nl; ++a)
    for (int b = a + 1; b < nl; ++b)
      if (coin(0.4)) covers.emplace_back(lv[static_cast<std::size_t>(a)], lv[static_cast<std::size_t>(b)]);
  am.levels = Poset::from_covers(lv, covers);
  auto pick = [&] { return lv[static_cast<std::size_t>(below(nl))]; };
  for (const auto& u : am.ac.subjects) {
    am.cl[u] = pick();
    // Mostly located below the clearance.
    am.pl[u] = coin(0.7) ? am.cl[u] : pick();
  }
  for (const auto& i : am.ac.objects) am.pl[i] = pick();
  return am;
}

SharedChannel Gen::shared_channel(int states) {
  SharedChannel m;
  Transducer& t = m.t;
  const int ns = 1 + below(states);
  for (int s = 0; s < ns; ++s) t.states.push_back("s" + std::to_string(s));
  t.inputs = {"a0", "a1", "b0"};
  t.outputs = {"0", "1"};
  m.owner = {"A", "A", "B"};
  m.subjects = {"A", "B"};
  m.levels = Poset::from_covers({"LA", "LB"}, {});
  m.pl = {"LA", "LA", "LB"};
  m.cl = {{"A", "LA"}, {"B", "LB"}};
  t.delta.assign(static_cast<std::size_t>(ns), std::vector<std::vector<Transducer::Edge>>(3));
  for (auto& row : t.delta)
    for (auto& edges : row) edges = {{below(ns), below(2)}};
  return m;
}

}  // namespace secsci::test
