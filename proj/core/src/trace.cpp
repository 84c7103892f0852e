// SPDX-License-Identifier: Apache-2.0
#include "secsci/trace.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace secsci {

Alphabet::Alphabet(std::vector<Event> events) : events_(std::move(events)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (e.id.empty()) throw Error("event with empty id");
    if (e.subject.empty()) throw Error("event '" + e.id + "' has no subject");
    if (!index_.emplace(e.id, static_cast<Letter>(i)).second) throw Error("duplicate event id '" + e.id + "'");
    if (std::find(subjects_.begin(), subjects_.end(), e.subject) == subjects_.end()) subjects_.push_back(e.subject);
  }
}

std::optional<Letter> Alphabet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Letter Alphabet::at(std::string_view id) const {
  auto a = find(id);
  if (!a) throw Error("unknown event '" + std::string(id) + "'");
  return *a;
}

bool Alphabet::has_subject(std::string_view u) const {
  return std::find(subjects_.begin(), subjects_.end(), u) != subjects_.end();
}

std::vector<Letter> Alphabet::letters_of(std::string_view u) const {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < events_.size(); ++i)
    if (events_[i].subject == u) out.push_back(static_cast<Letter>(i));
  return out;
}

std::shared_ptr<const Alphabet> Alphabet::restrict_to(std::string_view u) const {
  if (!has_subject(u)) throw Error("unknown subject '" + std::string(u) + "'");
  std::vector<Event> es;
  for (const auto& e : events_)
    if (e.subject == u) es.push_back(e);
  return std::make_shared<const Alphabet>(std::move(es));
}

Word Alphabet::parse(const std::vector<std::string>& ids) const {
  Word w;
  w.reserve(ids.size());
  for (const auto& id : ids) w.push_back(at(id));
  return w;
}

std::vector<std::string> Alphabet::render(const Word& w) const {
  std::vector<std::string> out;
  out.reserve(w.size());
  for (Letter a : w) out.push_back(event(a).id);
  return out;
}

std::string Alphabet::show(const Word& w) const {
  std::string s = "<";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += event(w[i]).id;
  }
  return s + ">";
}

int Dfa::add_state(bool accepting) {
  acc_.push_back(accepting);
  delta_.resize(acc_.size() * static_cast<std::size_t>(k_), static_cast<int>(acc_.size()) - 1);
  return static_cast<int>(acc_.size()) - 1;
}

int Dfa::run(const Word& w, int from) const {
  int s = from;
  for (Letter a : w) s = next(s, a);
  return s;
}

int Nfa::add_state(bool accepting) {
  acc.push_back(accepting);
  delta.emplace_back(static_cast<std::size_t>(k));
  eps.emplace_back();
  return states() - 1;
}

namespace {

void close_eps(const Nfa& n, std::vector<int>& set) {
  std::vector<int> stack(set.begin(), set.end());
  std::set<int> seen(set.begin(), set.end());
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : n.eps[static_cast<std::size_t>(s)])
      if (seen.insert(t).second) stack.push_back(t);
  }
  set.assign(seen.begin(), seen.end());
}

}  // namespace

bool Nfa::accepts(const Word& w) const {
  std::vector<int> cur = initial;
  close_eps(*this, cur);
  for (Letter a : w) {
    std::set<int> nxt;
    for (int s : cur)
      for (int t : delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) nxt.insert(t);
    cur.assign(nxt.begin(), nxt.end());
    close_eps(*this, cur);
  }
  return std::any_of(cur.begin(), cur.end(), [&](int s) { return acc[static_cast<std::size_t>(s)]; });
}

namespace dfa {

Dfa empty(int letters) {
  Dfa d(letters);
  d.add_state(false);
  return d;
}

Dfa universal(int letters) {
  Dfa d(letters);
  d.add_state(true);
  return d;
}

Dfa determinize(const Nfa& n) {
  Dfa d(n.k);
  std::map<std::vector<int>, int> ids;
  std::deque<std::vector<int>> work;
  std::vector<int> start = n.initial;
  close_eps(n, start);
  auto intern = [&](std::vector<int> set) {
    auto it = ids.find(set);
    if (it != ids.end()) return it->second;
    bool acc = std::any_of(set.begin(), set.end(), [&](int s) { return n.acc[static_cast<std::size_t>(s)]; });
    int id = d.add_state(acc);
    ids.emplace(set, id);
    work.push_back(std::move(set));
    return id;
  };
  intern(start);
  while (!work.empty()) {
    std::vector<int> set = std::move(work.front());
    work.pop_front();
    int from = ids.at(set);
    for (Letter a = 0; a < n.k; ++a) {
      std::set<int> nxt;
      for (int s : set)
        for (int t : n.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) nxt.insert(t);
      std::vector<int> v(nxt.begin(), nxt.end());
      close_eps(n, v);
      d.set(from, a, intern(std::move(v)));
    }
  }
  return d;
}

Nfa to_nfa(const Dfa& d) {
  Nfa n(d.letters());
  for (int s = 0; s < d.states(); ++s) n.add_state(d.accepting(s));
  for (int s = 0; s < d.states(); ++s)
    for (Letter a = 0; a < d.letters(); ++a) n.add(s, a, d.next(s, a));
  n.initial = {0};
  return n;
}

Dfa complement(const Dfa& d) {
  Dfa c = d;
  for (int s = 0; s < c.states(); ++s) c.set_accepting(s, !d.accepting(s));
  return c;
}

namespace {

template <class Acc>
Dfa product(const Dfa& a, const Dfa& b, Acc acc) {
  if (a.letters() != b.letters()) throw Error("automata over different alphabets");
  Dfa d(a.letters());
  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> work;
  auto intern = [&](std::pair<int, int> p) {
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    int id = d.add_state(acc(a.accepting(p.first), b.accepting(p.second)));
    ids.emplace(p, id);
    work.push_back(p);
    return id;
  };
  intern({0, 0});
  while (!work.empty()) {
    auto p = work.front();
    work.pop_front();
    int from = ids.at(p);
    for (Letter x = 0; x < a.letters(); ++x) d.set(from, x, intern({a.next(p.first, x), b.next(p.second, x)}));
  }
  return d;
}

}  // namespace

Dfa intersect(const Dfa& a, const Dfa& b) { return minimize(product(a, b, [](bool x, bool y) { return x && y; })); }
Dfa unite(const Dfa& a, const Dfa& b) { return minimize(product(a, b, [](bool x, bool y) { return x || y; })); }
Dfa difference(const Dfa& a, const Dfa& b) { return minimize(product(a, b, [](bool x, bool y) { return x && !y; })); }

Dfa concat(const Dfa& a, const Dfa& b) {
  Nfa n(a.letters());
  int off = a.states();
  for (int s = 0; s < a.states(); ++s) n.add_state(false);
  for (int s = 0; s < b.states(); ++s) n.add_state(b.accepting(s));
  for (int s = 0; s < a.states(); ++s) {
    for (Letter x = 0; x < a.letters(); ++x) n.add(s, x, a.next(s, x));
    if (a.accepting(s)) n.add_eps(s, off);
  }
  for (int s = 0; s < b.states(); ++s)
    for (Letter x = 0; x < b.letters(); ++x) n.add(off + s, x, off + b.next(s, x));
  n.initial = {0};
  return minimize(determinize(n));
}

Dfa star(const Dfa& a) {
  Nfa n(a.letters());
  int hub = n.add_state(true);
  for (int s = 0; s < a.states(); ++s) n.add_state(false);
  n.add_eps(hub, 1);
  for (int s = 0; s < a.states(); ++s) {
    for (Letter x = 0; x < a.letters(); ++x) n.add(1 + s, x, 1 + a.next(s, x));
    if (a.accepting(s)) n.add_eps(1 + s, hub);
  }
  n.initial = {hub};
  return minimize(determinize(n));
}

std::vector<bool> reachable(const Dfa& d) {
  std::vector<bool> seen(static_cast<std::size_t>(d.states()), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (Letter a = 0; a < d.letters(); ++a) {
      int t = d.next(s, a);
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

std::vector<bool> coreachable(const Dfa& d) {
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(d.states()));
  for (int s = 0; s < d.states(); ++s)
    for (Letter a = 0; a < d.letters(); ++a) rev[static_cast<std::size_t>(d.next(s, a))].push_back(s);
  std::vector<bool> good(static_cast<std::size_t>(d.states()), false);
  std::vector<int> stack;
  for (int s = 0; s < d.states(); ++s)
    if (d.accepting(s)) {
      good[static_cast<std::size_t>(s)] = true;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int p : rev[static_cast<std::size_t>(s)])
      if (!good[static_cast<std::size_t>(p)]) {
        good[static_cast<std::size_t>(p)] = true;
        stack.push_back(p);
      }
  }
  return good;
}

Dfa minimize(const Dfa& d) {
  auto reach = reachable(d);
  std::vector<int> alive;
  for (int s = 0; s < d.states(); ++s)
    if (reach[static_cast<std::size_t>(s)]) alive.push_back(s);

  // Moore refinement over reachable states.
  std::vector<int> cls(static_cast<std::size_t>(d.states()), -1);
  for (int s : alive) cls[static_cast<std::size_t>(s)] = d.accepting(s) ? 1 : 0;
  std::size_t count = 0;
  for (;;) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next_cls(cls.size(), -1);
    for (int s : alive) {
      std::vector<int> key;
      key.reserve(static_cast<std::size_t>(d.letters()) + 1);
      key.push_back(cls[static_cast<std::size_t>(s)]);
      for (Letter a = 0; a < d.letters(); ++a) key.push_back(cls[static_cast<std::size_t>(d.next(s, a))]);
      auto [it, inserted] = sig.emplace(std::move(key), static_cast<int>(sig.size()));
      next_cls[static_cast<std::size_t>(s)] = it->second;
    }
    cls.swap(next_cls);
    if (sig.size() == count) break;
    count = sig.size();
  }

  // Canonical numbering by BFS from the initial class.
  Dfa out(d.letters());
  std::map<int, int> number;
  std::map<int, int> repr;
  for (int s : alive) repr.emplace(cls[static_cast<std::size_t>(s)], s);
  std::deque<int> work;
  int c0 = cls[0];
  number[c0] = out.add_state(d.accepting(repr[c0]));
  work.push_back(c0);
  while (!work.empty()) {
    int c = work.front();
    work.pop_front();
    int s = repr[c];
    for (Letter a = 0; a < d.letters(); ++a) {
      int tc = cls[static_cast<std::size_t>(d.next(s, a))];
      auto it = number.find(tc);
      if (it == number.end()) {
        it = number.emplace(tc, out.add_state(d.accepting(repr[tc]))).first;
        work.push_back(tc);
      }
      out.set(number[c], a, it->second);
    }
  }
  return out;
}

bool equivalent(const Dfa& a, const Dfa& b) { return minimize(a) == minimize(b); }

bool is_empty(const Dfa& d) { return !shortest_word(d).has_value(); }

bool subset(const Dfa& a, const Dfa& b) { return is_empty(difference(a, b)); }

std::optional<Word> shortest_word(const Dfa& d) {
  std::vector<int> parent(static_cast<std::size_t>(d.states()), -2);
  std::vector<Letter> via(static_cast<std::size_t>(d.states()), -1);
  std::deque<int> work{0};
  parent[0] = -1;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    if (d.accepting(s)) {
      Word w;
      for (int t = s; parent[static_cast<std::size_t>(t)] != -1; t = parent[static_cast<std::size_t>(t)])
        w.push_back(via[static_cast<std::size_t>(t)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Letter a = 0; a < d.letters(); ++a) {
      int t = d.next(s, a);
      if (parent[static_cast<std::size_t>(t)] == -2) {
        parent[static_cast<std::size_t>(t)] = s;
        via[static_cast<std::size_t>(t)] = a;
        work.push_back(t);
      }
    }
  }
  return std::nullopt;
}

Dfa erase_image(const Dfa& d, const std::vector<bool>& keep, const std::vector<Letter>& rename, int new_letters) {
  Nfa n(new_letters);
  for (int s = 0; s < d.states(); ++s) n.add_state(d.accepting(s));
  for (int s = 0; s < d.states(); ++s)
    for (Letter a = 0; a < d.letters(); ++a) {
      if (keep[static_cast<std::size_t>(a)])
        n.add(s, rename[static_cast<std::size_t>(a)], d.next(s, a));
      else
        n.add_eps(s, d.next(s, a));
    }
  n.initial = {0};
  return minimize(determinize(n));
}

Dfa inverse_erase(const Dfa& local, const std::vector<bool>& keep, const std::vector<Letter>& rename) {
  Dfa d(static_cast<int>(keep.size()));
  for (int s = 0; s < local.states(); ++s) d.add_state(local.accepting(s));
  for (int s = 0; s < local.states(); ++s)
    for (Letter a = 0; a < d.letters(); ++a)
      d.set(s, a, keep[static_cast<std::size_t>(a)] ? local.next(s, rename[static_cast<std::size_t>(a)]) : s);
  return minimize(d);
}

}  // namespace dfa

RegularProperty make_property(AlphabetPtr sigma, Dfa d) {
  if (static_cast<std::size_t>(d.letters()) != sigma->size()) throw Error("automaton letters do not match alphabet");
  return RegularProperty{std::move(sigma), dfa::minimize(d)};
}

RegularProperty universal_property(AlphabetPtr sigma) {
  int k = static_cast<int>(sigma->size());
  return RegularProperty{std::move(sigma), dfa::universal(k)};
}

RegularProperty empty_property(AlphabetPtr sigma) {
  int k = static_cast<int>(sigma->size());
  return RegularProperty{std::move(sigma), dfa::empty(k)};
}

namespace {
void same_alphabet(const RegularProperty& a, const RegularProperty& b) {
  if (a.alphabet != b.alphabet && !(*a.alphabet == *b.alphabet)) throw Error("properties over different alphabets");
}
}  // namespace

RegularProperty complement(const RegularProperty& p) { return {p.alphabet, dfa::complement(p.dfa)}; }

RegularProperty intersect(const RegularProperty& a, const RegularProperty& b) {
  same_alphabet(a, b);
  return {a.alphabet, dfa::intersect(a.dfa, b.dfa)};
}

RegularProperty unite(const RegularProperty& a, const RegularProperty& b) {
  same_alphabet(a, b);
  return {a.alphabet, dfa::unite(a.dfa, b.dfa)};
}

RegularProperty difference(const RegularProperty& a, const RegularProperty& b) {
  same_alphabet(a, b);
  return {a.alphabet, dfa::difference(a.dfa, b.dfa)};
}

bool same_language(const RegularProperty& a, const RegularProperty& b) {
  same_alphabet(a, b);
  return dfa::equivalent(a.dfa, b.dfa);
}

bool is_subset(const RegularProperty& a, const RegularProperty& b) {
  same_alphabet(a, b);
  return dfa::subset(a.dfa, b.dfa);
}

Word purge_strict(const Alphabet& sigma, const Word& h, std::string_view u) {
  if (!sigma.has_subject(u)) throw Error("unknown subject '" + std::string(u) + "'");
  return purge_general(h, [&](Letter a) { return sigma.subject_of(a) == u; });
}

Word purge_general(const Word& h, const std::function<bool(Letter)>& cleared) {
  Word out;
  for (Letter a : h)
    if (cleared(a)) out.push_back(a);
  return out;
}

namespace {

struct LocalMap {
  std::vector<bool> keep;
  std::vector<Letter> rename;
  int count = 0;
};

LocalMap local_map(const Alphabet& sigma, std::string_view u) {
  if (!sigma.has_subject(u)) throw Error("unknown subject '" + std::string(u) + "'");
  LocalMap m;
  m.keep.assign(sigma.size(), false);
  m.rename.assign(sigma.size(), -1);
  for (std::size_t a = 0; a < sigma.size(); ++a)
    if (sigma.event(static_cast<Letter>(a)).subject == u) {
      m.keep[a] = true;
      m.rename[a] = m.count++;
    }
  return m;
}

}  // namespace

Word purge_local(const Alphabet& sigma, const Word& h, std::string_view u) {
  auto m = local_map(sigma, u);
  Word out;
  for (Letter a : h)
    if (m.keep[static_cast<std::size_t>(a)]) out.push_back(m.rename[static_cast<std::size_t>(a)]);
  return out;
}

RegularProperty purge_image(const RegularProperty& p, std::string_view u) {
  auto m = local_map(*p.alphabet, u);
  return {p.alphabet->restrict_to(u), dfa::erase_image(p.dfa, m.keep, m.rename, m.count)};
}

RegularProperty inverse_purge(const RegularProperty& local, const AlphabetPtr& sigma, std::string_view u) {
  auto m = local_map(*sigma, u);
  if (static_cast<int>(local.alphabet->size()) != m.count) throw Error("local property does not match subject alphabet");
  return {sigma, dfa::inverse_erase(local.dfa, m.keep, m.rename)};
}

Word schedule_recompose(const Alphabet& sigma, const std::map<std::string, Word>& locals,
                        const std::vector<std::string>& sched) {
  std::map<std::string, std::size_t> need;
  for (const auto& u : sched) ++need[u];
  for (const auto& [u, w] : locals) {
    if (!sigma.has_subject(u)) throw Error("unknown subject '" + u + "'");
    for (Letter a : w)
      if (sigma.subject_of(a) != u) throw Error("local history of '" + u + "' holds a foreign event");
    if (need[u] != w.size())
      throw Error("schedule gives '" + u + "' " + std::to_string(need[u]) + " slots for " + std::to_string(w.size()) +
                  " events");
  }
  for (const auto& [u, n] : need)
    if (n && !locals.count(u)) throw Error("schedule names '" + u + "' without a local history");
  std::map<std::string, std::size_t> pos;
  Word out;
  out.reserve(sched.size());
  for (const auto& u : sched) out.push_back(locals.at(u)[pos[u]++]);
  return out;
}

std::vector<std::string> schedule_of(const Alphabet& sigma, const Word& h) {
  std::vector<std::string> s;
  s.reserve(h.size());
  for (Letter a : h) s.push_back(sigma.subject_of(a));
  return s;
}

bool is_prefix(const Word& x, const Word& y) {
  return x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin());
}

namespace {

std::vector<bool> letter_set(const Alphabet& sigma, const std::vector<std::string>& ids) {
  std::vector<bool> in(sigma.size(), false);
  for (const auto& id : ids) in[static_cast<std::size_t>(sigma.at(id))] = true;
  return in;
}

Dfa build(const Alphabet& sigma, const Pattern& p) {
  const int k = static_cast<int>(sigma.size());
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::All: return dfa::universal(k);
    case K::Empty: return dfa::empty(k);
    case K::Epsilon: {
      Dfa d(k);
      d.add_state(true);
      int sink = d.add_state(false);
      for (Letter a = 0; a < k; ++a) d.set(0, a, sink);
      return d;
    }
    case K::Any:
    case K::Letters: {
      auto in = p.kind == K::Any ? std::vector<bool>(sigma.size(), true) : letter_set(sigma, p.left);
      Dfa d(k);
      d.add_state(false);
      int one = d.add_state(true);
      int sink = d.add_state(false);
      for (Letter a = 0; a < k; ++a) {
        d.set(0, a, in[static_cast<std::size_t>(a)] ? one : sink);
        d.set(one, a, sink);
      }
      return dfa::minimize(d);
    }
    case K::Word: {
      Word w = sigma.parse(p.left);
      Dfa d(k);
      for (std::size_t i = 0; i <= w.size(); ++i) d.add_state(i == w.size());
      int sink = d.add_state(false);
      for (std::size_t i = 0; i <= w.size(); ++i)
        for (Letter a = 0; a < k; ++a)
          d.set(static_cast<int>(i), a, i < w.size() && w[i] == a ? static_cast<int>(i + 1) : sink);
      return dfa::minimize(d);
    }
    case K::Occurs: {
      auto c = letter_set(sigma, p.left);
      Dfa d(k);
      d.add_state(false);
      d.add_state(true);
      for (Letter a = 0; a < k; ++a) {
        d.set(0, a, c[static_cast<std::size_t>(a)] ? 1 : 0);
        d.set(1, a, 1);
      }
      return d;
    }
    case K::Before: {
      auto c = letter_set(sigma, p.left), e = letter_set(sigma, p.right);
      Dfa d(k);
      d.add_state(false);
      d.add_state(false);
      d.add_state(true);
      for (Letter a = 0; a < k; ++a) {
        auto i = static_cast<std::size_t>(a);
        d.set(0, a, c[i] ? 1 : 0);
        d.set(1, a, e[i] ? 2 : 1);
        d.set(2, a, 2);
      }
      return dfa::minimize(d);
    }
    case K::EventuallyFollows: {
      // Every occurrence from C is followed later by some event from D.
      auto c = letter_set(sigma, p.left), e = letter_set(sigma, p.right);
      Dfa d(k);
      d.add_state(true);
      d.add_state(false);
      for (int s = 0; s < 2; ++s)
        for (Letter a = 0; a < k; ++a) {
          auto i = static_cast<std::size_t>(a);
          d.set(s, a, c[i] ? 1 : (e[i] ? 0 : s));
        }
      return dfa::minimize(d);
    }
    case K::AlwaysPreceded: {
      // Every occurrence from D is preceded by some event from C.
      auto c = letter_set(sigma, p.left), e = letter_set(sigma, p.right);
      Dfa d(k);
      d.add_state(true);
      d.add_state(true);
      d.add_state(false);
      for (Letter a = 0; a < k; ++a) {
        auto i = static_cast<std::size_t>(a);
        d.set(0, a, e[i] ? 2 : (c[i] ? 1 : 0));
        d.set(1, a, 1);
        d.set(2, a, 2);
      }
      return dfa::minimize(d);
    }
    case K::Not:
      if (p.args.size() != 1) throw Error("'not' takes one pattern");
      return dfa::complement(build(sigma, p.args[0]));
    case K::Star:
      if (p.args.size() != 1) throw Error("'star' takes one pattern");
      return dfa::star(build(sigma, p.args[0]));
    case K::And:
    case K::Or:
    case K::Concat: {
      if (p.args.empty()) {
        if (p.kind == K::Or) return dfa::empty(k);
        if (p.kind == K::And) return dfa::universal(k);
        return build(sigma, Pattern{K::Epsilon, {}, {}, {}});
      }
      Dfa acc = build(sigma, p.args[0]);
      for (std::size_t i = 1; i < p.args.size(); ++i) {
        Dfa b = build(sigma, p.args[i]);
        acc = p.kind == K::And ? dfa::intersect(acc, b) : p.kind == K::Or ? dfa::unite(acc, b) : dfa::concat(acc, b);
      }
      return acc;
    }
  }
  throw Error("unknown pattern");
}

}  // namespace

RegularProperty pattern_property(const AlphabetPtr& sigma, const Pattern& p) {
  return {sigma, dfa::minimize(build(*sigma, p))};
}

void for_each_word(int letters, int n, const std::function<void(const Word&)>& f) {
  Word w(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    f(w);
    return;
  }
  if (letters == 0) return;
  for (;;) {
    f(w);
    int i = n - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == letters - 1) w[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
    ++w[static_cast<std::size_t>(i)];
  }
}

void for_each_word_upto(int letters, int n, const std::function<void(const Word&)>& f) {
  for (int len = 0; len <= n; ++len) for_each_word(letters, len, f);
}

}  // namespace secsci
