// SPDX-License-Identifier: Apache-2.0
#include "secsci/channel.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace secsci {

void Transducer::validate() const {
  const int ns = static_cast<int>(states.size());
  if (ns == 0) throw Error("transducer has no states");
  if (initial < 0 || initial >= ns) throw Error("initial state out of range");
  if (delta.size() != states.size()) throw Error("transition table has wrong number of states");
  for (const auto& row : delta) {
    if (row.size() != inputs.size()) throw Error("transition table has wrong number of inputs");
    for (const auto& edges : row)
      for (const auto& e : edges) {
        if (e.to < 0 || e.to >= ns) throw Error("transition target out of range");
        if (e.output < -1 || e.output >= static_cast<int>(outputs.size())) throw Error("output out of range");
      }
  }
}

bool Transducer::deterministic() const {
  for (const auto& row : delta)
    for (const auto& edges : row)
      if (edges.size() != 1) return false;
  return true;
}

int Transducer::input_index(std::string_view id) const {
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i] == id) return static_cast<int>(i);
  throw Error("unknown input " + std::string(id));
}

Word Transducer::parse(const std::vector<std::string>& ids) const {
  Word w;
  for (const auto& id : ids) w.push_back(input_index(id));
  return w;
}

OutSeq run(const Transducer& t, const Word& h) {
  OutSeq out;
  std::set<int> cur{t.initial};
  for (Letter x : h) {
    std::set<int> nxt, ys;
    for (int s : cur)
      for (const auto& e : t.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)]) {
        nxt.insert(e.to);
        if (e.output >= 0) ys.insert(e.output);
      }
    out.push_back(std::move(ys));
    cur = std::move(nxt);
  }
  return out;
}

std::set<OutWord> expand(const OutSeq& s) {
  std::set<OutWord> acc{OutWord{}};
  for (const auto& step : s) {
    std::set<OutWord> nxt;
    for (const auto& w : acc)
      for (int y : step) {
        auto v = w;
        v.push_back(y);
        nxt.insert(std::move(v));
      }
    acc = std::move(nxt);
  }
  return acc;
}

void SharedChannel::validate() const {
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
}

bool SharedChannel::cleared(int x, std::string_view u) const {
  auto it = cl.find(std::string(u));
  if (it == cl.end()) throw Error("unknown subject " + std::string(u));
  return levels.leq(pl[static_cast<std::size_t>(x)], it->second);
}

Word purge(const SharedChannel& m, const Word& h, std::string_view u) {
  Word out;
  for (Letter x : h)
    if (m.cleared(x, u)) out.push_back(x);
  return out;
}

Word purge_complement(const SharedChannel& m, const Word& h, std::string_view u) {
  Word out;
  for (Letter x : h)
    if (!m.cleared(x, u)) out.push_back(x);
  return out;
}

Word merge_purges(const SharedChannel& m, const Word& pattern, const Word& mine, const Word& others, std::string_view u) {
  Word out;
  std::size_t i = 0, j = 0;
  for (Letter x : pattern) {
    if (m.cleared(x, u)) {
      if (i >= mine.size()) throw Error("schedule longer than local part");
      out.push_back(mine[i++]);
    } else {
      if (j >= others.size()) throw Error("schedule longer than complementary part");
      out.push_back(others[j++]);
    }
  }
  if (i != mine.size() || j != others.size()) throw Error("schedule shorter than the parts");
  return out;
}

OutSeq local_view(const SharedChannel& m, std::string_view u, const Word& h) {
  if (!m.cl.count(std::string(u))) throw Error("unknown subject " + std::string(u));
  auto full = run(m.t, h);
  OutSeq out;
  for (std::size_t k = 0; k < h.size(); ++k)
    if (m.cleared(h[k], u)) out.push_back(full[k]);
  return out;
}

std::map<OutWord, std::vector<Word>> invert(const Transducer& t, int n) {
  std::map<OutWord, std::vector<Word>> inv;
  for_each_word_upto(static_cast<int>(t.inputs.size()), n, [&](const Word& x) {
    for (const auto& y : expand(run(t, x))) inv[y].push_back(x);
  });
  return inv;
}

std::set<OutWord> interference_channel(const SharedChannel& m, std::string_view u, const Word& local, int n) {
  for (Letter x : local)
    if (!m.cleared(x, u)) throw Error("local history contains inputs outside the clearance");
  std::set<OutWord> acc;
  for_each_word_upto(static_cast<int>(m.t.inputs.size()), n, [&](const Word& w) {
    if (purge(m, w, u) != local) return;
    auto e = expand(local_view(m, u, w));
    acc.insert(e.begin(), e.end());
  });
  return acc;
}

namespace {

NonintResult exact_check(const SharedChannel& m, std::string_view u, const std::optional<Word>& focus) {
  const Transducer& t = m.t;
  const int ns = static_cast<int>(t.states.size());
  const int k = static_cast<int>(t.inputs.size());
  std::vector<int> hidden, visible;
  for (int x = 0; x < k; ++x) (m.cleared(x, u) ? visible : hidden).push_back(x);
  auto step = [&](int s, int x) { return t.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)].front(); };

  // Node: (s1, s2, progress through focus).
  const int fl = focus ? static_cast<int>(focus->size()) : 0;
  auto key = [&](int a, int b, int p) { return (static_cast<std::size_t>(p) * ns + a) * ns + b; };
  struct Node {
    int a, b, p;
    int parent;
    int mx, my;  // input taken by each copy, -1 for none
  };
  std::vector<Node> nodes;
  std::vector<int> seen(static_cast<std::size_t>(ns) * ns * (fl + 1), -1);
  std::deque<int> work;
  nodes.push_back({t.initial, t.initial, 0, -1, -1, -1});
  seen[key(t.initial, t.initial, 0)] = 0;
  work.push_back(0);

  auto trace = [&](int id, Word& x, Word& y) {
    for (; id > 0; id = nodes[static_cast<std::size_t>(id)].parent) {
      const Node& n = nodes[static_cast<std::size_t>(id)];
      if (n.mx >= 0) x.push_back(n.mx);
      if (n.my >= 0) y.push_back(n.my);
    }
    std::reverse(x.begin(), x.end());
    std::reverse(y.begin(), y.end());
  };
  auto push = [&](int parent, int a, int b, int p, int mx, int my) {
    auto& slot = seen[key(a, b, p)];
    if (slot >= 0) return;
    slot = static_cast<int>(nodes.size());
    nodes.push_back({a, b, p, parent, mx, my});
    work.push_back(slot);
  };

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    const Node cur = nodes[static_cast<std::size_t>(id)];
    // Synchronized visible inputs first: a difference here is a witness.
    for (int x : visible) {
      if (focus && (cur.p >= fl || (*focus)[static_cast<std::size_t>(cur.p)] != x)) continue;
      auto ea = step(cur.a, x), eb = step(cur.b, x);
      if (ea.output != eb.output) {
        NonintResult r;
        r.interferes = true;
        trace(id, r.x, r.y);
        r.x.push_back(x);
        r.y.push_back(x);
        if (focus)
          for (int q = cur.p + 1; q < fl; ++q) {
            r.x.push_back((*focus)[static_cast<std::size_t>(q)]);
            r.y.push_back((*focus)[static_cast<std::size_t>(q)]);
          }
        r.view_x = local_view(m, u, r.x);
        r.view_y = local_view(m, u, r.y);
        return r;
      }
    }
    for (int x : hidden)
      for (int y : hidden) push(id, step(cur.a, x).to, step(cur.b, y).to, cur.p, x, y);
    for (int x : hidden) push(id, step(cur.a, x).to, cur.b, cur.p, x, -1);
    for (int y : hidden) push(id, cur.a, step(cur.b, y).to, cur.p, -1, y);
    for (int x : visible) {
      if (focus && (cur.p >= fl || (*focus)[static_cast<std::size_t>(cur.p)] != x)) continue;
      push(id, step(cur.a, x).to, step(cur.b, x).to, focus ? cur.p + 1 : 0, x, x);
    }
  }
  return {};
}

}  // namespace

NonintResult check_noninterference(const SharedChannel& m, std::string_view u, NonintMode mode, int bound,
                                   const std::optional<Word>& focus) {
  m.validate();
  if (std::find(m.subjects.begin(), m.subjects.end(), u) == m.subjects.end())
    throw Error("unknown subject " + std::string(u));
  if (focus)
    for (Letter x : *focus)
      if (!m.cleared(x, u)) throw Error("focus history contains inputs outside the clearance");
  if (mode == NonintMode::ExactDeterministic) {
    if (!m.t.deterministic()) {
      NonintResult r;
      r.supported = false;
      return r;
    }
    return exact_check(m, u, focus);
  }
  NonintResult r;
  bool found = false;
  for_each_word_upto(static_cast<int>(m.t.inputs.size()), bound, [&](const Word& x) {
    if (found) return;
    Word p = purge(m, x, u);
    if (focus && p != *focus) return;
    auto vx = local_view(m, u, x);
    auto vp = run(m.t, p);
    if (vx != vp) {
      found = true;
      r.interferes = true;
      r.x = x;
      r.y = p;
      r.view_x = vx;
      r.view_y = vp;
    }
  });
  return r;
}

CharacterizationReport characterizations(const SharedChannel& m, std::string_view u, int n) {
  m.validate();
  const int k = static_cast<int>(m.t.inputs.size());
  std::vector<Word> all;
  for_each_word_upto(k, n, [&](const Word& w) { all.push_back(w); });
  CharacterizationReport r;

  // (c)
  for (const auto& x : all)
    if (local_view(m, u, x) != run(m.t, purge(m, x, u))) {
      r.c = false;
      break;
    }
  // (b): views constant on purge classes.
  std::map<Word, OutSeq> rep;
  for (const auto& x : all) {
    auto p = purge(m, x, u);
    auto v = local_view(m, u, x);
    auto [it, fresh] = rep.emplace(p, v);
    if (!fresh && it->second != v) r.b = false;
  }
  // (a): for local histories over the clearance type.
  for (const auto& [p, _] : rep) {
    auto lhs = interference_channel(m, u, p, n);
    if (lhs != expand(run(m.t, p))) {
      r.a = false;
      break;
    }
  }
  // (d) with the witness y = (x|A) :: (z|¬A).
  for (const auto& x : all) {
    if (!r.d) break;
    auto xa = purge(m, x, u);
    auto vx = local_view(m, u, x);
    for (const auto& z : all) {
      Word y = xa;
      auto zc = purge_complement(m, z, u);
      y.insert(y.end(), zc.begin(), zc.end());
      if (purge(m, y, u) != xa || purge_complement(m, y, u) != zc || local_view(m, u, y) != vx) {
        r.d = false;
        break;
      }
    }
  }
  return r;
}

ProjectorReport purge_projector_check(const SharedChannel& m, int n) {
  m.validate();
  ProjectorReport r;
  auto bundled = [&](const Word& x) -> Word {
    if (x.empty()) return x;
    return purge(m, x, m.owner[static_cast<std::size_t>(x.back())]);
  };
  for_each_word_upto(static_cast<int>(m.t.inputs.size()), n, [&](const Word& x) {
    if (x.empty()) return;
    Word p = bundled(x);
    if (bundled(p) != p) r.projector_law = false;
    auto gx = run(m.t, x);
    auto gp = run(m.t, p);
    std::set<int> last_p = gp.empty() ? std::set<int>{} : gp.back();
    if (gx.back() != last_p && r.invariant) {
      r.invariant = false;
      r.counterexample = x;
    }
  });
  for (const auto& u : m.subjects)
    if (check_noninterference(m, u, NonintMode::Bounded, n).interferes) r.noninterfering = false;
  return r;
}

SharedChannel make_elevator(int floors, const std::vector<std::string>& subjects) {
  SharedChannel m;
  Transducer& t = m.t;
  for (int f = 0; f < floors; ++f) {
    t.states.push_back("floor" + std::to_string(f));
    t.outputs.push_back("stay" + std::to_string(f));
    t.outputs.push_back("move" + std::to_string(f));
  }
  std::vector<std::string> lv;
  for (const auto& s : subjects) {
    lv.push_back("L_" + s);
    m.cl[s] = "L_" + s;
    for (int f = 0; f < floors; ++f) {
      t.inputs.push_back("call" + std::to_string(f) + "_" + s);
      m.owner.push_back(s);
      m.pl.push_back("L_" + s);
    }
  }
  m.subjects = subjects;
  m.levels = Poset::from_covers(lv, {});
  t.initial = 0;
  t.delta.assign(static_cast<std::size_t>(floors), std::vector<std::vector<Transducer::Edge>>(t.inputs.size()));
  for (int s = 0; s < floors; ++s)
    for (std::size_t x = 0; x < t.inputs.size(); ++x) {
      int f = static_cast<int>(x) % floors;
      t.delta[static_cast<std::size_t>(s)][x] = {{f, f == s ? 2 * f : 2 * f + 1}};
    }
  return m;
}

std::string show_outputs(const Transducer& t, const OutSeq& s) {
  std::string out = "<";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += " ";
    if (s[k].size() == 1) {
      out += t.outputs[static_cast<std::size_t>(*s[k].begin())];
      continue;
    }
    out += "{";
    bool first = true;
    for (int y : s[k]) {
      if (!first) out += ",";
      out += t.outputs[static_cast<std::size_t>(y)];
      first = false;
    }
    out += "}";
  }
  return out + ">";
}

}  // namespace secsci
