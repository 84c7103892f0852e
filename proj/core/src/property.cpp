// SPDX-License-Identifier: Apache-2.0
#include "secsci/property.hpp"

#include <deque>
#include <map>
#include <set>

namespace secsci {

RegularProperty lower_closure(const RegularProperty& p) {
  Dfa d = p.dfa;
  auto co = dfa::coreachable(d);
  for (int s = 0; s < d.states(); ++s) d.set_accepting(s, co[static_cast<std::size_t>(s)]);
  return {p.alphabet, dfa::minimize(d)};
}

RegularProperty interior(const RegularProperty& p) { return complement(lower_closure(complement(p))); }

RegularProperty external_cylinder(const RegularProperty& p, std::string_view u) {
  return inverse_purge(purge_image(p, u), p.alphabet, u);
}

RegularProperty cylinder_closure(const RegularProperty& p) {
  RegularProperty acc = universal_property(p.alphabet);
  for (const auto& u : p.alphabet->subjects()) acc = intersect(acc, external_cylinder(p, u));
  return acc;
}

RegularProperty cylinder_interior(const RegularProperty& p) { return complement(cylinder_closure(complement(p))); }

namespace {

// Shortest word leading to a state from which acceptance is unreachable.
std::optional<Word> dead_word(const Dfa& d) {
  auto co = dfa::coreachable(d);
  Dfa dead = d;
  for (int s = 0; s < d.states(); ++s) dead.set_accepting(s, !co[static_cast<std::size_t>(s)]);
  return dfa::shortest_word(dead);
}

}  // namespace

bool is_safe(const RegularProperty& p) { return same_language(p, lower_closure(p)); }
bool is_live(const RegularProperty& p) { return !dead_word(p.dfa).has_value(); }
bool is_localized(const RegularProperty& p) { return same_language(p, cylinder_closure(p)); }

bool is_available(const RegularProperty& p) {
  for (const auto& u : p.alphabet->subjects())
    if (!is_live(purge_image(p, u))) return false;
  return true;
}

ClassificationReport classify(const RegularProperty& p) {
  ClassificationReport r;
  r.not_safe = dfa::shortest_word(difference(lower_closure(p), p).dfa);
  r.safe = !r.not_safe;
  r.not_live = dead_word(p.dfa);
  r.live = !r.not_live;
  r.not_localized = dfa::shortest_word(difference(cylinder_closure(p), p).dfa);
  r.localized = !r.not_localized;
  r.authorized = r.safe && r.localized;
  if (!r.authorized) {
    // Either witness falsifies authority; report the shorter, then lexicographically smaller.
    const auto& a = r.not_safe;
    const auto& b = r.not_localized;
    if (a && b)
      r.not_authorized = (a->size() < b->size() || (a->size() == b->size() && *a <= *b)) ? a : b;
    else
      r.not_authorized = a ? a : b;
  }
  r.available = true;
  for (const auto& u : p.alphabet->subjects()) {
    auto w = dead_word(purge_image(p, u).dfa);
    r.local_live.emplace_back(u, !w);
    if (w && r.available) {
      r.available = false;
      r.not_available = LocalWitness{u, *w};
    }
  }
  return r;
}

std::optional<DecompositionKind> parse_decomposition_kind(std::string_view s) {
  if (s == "safety-liveness") return DecompositionKind::SafetyLiveness;
  if (s == "auth-avail") return DecompositionKind::AuthAvail;
  if (s == "strongavail-breach") return DecompositionKind::StrongAvailBreach;
  return std::nullopt;
}

std::string to_string(DecompositionKind k) {
  switch (k) {
    case DecompositionKind::SafetyLiveness: return "safety-liveness";
    case DecompositionKind::AuthAvail: return "auth-avail";
    case DecompositionKind::StrongAvailBreach: return "strongavail-breach";
  }
  return "?";
}

bool Decomposition::sound() const {
  if (!reconstructs) return false;
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

Decomposition decompose(const RegularProperty& p, DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::SafetyLiveness: {
      auto first = lower_closure(p);
      auto second = unite(p, complement(first));
      auto rec = intersect(first, second);
      Decomposition d{kind, first, second, rec, same_language(rec, p), {}};
      d.checks = {{"first is safe", is_safe(first)}, {"second is live", is_live(second)}};
      return d;
    }
    case DecompositionKind::AuthAvail: {
      auto first = cylinder_closure(lower_closure(p));
      auto second = unite(p, complement(first));
      auto rec = intersect(first, second);
      Decomposition d{kind, first, second, rec, same_language(rec, p), {}};
      bool safe = is_safe(first), loc = is_localized(first);
      d.checks = {{"first is safe", safe}, {"first is localized", loc}, {"first is authorized", safe && loc}};
      return d;
    }
    case DecompositionKind::StrongAvailBreach: {
      auto breach_hull = cylinder_closure(lower_closure(complement(p)));
      auto first = complement(breach_hull);
      auto second = intersect(p, breach_hull);
      auto rec = unite(first, second);
      Decomposition d{kind, first, second, rec, same_language(rec, p), {}};
      d.checks = {{"first is contained in input", is_subset(first, p)},
                  {"first is open", same_language(interior(first), first)},
                  {"first is internally cylindric", same_language(cylinder_interior(first), first)}};
      return d;
    }
  }
  throw Error("unknown decomposition kind");
}

namespace {

constexpr std::size_t kSubsetCap = 1u << 16;

// Shortest word over u's letters sending every state of `from` into a state outside P.
std::optional<Word> uniform_push(const Dfa& d, const std::vector<Letter>& letters, const std::set<int>& from) {
  auto done = [&](const std::set<int>& s) {
    for (int q : s)
      if (d.accepting(q)) return false;
    return true;
  };
  std::map<std::set<int>, std::pair<const std::set<int>*, Letter>> parent;
  std::deque<const std::set<int>*> work;
  auto [it0, _] = parent.emplace(from, std::make_pair(nullptr, -1));
  work.push_back(&it0->first);
  while (!work.empty()) {
    const std::set<int>* cur = work.front();
    work.pop_front();
    if (done(*cur)) {
      Word w;
      for (const std::set<int>* s = cur; parent.at(*s).first; s = parent.at(*s).first) w.push_back(parent.at(*s).second);
      return Word(w.rbegin(), w.rend());
    }
    if (parent.size() > kSubsetCap) return std::nullopt;
    for (Letter a : letters) {
      std::set<int> nxt;
      for (int q : *cur) nxt.insert(d.next(q, a));
      auto [it, inserted] = parent.emplace(std::move(nxt), std::make_pair(cur, a));
      if (inserted) work.push_back(&it->first);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<DosReport> dos_witness(const RegularProperty& p) {
  DosReport r;
  r.property_live = is_live(p);
  r.complement_live = is_live(complement(p));
  if (!r.property_live || !r.complement_live) return std::nullopt;
  const Dfa& d = p.dfa;
  auto reach = dfa::reachable(d);
  std::set<int> all;
  for (int s = 0; s < d.states(); ++s)
    if (reach[static_cast<std::size_t>(s)]) all.insert(s);
  for (const auto& u : p.alphabet->subjects()) {
    auto letters = p.alphabet->letters_of(u);
    DosWitness w;
    w.subject = u;
    if (auto ext = uniform_push(d, letters, all)) {
      w.extension = *ext;
    } else {
      w.uniform = false;
      // States from which u alone can still leave P.
      std::vector<bool> escape(static_cast<std::size_t>(d.states()), false);
      for (int s = 0; s < d.states(); ++s) escape[static_cast<std::size_t>(s)] = !d.accepting(s);
      for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < d.states(); ++s) {
          if (escape[static_cast<std::size_t>(s)]) continue;
          for (Letter a : letters)
            if (escape[static_cast<std::size_t>(d.next(s, a))]) {
              escape[static_cast<std::size_t>(s)] = changed = true;
              break;
            }
        }
      }
      Dfa stuck = d;
      for (int s = 0; s < d.states(); ++s) stuck.set_accepting(s, !escape[static_cast<std::size_t>(s)]);
      w.from = dfa::shortest_word(stuck);
    }
    r.witnesses.push_back(std::move(w));
  }
  return r;
}

}  // namespace secsci
