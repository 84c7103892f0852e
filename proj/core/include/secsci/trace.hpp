// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace secsci {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Letters are indices into an Alphabet, in declaration order.
using Letter = int;
using Word = std::vector<Letter>;

struct Event {
  std::string id;
  std::string subject;
  std::optional<std::string> object;
  std::optional<std::string> action;
  std::optional<std::string> level;
  bool operator==(const Event&) const = default;
};

class Alphabet {
 public:
  explicit Alphabet(std::vector<Event> events);

  std::size_t size() const { return events_.size(); }
  const Event& event(Letter a) const { return events_.at(static_cast<std::size_t>(a)); }
  const std::vector<Event>& events() const { return events_; }
  std::optional<Letter> find(std::string_view id) const;
  Letter at(std::string_view id) const;

  const std::vector<std::string>& subjects() const { return subjects_; }
  bool has_subject(std::string_view u) const;
  std::vector<Letter> letters_of(std::string_view u) const;
  const std::string& subject_of(Letter a) const { return event(a).subject; }

  // Sub-alphabet holding only u's events, letters renumbered in order.
  std::shared_ptr<const Alphabet> restrict_to(std::string_view u) const;

  Word parse(const std::vector<std::string>& ids) const;
  std::vector<std::string> render(const Word& w) const;
  std::string show(const Word& w) const;

  bool operator==(const Alphabet& o) const { return events_ == o.events_; }

 private:
  std::vector<Event> events_;
  std::vector<std::string> subjects_;
  std::unordered_map<std::string, Letter> index_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Complete deterministic automaton; state 0 is initial.
class Dfa {
 public:
  Dfa() = default;
  explicit Dfa(int letters) : k_(letters) {}

  int add_state(bool accepting);
  void set(int s, Letter a, int t) { delta_[idx(s, a)] = t; }
  void set_accepting(int s, bool v) { acc_[static_cast<std::size_t>(s)] = v; }

  int states() const { return static_cast<int>(acc_.size()); }
  int letters() const { return k_; }
  int next(int s, Letter a) const { return delta_[idx(s, a)]; }
  bool accepting(int s) const { return acc_[static_cast<std::size_t>(s)]; }
  int run(const Word& w, int from = 0) const;
  bool accepts(const Word& w) const { return accepting(run(w)); }

  bool operator==(const Dfa&) const = default;

 private:
  std::size_t idx(int s, Letter a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a);
  }
  int k_ = 0;
  std::vector<int> delta_;
  std::vector<bool> acc_;
};

// Nondeterministic automaton with epsilon moves, used for construction only.
struct Nfa {
  int k = 0;
  std::vector<std::vector<std::vector<int>>> delta;  // state -> letter -> targets
  std::vector<std::vector<int>> eps;
  std::vector<bool> acc;
  std::vector<int> initial;

  explicit Nfa(int letters = 0) : k(letters) {}
  int add_state(bool accepting);
  void add(int s, Letter a, int t) { delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].push_back(t); }
  void add_eps(int s, int t) { eps[static_cast<std::size_t>(s)].push_back(t); }
  int states() const { return static_cast<int>(acc.size()); }
  bool accepts(const Word& w) const;
};

namespace dfa {
Dfa empty(int letters);
Dfa universal(int letters);
Dfa determinize(const Nfa& n);
Nfa to_nfa(const Dfa& d);
Dfa complement(const Dfa& d);
Dfa intersect(const Dfa& a, const Dfa& b);
Dfa unite(const Dfa& a, const Dfa& b);
Dfa difference(const Dfa& a, const Dfa& b);
Dfa concat(const Dfa& a, const Dfa& b);
Dfa star(const Dfa& a);
// Canonical minimal form: reachable, Moore-minimized, states numbered by BFS in letter order.
Dfa minimize(const Dfa& d);
bool equivalent(const Dfa& a, const Dfa& b);
bool is_empty(const Dfa& d);
bool subset(const Dfa& a, const Dfa& b);
std::vector<bool> reachable(const Dfa& d);
std::vector<bool> coreachable(const Dfa& d);
// Lexicographically least among the shortest accepted words.
std::optional<Word> shortest_word(const Dfa& d);
// Image of the language under erasing letters with keep[a] == false; kept letters map to rename[a].
Dfa erase_image(const Dfa& d, const std::vector<bool>& keep, const std::vector<Letter>& rename, int new_letters);
// Inverse of erase_image: letters outside keep are self-loops.
Dfa inverse_erase(const Dfa& local, const std::vector<bool>& keep, const std::vector<Letter>& rename);
}  // namespace dfa

struct RegularProperty {
  AlphabetPtr alphabet;
  Dfa dfa;

  bool contains(const Word& w) const { return dfa.accepts(w); }
  bool contains_ids(const std::vector<std::string>& ids) const { return contains(alphabet->parse(ids)); }
};

RegularProperty make_property(AlphabetPtr sigma, Dfa d);
RegularProperty universal_property(AlphabetPtr sigma);
RegularProperty empty_property(AlphabetPtr sigma);
RegularProperty complement(const RegularProperty& p);
RegularProperty intersect(const RegularProperty& a, const RegularProperty& b);
RegularProperty unite(const RegularProperty& a, const RegularProperty& b);
RegularProperty difference(const RegularProperty& a, const RegularProperty& b);
bool same_language(const RegularProperty& a, const RegularProperty& b);
bool is_subset(const RegularProperty& a, const RegularProperty& b);

// Strict purge: keep u's own events.
Word purge_strict(const Alphabet& sigma, const Word& h, std::string_view u);
// General purge: keep events the predicate clears.
Word purge_general(const Word& h, const std::function<bool(Letter)>& cleared);
// Word over u's sub-alphabet, renumbered.
Word purge_local(const Alphabet& sigma, const Word& h, std::string_view u);

RegularProperty purge_image(const RegularProperty& p, std::string_view u);
// Inverse purge of a property over u's sub-alphabet back to the full alphabet.
RegularProperty inverse_purge(const RegularProperty& local, const AlphabetPtr& sigma, std::string_view u);

// Locals are words over the full alphabet (already purged).
Word schedule_recompose(const Alphabet& sigma, const std::map<std::string, Word>& locals,
                        const std::vector<std::string>& sched);
std::vector<std::string> schedule_of(const Alphabet& sigma, const Word& h);

bool is_prefix(const Word& x, const Word& y);

// Pattern language of the appendix families, plus boolean and regular combinators.
struct Pattern {
  enum class Kind {
    Occurs, Before, EventuallyFollows, AlwaysPreceded,
    Letters, Word, All, Any, Epsilon, Empty,
    Not, And, Or, Concat, Star
  };
  Kind kind = Kind::All;
  std::vector<std::string> left;   // event set C or letters/word
  std::vector<std::string> right;  // event set D
  std::vector<Pattern> args;
};

RegularProperty pattern_property(const AlphabetPtr& sigma, const Pattern& p);

// Every word of length exactly n over k letters, in lexicographic order.
void for_each_word(int letters, int n, const std::function<void(const Word&)>& f);
void for_each_word_upto(int letters, int n, const std::function<void(const Word&)>& f);

}  // namespace secsci
