// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "secsci/resource.hpp"
#include "secsci/trace.hpp"

namespace secsci {

// Mealy-style finite transducer. Inputs and outputs are indices into the name lists.
struct Transducer {
  struct Edge {
    int to = 0;
    int output = -1;  // -1: no output on this step
    bool operator==(const Edge&) const = default;
  };
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  int initial = 0;
  std::vector<std::vector<std::vector<Edge>>> delta;  // [state][input]

  void validate() const;
  bool deterministic() const;  // exactly one edge per (state, input)
  int input_index(std::string_view id) const;
  Word parse(const std::vector<std::string>& ids) const;
  bool operator==(const Transducer&) const = default;
};

// g*(x): the sequence of output sets, one per input step.
using OutSeq = std::vector<std::set<int>>;
using OutWord = std::vector<int>;

OutSeq run(const Transducer& t, const Word& h);
// All output words selecting one element per step.
std::set<OutWord> expand(const OutSeq& s);

struct SharedChannel {
  Transducer t;
  std::vector<std::string> subjects;
  std::vector<std::string> owner;  // subject entering each input
  Poset levels;
  std::vector<std::string> pl;     // per input
  std::map<std::string, std::string> cl;

  void validate() const;
  bool cleared(int x, std::string_view u) const;
  int default_bound() const { return 2 * static_cast<int>(t.states.size()) + 2; }
  bool operator==(const SharedChannel&) const = default;
};

Word purge(const SharedChannel& m, const Word& h, std::string_view u);
Word purge_complement(const SharedChannel& m, const Word& h, std::string_view u);
// Interleave the two parts back along the clearance pattern of `pattern`.
Word merge_purges(const SharedChannel& m, const Word& pattern, const Word& mine, const Word& others, std::string_view u);

OutSeq local_view(const SharedChannel& m, std::string_view u, const Word& h);

// Inverse of g on all inputs up to length n, keyed by output word.
std::map<OutWord, std::vector<Word>> invert(const Transducer& t, int n);

std::set<OutWord> interference_channel(const SharedChannel& m, std::string_view u, const Word& local, int n);

enum class NonintMode { ExactDeterministic, Bounded };

struct NonintResult {
  bool interferes = false;
  bool supported = true;  // false when exact mode meets a nondeterministic transducer
  // Pair with equal purges and different local views.
  Word x, y;
  OutSeq view_x, view_y;
};

// `focus` restricts the reported witness to pairs whose u-purge equals it.
NonintResult check_noninterference(const SharedChannel& m, std::string_view u, NonintMode mode, int bound,
                                   const std::optional<Word>& focus = std::nullopt);

// Bounded checks of the four equivalent characterizations; true when the condition holds.
struct CharacterizationReport {
  bool a = true, b = true, c = true, d = true;
};
CharacterizationReport characterizations(const SharedChannel& m, std::string_view u, int n);

struct ProjectorReport {
  bool projector_law = true;  // purge by last owner is idempotent
  bool invariant = true;      // last output of g(x) equals that of g(purge(x))
  bool noninterfering = true; // bounded check for every subject
  std::optional<Word> counterexample;
  bool agree() const { return invariant == noninterfering; }
};
ProjectorReport purge_projector_check(const SharedChannel& m, int n);

SharedChannel make_elevator(int floors, const std::vector<std::string>& subjects);

std::string show_outputs(const Transducer& t, const OutSeq& s);

}  // namespace secsci
