// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secsci/channel.hpp"
#include "secsci/resource.hpp"
#include "secsci/trace.hpp"

namespace secsci {

using Rational = mpq_class;

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

using Distribution = std::vector<Rational>;

// Rows indexed by input, columns by output. A missing row is undefined.
struct StochasticChannel {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::optional<std::vector<Rational>>> rows;

  void validate() const;
  bool row_stochastic() const;  // every defined row sums to 1
  const Rational& at(std::size_t x, std::size_t y) const { return (*rows.at(x)).at(y); }
  int input_index(std::string_view id) const;
  int output_index(std::string_view id) const;
  bool operator==(const StochasticChannel&) const = default;
};

struct Estimate {
  StochasticChannel channel;
  Distribution output_marginal;
  std::vector<std::string> undefined_rows;
};

// Contexts listed in `contexts` with no samples become undefined rows.
Estimate estimate_from_samples(const std::vector<std::pair<std::string, std::string>>& samples,
                               std::vector<std::string> contexts = {});

// Generative channel over one alphabet: the next-symbol law depends on a finite memory state.
struct Source {
  std::vector<std::string> symbols;
  std::vector<std::string> states;
  int initial = 0;
  std::vector<std::vector<Rational>> emit;  // [state][symbol]
  std::vector<std::vector<int>> next;       // [state][symbol]
  int depth = 6;

  void validate() const;
  int state_after(const Word& x) const;
  bool operator==(const Source&) const = default;
};

// <x|y>: chance that context x continues with y.
Rational cumulative_probability(const Source& s, const Word& context, const Word& continuation);
// [x] = <()|x>.
Rational marginal(const Source& s, const Word& x);
Source coin(const Rational& heads);

struct Inversion {
  StochasticChannel inverse;  // outputs become inputs
  Distribution output_marginal;
  Distribution joint_flat;    // [x,y] row-major over (input, output)
};

Inversion bayes_invert(const StochasticChannel& ch, const Distribution& prior);

struct Entropy {
  double bits = 0;
  // Exact value a + b·log2 3 when every probability is 2^i·3^j.
  std::optional<std::pair<Rational, Rational>> symbolic;
  std::string show() const;
};

Entropy entropy(const Distribution& d);

// Probabilistic transducer: every step emits exactly one output.
struct ProbTransducer {
  struct Edge {
    int to = 0;
    int output = 0;
    Rational p;
    bool operator==(const Edge&) const = default;
  };
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  int initial = 0;
  std::vector<std::vector<std::vector<Edge>>> delta;

  void validate() const;
  bool operator==(const ProbTransducer&) const = default;
};

// <x|y> for |x| = |y|; zero on length mismatch.
Rational prob_run(const ProbTransducer& t, const Word& x, const Word& y);
// Chance that the last output after x is v.
Rational prob_last(const ProbTransducer& t, const Word& x, int v);

struct ProbSharedChannel {
  ProbTransducer t;
  std::vector<std::string> subjects;
  std::vector<std::string> owner;
  Poset levels;
  std::vector<std::string> pl;
  std::map<std::string, std::string> cl;
  std::optional<Source> source;  // distribution on input histories

  void validate() const;
  bool cleared(int x, std::string_view u) const;
  Word purge(const Word& h, std::string_view u) const;
  bool operator==(const ProbSharedChannel&) const = default;
};

// <x|y>^A, with y ranging over A's observed outputs.
Rational prob_local_view(const ProbSharedChannel& m, std::string_view u, const Word& x, const Word& y);

struct ProbInterference {
  std::map<Word, Rational> values;  // y -> ∫^A <x_A|y>
  bool defined = true;              // false when [x_A] = 0 on the truncated domain
};
ProbInterference prob_interference(const ProbSharedChannel& m, std::string_view u, const Word& local, int n);

struct ProbNonintResult {
  bool interferes = false;
  Word x, y;
  Rational lhs, rhs;  // <x|y>^A and <x|A|y>
  std::vector<Word> skipped;  // local histories with zero source mass
};

ProbNonintResult check_prob_noninterference(const ProbSharedChannel& m, std::string_view u, int n);
// Condition (a) of the characterization, through the source and the state-of-the-world channel.
bool prob_condition_a(const ProbSharedChannel& m, std::string_view u, int n, std::vector<Word>* skipped = nullptr);

// 0/1 embedding of a deterministic relational channel.
ProbSharedChannel embed(const SharedChannel& m);

struct Cipher {
  std::vector<std::string> keys, messages, ciphertexts;
  std::vector<std::vector<int>> E;  // [k][m] -> c
  std::vector<std::vector<int>> D;  // [k][c] -> m, -1 where unused

  void validate() const;
  bool operator==(const Cipher&) const = default;
};

Cipher make_cipher(std::vector<std::string> keys, std::vector<std::string> messages, std::vector<std::string> ciphertexts,
                   std::vector<std::vector<int>> E);

// Rows are ciphertexts, columns messages. Unreachable ciphertexts give undefined rows.
StochasticChannel guessing_channel(const Cipher& c);

struct SecrecyReport {
  bool pointwise = true;
  bool projector = true;
  std::optional<std::pair<int, int>> pointwise_witness;  // (c, m)
  std::optional<std::pair<int, int>> projector_witness;
  Rational pointwise_lhs, pointwise_rhs, projector_lhs, projector_rhs;
  bool secret() const { return pointwise && projector; }
};

SecrecyReport check_perfect_secrecy(const Cipher& c, const Distribution& prior);

// E∘A∘E = E on finite tables.
bool retraction_identity(const std::vector<int>& E, const std::vector<int>& A);

}  // namespace secsci
