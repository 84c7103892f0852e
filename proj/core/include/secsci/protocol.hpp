// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "secsci/trace.hpp"

namespace secsci {

struct Term {
  enum class Kind { Name, Nonce, Var, Pair, Enc, Pk };
  enum class Type { Any, Agent, Nonce };  // variables only
  Kind kind = Kind::Name;
  std::string id;     // name, variable, or the nonce's variable
  int instance = -1;  // nonce owner
  Type type = Type::Any;
  std::vector<Term> args;

  static Term name(std::string n);
  static Term nonce(int instance, std::string var);
  static Term var(std::string v, Type t = Type::Any);
  static Term pair(Term a, Term b);
  static Term enc(Term payload, Term key);
  static Term pk(Term agent);

  std::size_t size() const;
  bool ground() const;
  bool operator==(const Term& o) const { return compare(*this, o) == 0; }
  bool operator!=(const Term& o) const { return compare(*this, o) != 0; }
  bool operator<(const Term& o) const { return compare(*this, o) < 0; }
  // Smaller terms first, then by kind, identifiers and arguments.
  static int compare(const Term& a, const Term& b);
};

// Right-nested pairs for n >= 2 components.
Term tuple(std::vector<Term> parts);
Term parse_term(std::string_view text);
// Grammar form, re-parseable.
std::string to_source(const Term& t);
// {A,m}_B style; nonces carry their instance when `qualified`.
std::string show(const Term& t, bool qualified = false);

using Subst = std::map<std::string, Term>;
Term substitute(const Term& t, const Subst& s);

// Most general extension of `base` making pat equal msg. Encryptions open only under keys `owns` accepts.
std::optional<Subst> pattern_match(const Term& msg, const Term& pat, const Subst& base,
                                   const std::function<bool(const std::string&)>& owns);

struct Step {
  enum class Kind { Fresh, Send, Recv };
  Kind kind = Kind::Send;
  Term term;  // Fresh: a variable
  bool operator==(const Step&) const = default;
};

struct Role {
  std::string name;
  std::vector<std::string> params;  // params[0] is the agent running the role
  std::vector<Step> steps;
  void validate() const;
  std::vector<std::string> variables() const;  // in order of first occurrence
  bool operator==(const Role&) const = default;
};

enum class AuthLevel { None, Aliveness, Agreement };
std::string to_string(AuthLevel l);
AuthLevel parse_auth_level(std::string_view s);

// Challenge sent and response received by `role`; the peer must receive the challenge, then send the response.
struct AuthGoal {
  std::string role;
  int challenge = 0, response = 0;
  std::string peer;  // parameter or variable of `role`
  std::string peer_role;
  int peer_challenge = 0, peer_response = 0;
  std::string peer_belief;  // parameter or variable of peer_role naming its partner; empty: not checked
  AuthLevel level = AuthLevel::Agreement;
  bool operator==(const AuthGoal&) const = default;
};

struct ProtocolSpec {
  std::string name;
  std::vector<Role> roles;
  std::vector<AuthGoal> goals;
  void validate() const;
  const Role& role(std::string_view n) const;
  bool operator==(const ProtocolSpec&) const = default;
};

struct Instance {
  std::string role;
  std::vector<std::string> args;  // agents for the role's params
  bool operator==(const Instance&) const = default;
};

struct Scenario {
  std::vector<Instance> instances;
  std::set<std::string> compromised;
  std::vector<std::string> agents;  // extra names the intruder knows
  bool predictable_nonces = false;
  int max_deliveries = 0;  // 0: unbounded
  void validate(const ProtocolSpec& p) const;
  bool operator==(const Scenario&) const = default;
};

struct TraceEvent {
  int instance = 0;
  int step = 0;
  Step::Kind kind = Step::Kind::Send;
  Term message;       // the nonce for Fresh
  std::string state;  // acting instance's state after the event
};

struct SymbolicTrace {
  std::vector<TraceEvent> events;
  std::vector<Subst> bindings;          // final, per instance
  std::vector<std::string> initial;     // per instance state before any event
  std::vector<Term> messages() const;   // network messages (sent or delivered), in order, duplicates dropped
  std::vector<std::string> show_messages() const;
  std::string show() const;
};

// Intruder knowledge in analyzed form.
class Knowledge {
 public:
  explicit Knowledge(std::set<std::string> compromised) : compromised_(std::move(compromised)) {}
  void add(const Term& t);
  bool derivable(const Term& t) const;
  const std::set<Term>& terms() const { return terms_; }
  bool can_decrypt(const Term& key) const;

 private:
  std::set<std::string> compromised_;
  std::set<Term> terms_;
};

Knowledge initial_knowledge(const ProtocolSpec& p, const Scenario& s);

// Closed messages the intruder can derive that the receiver accepts, smallest first.
std::vector<std::pair<Term, Subst>> intruder_candidates(const Knowledge& k, const Term& pattern, const Subst& subst,
                                                         const std::function<bool(const std::string&)>& owns);

// Honest network: each receive takes the earliest pending message it matches.
SymbolicTrace run_honest(const ProtocolSpec& p, const Scenario& s);

struct ChreVerdict {
  int instance = 0;
  int goal = 0;
  std::string agent, peer;
  bool skipped = false;  // peer compromised
  AuthLevel achieved = AuthLevel::None;
  AuthLevel required = AuthLevel::Agreement;
  bool satisfied() const { return skipped || achieved >= required; }
};

std::vector<ChreVerdict> check_chre(const ProtocolSpec& p, const Scenario& s, const SymbolicTrace& t);

struct AttackResult {
  std::optional<SymbolicTrace> attack;
  std::optional<ChreVerdict> violated;
  std::size_t states = 0;
};

AttackResult search_attack(const ProtocolSpec& p, const Scenario& s);

// Independent replay: every receive is derivable from the knowledge preceding it.
bool receives_sound(const ProtocolSpec& p, const Scenario& s, const SymbolicTrace& t);

}  // namespace secsci
