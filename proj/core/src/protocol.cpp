// SPDX-License-Identifier: Apache-2.0
#include "secsci/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace secsci {

Term Term::name(std::string n) {
  Term t;
  t.kind = Kind::Name;
  t.id = std::move(n);
  return t;
}

Term Term::nonce(int instance, std::string var) {
  Term t;
  t.kind = Kind::Nonce;
  t.id = std::move(var);
  t.instance = instance;
  return t;
}

Term Term::var(std::string v, Type ty) {
  Term t;
  t.kind = Kind::Var;
  t.id = std::move(v);
  t.type = ty;
  return t;
}

Term Term::pair(Term a, Term b) {
  Term t;
  t.kind = Kind::Pair;
  t.args = {std::move(a), std::move(b)};
  return t;
}

Term Term::enc(Term payload, Term key) {
  Term t;
  t.kind = Kind::Enc;
  t.args = {std::move(payload), std::move(key)};
  return t;
}

Term Term::pk(Term agent) {
  Term t;
  t.kind = Kind::Pk;
  t.args = {std::move(agent)};
  return t;
}

std::size_t Term::size() const {
  std::size_t n = 1;
  for (const auto& a : args) n += a.size();
  return n;
}

bool Term::ground() const {
  if (kind == Kind::Var) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.ground(); });
}

int Term::compare(const Term& a, const Term& b) {
  auto sa = a.size(), sb = b.size();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.id.compare(b.id)) return c < 0 ? -1 : 1;
  if (a.instance != b.instance) return a.instance < b.instance ? -1 : 1;
  if (a.type != b.type) return a.type < b.type ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

Term tuple(std::vector<Term> parts) {
  if (parts.empty()) throw Error("empty tuple");
  Term t = std::move(parts.back());
  for (std::size_t i = parts.size() - 1; i-- > 0;) t = Term::pair(std::move(parts[i]), std::move(t));
  return t;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Term parse() {
    Term t = term();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return t;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("term: " + what + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\''))
      ++i_;
    if (b == i_) fail("expected identifier");
    return std::string(s_.substr(b, i_ - b));
  }
  std::vector<Term> list() {
    std::vector<Term> out{term()};
    while (eat(',')) out.push_back(term());
    expect(')');
    return out;
  }
  Term term() {
    std::string w = ident();
    if (w == "var") {
      std::string v = ident();
      Term::Type ty = Term::Type::Any;
      if (eat(':')) {
        std::string tn = ident();
        if (tn == "agent") ty = Term::Type::Agent;
        else if (tn == "nonce") ty = Term::Type::Nonce;
        else if (tn != "any") fail("unknown variable type '" + tn + "'");
      }
      return Term::var(v, ty);
    }
    if (!eat('(')) return Term::name(w);
    if (w == "pair") {
      auto xs = list();
      if (xs.size() < 2) fail("pair needs at least two components");
      return tuple(std::move(xs));
    }
    if (w == "enc") {
      auto xs = list();
      if (xs.size() < 2) fail("enc needs a payload and a key");
      Term key = xs.back();
      xs.pop_back();
      return Term::enc(xs.size() == 1 ? xs[0] : tuple(std::move(xs)), key);
    }
    if (w == "pk") {
      auto xs = list();
      if (xs.size() != 1) fail("pk takes one agent");
      return Term::pk(xs[0]);
    }
    if (w == "nonce") {
      std::string v = ident();
      expect(',');
      skip();
      std::size_t b = i_;
      if (i_ < s_.size() && s_[i_] == '-') ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (b == i_) fail("expected instance number");
      int inst = std::stoi(std::string(s_.substr(b, i_ - b)));
      expect(')');
      return Term::nonce(inst, v);
    }
    fail("unknown function '" + w + "'");
  }
};

void flatten(const Term& t, bool q, std::string& out) {
  if (t.kind == Term::Kind::Pair) {
    flatten(t.args[0], q, out);
    out += ',';
    flatten(t.args[1], q, out);
  } else {
    out += show(t, q);
  }
}

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).parse(); }

std::string to_source(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Name: return t.id;
    case Term::Kind::Nonce: return "nonce(" + t.id + "," + std::to_string(t.instance) + ")";
    case Term::Kind::Var:
      return "var " + t.id +
             (t.type == Term::Type::Agent ? ":agent" : t.type == Term::Type::Nonce ? ":nonce" : "");
    case Term::Kind::Pair: return "pair(" + to_source(t.args[0]) + "," + to_source(t.args[1]) + ")";
    case Term::Kind::Enc: return "enc(" + to_source(t.args[0]) + "," + to_source(t.args[1]) + ")";
    case Term::Kind::Pk: return "pk(" + to_source(t.args[0]) + ")";
  }
  return "";
}

std::string show(const Term& t, bool qualified) {
  switch (t.kind) {
    case Term::Kind::Name:
    case Term::Kind::Var: return t.id;
    case Term::Kind::Nonce:
      return qualified && t.instance >= 0 ? t.id + "#" + std::to_string(t.instance) : t.id;
    case Term::Kind::Pair: {
      std::string s = "(";
      flatten(t, qualified, s);
      return s + ")";
    }
    case Term::Kind::Enc: {
      std::string s = "{";
      flatten(t.args[0], qualified, s);
      const Term& k = t.args[1];
      return s + "}_" + (k.kind == Term::Kind::Pk ? show(k.args[0], qualified) : show(k, qualified));
    }
    case Term::Kind::Pk: return "pk(" + show(t.args[0], qualified) + ")";
  }
  return "";
}

Term substitute(const Term& t, const Subst& s) {
  if (t.kind == Term::Kind::Var) {
    auto it = s.find(t.id);
    return it == s.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = substitute(a, s);
  return out;
}

namespace {

bool match(const Term& msg, const Term& pat, Subst& s, const std::function<bool(const std::string&)>& owns) {
  switch (pat.kind) {
    case Term::Kind::Var: {
      auto it = s.find(pat.id);
      if (it != s.end()) return it->second == msg;
      if (pat.type == Term::Type::Agent && msg.kind != Term::Kind::Name) return false;
      if (pat.type == Term::Type::Nonce && msg.kind != Term::Kind::Nonce) return false;
      s.emplace(pat.id, msg);
      return true;
    }
    case Term::Kind::Name:
    case Term::Kind::Nonce: return msg == pat;
    case Term::Kind::Pk: return msg.kind == Term::Kind::Pk && match(msg.args[0], pat.args[0], s, owns);
    case Term::Kind::Pair:
      return msg.kind == Term::Kind::Pair && match(msg.args[0], pat.args[0], s, owns) &&
             match(msg.args[1], pat.args[1], s, owns);
    case Term::Kind::Enc: {
      if (msg.kind != Term::Kind::Enc) return false;
      const Term& key = msg.args[1];
      if (key.kind == Term::Kind::Pk && key.args[0].kind == Term::Kind::Name && owns(key.args[0].id))
        return match(key, pat.args[1], s, owns) && match(msg.args[0], pat.args[0], s, owns);
      // sealed: only a fully determined pattern can be compared
      Term sp = substitute(pat, s);
      return sp.ground() && sp == msg;
    }
  }
  return false;
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::Var) {
    if (std::find(out.begin(), out.end(), t.id) == out.end()) out.push_back(t.id);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Name) out.insert(t.id);
  for (const auto& a : t.args) collect_names(a, out);
}

bool mentions(const Term& t, const std::string& v) {
  if (t.kind == Term::Kind::Var) return t.id == v;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return mentions(a, v); });
}

Term bind_params(const Term& t, const std::map<std::string, std::string>& params) {
  if (t.kind == Term::Kind::Name) {
    auto it = params.find(t.id);
    return it == params.end() ? t : Term::name(it->second);
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = bind_params(a, params);
  return out;
}

}  // namespace

std::optional<Subst> pattern_match(const Term& msg, const Term& pat, const Subst& base,
                                   const std::function<bool(const std::string&)>& owns) {
  if (!msg.ground()) return std::nullopt;
  Subst s = base;
  if (!match(msg, pat, s, owns)) return std::nullopt;
  return s;
}

std::vector<std::string> Role::variables() const {
  std::vector<std::string> out;
  for (const auto& st : steps) collect_vars(st.term, out);
  return out;
}

void Role::validate() const {
  if (name.empty()) throw Error("role without a name");
  if (params.empty()) throw Error("role '" + name + "' needs at least its own agent parameter");
  std::set<std::string> bound(params.begin(), params.end());
  if (bound.size() != params.size()) throw Error("role '" + name + "' repeats a parameter");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    std::string where = "role '" + name + "' step " + std::to_string(i);
    std::vector<std::string> vs;
    collect_vars(st.term, vs);
    for (const auto& v : vs)
      if (std::count(params.begin(), params.end(), v)) throw Error(where + ": variable '" + v + "' shadows a parameter");
    switch (st.kind) {
      case Step::Kind::Fresh:
        if (st.term.kind != Term::Kind::Var) throw Error(where + ": fresh takes a variable");
        if (!bound.insert(st.term.id).second) throw Error(where + ": '" + st.term.id + "' is already bound");
        break;
      case Step::Kind::Send:
        for (const auto& v : vs)
          if (!bound.count(v)) throw Error(where + ": '" + v + "' is sent before it is bound");
        break;
      case Step::Kind::Recv: bound.insert(vs.begin(), vs.end()); break;
    }
  }
}

std::string to_string(AuthLevel l) {
  switch (l) {
    case AuthLevel::None: return "none";
    case AuthLevel::Aliveness: return "aliveness";
    case AuthLevel::Agreement: return "agreement";
  }
  return "none";
}

AuthLevel parse_auth_level(std::string_view s) {
  if (s == "none") return AuthLevel::None;
  if (s == "aliveness" || s == "ping") return AuthLevel::Aliveness;
  if (s == "agreement") return AuthLevel::Agreement;
  throw Error("unknown authentication level '" + std::string(s) + "'");
}

const Role& ProtocolSpec::role(std::string_view n) const {
  for (const auto& r : roles)
    if (r.name == n) return r;
  throw Error("unknown role '" + std::string(n) + "'");
}

void ProtocolSpec::validate() const {
  std::set<std::string> names;
  for (const auto& r : roles) {
    r.validate();
    if (!names.insert(r.name).second) throw Error("duplicate role '" + r.name + "'");
  }
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const auto& goal = goals[g];
    std::string where = "goal " + std::to_string(g);
    const Role& a = role(goal.role);
    const Role& b = role(goal.peer_role);
    auto step_is = [&](const Role& r, int i, Step::Kind k, const char* what) {
      if (i < 0 || i >= static_cast<int>(r.steps.size()) || r.steps[static_cast<std::size_t>(i)].kind != k)
        throw Error(where + ": " + what + " is not a " + (k == Step::Kind::Send ? "send" : "receive") + " of '" +
                    r.name + "'");
    };
    step_is(a, goal.challenge, Step::Kind::Send, "challenge");
    step_is(a, goal.response, Step::Kind::Recv, "response");
    step_is(b, goal.peer_challenge, Step::Kind::Recv, "peer challenge");
    step_is(b, goal.peer_response, Step::Kind::Send, "peer response");
    if (goal.challenge >= goal.response || goal.peer_challenge >= goal.peer_response)
      throw Error(where + ": challenge must precede response");
    auto known = [](const Role& r, const std::string& v) {
      auto vs = r.variables();
      return std::count(r.params.begin(), r.params.end(), v) || std::count(vs.begin(), vs.end(), v);
    };
    if (!known(a, goal.peer)) throw Error(where + ": '" + goal.peer + "' is not a parameter or variable of '" + a.name + "'");
    if (!goal.peer_belief.empty() && !known(b, goal.peer_belief))
      throw Error(where + ": '" + goal.peer_belief + "' is not a parameter or variable of '" + b.name + "'");
  }
}

void Scenario::validate(const ProtocolSpec& p) const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Role& r = p.role(instances[i].role);
    if (instances[i].args.size() != r.params.size())
      throw Error("instance " + std::to_string(i) + " of '" + r.name + "' needs " + std::to_string(r.params.size()) +
                  " agents");
  }
  if (max_deliveries < 0) throw Error("max_deliveries must be non-negative");
}

std::vector<Term> SymbolicTrace::messages() const {
  std::vector<Term> out;
  for (const auto& e : events)
    if (e.kind != Step::Kind::Fresh && std::find(out.begin(), out.end(), e.message) == out.end())
      out.push_back(e.message);
  return out;
}

namespace {

void collect_nonces(const Term& t, std::set<std::pair<std::string, int>>& out) {
  if (t.kind == Term::Kind::Nonce) out.insert({t.id, t.instance});
  for (const auto& a : t.args) collect_nonces(a, out);
}

bool needs_qualified(const std::vector<TraceEvent>& events) {
  std::set<std::pair<std::string, int>> ns;
  for (const auto& e : events) collect_nonces(e.message, ns);
  std::set<std::string> ids;
  for (const auto& n : ns)
    if (!ids.insert(n.first).second) return true;
  return false;
}

}  // namespace

std::vector<std::string> SymbolicTrace::show_messages() const {
  bool q = needs_qualified(events);
  std::vector<std::string> out;
  for (const auto& m : messages()) out.push_back(secsci::show(m, q));
  return out;
}

std::string SymbolicTrace::show() const {
  bool q = needs_qualified(events);
  std::ostringstream os;
  for (std::size_t i = 0; i < initial.size(); ++i) os << "#" << i << " " << initial[i] << "\n";
  for (const auto& e : events) {
    os << "#" << e.instance << " ";
    switch (e.kind) {
      case Step::Kind::Fresh: os << "new " << secsci::show(e.message, q); break;
      case Step::Kind::Send: os << "send " << secsci::show(e.message, q); break;
      case Step::Kind::Recv: os << "recv " << secsci::show(e.message, q); break;
    }
    os << "  " << e.state << "\n";
  }
  return os.str();
}

bool Knowledge::can_decrypt(const Term& key) const {
  return key.kind == Term::Kind::Pk && key.args[0].kind == Term::Kind::Name && compromised_.count(key.args[0].id);
}

void Knowledge::add(const Term& t) {
  if (!t.ground()) throw Error("intruder cannot learn an open term");
  if (!terms_.insert(t).second) return;
  switch (t.kind) {
    case Term::Kind::Pair:
      add(t.args[0]);
      add(t.args[1]);
      break;
    case Term::Kind::Enc:
      if (can_decrypt(t.args[1])) add(t.args[0]);
      break;
    case Term::Kind::Pk: add(t.args[0]); break;
    default: break;
  }
}

bool Knowledge::derivable(const Term& t) const {
  if (terms_.count(t)) return true;
  switch (t.kind) {
    case Term::Kind::Pair:
    case Term::Kind::Enc: return derivable(t.args[0]) && derivable(t.args[1]);
    case Term::Kind::Pk: return derivable(t.args[0]);
    default: return false;
  }
}

Knowledge initial_knowledge(const ProtocolSpec& p, const Scenario& s) {
  Knowledge k(s.compromised);
  std::set<std::string> names(s.agents.begin(), s.agents.end());
  for (const auto& inst : s.instances) names.insert(inst.args.begin(), inst.args.end());
  names.insert(s.compromised.begin(), s.compromised.end());
  for (const auto& r : p.roles) {
    std::set<std::string> here;
    for (const auto& st : r.steps) collect_names(st.term, here);
    for (const auto& n : here)
      if (!std::count(r.params.begin(), r.params.end(), n)) names.insert(n);
  }
  for (const auto& n : names) k.add(Term::name(n));
  k.add(Term::nonce(-1, "nI"));
  return k;
}

namespace {

void synth(const Knowledge& k, const Term& pat, const Subst& s, std::vector<Subst>& out) {
  switch (pat.kind) {
    case Term::Kind::Var: {
      auto it = s.find(pat.id);
      if (it != s.end()) {
        if (k.derivable(it->second)) out.push_back(s);
        return;
      }
      for (const auto& a : k.terms()) {
        if (a.kind != Term::Kind::Name && a.kind != Term::Kind::Nonce) continue;
        if (pat.type == Term::Type::Agent && a.kind != Term::Kind::Name) continue;
        if (pat.type == Term::Type::Nonce && a.kind != Term::Kind::Nonce) continue;
        Subst e = s;
        e.emplace(pat.id, a);
        out.push_back(std::move(e));
      }
      return;
    }
    case Term::Kind::Name:
    case Term::Kind::Nonce:
      if (k.derivable(pat)) out.push_back(s);
      return;
    case Term::Kind::Pk: synth(k, pat.args[0], s, out); return;
    case Term::Kind::Pair:
    case Term::Kind::Enc: {
      if (pat.kind == Term::Kind::Enc) {
        // replay anything stored that fits
        auto any = [](const std::string&) { return true; };
        for (const auto& t : k.terms()) {
          if (t.kind != Term::Kind::Enc) continue;
          Subst e = s;
          if (match(t, pat, e, any)) out.push_back(std::move(e));
        }
      }
      std::vector<Subst> left;
      synth(k, pat.args[0], s, left);
      for (const auto& l : left) synth(k, pat.args[1], l, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<Term, Subst>> intruder_candidates(const Knowledge& k, const Term& pattern, const Subst& subst,
                                                         const std::function<bool(const std::string&)>& owns) {
  std::vector<Subst> ss;
  synth(k, pattern, subst, ss);
  std::map<Term, Subst> found;
  for (const auto& s : ss) {
    Term m = substitute(pattern, s);
    if (!m.ground() || found.count(m) || !k.derivable(m)) continue;
    if (auto r = pattern_match(m, pattern, subst, owns)) found.emplace(std::move(m), std::move(*r));
  }
  return {found.begin(), found.end()};
}

namespace {

struct Live {
  const Role* role;
  std::vector<Step> steps;  // parameters already replaced by agents
  std::string agent;
  int pc = 0;
  Subst subst;
};

std::vector<Live> instantiate(const ProtocolSpec& p, const Scenario& s) {
  std::vector<Live> out;
  for (const auto& inst : s.instances) {
    Live l;
    l.role = &p.role(inst.role);
    std::map<std::string, std::string> params;
    for (std::size_t i = 0; i < inst.args.size(); ++i) {
      params[l.role->params[i]] = inst.args[i];
      l.subst.emplace(l.role->params[i], Term::name(inst.args[i]));
    }
    for (const auto& st : l.role->steps) l.steps.push_back({st.kind, bind_params(st.term, params)});
    l.agent = inst.args.at(0);
    out.push_back(std::move(l));
  }
  return out;
}

std::string state_of(const Live& l) {
  std::string s = "(";
  for (std::size_t i = 0; i < l.role->params.size(); ++i) s += (i ? "," : "") + show(l.subst.at(l.role->params[i]));
  const Step* next = l.pc < static_cast<int>(l.steps.size()) ? &l.steps[static_cast<std::size_t>(l.pc)] : nullptr;
  for (const auto& v : l.role->variables()) {
    auto it = l.subst.find(v);
    if (it != l.subst.end()) s += "," + show(it->second);
    else if (next && next->kind == Step::Kind::Recv && mentions(next->term, v)) s += "," + v;
  }
  return s + "," + std::to_string(l.pc) + ")";
}

std::function<bool(const std::string&)> owner(const std::string& agent) {
  return [agent](const std::string& a) { return a == agent; };
}

// Verdict for one goal of instance i, given the events so far.
std::optional<ChreVerdict> verdict(const ProtocolSpec& p, const Scenario& s, const std::vector<TraceEvent>& ev,
                                   const std::vector<Subst>& binds, int i, int g) {
  const AuthGoal& goal = p.goals[static_cast<std::size_t>(g)];
  const auto& inst = s.instances[static_cast<std::size_t>(i)];
  if (inst.role != goal.role) return std::nullopt;
  std::optional<std::size_t> ci, ri;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    if (ev[k].instance != i) continue;
    if (ev[k].step == goal.challenge) ci = k;
    if (ev[k].step == goal.response) ri = k;
  }
  if (!ci || !ri) return std::nullopt;
  ChreVerdict v;
  v.instance = i;
  v.goal = g;
  v.agent = inst.args.at(0);
  v.required = goal.level;
  auto pit = binds[static_cast<std::size_t>(i)].find(goal.peer);
  if (pit == binds[static_cast<std::size_t>(i)].end() || pit->second.kind != Term::Kind::Name) return v;
  v.peer = pit->second.id;
  if (s.compromised.count(v.peer)) {
    v.skipped = true;
    return v;
  }
  const Term& c = ev[*ci].message;
  const Term& r = ev[*ri].message;
  for (std::size_t j = 0; j < s.instances.size(); ++j) {
    const auto& pj = s.instances[j];
    if (pj.role != goal.peer_role || pj.args.at(0) != v.peer) continue;
    std::optional<std::size_t> got_c;
    bool pair = false;
    for (std::size_t k = *ci + 1; k < *ri; ++k) {
      const auto& e = ev[k];
      if (e.instance != static_cast<int>(j)) continue;
      if (e.step == goal.peer_challenge && e.message == c) got_c = k;
      if (got_c && e.step == goal.peer_response && e.message == r) pair = true;
    }
    if (!pair) continue;
    AuthLevel lvl = AuthLevel::Aliveness;
    if (!goal.peer_belief.empty()) {
      auto b = binds[j].find(goal.peer_belief);
      if (b != binds[j].end() && b->second == Term::name(v.agent)) lvl = AuthLevel::Agreement;
    } else {
      lvl = AuthLevel::Agreement;
    }
    v.achieved = std::max(v.achieved, lvl);
  }
  return v;
}

}  // namespace

SymbolicTrace run_honest(const ProtocolSpec& p, const Scenario& s) {
  p.validate();
  s.validate(p);
  auto live = instantiate(p, s);
  SymbolicTrace tr;
  for (const auto& l : live) tr.initial.push_back(state_of(l));
  std::vector<std::pair<Term, bool>> pending;  // (message, consumed)
  while (true) {
    bool moved = false;
    for (std::size_t i = 0; i < live.size() && !moved; ++i) {
      auto& l = live[i];
      if (l.pc >= static_cast<int>(l.steps.size())) continue;
      const Step& st = l.steps[static_cast<std::size_t>(l.pc)];
      TraceEvent e{static_cast<int>(i), l.pc, st.kind, {}, {}};
      if (st.kind == Step::Kind::Fresh) {
        e.message = Term::nonce(static_cast<int>(i), st.term.id);
        l.subst[st.term.id] = e.message;
      } else if (st.kind == Step::Kind::Send) {
        e.message = substitute(st.term, l.subst);
        pending.emplace_back(e.message, false);
      } else {
        bool ok = false;
        for (auto& [m, used] : pending) {
          if (used) continue;
          if (auto r = pattern_match(m, st.term, l.subst, owner(l.agent))) {
            used = ok = true;
            l.subst = std::move(*r);
            e.message = m;
            break;
          }
        }
        if (!ok) continue;
      }
      ++l.pc;
      e.state = state_of(l);
      tr.events.push_back(std::move(e));
      moved = true;
    }
    if (!moved) break;
  }
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (live[i].pc < static_cast<int>(live[i].steps.size()))
      throw Error("honest run stuck: instance " + std::to_string(i) + " (" + live[i].role->name + ") at step " +
                  std::to_string(live[i].pc) + " has no matching message");
    tr.bindings.push_back(live[i].subst);
  }
  return tr;
}

std::vector<ChreVerdict> check_chre(const ProtocolSpec& p, const Scenario& s, const SymbolicTrace& t) {
  std::vector<ChreVerdict> out;
  for (std::size_t i = 0; i < s.instances.size(); ++i)
    for (std::size_t g = 0; g < p.goals.size(); ++g)
      if (auto v = verdict(p, s, t.events, t.bindings, static_cast<int>(i), static_cast<int>(g))) out.push_back(*v);
  return out;
}

namespace {

class Search {
 public:
  Search(const ProtocolSpec& p, const Scenario& s) : p_(p), s_(s), live_(instantiate(p, s)), k_(initial_knowledge(p, s)) {}

  AttackResult run() {
    for (const auto& l : live_) initial_.push_back(state_of(l));
    dfs();
    return std::move(res_);
  }

 private:
  const ProtocolSpec& p_;
  const Scenario& s_;
  std::vector<Live> live_;
  Knowledge k_;
  std::vector<TraceEvent> trace_;
  std::vector<std::string> initial_;
  int deliveries_ = 0;
  std::unordered_set<std::string> seen_;
  AttackResult res_;

  std::string key() const {
    std::string out = std::to_string(deliveries_) + "|";
    for (const auto& l : live_) {
      out += std::to_string(l.pc) + ":";
      for (const auto& v : l.role->variables()) {
        auto it = l.subst.find(v);
        out += it == l.subst.end() ? "_" : to_source(it->second);
        out += ';';
      }
      out += '|';
    }
    // For open challenges, where every instance stood when the challenge went out.
    for (std::size_t i = 0; i < live_.size(); ++i) {
      for (const auto& g : p_.goals) {
        if (g.role != live_[i].role->name || live_[i].pc <= g.challenge || live_[i].pc > g.response) continue;
        std::size_t at = 0;
        while (!(trace_[at].instance == static_cast<int>(i) && trace_[at].step == g.challenge)) ++at;
        std::vector<int> pcs(live_.size(), 0);
        for (std::size_t k = 0; k < at; ++k) ++pcs[static_cast<std::size_t>(trace_[k].instance)];
        out += "o" + std::to_string(i) + "@";
        for (int c : pcs) out += std::to_string(c) + ",";
      }
    }
    return out;
  }

  std::vector<Subst> binds() const {
    std::vector<Subst> b;
    for (const auto& l : live_) b.push_back(l.subst);
    return b;
  }

  bool violated_at(int i) {
    auto b = binds();
    for (std::size_t g = 0; g < p_.goals.size(); ++g) {
      if (p_.goals[g].response != live_[static_cast<std::size_t>(i)].pc - 1) continue;
      auto v = verdict(p_, s_, trace_, b, i, static_cast<int>(g));
      if (v && !v->satisfied()) {
        SymbolicTrace t;
        t.events = trace_;
        t.bindings = std::move(b);
        t.initial = initial_;
        res_.attack = std::move(t);
        res_.violated = *v;
        return true;
      }
    }
    return false;
  }

  bool dfs() {
    if (!seen_.insert(key()).second) return false;
    ++res_.states;
    for (std::size_t i = 0; i < live_.size(); ++i) {
      auto& l = live_[i];
      if (l.pc >= static_cast<int>(l.steps.size())) continue;
      const Step& st = l.steps[static_cast<std::size_t>(l.pc)];
      if (st.kind == Step::Kind::Recv) continue;
      Live saved = l;
      Knowledge ksaved = k_;
      TraceEvent e{static_cast<int>(i), l.pc, st.kind, {}, {}};
      if (st.kind == Step::Kind::Fresh) {
        e.message = Term::nonce(static_cast<int>(i), st.term.id);
        l.subst[st.term.id] = e.message;
        if (s_.predictable_nonces) k_.add(e.message);
      } else {
        e.message = substitute(st.term, l.subst);
        k_.add(e.message);
      }
      ++l.pc;
      e.state = state_of(l);
      trace_.push_back(std::move(e));
      bool found = dfs();
      if (found) return true;
      trace_.pop_back();
      live_[i] = std::move(saved);
      k_ = std::move(ksaved);
    }
    if (s_.max_deliveries > 0 && deliveries_ >= s_.max_deliveries) return false;
    for (std::size_t i = 0; i < live_.size(); ++i) {
      if (live_[i].pc >= static_cast<int>(live_[i].steps.size())) continue;
      const Step& st = live_[i].steps[static_cast<std::size_t>(live_[i].pc)];
      if (st.kind != Step::Kind::Recv) continue;
      auto cands = intruder_candidates(k_, st.term, live_[i].subst, owner(live_[i].agent));
      for (auto& [msg, sub] : cands) {
        Live saved = live_[i];
        live_[i].subst = sub;
        ++live_[i].pc;
        ++deliveries_;
        trace_.push_back({static_cast<int>(i), saved.pc, Step::Kind::Recv, msg, state_of(live_[i])});
        if (violated_at(static_cast<int>(i)) || dfs()) return true;
        trace_.pop_back();
        --deliveries_;
        live_[i] = std::move(saved);
      }
    }
    return false;
  }
};

}  // namespace

AttackResult search_attack(const ProtocolSpec& p, const Scenario& s) {
  p.validate();
  s.validate(p);
  return Search(p, s).run();
}

bool receives_sound(const ProtocolSpec& p, const Scenario& s, const SymbolicTrace& t) {
  Knowledge k = initial_knowledge(p, s);
  for (const auto& e : t.events) {
    switch (e.kind) {
      case Step::Kind::Fresh:
        if (s.predictable_nonces) k.add(e.message);
        break;
      case Step::Kind::Send: k.add(e.message); break;
      case Step::Kind::Recv:
        if (!k.derivable(e.message)) return false;
        break;
    }
  }
  return true;
}

}  // namespace secsci
