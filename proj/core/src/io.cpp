// SPDX-License-Identifier: Apache-2.0
#include "secsci/io.hpp"

#include <fstream>
#include <sstream>

namespace secsci::io {

namespace {

std::string escape(std::string_view k) {
  std::string out;
  for (char c : k) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// A JSON value together with its pointer, so every error can say where it happened.
struct R {
  const json& v;
  std::string p;

  [[noreturn]] void fail(const std::string& m) const { throw Error((p.empty() ? "/" : p) + ": " + m); }

  bool has(const char* k) const { return v.is_object() && v.contains(k); }
  R at(const char* k) const {
    if (!v.is_object()) fail("expected an object");
    auto it = v.find(k);
    if (it == v.end()) throw Error(p + "/" + escape(k) + ": missing");
    return {*it, p + "/" + escape(k)};
  }
  std::optional<R> opt(const char* k) const {
    if (!v.is_object()) fail("expected an object");
    auto it = v.find(k);
    if (it == v.end() || it->is_null()) return std::nullopt;
    return R{*it, p + "/" + escape(k)};
  }
  std::size_t size() const {
    if (!v.is_array()) fail("expected an array");
    return v.size();
  }
  R idx(std::size_t i) const {
    if (!v.is_array()) fail("expected an array");
    return {v.at(i), p + "/" + std::to_string(i)};
  }
  std::vector<std::pair<std::string, R>> items() const {
    if (!v.is_object()) fail("expected an object");
    std::vector<std::pair<std::string, R>> out;
    for (auto it = v.begin(); it != v.end(); ++it) out.push_back({it.key(), R{it.value(), p + "/" + escape(it.key())}});
    return out;
  }
  std::string str() const {
    if (!v.is_string()) fail("expected a string");
    return v.get<std::string>();
  }
  int integer() const {
    if (!v.is_number_integer()) fail("expected an integer");
    return v.get<int>();
  }
  double number() const {
    if (!v.is_number()) fail("expected a number");
    return v.get<double>();
  }
  bool boolean() const {
    if (!v.is_boolean()) fail("expected a boolean");
    return v.get<bool>();
  }
  Rational rational() const {
    try {
      if (v.is_number_integer()) return Rational(v.get<long>());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
    fail("expected a rational as an integer or a \"p/q\" string");
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(idx(i).str());
    return out;
  }
  std::vector<Rational> rationals() const {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(idx(i).rational());
    return out;
  }
  int index_in(const std::vector<std::string>& names) const {
    auto s = str();
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) fail("unknown name '" + s + "'");
    return static_cast<int>(it - names.begin());
  }
};

template <class F>
auto checked(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string m = e.what();
    if (!m.empty() && m[0] == '/') throw;
    throw Error((where.empty() ? "/" : where) + ": " + m);
  }
}

R root(const json& j) { return {j, ""}; }

void expect_kind(const R& r, std::initializer_list<const char*> kinds) {
  if (!r.has("kind")) return;
  auto k = r.at("kind").str();
  for (const char* x : kinds)
    if (k == x) return;
  r.at("kind").fail("unexpected kind '" + k + "'");
}

json rational_json(const Rational& q) { return to_string(q); }

json rationals_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(rational_json(q));
  return a;
}

// Pattern trees.
Pattern pattern_from(const R& r) {
  using K = Pattern::Kind;
  if (r.v.is_string()) {
    auto s = r.str();
    if (s == "all") return {K::All, {}, {}, {}};
    if (s == "any") return {K::Any, {}, {}, {}};
    if (s == "epsilon") return {K::Epsilon, {}, {}, {}};
    if (s == "empty") return {K::Empty, {}, {}, {}};
    r.fail("unknown pattern '" + s + "'");
  }
  if (!r.v.is_object() || r.v.size() != 1) r.fail("a pattern is a string or an object with one key");
  auto [key, arg] = r.items().front();
  auto list = [&](K k) {
    Pattern p{k, {}, {}, {}};
    for (std::size_t i = 0; i < arg.size(); ++i) p.args.push_back(pattern_from(arg.idx(i)));
    return p;
  };
  auto pairwise = [&](K k) { return Pattern{k, arg.at("c").strings(), arg.at("d").strings(), {}}; };
  if (key == "letters") return {K::Letters, arg.strings(), {}, {}};
  if (key == "word") return {K::Word, arg.strings(), {}, {}};
  if (key == "occurs") return {K::Occurs, arg.strings(), {}, {}};
  if (key == "before") return pairwise(K::Before);
  if (key == "eventually_follows") return pairwise(K::EventuallyFollows);
  if (key == "always_preceded") return pairwise(K::AlwaysPreceded);
  if (key == "not") return {K::Not, {}, {}, {pattern_from(arg)}};
  if (key == "star") return {K::Star, {}, {}, {pattern_from(arg)}};
  if (key == "and") return list(K::And);
  if (key == "or") return list(K::Or);
  if (key == "concat") return list(K::Concat);
  r.fail("unknown pattern operator '" + key + "'");
}

Dfa dfa_from(const R& r, int letters) {
  int n = r.at("states").integer();
  if (n < 1) r.at("states").fail("need at least one state");
  Dfa d(letters);
  std::vector<bool> acc(static_cast<std::size_t>(n), false);
  auto a = r.at("accepting");
  for (std::size_t i = 0; i < a.size(); ++i) {
    int s = a.idx(i).integer();
    if (s < 0 || s >= n) a.idx(i).fail("state out of range");
    acc[static_cast<std::size_t>(s)] = true;
  }
  for (int s = 0; s < n; ++s) d.add_state(acc[static_cast<std::size_t>(s)]);
  auto delta = r.at("delta");
  if (delta.size() != static_cast<std::size_t>(n)) delta.fail("need one row per state");
  for (int s = 0; s < n; ++s) {
    auto row = delta.idx(static_cast<std::size_t>(s));
    if (row.size() != static_cast<std::size_t>(letters)) row.fail("need one target per letter");
    for (int l = 0; l < letters; ++l) {
      auto c = row.idx(static_cast<std::size_t>(l));
      int t = c.integer();
      if (t < 0 || t >= n) c.fail("state out of range");
      d.set(s, l, t);
    }
  }
  return dfa::minimize(d);
}

json dfa_json(const Dfa& d) {
  json acc = json::array(), delta = json::array();
  for (int s = 0; s < d.states(); ++s) {
    if (d.accepting(s)) acc.push_back(s);
    json row = json::array();
    for (Letter a = 0; a < d.letters(); ++a) row.push_back(d.next(s, a));
    delta.push_back(row);
  }
  return {{"states", d.states()}, {"accepting", acc}, {"delta", delta}};
}

AlphabetPtr alphabet_from(const R& r) {
  std::vector<Event> evs;
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto e = r.idx(i);
    Event ev;
    ev.id = e.at("id").str();
    ev.subject = e.at("subject").str();
    if (auto o = e.opt("object")) ev.object = o->str();
    if (auto o = e.opt("action")) ev.action = o->str();
    if (auto o = e.opt("level")) ev.level = o->str();
    evs.push_back(std::move(ev));
  }
  return checked(r.p, [&] { return std::make_shared<const Alphabet>(std::move(evs)); });
}

json alphabet_json(const Alphabet& a) {
  json out = json::array();
  for (const auto& e : a.events()) {
    json j = {{"id", e.id}, {"subject", e.subject}};
    if (e.object) j["object"] = *e.object;
    if (e.action) j["action"] = *e.action;
    if (e.level) j["level"] = *e.level;
    out.push_back(j);
  }
  return out;
}

Poset poset_from(const R& r) {
  auto elems = r.at("elements").strings();
  std::vector<std::pair<std::string, std::string>> covers;
  if (auto c = r.opt("covers"))
    for (std::size_t i = 0; i < c->size(); ++i) {
      auto pr = c->idx(i);
      if (pr.size() != 2) pr.fail("a cover is a pair [lower, upper]");
      covers.emplace_back(pr.idx(0).str(), pr.idx(1).str());
    }
  return checked(r.p, [&] { return Poset::from_covers(elems, covers); });
}

json poset_json(const Poset& p) {
  json covers = json::array();
  for (const auto& [a, b] : p.covers()) covers.push_back({a, b});
  return {{"elements", p.elements()}, {"covers", covers}};
}

std::map<std::string, std::string> string_map(const R& r) {
  std::map<std::string, std::string> out;
  for (auto& [k, v] : r.items()) out[k] = v.str();
  return out;
}

Matrix matrix_from(const std::optional<R>& r, const std::vector<std::string>& subjects,
                   const std::vector<std::string>& objects) {
  Matrix m(subjects.size(), std::vector<ActionSet>(objects.size()));
  if (!r) return m;
  for (auto& [u, row] : r->items()) {
    auto ui = std::find(subjects.begin(), subjects.end(), u);
    if (ui == subjects.end()) row.fail("unknown subject '" + u + "'");
    for (auto& [i, cell] : row.items()) {
      auto ii = std::find(objects.begin(), objects.end(), i);
      if (ii == objects.end()) cell.fail("unknown object '" + i + "'");
      auto acts = cell.strings();
      m[static_cast<std::size_t>(ui - subjects.begin())][static_cast<std::size_t>(ii - objects.begin())] =
          ActionSet(acts.begin(), acts.end());
    }
  }
  return m;
}

json matrix_json(const Matrix& m, const std::vector<std::string>& subjects, const std::vector<std::string>& objects) {
  json out = json::object();
  for (std::size_t u = 0; u < subjects.size(); ++u) {
    json row = json::object();
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (!m[u][i].empty()) row[objects[i]] = std::vector<std::string>(m[u][i].begin(), m[u][i].end());
    if (!row.empty()) out[subjects[u]] = row;
  }
  return out;
}

AcModel ac_fields(const R& r) {
  AcModel m;
  m.subjects = r.at("subjects").strings();
  m.objects = r.at("objects").strings();
  m.actions = r.at("actions").strings();
  m.M = matrix_from(r.opt("M"), m.subjects, m.objects);
  m.B = matrix_from(r.opt("B"), m.subjects, m.objects);
  return m;
}

json ac_fields_json(const AcModel& m) {
  return {{"subjects", m.subjects},
          {"objects", m.objects},
          {"actions", m.actions},
          {"M", matrix_json(m.M, m.subjects, m.objects)},
          {"B", matrix_json(m.B, m.subjects, m.objects)}};
}

Transducer transducer_from(const R& r) {
  Transducer t;
  t.inputs = r.at("inputs").strings();
  t.outputs = r.at("outputs").strings();
  t.states = r.at("states").strings();
  t.initial = r.at("initial").index_in(t.states);
  t.delta.assign(t.states.size(), std::vector<std::vector<Transducer::Edge>>(t.inputs.size()));
  auto d = r.at("delta");
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto e = d.idx(i);
    int from = e.at("from").index_in(t.states);
    int in = e.at("input").index_in(t.inputs);
    Transducer::Edge edge;
    edge.to = e.at("to").index_in(t.states);
    if (auto o = e.opt("output")) edge.output = o->index_in(t.outputs);
    t.delta[static_cast<std::size_t>(from)][static_cast<std::size_t>(in)].push_back(edge);
  }
  return t;
}

json transducer_json(const Transducer& t) {
  json d = json::array();
  for (std::size_t s = 0; s < t.delta.size(); ++s)
    for (std::size_t x = 0; x < t.delta[s].size(); ++x)
      for (const auto& e : t.delta[s][x]) {
        json j = {{"from", t.states[s]}, {"input", t.inputs[x]}, {"to", t.states[static_cast<std::size_t>(e.to)]}};
        if (e.output >= 0) j["output"] = t.outputs[static_cast<std::size_t>(e.output)];
        d.push_back(j);
      }
  return {{"inputs", t.inputs},
          {"outputs", t.outputs},
          {"states", t.states},
          {"initial", t.states[static_cast<std::size_t>(t.initial)]},
          {"delta", d}};
}

template <class M>
void shared_fields(const R& r, M& m, const std::vector<std::string>& inputs) {
  m.subjects = r.at("subjects").strings();
  m.levels = poset_from(r.at("levels"));
  auto owner = r.at("owner");
  auto pl = r.at("pl");
  for (const auto& x : inputs) {
    m.owner.push_back(owner.at(x.c_str()).str());
    m.pl.push_back(pl.at(x.c_str()).str());
  }
  m.cl = string_map(r.at("cl"));
}

template <class M>
void shared_json(json& j, const M& m, const std::vector<std::string>& inputs) {
  json owner = json::object(), pl = json::object();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    owner[inputs[i]] = m.owner[i];
    pl[inputs[i]] = m.pl[i];
  }
  j["subjects"] = m.subjects;
  j["owner"] = owner;
  j["levels"] = poset_json(m.levels);
  j["pl"] = pl;
  j["cl"] = m.cl;
}

Attribute attribute_meta(const std::string& name, const std::optional<R>& meta) {
  Attribute a{name, AttributeRole::Other, {}, std::nullopt};
  if (!meta) return a;
  if (auto r = meta->opt("role")) a.role = checked(r->p, [&] { return parse_role(r->str()); });
  if (auto d = meta->opt("domain")) a.domain = d->strings();
  if (auto b = meta->opt("bounds")) {
    if (b->size() != 2) b->fail("bounds are [lo, hi]");
    a.bounds = std::make_pair(b->idx(0).number(), b->idx(1).number());
  }
  return a;
}

Table table_fields(const R& r, const std::filesystem::path& base) {
  Table t;
  if (auto csv = r.opt("csv")) {
    auto file = base / csv->str();
    std::ifstream in(file, std::ios::binary);
    if (!in) csv->fail("cannot read '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string idc;
    if (auto ic = r.opt("id_column")) idc = ic->str();
    t = checked(csv->p, [&] { return parse_csv(ss.str(), idc); });
  } else {
    auto cols = r.at("columns").strings();
    for (const auto& c : cols) t.attributes.push_back({c, AttributeRole::Other, {}, std::nullopt});
    auto rows = r.at("rows");
    std::vector<std::string> ids;
    if (auto i = r.opt("ids")) ids = i->strings();
    if (!ids.empty() && ids.size() != rows.size()) r.at("ids").fail("need one id per row");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.cells.push_back(rows.idx(i).strings());
      t.ids.push_back(ids.empty() ? "r" + std::to_string(i + 1) : ids[i]);
    }
  }
  if (auto meta = r.opt("attributes")) {
    for (auto& [name, m] : meta->items()) {
      int i = t.attribute_index(name);
      if (i < 0) m.fail("no column named '" + name + "'");
      t.attributes[static_cast<std::size_t>(i)] = attribute_meta(name, m);
    }
  }
  checked(r.p, [&] {
    t.validate();
    return 0;
  });
  return t;
}

json table_inline(const Table& t) {
  json cols = json::array(), meta = json::object();
  for (const auto& a : t.attributes) {
    cols.push_back(a.name);
    json m = json::object();
    if (a.role != AttributeRole::Other) m["role"] = to_string(a.role);
    if (!a.domain.empty()) m["domain"] = a.domain;
    if (a.bounds) m["bounds"] = {a.bounds->first, a.bounds->second};
    if (!m.empty()) meta[a.name] = m;
  }
  json j = {{"columns", cols}, {"ids", t.ids}, {"rows", t.cells}};
  if (!meta.empty()) j["attributes"] = meta;
  return j;
}

Hierarchy hierarchy_from(const R& r) {
  Hierarchy h;
  h.attribute = r.at("attribute").str();
  if (auto m = r.opt("mask")) {
    h.kind = Hierarchy::Kind::Mask;
    h.mask_levels = m->integer();
    if (h.mask_levels < 0) m->fail("mask levels must be non-negative");
  } else if (auto mp = r.opt("map")) {
    h.kind = Hierarchy::Kind::Map;
    for (std::size_t i = 0; i < mp->size(); ++i) h.maps.push_back(string_map(mp->idx(i)));
  } else if (auto rg = r.opt("ranges")) {
    h.kind = Hierarchy::Kind::Ranges;
    for (std::size_t i = 0; i < rg->size(); ++i) {
      auto lv = rg->idx(i);
      std::vector<Hierarchy::Range> bins;
      for (std::size_t b = 0; b < lv.size(); ++b) {
        auto bin = lv.idx(b);
        bins.push_back({bin.at("lo").number(), bin.at("hi").number(), bin.at("label").str()});
      }
      h.ranges.push_back(std::move(bins));
    }
  } else {
    r.fail("hierarchy needs one of mask, map, ranges");
  }
  return h;
}

json hierarchy_json(const Hierarchy& h) {
  json j = {{"attribute", h.attribute}};
  switch (h.kind) {
    case Hierarchy::Kind::Mask: j["mask"] = h.mask_levels; break;
    case Hierarchy::Kind::Map: j["map"] = h.maps; break;
    case Hierarchy::Kind::Ranges: {
      json lv = json::array();
      for (const auto& bins : h.ranges) {
        json a = json::array();
        for (const auto& b : bins) a.push_back({{"lo", b.lo}, {"hi", b.hi}, {"label", b.label}});
        lv.push_back(a);
      }
      j["ranges"] = lv;
      break;
    }
  }
  return j;
}

Step step_from(const R& r) {
  if (auto f = r.opt("fresh")) return {Step::Kind::Fresh, Term::var(f->str(), Term::Type::Nonce)};
  auto term = [&](const R& t) { return checked(t.p, [&] { return parse_term(t.str()); }); };
  if (auto s = r.opt("send")) return {Step::Kind::Send, term(*s)};
  if (auto s = r.opt("recv")) return {Step::Kind::Recv, term(*s)};
  r.fail("a step is one of fresh, send, recv");
}

json step_json(const Step& s) {
  switch (s.kind) {
    case Step::Kind::Fresh: return {{"fresh", s.term.id}};
    case Step::Kind::Send: return {{"send", to_source(s.term)}};
    case Step::Kind::Recv: return {{"recv", to_source(s.term)}};
  }
  return {};
}

}  // namespace

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(file.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

std::string kind_of(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw Error("/kind: missing");
  return j["kind"].get<std::string>();
}

const RegularProperty& PropertySet::get(std::string_view name) const {
  for (const auto& p : properties)
    if (p.name == name) return p.property;
  throw Error("no property named '" + std::string(name) + "'");
}

bool PropertySet::operator==(const PropertySet& o) const {
  if (!(*alphabet == *o.alphabet) || properties.size() != o.properties.size()) return false;
  for (std::size_t i = 0; i < properties.size(); ++i)
    if (properties[i].name != o.properties[i].name ||
        !(dfa::minimize(properties[i].property.dfa) == dfa::minimize(o.properties[i].property.dfa)))
      return false;
  return true;
}

// Flat form: one automaton with named states and a transition relation.
PropertySet automaton_from(const R& r) {
  PropertySet s;
  s.alphabet = alphabet_from(r.at("events"));
  auto names = r.at("states").strings();
  if (names.empty()) r.at("states").fail("need at least one state");
  Nfa n(static_cast<int>(s.alphabet->size()));
  for (std::size_t i = 0; i < names.size(); ++i) n.add_state(false);
  n.initial.push_back(r.at("initial").index_in(names));
  auto acc = r.at("accepting");
  for (std::size_t i = 0; i < acc.size(); ++i) n.acc[static_cast<std::size_t>(acc.idx(i).index_in(names))] = true;
  auto tr = r.at("transitions");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    auto t = tr.idx(i);
    int from = t.at("from").index_in(names);
    auto ev = t.at("event");
    auto a = s.alphabet->find(ev.str());
    if (!a) ev.fail("unknown event '" + ev.str() + "'");
    n.add(from, *a, t.at("to").index_in(names));
  }
  std::string name = "P";
  if (auto nm = r.opt("name")) name = nm->str();
  s.properties.push_back({name, make_property(s.alphabet, dfa::determinize(n))});
  return s;
}

PropertySet property_set_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"properties", "automaton"});
  if (r.has("transitions")) return automaton_from(r);
  PropertySet s;
  s.alphabet = alphabet_from(r.at("alphabet"));
  auto ps = r.at("properties");
  int k = static_cast<int>(s.alphabet->size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto e = ps.idx(i);
    NamedProperty np{e.at("name").str(), {}};
    if (auto d = e.opt("dfa")) {
      np.property = make_property(s.alphabet, dfa_from(*d, k));
    } else {
      auto pr = e.at("pattern");
      np.property = checked(pr.p, [&] { return pattern_property(s.alphabet, pattern_from(pr)); });
    }
    s.properties.push_back(std::move(np));
  }
  return s;
}

json to_json(const PropertySet& p) {
  json props = json::array();
  for (const auto& np : p.properties) props.push_back({{"name", np.name}, {"dfa", dfa_json(np.property.dfa)}});
  return {{"kind", "properties"}, {"alphabet", alphabet_json(*p.alphabet)}, {"properties", props}};
}

AcModel ac_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"acm"});
  AcModel m = ac_fields(r);
  checked("", [&] {
    m.validate();
    return 0;
  });
  return m;
}

json to_json(const AcModel& m) {
  json j = {{"kind", "acm"}};
  j.update(ac_fields_json(m));
  return j;
}

bool AuthScenario::operator==(const AuthScenario& o) const {
  if (!(model == o.model) || events.size() != o.events.size()) return false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto &a = events[i], &b = o.events[i];
    if (a.kind != b.kind || a.writer != b.writer || a.object != b.object || a.from != b.from || a.to != b.to ||
        a.reader != b.reader || a.subject != b.subject || a.level != b.level)
      return false;
  }
  return true;
}

AuthEvent auth_event_from(const R& e) {
  AuthEvent ev;
  auto kind = e.at("kind").str();
  if (kind == "write-read") {
    ev.kind = AuthEvent::Kind::WriteRead;
    ev.writer = e.at("writer").str();
    ev.object = e.at("object").str();
    ev.from = e.at("from").str();
    ev.to = e.at("to").str();
    ev.reader = e.at("reader").str();
  } else if (kind == "relocate" || kind == "set-clearance") {
    ev.kind = kind == "relocate" ? AuthEvent::Kind::Relocate : AuthEvent::Kind::SetClearance;
    ev.subject = e.at("subject").str();
    ev.level = e.at("level").str();
  } else {
    e.at("kind").fail("unknown event kind '" + kind + "'");
  }
  return ev;
}

AuthScenario auth_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"authorization"});
  AuthScenario s;
  s.model.ac = ac_fields(r);
  s.model.levels = poset_from(r.at("levels"));
  s.model.cl = string_map(r.at("cl"));
  s.model.pl = string_map(r.at("pl"));
  if (auto x = r.opt("read")) s.model.read = x->str();
  if (auto x = r.opt("write")) s.model.write = x->str();
  checked("", [&] {
    s.model.validate();
    return 0;
  });
  if (auto evs = r.opt("events"))
    for (std::size_t i = 0; i < evs->size(); ++i) s.events.push_back(auth_event_from(evs->idx(i)));
  return s;
}

AuthEvent auth_event_from_json(const json& j) { return auth_event_from(root(j)); }

json to_json(const AuthScenario& a) {
  json j = {{"kind", "authorization"}};
  j.update(ac_fields_json(a.model.ac));
  j["levels"] = poset_json(a.model.levels);
  j["cl"] = a.model.cl;
  j["pl"] = a.model.pl;
  j["read"] = a.model.read;
  j["write"] = a.model.write;
  json evs = json::array();
  for (const auto& e : a.events) {
    switch (e.kind) {
      case AuthEvent::Kind::WriteRead:
        evs.push_back({{"kind", "write-read"},
                       {"writer", e.writer},
                       {"object", e.object},
                       {"from", e.from},
                       {"to", e.to},
                       {"reader", e.reader}});
        break;
      case AuthEvent::Kind::Relocate:
        evs.push_back({{"kind", "relocate"}, {"subject", e.subject}, {"level", e.level}});
        break;
      case AuthEvent::Kind::SetClearance:
        evs.push_back({{"kind", "set-clearance"}, {"subject", e.subject}, {"level", e.level}});
        break;
    }
  }
  if (!evs.empty()) j["events"] = evs;
  return j;
}

SharedChannel channel_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"channel"});
  if (auto e = r.opt("elevator")) {
    int floors = e->at("floors").integer();
    auto subjects = e->at("subjects").strings();
    return checked(e->p, [&] { return make_elevator(floors, subjects); });
  }
  SharedChannel m;
  m.t = transducer_from(r);
  shared_fields(r, m, m.t.inputs);
  checked("", [&] {
    m.validate();
    return 0;
  });
  return m;
}

json to_json(const SharedChannel& m) {
  json j = {{"kind", "channel"}};
  j.update(transducer_json(m.t));
  shared_json(j, m, m.t.inputs);
  return j;
}

StochasticFile stochastic_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"stochastic"});
  StochasticFile f;
  auto& c = f.channel;
  c.inputs = r.at("inputs").strings();
  c.outputs = r.at("outputs").strings();
  c.rows.assign(c.inputs.size(), std::nullopt);
  auto rows = r.at("rows");
  for (auto& [x, row] : rows.items()) {
    auto it = std::find(c.inputs.begin(), c.inputs.end(), x);
    if (it == c.inputs.end()) row.fail("unknown input '" + x + "'");
    if (row.v.is_null()) continue;
    auto v = row.rationals();
    if (v.size() != c.outputs.size()) row.fail("need one entry per output");
    Rational sum = 0;
    for (const auto& q : v) sum += q;
    if (sum != 1) row.fail("row sums to " + to_string(sum) + ", not 1");
    c.rows[static_cast<std::size_t>(it - c.inputs.begin())] = std::move(v);
  }
  if (auto p = r.opt("prior")) {
    f.prior = p->rationals();
    if (f.prior->size() != c.inputs.size()) p->fail("need one probability per input");
  }
  checked("", [&] {
    c.validate();
    return 0;
  });
  return f;
}

json to_json(const StochasticFile& s) {
  json rows = json::object();
  for (std::size_t x = 0; x < s.channel.inputs.size(); ++x)
    rows[s.channel.inputs[x]] = s.channel.rows[x] ? rationals_json(*s.channel.rows[x]) : json(nullptr);
  json j = {{"kind", "stochastic"}, {"inputs", s.channel.inputs}, {"outputs", s.channel.outputs}, {"rows", rows}};
  if (s.prior) j["prior"] = rationals_json(*s.prior);
  return j;
}

DistributionFile distribution_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"distribution"});
  DistributionFile d;
  d.outcomes = r.at("outcomes").strings();
  d.p = r.at("p").rationals();
  if (d.p.size() != d.outcomes.size()) r.at("p").fail("need one probability per outcome");
  Rational sum = 0;
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    if (d.p[i] < 0) r.at("p").idx(i).fail("negative probability");
    sum += d.p[i];
  }
  if (sum != 1) r.at("p").fail("probabilities sum to " + to_string(sum));
  return d;
}

json to_json(const DistributionFile& d) {
  return {{"kind", "distribution"}, {"outcomes", d.outcomes}, {"p", rationals_json(d.p)}};
}

Source source_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"source"});
  Source s;
  s.symbols = r.at("symbols").strings();
  s.states = r.at("states").strings();
  s.initial = r.at("initial").index_in(s.states);
  auto emit = r.at("emit");
  auto next = r.at("next");
  for (const auto& st : s.states) {
    auto e = emit.at(st.c_str());
    auto v = e.rationals();
    if (v.size() != s.symbols.size()) e.fail("need one probability per symbol");
    s.emit.push_back(std::move(v));
    auto n = next.at(st.c_str());
    if (n.size() != s.symbols.size()) n.fail("need one successor per symbol");
    std::vector<int> row;
    for (std::size_t i = 0; i < n.size(); ++i) row.push_back(n.idx(i).index_in(s.states));
    s.next.push_back(std::move(row));
  }
  if (auto d = r.opt("depth")) s.depth = d->integer();
  checked("", [&] {
    s.validate();
    return 0;
  });
  return s;
}

json to_json(const Source& s) {
  json emit = json::object(), next = json::object();
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    emit[s.states[i]] = rationals_json(s.emit[i]);
    json row = json::array();
    for (int t : s.next[i]) row.push_back(s.states[static_cast<std::size_t>(t)]);
    next[s.states[i]] = row;
  }
  return {{"kind", "source"},
          {"symbols", s.symbols},
          {"states", s.states},
          {"initial", s.states[static_cast<std::size_t>(s.initial)]},
          {"emit", emit},
          {"next", next},
          {"depth", s.depth}};
}

ProbSharedChannel prob_channel_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"prob-channel"});
  ProbSharedChannel m;
  auto& t = m.t;
  t.inputs = r.at("inputs").strings();
  t.outputs = r.at("outputs").strings();
  t.states = r.at("states").strings();
  t.initial = r.at("initial").index_in(t.states);
  t.delta.assign(t.states.size(), std::vector<std::vector<ProbTransducer::Edge>>(t.inputs.size()));
  auto d = r.at("delta");
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto e = d.idx(i);
    int from = e.at("from").index_in(t.states);
    int in = e.at("input").index_in(t.inputs);
    ProbTransducer::Edge edge{e.at("to").index_in(t.states), e.at("output").index_in(t.outputs), e.at("p").rational()};
    t.delta[static_cast<std::size_t>(from)][static_cast<std::size_t>(in)].push_back(edge);
  }
  shared_fields(r, m, t.inputs);
  if (auto s = r.opt("source")) {
    json sj = s->v;
    m.source = checked(s->p, [&] { return source_from_json(sj); });
  }
  checked("", [&] {
    m.validate();
    return 0;
  });
  return m;
}

json to_json(const ProbSharedChannel& m) {
  const auto& t = m.t;
  json d = json::array();
  for (std::size_t s = 0; s < t.delta.size(); ++s)
    for (std::size_t x = 0; x < t.delta[s].size(); ++x)
      for (const auto& e : t.delta[s][x])
        d.push_back({{"from", t.states[s]},
                     {"input", t.inputs[x]},
                     {"to", t.states[static_cast<std::size_t>(e.to)]},
                     {"output", t.outputs[static_cast<std::size_t>(e.output)]},
                     {"p", rational_json(e.p)}});
  json j = {{"kind", "prob-channel"},
            {"inputs", t.inputs},
            {"outputs", t.outputs},
            {"states", t.states},
            {"initial", t.states[static_cast<std::size_t>(t.initial)]},
            {"delta", d}};
  shared_json(j, m, t.inputs);
  if (m.source) {
    json s = to_json(*m.source);
    s.erase("kind");
    j["source"] = s;
  }
  return j;
}

CipherFile cipher_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"cipher"});
  auto keys = r.at("keys").strings();
  auto messages = r.at("messages").strings();
  auto ciphertexts = r.at("ciphertexts").strings();
  auto e = r.at("E");
  std::vector<std::vector<int>> E;
  for (const auto& k : keys) {
    auto row = e.at(k.c_str());
    if (row.size() != messages.size()) row.fail("need one ciphertext per message");
    std::vector<int> v;
    for (std::size_t i = 0; i < row.size(); ++i) v.push_back(row.idx(i).index_in(ciphertexts));
    E.push_back(std::move(v));
  }
  CipherFile f;
  f.cipher = checked("", [&] { return make_cipher(keys, messages, ciphertexts, E); });
  if (auto p = r.opt("prior")) {
    f.prior = p->rationals();
    if (f.prior.size() != messages.size()) p->fail("need one probability per message");
  } else {
    f.prior.assign(messages.size(), Rational(1, static_cast<unsigned long>(messages.size())));
  }
  return f;
}

json to_json(const CipherFile& c) {
  json e = json::object();
  for (std::size_t k = 0; k < c.cipher.keys.size(); ++k) {
    json row = json::array();
    for (int x : c.cipher.E[k]) row.push_back(c.cipher.ciphertexts[static_cast<std::size_t>(x)]);
    e[c.cipher.keys[k]] = row;
  }
  return {{"kind", "cipher"},
          {"keys", c.cipher.keys},
          {"messages", c.cipher.messages},
          {"ciphertexts", c.cipher.ciphertexts},
          {"E", e},
          {"prior", rationals_json(c.prior)}};
}

Table table_from_json(const json& j, const std::filesystem::path& base) { return table_fields(root(j), base); }

json to_json(const Table& t) { return table_inline(t); }

PrivacyFile privacy_from_json(const json& j, const std::filesystem::path& base) {
  R r = root(j);
  expect_kind(r, {"table"});
  PrivacyFile f;
  f.table = table_fields(r, base);
  if (auto q = r.opt("quasi")) {
    f.quasi = q->strings();
    checked(q->p, [&] { return f.table.attribute_indices(f.quasi); });
  } else {
    for (const auto& a : f.table.attributes)
      if (a.role == AttributeRole::Quasi) f.quasi.push_back(a.name);
  }
  if (auto hs = r.opt("hierarchies"))
    for (std::size_t i = 0; i < hs->size(); ++i) f.hierarchies.push_back(hierarchy_from(hs->idx(i)));
  if (auto k = r.opt("k")) {
    int kv = k->integer();
    if (kv < 1) k->fail("k must be positive");
    f.k = static_cast<std::size_t>(kv);
  }
  if (auto b = r.opt("suppression_budget")) {
    int bv = b->integer();
    if (bv < 0) b->fail("budget must be non-negative");
    f.suppression_budget = static_cast<std::size_t>(bv);
  }
  if (auto e = r.opt("external")) f.external = table_fields(*e, base);
  if (auto jn = r.opt("join")) f.join = jn->strings();
  if (auto q = r.opt("query")) {
    Query query;
    if (auto c = q->opt("count")) {
      query.kind = Query::Kind::Count;
      query.attribute = c->at("attribute").str();
      query.equals = c->at("equals").str();
    } else if (auto s = q->opt("sum")) {
      query.kind = Query::Kind::Sum;
      query.attribute = s->str();
    } else {
      q->fail("query is one of count, sum");
    }
    if (f.table.attribute_index(query.attribute) < 0) q->fail("unknown attribute '" + query.attribute + "'");
    f.query = query;
  }
  if (auto e = r.opt("epsilon")) {
    f.epsilon = e->number();
    if (!(f.epsilon > 0)) e->fail("epsilon must be positive");
  }
  if (auto b = r.opt("budget")) {
    f.budget = b->number();
    if (f.budget < 0) b->fail("budget must be non-negative");
  }
  return f;
}

json to_json(const PrivacyFile& p) {
  json j = {{"kind", "table"}};
  j.update(table_inline(p.table));
  j["quasi"] = p.quasi;
  json hs = json::array();
  for (const auto& h : p.hierarchies) hs.push_back(hierarchy_json(h));
  j["hierarchies"] = hs;
  j["k"] = p.k;
  j["suppression_budget"] = p.suppression_budget;
  if (p.external) j["external"] = table_inline(*p.external);
  if (!p.join.empty()) j["join"] = p.join;
  if (p.query) {
    if (p.query->kind == Query::Kind::Count)
      j["query"] = {{"count", {{"attribute", p.query->attribute}, {"equals", p.query->equals}}}};
    else
      j["query"] = {{"sum", p.query->attribute}};
  }
  j["epsilon"] = p.epsilon;
  j["budget"] = p.budget;
  return j;
}

ProtocolSpec protocol_from_json(const json& j) {
  R r = root(j);
  expect_kind(r, {"protocol"});
  ProtocolSpec p;
  p.name = r.at("name").str();
  auto roles = r.at("roles");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    auto ro = roles.idx(i);
    Role role;
    role.name = ro.at("name").str();
    role.params = ro.at("params").strings();
    auto steps = ro.at("steps");
    for (std::size_t s = 0; s < steps.size(); ++s) role.steps.push_back(step_from(steps.idx(s)));
    checked(ro.p, [&] {
      role.validate();
      return 0;
    });
    p.roles.push_back(std::move(role));
  }
  if (auto gs = r.opt("goals")) {
    for (std::size_t i = 0; i < gs->size(); ++i) {
      auto g = gs->idx(i);
      AuthGoal goal;
      goal.role = g.at("role").str();
      goal.challenge = g.at("challenge").integer();
      goal.response = g.at("response").integer();
      goal.peer = g.at("peer").str();
      goal.peer_role = g.at("peer_role").str();
      goal.peer_challenge = g.at("peer_challenge").integer();
      goal.peer_response = g.at("peer_response").integer();
      if (auto b = g.opt("peer_belief")) goal.peer_belief = b->str();
      if (auto l = g.opt("level")) goal.level = checked(l->p, [&] { return parse_auth_level(l->str()); });
      p.goals.push_back(goal);
    }
  }
  checked("", [&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const ProtocolSpec& p) {
  json roles = json::array();
  for (const auto& r : p.roles) {
    json steps = json::array();
    for (const auto& s : r.steps) steps.push_back(step_json(s));
    roles.push_back({{"name", r.name}, {"params", r.params}, {"steps", steps}});
  }
  json goals = json::array();
  for (const auto& g : p.goals) {
    json j = {{"role", g.role},
              {"challenge", g.challenge},
              {"response", g.response},
              {"peer", g.peer},
              {"peer_role", g.peer_role},
              {"peer_challenge", g.peer_challenge},
              {"peer_response", g.peer_response}};
    if (!g.peer_belief.empty()) j["peer_belief"] = g.peer_belief;
    j["level"] = to_string(g.level);
    goals.push_back(j);
  }
  return {{"kind", "protocol"}, {"name", p.name}, {"roles", roles}, {"goals", goals}};
}

Scenario scenario_from_json(const json& j, const ProtocolSpec& p) {
  R r = root(j);
  expect_kind(r, {"scenario"});
  Scenario s;
  auto is = r.at("instances");
  for (std::size_t i = 0; i < is.size(); ++i) {
    auto in = is.idx(i);
    s.instances.push_back({in.at("role").str(), in.at("args").strings()});
  }
  if (auto c = r.opt("compromised")) {
    auto v = c->strings();
    s.compromised.insert(v.begin(), v.end());
  }
  if (auto a = r.opt("agents")) s.agents = a->strings();
  if (auto pn = r.opt("predictable_nonces")) s.predictable_nonces = pn->boolean();
  if (auto m = r.opt("max_deliveries")) s.max_deliveries = m->integer();
  checked("/instances", [&] {
    s.validate(p);
    return 0;
  });
  return s;
}

json to_json(const Scenario& s) {
  json is = json::array();
  for (const auto& i : s.instances) is.push_back({{"role", i.role}, {"args", i.args}});
  return {{"kind", "scenario"},
          {"instances", is},
          {"compromised", std::vector<std::string>(s.compromised.begin(), s.compromised.end())},
          {"agents", s.agents},
          {"predictable_nonces", s.predictable_nonces},
          {"max_deliveries", s.max_deliveries}};
}

json word_json(const Alphabet& sigma, const Word& w) { return sigma.render(w); }

}  // namespace secsci::io
