// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "cli.hpp"
#include "secsci/resource.hpp"

namespace secsci::cli {

namespace {

json triples_json(const std::vector<AccessTriple>& v) {
  json a = json::array();
  for (const auto& t : v) a.push_back({{"subject", t.subject}, {"object", t.object}, {"action", t.action}});
  return a;
}

std::string show_triple(const AccessTriple& t) { return "(" + t.subject + ", " + t.object + ", " + t.action + ")"; }

json relation_json(const std::vector<std::vector<bool>>& r, const std::vector<std::string>& names) {
  json a = json::array();
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j)
      if (i != j && r[i][j]) a.push_back({names[i], names[j]});
  return a;
}

json poset_json(const Poset& p) {
  json covers = json::array();
  for (const auto& [a, b] : p.covers()) covers.push_back({a, b});
  return {{"elements", p.elements()}, {"covers", covers}};
}

Outcome acm_check(const std::string& file) {
  auto ac = io::ac_from_json(load(file));
  auto r = check(ac);
  auto pre = implicit_preorders(ac);
  Outcome o;
  o.code = r.ac_ok ? Holds : Violated;
  o.result = {{"ac_ok", r.ac_ok},
              {"violations", triples_json(r.violations)},
              {"subject_preorder", relation_json(pre.subjects, ac.subjects)},
              {"object_preorder", relation_json(pre.objects, ac.objects)}};
  std::ostringstream t;
  t << "AC requirement: " << (r.ac_ok ? "holds" : "violated") << "\n";
  for (const auto& v : r.violations) t << "  access without permission " << show_triple(v) << "\n";
  for (std::size_t u = 0; u < ac.subjects.size(); ++u)
    for (std::size_t v = 0; v < ac.subjects.size(); ++v)
      if (u != v && pre.subjects[u][v]) t << "  " << ac.subjects[u] << " <= " << ac.subjects[v] << " (clearance)\n";
  for (std::size_t i = 0; i < ac.objects.size(); ++i)
    for (std::size_t j = 0; j < ac.objects.size(); ++j)
      if (i != j && pre.objects[i][j]) t << "  " << ac.objects[i] << " <= " << ac.objects[j] << " (classification)\n";
  o.text = t.str();
  return o;
}

Outcome acm_to_mls(const std::string& file) {
  auto ac = io::ac_from_json(load(file));
  auto mls = ac_to_mls(ac);
  auto r = check(mls);
  Outcome o;
  o.code = r.mls_ok ? Holds : Violated;
  o.result = {{"mls_ok", r.mls_ok},
              {"violations", r.violations},
              {"model",
               {{"subjects", mls.subjects},
                {"objects", mls.objects},
                {"levels", poset_json(mls.levels)},
                {"cl", mls.cl},
                {"pl", mls.pl}}}};
  std::ostringstream t;
  t << "MLS model with " << mls.levels.size() << " levels; requirement " << (r.mls_ok ? "holds" : "violated") << "\n";
  for (const auto& u : mls.subjects) t << "  " << u << ": pl=" << mls.pl.at(u) << " cl=" << mls.cl.at(u) << "\n";
  for (const auto& u : r.violations) t << "  located above clearance: " << u << "\n";
  o.text = t.str();
  return o;
}

Outcome auth_to_ac(const std::string& file) {
  auto a = io::auth_from_json(load(file));
  auto lhs = check(a.model);
  auto ac = authorization_to_ac(a.model);
  auto rhs = check(ac);
  Outcome o;
  o.code = rhs.ac_ok ? Holds : Violated;
  o.result = {{"secure_state", lhs.secure()},
              {"ac_ok", lhs.ac_ok},
              {"mls_ok", lhs.mls_ok},
              {"no_read_up", lhs.no_read_up},
              {"no_write_down", lhs.no_write_down},
              {"inclusion", rhs.ac_ok},
              {"agree", lhs.secure() == rhs.ac_ok},
              {"violations", triples_json(rhs.violations)},
              {"model", io::to_json(ac)}};
  std::ostringstream t;
  t << "authorization model secure: " << yes(lhs.secure()) << " (ac " << yes(lhs.ac_ok) << ", mls " << yes(lhs.mls_ok)
    << ", no read up " << yes(lhs.no_read_up) << ", no write down " << yes(lhs.no_write_down) << ")\n";
  t << "reduced AC model B ⊆ M: " << yes(rhs.ac_ok) << "\n";
  for (const auto& v : rhs.violations) t << "  " << show_triple(v) << "\n";
  o.text = t.str();
  return o;
}

json state_json(const AuthorizationModel& m) {
  return {{"cl", m.cl}, {"pl", m.pl}, {"secure", check(m).secure()}};
}

std::string show_event(const AuthEvent& e) {
  switch (e.kind) {
    case AuthEvent::Kind::WriteRead:
      return "w(" + e.writer + "): " + e.from + " -" + e.object + "-> " + e.to + " : r(" + e.reader + ")";
    case AuthEvent::Kind::Relocate: return "pl(" + e.subject + ") := " + e.level;
    case AuthEvent::Kind::SetClearance: return "cl(" + e.subject + ") := " + e.level;
  }
  return "";
}

Outcome auth_step(const std::string& file, const std::string& event_file) {
  auto a = io::auth_from_json(load(file));
  std::vector<AuthEvent> events = a.events;
  if (!event_file.empty()) {
    auto j = load(event_file);
    events.clear();
    if (j.is_array())
      for (const auto& e : j) events.push_back(io::auth_event_from_json(e));
    else
      events.push_back(io::auth_event_from_json(j));
  }
  Outcome o;
  std::ostringstream t;
  json steps = json::array();
  AuthorizationModel cur = a.model;
  t << "q0: secure=" << yes(check(cur).secure()) << "\n";
  for (std::size_t k = 0; k < events.size(); ++k) {
    auto r = transition(cur, events[k]);
    if (!r.next) {
      o.code = Violated;
      steps.push_back({{"event", show_event(events[k])}, {"rejected", r.violation}});
      t << "rejected " << show_event(events[k]) << ": " << r.violation << "\n";
      break;
    }
    cur = *r.next;
    steps.push_back({{"event", show_event(events[k])}, {"state", state_json(cur)}});
    t << "q" << k + 1 << " after " << show_event(events[k]) << ": secure=" << yes(check(cur).secure()) << "\n";
    for (const auto& [x, l] : cur.pl) t << "  pl(" << x << ")=" << l;
    t << "\n";
  }
  bool cycle = o.code == Holds && cur == a.model;
  o.result = {{"initial", state_json(a.model)}, {"steps", steps}, {"returns_to_initial", cycle}};
  if (o.code == Holds && !events.empty()) t << "returns to initial state: " << yes(cycle) << "\n";
  o.text = t.str();
  return o;
}

}  // namespace

void add_acm(CLI::App& app, Context& ctx) {
  auto* acm = app.add_subcommand("acm", "Access-control matrices");
  acm->require_subcommand(1);
  auto file = std::make_shared<std::string>();
  auto files = [file] { return std::vector<std::string>{*file}; };
  auto* c = acm->add_subcommand("check", "AC requirement and implicit preorders");
  c->add_option("file", *file, "AC model")->required()->check(CLI::ExistingFile);
  ctx.bind(c, "acm check", files, [file] { return acm_check(*file); });
  auto* m = acm->add_subcommand("to-mls", "Reduce to a multi-level model");
  m->add_option("file", *file, "AC model")->required()->check(CLI::ExistingFile);
  ctx.bind(m, "acm to-mls", files, [file] { return acm_to_mls(*file); });
}

void add_auth(CLI::App& app, Context& ctx) {
  auto* auth = app.add_subcommand("auth", "Authorization models");
  auth->require_subcommand(1);
  auto file = std::make_shared<std::string>();
  auto event = std::make_shared<std::string>();
  auto* c = auth->add_subcommand("to-ac", "Reduce to an AC model");
  c->add_option("file", *file, "Authorization model")->required()->check(CLI::ExistingFile);
  ctx.bind(c, "auth to-ac", [file] { return std::vector<std::string>{*file}; }, [file] { return auth_to_ac(*file); });
  auto* s = auth->add_subcommand("step", "Apply events (from the event file, or the model's own list)");
  s->add_option("file", *file, "Authorization model")->required()->check(CLI::ExistingFile);
  s->add_option("event", *event, "Event file")->check(CLI::ExistingFile);
  ctx.bind(
      s, "auth step",
      [file, event] {
        std::vector<std::string> v{*file};
        if (!event->empty()) v.push_back(*event);
        return v;
      },
      [file, event] { return auth_step(*file, *event); });
}

}  // namespace secsci::cli
