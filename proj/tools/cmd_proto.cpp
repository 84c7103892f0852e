// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "secsci/protocol.hpp"

#ifndef SECSCI_FIXTURE_DIR
#define SECSCI_FIXTURE_DIR "fixtures"
#endif

namespace secsci::cli {

namespace {

struct ProtoArgs {
  std::string spec;
  std::string scenario;
};

const char* kind_name(Step::Kind k) {
  switch (k) {
    case Step::Kind::Fresh: return "fresh";
    case Step::Kind::Send: return "send";
    case Step::Kind::Recv: return "recv";
  }
  return "";
}

json trace_json(const Scenario& s, const SymbolicTrace& t) {
  json ev = json::array();
  for (const auto& e : t.events) {
    const auto& inst = s.instances[static_cast<std::size_t>(e.instance)];
    ev.push_back({{"instance", e.instance},
                  {"role", inst.role},
                  {"agent", inst.args.empty() ? "" : inst.args[0]},
                  {"step", e.step},
                  {"kind", kind_name(e.kind)},
                  {"message", show(e.message, true)},
                  {"state", e.state}});
  }
  return {{"initial", t.initial}, {"events", ev}, {"messages", t.show_messages()}};
}

json verdict_json(const ChreVerdict& v) {
  return {{"instance", v.instance},
          {"goal", v.goal},
          {"agent", v.agent},
          {"peer", v.peer},
          {"skipped", v.skipped},
          {"achieved", to_string(v.achieved)},
          {"required", to_string(v.required)},
          {"satisfied", v.satisfied()}};
}

std::string show_verdict(const ChreVerdict& v) {
  std::string s = "instance " + std::to_string(v.instance) + " (" + v.agent + " authenticating " + v.peer + "): ";
  if (v.skipped) return s + "peer compromised, not checked";
  return s + to_string(v.achieved) + " achieved, " + to_string(v.required) + " required" +
         (v.satisfied() ? "" : " -> VIOLATED");
}

Outcome run_cmd(const ProtoArgs& a) {
  auto p = io::protocol_from_json(load(a.spec));
  auto s = io::scenario_from_json(load(a.scenario), p);
  auto t = run_honest(p, s);
  auto vs = check_chre(p, s, t);
  Outcome o;
  json verdicts = json::array();
  std::ostringstream txt;
  txt << t.show();
  bool ok = true;
  for (const auto& v : vs) {
    verdicts.push_back(verdict_json(v));
    txt << show_verdict(v) << "\n";
    ok = ok && v.satisfied();
  }
  o.code = ok ? Holds : Violated;
  o.result = {{"protocol", p.name}, {"trace", trace_json(s, t)}, {"verdicts", verdicts}};
  o.text = txt.str();
  return o;
}

Outcome verify_cmd(const ProtoArgs& a) {
  auto p = io::protocol_from_json(load(a.spec));
  auto s = io::scenario_from_json(load(a.scenario), p);
  auto r = search_attack(p, s);
  Outcome o;
  std::ostringstream txt;
  o.result = {{"protocol", p.name}, {"sessions", s.instances.size()}, {"states", r.states}, {"attack", r.attack.has_value()}};
  if (r.attack) {
    o.code = Violated;
    o.result["trace"] = trace_json(s, *r.attack);
    o.result["violated"] = verdict_json(*r.violated);
    txt << "ATTACK on " << p.name << " (" << r.states << " states explored)\n" << r.attack->show();
    txt << show_verdict(*r.violated) << "\n";
  } else {
    txt << "no attack on " << p.name << " with " << s.instances.size() << " sessions (" << r.states
        << " states explored)\n";
  }
  o.text = txt.str();
  return o;
}

Outcome corpus_cmd(const std::string& dir) {
  auto path = std::filesystem::path(dir) / "corpus.json";
  auto j = load(path.string());
  if (!j.contains("fixtures") || !j["fixtures"].is_array()) throw Error("/fixtures: missing");
  Outcome o;
  std::ostringstream t;
  json arr = json::array();
  std::size_t i = 0;
  for (const auto& e : j["fixtures"]) {
    std::string where = "/fixtures/" + std::to_string(i++);
    if (!e.contains("file") || !e["file"].is_string()) throw Error(where + "/file: missing");
    std::string file = e["file"].get<std::string>();
    bool present = std::filesystem::exists(std::filesystem::path(dir) / file);
    if (!present) o.code = Violated;
    json entry = e;
    entry["present"] = present;
    arr.push_back(entry);
    t << file << " -> " << e.value("reproduces", std::string()) << (present ? "" : " [missing]") << "\n";
  }
  o.result = {{"fixtures", arr}};
  o.text = t.str();
  return o;
}

}  // namespace

void add_proto(CLI::App& app, Context& ctx) {
  auto* proto = app.add_subcommand("proto", "Challenge-response protocols");
  proto->require_subcommand(1);
  auto a = std::make_shared<ProtoArgs>();
  auto files = [a] { return std::vector<std::string>{a->spec, a->scenario}; };
  auto opts = [a](CLI::App* s) {
    s->add_option("spec", a->spec, "Protocol file")->required()->check(CLI::ExistingFile);
    s->add_option("scenario", a->scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  };
  auto* r = proto->add_subcommand("run", "Honest run and authentication verdicts");
  opts(r);
  ctx.bind(r, "proto run", files, [a] { return run_cmd(*a); });
  auto* v = proto->add_subcommand("verify", "Bounded attack search");
  opts(v);
  ctx.bind(v, "proto verify", files, [a] { return verify_cmd(*a); });
}

void add_corpus(CLI::App& app, Context& ctx) {
  auto* corpus = app.add_subcommand("corpus", "Shipped worked examples");
  corpus->require_subcommand(1);
  auto dir = std::make_shared<std::string>(SECSCI_FIXTURE_DIR);
  auto* l = corpus->add_subcommand("list", "Fixture inventory");
  l->add_option("--dir", *dir, "Fixture directory")->check(CLI::ExistingDirectory);
  ctx.bind(
      l, "corpus list", [dir] { return std::vector<std::string>{(std::filesystem::path(*dir) / "corpus.json").string()}; },
      [dir] { return corpus_cmd(*dir); });
}

}  // namespace secsci::cli
