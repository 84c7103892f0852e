// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "cli.hpp"
#include "secsci/property.hpp"

namespace secsci::cli {

namespace {

struct PropArgs {
  std::string file;
  std::string name;
  std::vector<std::string> require;
  std::string kind;
};

std::vector<const io::NamedProperty*> select(const io::PropertySet& s, const std::string& name) {
  std::vector<const io::NamedProperty*> out;
  for (const auto& p : s.properties)
    if (name.empty() || p.name == name) out.push_back(&p);
  if (out.empty()) throw Error("no property named '" + name + "'");
  return out;
}

json opt_word(const Alphabet& sigma, const std::optional<Word>& w) {
  if (!w) return nullptr;
  return word_json(sigma.render(*w));
}

std::string show_word(const Alphabet& sigma, const Word& w) { return sigma.show(w); }

Outcome classify_cmd(const PropArgs& a) {
  auto set = io::property_set_from_json(load(a.file));
  const Alphabet& sigma = *set.alphabet;
  for (const auto& r : a.require)
    if (r != "safe" && r != "live" && r != "localized" && r != "authorized" && r != "available")
      throw Error("--require: unknown class '" + r + "'");
  Outcome o;
  std::ostringstream text;
  json arr = json::array();
  for (const auto* np : select(set, a.name)) {
    auto c = classify(np->property);
    json flags = {{"safe", c.safe},
                  {"live", c.live},
                  {"localized", c.localized},
                  {"authorized", c.authorized},
                  {"available", c.available}};
    json w = json::object();
    if (c.not_safe) w["safe"] = opt_word(sigma, c.not_safe);
    if (c.not_live) w["live"] = opt_word(sigma, c.not_live);
    if (c.not_localized) w["localized"] = opt_word(sigma, c.not_localized);
    if (c.not_authorized) w["authorized"] = opt_word(sigma, c.not_authorized);
    if (c.not_available)
      w["available"] = {{"subject", c.not_available->subject},
                        {"local", word_json(sigma.restrict_to(c.not_available->subject)->render(c.not_available->local))}};
    json ll = json::object();
    for (const auto& [u, l] : c.local_live) ll[u] = l;
    arr.push_back({{"name", np->name}, {"classes", flags}, {"witnesses", w}, {"local_live", ll}});

    text << np->name << ": safe=" << yes(c.safe) << " live=" << yes(c.live) << " localized=" << yes(c.localized)
         << " authorized=" << yes(c.authorized) << " available=" << yes(c.available) << "\n";
    if (c.not_safe) text << "  not safe: " << show_word(sigma, *c.not_safe) << " is a prefix of a member but not a member\n";
    if (c.not_live) text << "  not live: " << show_word(sigma, *c.not_live) << " cannot be extended into the property\n";
    if (c.not_localized)
      text << "  not localized: " << show_word(sigma, *c.not_localized) << " has the purges of a member\n";
    if (c.not_available)
      text << "  not available: " << c.not_available->subject << " is stuck after local history "
           << sigma.restrict_to(c.not_available->subject)->show(c.not_available->local) << "\n";
    for (const auto& r : a.require)
      if (!flags[r].get<bool>()) o.code = Violated;
  }
  o.result = {{"properties", arr}};
  o.text = text.str();
  return o;
}

Outcome decompose_cmd(const PropArgs& a) {
  auto kind = parse_decomposition_kind(a.kind);
  if (!kind) throw Error("--kind: expected safety-liveness, auth-avail or strongavail-breach");
  auto set = io::property_set_from_json(load(a.file));
  Outcome o;
  std::ostringstream text;
  json arr = json::array();
  for (const auto* np : select(set, a.name)) {
    auto d = decompose(np->property, *kind);
    io::PropertySet parts{set.alphabet, {{np->name + ".first", d.first}, {np->name + ".second", d.second}}};
    json checks = json::object();
    for (const auto& [k, v] : d.checks) checks[k] = v;
    arr.push_back({{"name", np->name},
                   {"kind", to_string(d.kind)},
                   {"reconstructs", d.reconstructs},
                   {"checks", checks},
                   {"parts", io::to_json(parts)}});
    const char* op = d.kind == DecompositionKind::StrongAvailBreach ? " ∪ " : " ∩ ";
    text << np->name << " = first" << op << "second (" << to_string(d.kind)
         << "): reconstructs=" << yes(d.reconstructs) << "\n";
    for (const auto& [k, v] : d.checks) text << "  " << k << ": " << yes(v) << "\n";
    text << "  first: " << d.first.dfa.states() << " states, second: " << d.second.dfa.states() << " states\n";
    if (!d.sound()) o.code = Violated;
  }
  o.result = {{"decompositions", arr}};
  o.text = text.str();
  return o;
}

Outcome dos_cmd(const PropArgs& a) {
  auto set = io::property_set_from_json(load(a.file));
  const Alphabet& sigma = *set.alphabet;
  Outcome o;
  std::ostringstream text;
  json arr = json::array();
  for (const auto* np : select(set, a.name)) {
    auto r = dos_witness(np->property);
    json e = {{"name", np->name}};
    if (!r) {
      e["dos"] = false;
      text << np->name << ": no denial of service (property and complement are not both live)\n";
    } else {
      o.code = Violated;
      e["dos"] = true;
      json ws = json::array();
      text << np->name << ": property and complement are both live\n";
      for (const auto& w : r->witnesses) {
        json wj = {{"subject", w.subject}, {"extension", word_json(sigma.render(w.extension))}, {"uniform", w.uniform}};
        wj["from"] = opt_word(sigma, w.from);
        ws.push_back(wj);
        if (w.uniform)
          text << "  " << w.subject << " appends " << sigma.show(w.extension) << " to any history to enter the complement\n";
        else
          text << "  " << w.subject << " cannot leave the property alone after "
               << (w.from ? sigma.show(*w.from) : std::string("some history")) << "\n";
      }
      e["witnesses"] = ws;
    }
    arr.push_back(e);
  }
  o.result = {{"properties", arr}};
  o.text = text.str();
  return o;
}

}  // namespace

void add_prop(CLI::App& app, Context& ctx) {
  auto* prop = app.add_subcommand("prop", "Trace properties: classification and decomposition");
  prop->require_subcommand(1);
  auto a = std::make_shared<PropArgs>();
  auto files = [a] { return std::vector<std::string>{a->file}; };

  auto* c = prop->add_subcommand("classify", "Safety, liveness, localization, authorization, availability");
  c->add_option("file", a->file, "Property file")->required()->check(CLI::ExistingFile);
  c->add_option("--name", a->name, "Only this property");
  c->add_option("--require", a->require, "Exit 1 unless these classes hold")->delimiter(',');
  ctx.bind(c, "prop classify", files, [a] { return classify_cmd(*a); });

  auto* d = prop->add_subcommand("decompose", "Normal decompositions");
  d->add_option("file", a->file, "Property file")->required()->check(CLI::ExistingFile);
  d->add_option("--kind", a->kind, "safety-liveness | auth-avail | strongavail-breach")->required();
  d->add_option("--name", a->name, "Only this property");
  ctx.bind(d, "prop decompose", files, [a] { return decompose_cmd(*a); });

  auto* s = prop->add_subcommand("dos", "Denial-of-service witness");
  s->add_option("file", a->file, "Property file")->required()->check(CLI::ExistingFile);
  s->add_option("--name", a->name, "Only this property");
  ctx.bind(s, "prop dos", files, [a] { return dos_cmd(*a); });
}

}  // namespace secsci::cli
