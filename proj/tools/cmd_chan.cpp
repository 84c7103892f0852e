// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "cli.hpp"
#include "secsci/channel.hpp"

namespace secsci::cli {

namespace {

struct ChanArgs {
  std::string file;
  std::string subject;
  std::string history;
  std::string mode;
  std::string focus;
};

std::vector<std::string> names(const std::vector<std::string>& table, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(table[static_cast<std::size_t>(i)]);
  return out;
}

std::string show_inputs(const Transducer& t, const Word& w) { return "<" + join(names(t.inputs, w), " ") + ">"; }

json outseq_json(const Transducer& t, const OutSeq& s) {
  json a = json::array();
  for (const auto& step : s) {
    json st = json::array();
    for (int y : step) st.push_back(t.outputs[static_cast<std::size_t>(y)]);
    a.push_back(st);
  }
  return a;
}

json outword_json(const Transducer& t, const OutWord& w) { return word_json(names(t.outputs, w)); }

std::string show_outword(const Transducer& t, const OutWord& w) { return "<" + join(names(t.outputs, w), " ") + ">"; }

Outcome run_cmd(const ChanArgs& a) {
  auto m = io::channel_from_json(load(a.file));
  Word h = m.t.parse(parse_list(a.history));
  auto out = run(m.t, h);
  Outcome o;
  o.result = {{"history", word_json(names(m.t.inputs, h))}, {"outputs", outseq_json(m.t, out)}};
  o.text = show_inputs(m.t, h) + " -> " + show_outputs(m.t, out) + "\n";
  return o;
}

Outcome invert_cmd(const ChanArgs& a, int n) {
  auto m = io::channel_from_json(load(a.file));
  auto inv = invert(m.t, n);
  Outcome o;
  json rows = json::array();
  std::ostringstream t;
  for (const auto& [y, xs] : inv) {
    json pre = json::array();
    for (const auto& x : xs) pre.push_back(word_json(names(m.t.inputs, x)));
    rows.push_back({{"output", outword_json(m.t, y)}, {"inputs", pre}});
    t << show_outword(m.t, y) << " <- ";
    for (std::size_t i = 0; i < xs.size(); ++i) t << (i ? ", " : "") << show_inputs(m.t, xs[i]);
    t << "\n";
  }
  o.result = {{"bound", n}, {"inverse", rows}};
  o.text = t.str();
  return o;
}

Outcome view_cmd(const ChanArgs& a) {
  auto m = io::channel_from_json(load(a.file));
  Word h = m.t.parse(parse_list(a.history));
  auto v = local_view(m, a.subject, h);
  Outcome o;
  o.result = {{"subject", a.subject},
              {"history", word_json(names(m.t.inputs, h))},
              {"purge", word_json(names(m.t.inputs, purge(m, h, a.subject)))},
              {"view", outseq_json(m.t, v)}};
  o.text = a.subject + " sees " + show_outputs(m.t, v) + " for " + show_inputs(m.t, h) + "\n";
  return o;
}

Outcome interfere_cmd(const ChanArgs& a, std::optional<int> bound) {
  auto m = io::channel_from_json(load(a.file));
  Word local = m.t.parse(parse_list(a.history));
  for (Letter x : local)
    if (!m.cleared(x, a.subject)) throw Error("history: " + m.t.inputs[static_cast<std::size_t>(x)] + " is outside " + a.subject + "'s clearance");
  int n = bound.value_or(static_cast<int>(local.size()) + 1);
  if (n < static_cast<int>(local.size())) throw Error("--bound must be at least the local history length");
  auto outs = interference_channel(m, a.subject, local, n);
  Outcome o;
  json arr = json::array();
  std::ostringstream t;
  t << "interference channel of " << a.subject << " at " << show_inputs(m.t, local) << " (n=" << n << "):\n";
  for (const auto& y : outs) {
    arr.push_back(outword_json(m.t, y));
    t << "  " << show_outword(m.t, y) << "\n";
  }
  o.result = {{"subject", a.subject}, {"local", word_json(names(m.t.inputs, local))}, {"bound", n}, {"outputs", arr}};
  o.text = t.str();
  return o;
}

Outcome nonint_cmd(const ChanArgs& a, std::optional<int> bound) {
  auto m = io::channel_from_json(load(a.file));
  NonintMode mode = m.t.deterministic() ? NonintMode::ExactDeterministic : NonintMode::Bounded;
  if (a.mode == "exact") mode = NonintMode::ExactDeterministic;
  else if (a.mode == "bounded") mode = NonintMode::Bounded;
  else if (!a.mode.empty()) throw Error("--mode: expected exact or bounded");
  int n = bound.value_or(m.default_bound());
  std::optional<Word> focus;
  if (!a.focus.empty()) focus = m.t.parse(parse_list(a.focus));
  auto r = check_noninterference(m, a.subject, mode, n, focus);
  if (!r.supported)
    throw Error("exact mode needs a deterministic transducer; rerun with --mode bounded");
  Outcome o;
  o.code = r.interferes ? Violated : Holds;
  o.result = {{"subject", a.subject},
              {"mode", mode == NonintMode::ExactDeterministic ? "exact" : "bounded"},
              {"interferes", r.interferes}};
  if (mode == NonintMode::Bounded) o.result["bound"] = n;
  std::ostringstream t;
  if (r.interferes) {
    o.result["witness"] = {{"x", word_json(names(m.t.inputs, r.x))},
                           {"y", word_json(names(m.t.inputs, r.y))},
                           {"purge", word_json(names(m.t.inputs, purge(m, r.x, a.subject)))},
                           {"view_x", outseq_json(m.t, r.view_x)},
                           {"view_y", outseq_json(m.t, r.view_y)}};
    t << "INTERFERES for " << a.subject << ": " << show_inputs(m.t, r.x) << " and " << show_inputs(m.t, r.y)
      << " purge to " << show_inputs(m.t, purge(m, r.x, a.subject)) << "\n";
    t << "  views " << show_outputs(m.t, r.view_x) << " vs " << show_outputs(m.t, r.view_y) << "\n";
  } else {
    t << "noninterfering for " << a.subject
      << (mode == NonintMode::Bounded ? " up to length " + std::to_string(n) : std::string()) << "\n";
  }
  o.text = t.str();
  return o;
}

}  // namespace

void add_chan(CLI::App& app, Context& ctx) {
  auto* chan = app.add_subcommand("chan", "Relational shared channels");
  chan->require_subcommand(1);
  auto a = std::make_shared<ChanArgs>();
  auto files = [a] { return std::vector<std::string>{a->file}; };
  auto file_opt = [a](CLI::App* s) { s->add_option("file", a->file, "Channel model")->required()->check(CLI::ExistingFile); };
  Globals* g = &ctx.g;

  auto* r = chan->add_subcommand("run", "Cumulative outputs of an input history");
  file_opt(r);
  r->add_option("--history", a->history, "Input ids, comma separated or a JSON array");
  ctx.bind(r, "chan run", files, [a] { return run_cmd(*a); });

  auto* i = chan->add_subcommand("invert", "Inverse channel on histories up to --bound (default 3)");
  file_opt(i);
  ctx.bind(i, "chan invert", files, [a, g] { return invert_cmd(*a, g->bound.value_or(3)); });

  auto* v = chan->add_subcommand("view", "Local view of a subject");
  file_opt(v);
  v->add_option("--subject", a->subject, "Observer")->required();
  v->add_option("--history", a->history, "Global input history");
  ctx.bind(v, "chan view", files, [a] { return view_cmd(*a); });

  auto* f = chan->add_subcommand("interfere", "Interference channel of a local history");
  file_opt(f);
  f->add_option("--subject", a->subject, "Observer")->required();
  f->add_option("--history", a->history, "Local input history");
  ctx.bind(f, "chan interfere", files, [a, g] { return interfere_cmd(*a, g->bound); });

  auto* n = chan->add_subcommand("noninterference", "Noninterference check with counterexample");
  file_opt(n);
  n->add_option("--subject", a->subject, "Observer")->required();
  n->add_option("--mode", a->mode, "exact | bounded");
  n->add_option("--focus", a->focus, "Only report witnesses purging to this local history");
  ctx.bind(n, "chan noninterference", files, [a, g] { return nonint_cmd(*a, g->bound); });
}

}  // namespace secsci::cli
