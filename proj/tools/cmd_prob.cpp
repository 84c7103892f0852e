// SPDX-License-Identifier: Apache-2.0
#include <iomanip>
#include <sstream>

#include "cli.hpp"
#include "secsci/channel.hpp"
#include "secsci/prob.hpp"

namespace secsci::cli {

namespace {

struct ProbArgs {
  std::string file;
  std::string subject;
};

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

std::string show_row(const std::vector<Rational>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + "]";
}

json channel_rows(const StochasticChannel& c) {
  json rows = json::object();
  for (std::size_t x = 0; x < c.inputs.size(); ++x) rows[c.inputs[x]] = c.rows[x] ? rationals(*c.rows[x]) : json(nullptr);
  return rows;
}

std::string show_table(const StochasticChannel& c) {
  std::ostringstream t;
  t << "  " << std::setw(8) << "" << join(c.outputs, "  ") << "\n";
  for (std::size_t x = 0; x < c.inputs.size(); ++x)
    t << "  " << std::setw(8) << std::left << c.inputs[x] << std::right
      << (c.rows[x] ? show_row(*c.rows[x]) : std::string("undefined")) << "\n";
  return t.str();
}

Outcome invert_cmd(const ProbArgs& a) {
  auto f = io::stochastic_from_json(load(a.file));
  Distribution prior = f.prior.value_or(Distribution(f.channel.inputs.size(), Rational(1, static_cast<long>(f.channel.inputs.size()))));
  auto inv = bayes_invert(f.channel, prior);
  Outcome o;
  json marg = json::object();
  for (std::size_t y = 0; y < f.channel.outputs.size(); ++y) marg[f.channel.outputs[y]] = to_string(inv.output_marginal[y]);
  json undefined = json::array();
  for (std::size_t y = 0; y < inv.inverse.inputs.size(); ++y)
    if (!inv.inverse.rows[y]) undefined.push_back(inv.inverse.inputs[y]);
  o.result = {{"inputs", inv.inverse.inputs},
              {"outputs", inv.inverse.outputs},
              {"rows", channel_rows(inv.inverse)},
              {"undefined", undefined},
              {"marginal", marg}};
  std::ostringstream t;
  t << "inverse channel:\n" << show_table(inv.inverse) << "output marginal:";
  for (std::size_t y = 0; y < f.channel.outputs.size(); ++y)
    t << " [" << f.channel.outputs[y] << "]=" << to_string(inv.output_marginal[y]);
  t << "\n";
  o.text = t.str();
  return o;
}

json entropy_json(const Entropy& e) {
  json j = {{"bits", e.bits}, {"show", e.show()}};
  if (e.symbolic) j["symbolic"] = {{"a", to_string(e.symbolic->first)}, {"b_log2_3", to_string(e.symbolic->second)}};
  return j;
}

Outcome entropy_cmd(const ProbArgs& a) {
  auto j = load(a.file);
  auto kind = io::kind_of(j);
  Outcome o;
  std::ostringstream t;
  t << std::setprecision(15);
  if (kind == "distribution") {
    auto d = io::distribution_from_json(j);
    auto e = entropy(d.p);
    o.result = entropy_json(e);
    t << "H = " << e.show() << " bits\n";
  } else if (kind == "source") {
    auto s = io::source_from_json(j);
    Distribution words;
    for_each_word(static_cast<int>(s.symbols.size()), s.depth, [&](const Word& w) { words.push_back(marginal(s, w)); });
    auto e = entropy(words);
    o.result = entropy_json(e);
    o.result["depth"] = s.depth;
    t << "H(histories of length " << s.depth << ") = " << e.show() << " bits\n";
  } else if (kind == "stochastic") {
    auto f = io::stochastic_from_json(j);
    json rows = json::object();
    for (std::size_t x = 0; x < f.channel.inputs.size(); ++x) {
      if (!f.channel.rows[x]) {
        rows[f.channel.inputs[x]] = nullptr;
        continue;
      }
      auto e = entropy(*f.channel.rows[x]);
      rows[f.channel.inputs[x]] = entropy_json(e);
      t << "H(row " << f.channel.inputs[x] << ") = " << e.show() << " bits\n";
    }
    o.result = {{"rows", rows}};
  } else {
    throw Error("/kind: entropy needs a distribution, source or stochastic file");
  }
  o.text = t.str();
  return o;
}

std::string show_word(const std::vector<std::string>& names, const Word& w) {
  std::string s = "<";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + names[static_cast<std::size_t>(w[i])];
  return s + ">";
}

json word_names(const std::vector<std::string>& names, const Word& w) {
  json a = json::array();
  for (Letter x : w) a.push_back(names[static_cast<std::size_t>(x)]);
  return a;
}

Outcome nonint_cmd(const ProbArgs& a, std::optional<int> bound) {
  auto j = load(a.file);
  ProbSharedChannel m = io::kind_of(j) == "channel" ? embed(io::channel_from_json(j)) : io::prob_channel_from_json(j);
  int n = bound.value_or(m.source ? std::min(m.source->depth, 4) : 4);
  auto r = check_prob_noninterference(m, a.subject, n);
  Outcome o;
  o.code = r.interferes ? Violated : Holds;
  json skipped = json::array();
  for (const auto& w : r.skipped) skipped.push_back(word_names(m.t.inputs, w));
  o.result = {{"subject", a.subject}, {"bound", n}, {"interferes", r.interferes}, {"skipped", skipped}};
  std::ostringstream t;
  if (r.interferes) {
    o.result["witness"] = {{"x", word_names(m.t.inputs, r.x)},
                           {"y", word_names(m.t.outputs, r.y)},
                           {"local_view", to_string(r.lhs)},
                           {"purged", to_string(r.rhs)}};
    t << "INTERFERES for " << a.subject << ": <x|y>^A = " << to_string(r.lhs) << " but <x|A|y> = " << to_string(r.rhs)
      << " at x = " << show_word(m.t.inputs, r.x) << ", y = " << show_word(m.t.outputs, r.y) << "\n";
  } else {
    t << "probabilistically noninterfering for " << a.subject << " up to length " << n << "\n";
  }
  if (!r.skipped.empty()) t << "  skipped " << r.skipped.size() << " local histories with zero source mass\n";
  o.text = t.str();
  return o;
}

Outcome secrecy_cmd(const ProbArgs& a) {
  auto f = io::cipher_from_json(load(a.file));
  auto r = check_perfect_secrecy(f.cipher, f.prior);
  auto g = guessing_channel(f.cipher);
  Outcome o;
  o.code = r.secret() ? Holds : Violated;
  auto wit = [&](const std::optional<std::pair<int, int>>& w, const Rational& l, const Rational& rr) -> json {
    if (!w) return nullptr;
    return {{"ciphertext", f.cipher.ciphertexts[static_cast<std::size_t>(w->first)]},
            {"message", f.cipher.messages[static_cast<std::size_t>(w->second)]},
            {"lhs", to_string(l)},
            {"rhs", to_string(rr)}};
  };
  o.result = {{"pointwise", r.pointwise},
              {"projector", r.projector},
              {"secret", r.secret()},
              {"pointwise_witness", wit(r.pointwise_witness, r.pointwise_lhs, r.pointwise_rhs)},
              {"projector_witness", wit(r.projector_witness, r.projector_lhs, r.projector_rhs)},
              {"guessing_channel", channel_rows(g)}};
  std::ostringstream t;
  t << "guessing channel <c|m>:\n" << show_table(g);
  t << "pointwise check: " << (r.pointwise ? "pass" : "fail");
  if (r.pointwise_witness)
    t << " at c=" << f.cipher.ciphertexts[static_cast<std::size_t>(r.pointwise_witness->first)]
      << ", m=" << f.cipher.messages[static_cast<std::size_t>(r.pointwise_witness->second)] << ": "
      << to_string(r.pointwise_lhs) << " != " << to_string(r.pointwise_rhs);
  t << "\nprojector check: " << (r.projector ? "pass" : "fail");
  if (r.projector_witness)
    t << " at c=" << f.cipher.ciphertexts[static_cast<std::size_t>(r.projector_witness->first)]
      << ", m=" << f.cipher.messages[static_cast<std::size_t>(r.projector_witness->second)] << ": "
      << to_string(r.projector_lhs) << " != " << to_string(r.projector_rhs);
  t << "\n" << (r.secret() ? "perfectly secret\n" : "not perfectly secret\n");
  o.text = t.str();
  return o;
}

}  // namespace

void add_prob(CLI::App& app, Context& ctx) {
  auto* prob = app.add_subcommand("prob", "Probabilistic channels");
  prob->require_subcommand(1);
  auto a = std::make_shared<ProbArgs>();
  auto files = [a] { return std::vector<std::string>{a->file}; };
  auto file_opt = [a](CLI::App* s) { s->add_option("file", a->file, "Model file")->required()->check(CLI::ExistingFile); };
  Globals* g = &ctx.g;

  auto* i = prob->add_subcommand("invert", "Bayesian inverse and output marginal");
  file_opt(i);
  ctx.bind(i, "prob invert", files, [a] { return invert_cmd(*a); });
  auto* e = prob->add_subcommand("entropy", "Shannon entropy in bits");
  file_opt(e);
  ctx.bind(e, "prob entropy", files, [a] { return entropy_cmd(*a); });
  auto* n = prob->add_subcommand("noninterference", "Probabilistic noninterference");
  file_opt(n);
  n->add_option("--subject", a->subject, "Observer")->required();
  ctx.bind(n, "prob noninterference", files, [a, g] { return nonint_cmd(*a, g->bound); });
  auto* s = prob->add_subcommand("secrecy", "Perfect secrecy of a cipher");
  file_opt(s);
  ctx.bind(s, "prob secrecy", files, [a] { return secrecy_cmd(*a); });
}

}  // namespace secsci::cli
