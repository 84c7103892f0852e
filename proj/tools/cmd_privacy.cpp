// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "cli.hpp"
#include "secsci/privacy.hpp"

namespace secsci::cli {

namespace {

struct PrivArgs {
  std::string file;
  std::string adjacent;
  std::optional<int> k;
  std::optional<int> budget;
  std::optional<double> epsilon;
  std::string target;
  std::vector<std::string> chain;
  bool insecure_seed = false;
  int repeat = 1;
  int trials = 100000;
  int bins = 20;
  double lambda_scale = 1.0;
};

io::PrivacyFile load_table(const std::string& path) {
  return io::privacy_from_json(load(path), std::filesystem::path(path).parent_path());
}

std::string show_tuple(const std::vector<std::string>& v) { return "(" + join(v, ", ") + ")"; }

Outcome qid_cmd(const PrivArgs& a) {
  auto f = load_table(a.file);
  if (!f.external) throw Error("/external: missing");
  auto join_attrs = f.join.empty() ? f.quasi : f.join;
  auto found = find_quasi_identifiers(f.table, *f.external, join_attrs);
  Outcome o;
  std::ostringstream t;
  json arr = json::array();
  for (const auto& q : found) {
    json m = json::array();
    for (const auto& [r, e] : q.matches) m.push_back({{"record", r}, {"external", e}});
    arr.push_back({{"attributes", q.attributes}, {"matches", m}});
    t << show_tuple(q.attributes) << " identifies";
    for (const auto& [r, e] : q.matches) t << " " << r << "->" << e;
    t << "\n";
  }
  o.result = {{"quasi_identifiers", arr}};
  if (!a.target.empty()) {
    auto attrs = a.chain.empty() ? join_attrs : a.chain;
    auto counts = linkage_chain(f.table, *f.external, a.target, attrs);
    json steps = json::array();
    t << "linkage of " << a.target << ":";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      steps.push_back({{"attribute", attrs[i]}, {"candidates", counts[i]}});
      t << " " << attrs[i] << "->" << counts[i];
    }
    t << "\n";
    o.result["chain"] = steps;
  }
  o.code = found.empty() ? Holds : Violated;
  if (found.empty()) t << "no record is singled out by the external table\n";
  o.text = t.str();
  return o;
}

Outcome kanon_cmd(const PrivArgs& a) {
  auto f = load_table(a.file);
  std::size_t k = a.k ? static_cast<std::size_t>(*a.k) : f.k;
  auto r = check_k_anonymity(f.table, k, f.quasi);
  Outcome o;
  o.code = r.ok ? Holds : Violated;
  json groups = json::array();
  std::ostringstream t;
  t << k << "-anonymous on " << show_tuple(f.quasi) << ": " << yes(r.ok) << " (smallest group " << r.min_group << ")\n";
  for (const auto& [tuple, ids] : r.violating) {
    groups.push_back({{"tuple", tuple}, {"records", ids}});
    t << "  " << show_tuple(tuple) << " shared by " << ids.size() << ": " << join(ids, " ") << "\n";
  }
  o.result = {{"k", k}, {"quasi", f.quasi}, {"ok", r.ok}, {"min_group", r.min_group}, {"violating", groups}};
  o.text = t.str();
  return o;
}

Outcome anonymize_cmd(const PrivArgs& a) {
  auto f = load_table(a.file);
  std::size_t k = a.k ? static_cast<std::size_t>(*a.k) : f.k;
  std::size_t budget = a.budget ? static_cast<std::size_t>(*a.budget) : f.suppression_budget;
  auto r = anonymize(f.table, k, f.quasi, f.hierarchies, budget);
  Outcome o;
  o.code = r.ok ? Holds : Violated;
  std::ostringstream t;
  o.result = {{"k", k}, {"ok", r.ok}, {"vectors_tried", r.vectors_tried}};
  if (r.ok) {
    json levels = json::object();
    for (std::size_t i = 0; i < f.quasi.size(); ++i) levels[f.quasi[i]] = r.levels[i];
    o.result["levels"] = levels;
    o.result["suppressed"] = r.suppressed;
    o.result["table"] = io::to_json(r.table);
    t << "levels:";
    for (std::size_t i = 0; i < f.quasi.size(); ++i) t << " " << f.quasi[i] << "=" << r.levels[i];
    t << "\nsuppressed: " << (r.suppressed.empty() ? "none" : join(r.suppressed, " ")) << "\n";
    std::vector<std::string> head;
    for (const auto& at : r.table.attributes) head.push_back(at.name);
    t << "id," << join(head, ",") << "\n";
    for (std::size_t i = 0; i < r.table.cells.size(); ++i) t << r.table.ids[i] << "," << join(r.table.cells[i], ",") << "\n";
  } else {
    o.result["best_k"] = r.best_k;
    t << "no generalization reaches k=" << k << " within the suppression budget " << budget << "; best k is "
      << r.best_k << "\n";
  }
  o.text = t.str();
  return o;
}

Mechanism mechanism_of(const io::PrivacyFile& f, const PrivArgs& a) {
  if (!f.query) throw Error("/query: missing");
  Mechanism m;
  m.query = *f.query;
  m.epsilon = a.epsilon.value_or(f.epsilon);
  if (!(m.epsilon > 0)) throw Error("--epsilon must be positive");
  return m;
}

std::string describe(const Query& q) {
  return q.kind == Query::Kind::Count ? "count(" + q.attribute + " = " + q.equals + ")" : "sum(" + q.attribute + ")";
}

Outcome dp_answer_cmd(const PrivArgs& a, const Globals& g) {
  std::uint64_t seed = 0;
  if (g.seed) {
    seed = *g.seed;
  } else if (a.insecure_seed) {
    seed = static_cast<std::uint64_t>(std::chrono::high_resolution_clock::now().time_since_epoch().count());
  } else {
    throw Error("dp-answer needs --seed (or --insecure-seed for a time-derived seed)");
  }
  auto f = load_table(a.file);
  auto m = mechanism_of(f, a);
  Ledger ledger;
  ledger.budget = f.budget > 0 ? f.budget : m.epsilon * a.repeat;
  LaplaceSampler rng(seed);
  Outcome o;
  std::ostringstream t;
  t << std::setprecision(10);
  json answers = json::array();
  for (int i = 0; i < a.repeat; ++i) {
    try {
      auto ans = laplace_answer(m, f.table, ledger, rng);
      answers.push_back({{"value", ans.value}, {"lambda", ans.lambda}, {"remaining", ledger.remaining()}});
      t << describe(m.query) << " ~ " << ans.value << " (lambda " << ans.lambda << ", budget left "
        << ledger.remaining() << ")\n";
    } catch (const Error& e) {
      o.code = Violated;
      answers.push_back({{"refused", e.what()}});
      t << "refused: " << e.what() << "\n";
      break;
    }
  }
  o.result = {{"query", describe(m.query)}, {"epsilon", m.epsilon}, {"answers", answers}};
  if (a.insecure_seed && !g.seed) o.result["insecure_seed"] = true;
  else o.result["seed"] = seed;
  o.text = t.str();
  return o;
}

Outcome dp_test_cmd(const PrivArgs& a, const Globals& g) {
  auto f = load_table(a.file);
  auto adj = load_table(a.adjacent);
  auto m = mechanism_of(f, a);
  auto r = dp_ratio_test(m, f.table, adj.table, a.trials, a.bins, g.seed.value_or(0), a.lambda_scale);
  Outcome o;
  o.code = r.pass ? Holds : Violated;
  o.result = {{"epsilon", m.epsilon},
              {"trials", a.trials},
              {"bins", a.bins},
              {"lambda_scale", a.lambda_scale},
              {"min_ratio", r.min_ratio},
              {"threshold", r.threshold},
              {"bins_used", r.bins_used},
              {"pass", r.pass}};
  std::ostringstream t;
  t << std::setprecision(6) << "min normalized ratio " << r.min_ratio << " over " << r.bins_used
    << " bins; threshold " << r.threshold << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  o.text = t.str();
  return o;
}

}  // namespace

void add_privacy(CLI::App& app, Context& ctx) {
  auto* priv = app.add_subcommand("privacy", "Tables: quasi-identifiers, k-anonymity, differential privacy");
  priv->require_subcommand(1);
  auto a = std::make_shared<PrivArgs>();
  auto files = [a] {
    std::vector<std::string> v{a->file};
    if (!a->adjacent.empty()) v.push_back(a->adjacent);
    return v;
  };
  auto file_opt = [a](CLI::App* s) { s->add_option("file", a->file, "Table sidecar")->required()->check(CLI::ExistingFile); };
  Globals* g = &ctx.g;

  auto* q = priv->add_subcommand("qid", "Quasi-identifiers against the external table");
  file_opt(q);
  q->add_option("--target", a->target, "External record to trace through the linkage chain");
  q->add_option("--chain", a->chain, "Attributes for the chain, in order")->delimiter(',');
  ctx.bind(q, "privacy qid", files, [a] { return qid_cmd(*a); });

  auto* k = priv->add_subcommand("kanon", "k-anonymity check");
  file_opt(k);
  k->add_option("--k", a->k, "k (default from the sidecar)")->check(CLI::PositiveNumber);
  ctx.bind(k, "privacy kanon", files, [a] { return kanon_cmd(*a); });

  auto* an = priv->add_subcommand("anonymize", "Generalize and suppress until k-anonymous");
  file_opt(an);
  an->add_option("--k", a->k, "k (default from the sidecar)")->check(CLI::PositiveNumber);
  an->add_option("--budget", a->budget, "Suppression budget")->check(CLI::NonNegativeNumber);
  ctx.bind(an, "privacy anonymize", files, [a] { return anonymize_cmd(*a); });

  auto* d = priv->add_subcommand("dp-answer", "Laplace-noised answer to the sidecar's query");
  file_opt(d);
  d->add_option("--epsilon", a->epsilon, "Privacy parameter per answer");
  d->add_option("--repeat", a->repeat, "Answer this many times against the budget")->check(CLI::PositiveNumber);
  d->add_flag("--insecure-seed", a->insecure_seed, "Seed from the clock (not reproducible)");
  ctx.bind(d, "privacy dp-answer", files, [a, g] { return dp_answer_cmd(*a, *g); });

  auto* tst = priv->add_subcommand("dp-test", "Monte-Carlo ratio test on two adjacent tables");
  file_opt(tst);
  tst->add_option("adjacent", a->adjacent, "Adjacent table sidecar")->required()->check(CLI::ExistingFile);
  tst->add_option("--epsilon", a->epsilon, "Privacy parameter");
  tst->add_option("--trials", a->trials, "Samples per table")->check(CLI::PositiveNumber);
  tst->add_option("--bins", a->bins, "Histogram bins")->check(CLI::PositiveNumber);
  tst->add_option("--lambda-scale", a->lambda_scale, "Multiply the noise scale (below 1 breaks the guarantee)");
  ctx.bind(tst, "privacy dp-test", files, [a, g] { return dp_test_cmd(*a, *g); });
}

}  // namespace secsci::cli
