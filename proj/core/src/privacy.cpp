// SPDX-License-Identifier: Apache-2.0
#include "secsci/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace secsci {

AttributeRole parse_role(std::string_view s) {
  if (s == "identifier") return AttributeRole::Identifier;
  if (s == "quasi") return AttributeRole::Quasi;
  if (s == "sensitive") return AttributeRole::Sensitive;
  if (s == "other") return AttributeRole::Other;
  throw Error("unknown attribute role '" + std::string(s) + "'");
}

std::string to_string(AttributeRole r) {
  switch (r) {
    case AttributeRole::Identifier: return "identifier";
    case AttributeRole::Quasi: return "quasi";
    case AttributeRole::Sensitive: return "sensitive";
    case AttributeRole::Other: return "other";
  }
  return "other";
}

void Table::validate() const {
  std::set<std::string> names;
  for (const auto& a : attributes) {
    if (a.name.empty()) throw Error("attribute with empty name");
    if (!names.insert(a.name).second) throw Error("duplicate attribute '" + a.name + "'");
    if (a.bounds && a.bounds->first > a.bounds->second) throw Error("attribute '" + a.name + "' has inverted bounds");
  }
  if (ids.size() != cells.size()) throw Error("record ids and rows differ in count");
  std::set<std::string> seen;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (!seen.insert(ids[r]).second) throw Error("duplicate record id '" + ids[r] + "'");
    if (cells[r].size() != attributes.size())
      throw Error("record '" + ids[r] + "' has " + std::to_string(cells[r].size()) + " cells, expected " +
                  std::to_string(attributes.size()));
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      const auto& at = attributes[a];
      const auto& v = cells[r][a];
      if (!at.domain.empty() && std::find(at.domain.begin(), at.domain.end(), v) == at.domain.end())
        throw Error("record '" + ids[r] + "': value '" + v + "' outside the domain of '" + at.name + "'");
      if (at.bounds) {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (v.empty() || *end != '\0') throw Error("record '" + ids[r] + "': '" + at.name + "' is not numeric");
        if (x < at.bounds->first || x > at.bounds->second)
          throw Error("record '" + ids[r] + "': '" + at.name + "' out of bounds");
      }
    }
  }
}

int Table::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i)
    if (attributes[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> Table::attribute_indices(const std::vector<std::string>& names) const {
  std::vector<int> out;
  for (const auto& n : names) {
    int i = attribute_index(n);
    if (i < 0) throw Error("unknown attribute '" + n + "'");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> Table::project(std::size_t r, const std::vector<int>& attrs) const {
  std::vector<std::string> out;
  out.reserve(attrs.size());
  for (int a : attrs) out.push_back(cells.at(r).at(static_cast<std::size_t>(a)));
  return out;
}

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw Error("csv: unterminated quote");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Table parse_csv(const std::string& text, const std::string& id_column) {
  auto rows = csv_rows(text);
  if (rows.empty()) throw Error("csv: missing header");
  Table t;
  int id_col = -1;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (!id_column.empty() && rows[0][i] == id_column) {
      id_col = static_cast<int>(i);
      continue;
    }
    t.attributes.push_back({rows[0][i], AttributeRole::Other, {}, std::nullopt});
  }
  if (!id_column.empty() && id_col < 0) throw Error("csv: id column '" + id_column + "' not found");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw Error("csv: line " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) + " fields");
    std::vector<std::string> cells;
    for (std::size_t i = 0; i < rows[r].size(); ++i)
      if (static_cast<int>(i) != id_col) cells.push_back(rows[r][i]);
    t.ids.push_back(id_col >= 0 ? rows[r][static_cast<std::size_t>(id_col)] : "r" + std::to_string(r));
    t.cells.push_back(std::move(cells));
  }
  return t;
}

std::vector<QidMatch> find_quasi_identifiers(const Table& t, const Table& external,
                                             const std::vector<std::string>& join_attrs, std::size_t max_size) {
  std::size_t n = join_attrs.size();
  if (n > 20) throw Error("too many join attributes");
  if (max_size == 0 || max_size > n) max_size = n;
  auto ti = t.attribute_indices(join_attrs);
  auto ei = external.attribute_indices(join_attrs);
  std::vector<QidMatch> out;
  for (std::size_t size = 1; size <= max_size; ++size) {
    // subsets of this size in lexicographic index order
    std::vector<std::size_t> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      std::vector<int> ta, ea;
      QidMatch m;
      for (auto p : pick) {
        ta.push_back(ti[p]);
        ea.push_back(ei[p]);
        m.attributes.push_back(join_attrs[p]);
      }
      // A record is singled out when its tuple matches exactly one external row.
      for (std::size_t r = 0; r < t.cells.size(); ++r) {
        auto key = t.project(r, ta);
        std::optional<std::size_t> hit;
        int count = 0;
        for (std::size_t e = 0; e < external.cells.size() && count < 2; ++e)
          if (external.project(e, ea) == key) {
            ++count;
            hit = e;
          }
        if (count == 1) m.matches.emplace_back(t.ids[r], external.ids[*hit]);
      }
      if (!m.matches.empty()) out.push_back(std::move(m));
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::vector<std::size_t> linkage_chain(const Table& t, const Table& external, std::string_view target,
                                       const std::vector<std::string>& attrs) {
  auto it = std::find(external.ids.begin(), external.ids.end(), target);
  if (it == external.ids.end()) throw Error("unknown external record '" + std::string(target) + "'");
  std::size_t e = static_cast<std::size_t>(it - external.ids.begin());
  auto ti = t.attribute_indices(attrs);
  auto ei = external.attribute_indices(attrs);
  std::vector<std::size_t> counts;
  for (std::size_t k = 1; k <= attrs.size(); ++k) {
    std::vector<int> ta(ti.begin(), ti.begin() + static_cast<long>(k));
    std::vector<int> ea(ei.begin(), ei.begin() + static_cast<long>(k));
    auto key = external.project(e, ea);
    std::size_t c = 0;
    for (std::size_t r = 0; r < t.cells.size(); ++r)
      if (t.project(r, ta) == key) ++c;
    counts.push_back(c);
  }
  return counts;
}

KAnonReport check_k_anonymity(const Table& t, std::size_t k, const std::vector<std::string>& quasi) {
  auto qi = t.attribute_indices(quasi);
  std::map<std::vector<std::string>, std::vector<std::string>> groups;
  for (std::size_t r = 0; r < t.cells.size(); ++r) groups[t.project(r, qi)].push_back(t.ids[r]);
  KAnonReport rep;
  rep.min_group = groups.empty() ? 0 : t.cells.size();
  for (auto& [key, ids] : groups) {
    rep.min_group = std::min(rep.min_group, ids.size());
    if (ids.size() < k) rep.violating.emplace_back(key, ids);
  }
  std::stable_sort(rep.violating.begin(), rep.violating.end(),
                   [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
  rep.ok = rep.violating.empty();
  return rep;
}

int Hierarchy::height() const {
  switch (kind) {
    case Kind::Mask: return mask_levels + 1;
    case Kind::Map: return static_cast<int>(maps.size()) + 1;
    case Kind::Ranges: return static_cast<int>(ranges.size()) + 1;
  }
  return 1;
}

std::string Hierarchy::generalize(const std::string& raw, int level) const {
  if (level < 0 || level > height()) throw Error("level " + std::to_string(level) + " out of range for '" + attribute + "'");
  if (level == height()) return "*";
  if (level == 0) return raw;
  switch (kind) {
    case Kind::Mask: {
      std::string s = raw;
      std::size_t l = std::min<std::size_t>(static_cast<std::size_t>(level), s.size());
      for (std::size_t i = s.size() - l; i < s.size(); ++i) s[i] = '*';
      return s;
    }
    case Kind::Map: {
      std::string v = raw;
      for (int i = 0; i < level; ++i) {
        auto it = maps[static_cast<std::size_t>(i)].find(v);
        if (it == maps[static_cast<std::size_t>(i)].end())
          throw Error("hierarchy '" + attribute + "' has no image for '" + v + "' at level " + std::to_string(i + 1));
        v = it->second;
      }
      return v;
    }
    case Kind::Ranges: {
      char* end = nullptr;
      double x = std::strtod(raw.c_str(), &end);
      if (raw.empty() || *end != '\0') throw Error("hierarchy '" + attribute + "': '" + raw + "' is not numeric");
      for (const auto& r : ranges[static_cast<std::size_t>(level - 1)])
        if (x >= r.lo && x <= r.hi) return r.label;
      throw Error("hierarchy '" + attribute + "': no bin for " + raw + " at level " + std::to_string(level));
    }
  }
  return raw;
}

Table generalize(const Table& t, const std::vector<std::string>& quasi, const std::vector<Hierarchy>& h,
                 const std::vector<int>& levels) {
  if (quasi.size() != h.size() || quasi.size() != levels.size())
    throw Error("quasi-identifiers, hierarchies and levels differ in length");
  auto qi = t.attribute_indices(quasi);
  Table out = t;
  for (std::size_t j = 0; j < qi.size(); ++j) {
    auto a = static_cast<std::size_t>(qi[j]);
    if (levels[j] == 0) continue;
    out.attributes[a].domain.clear();
    out.attributes[a].bounds.reset();
    for (auto& row : out.cells) row[a] = h[j].generalize(row[a], levels[j]);
  }
  return out;
}

Anonymization anonymize(const Table& t, std::size_t k, const std::vector<std::string>& quasi,
                        const std::vector<Hierarchy>& h, std::size_t suppression_budget) {
  if (k == 0) throw Error("k must be positive");
  std::vector<Hierarchy> hs;
  for (const auto& q : quasi) {
    auto it = std::find_if(h.begin(), h.end(), [&](const Hierarchy& x) { return x.attribute == q; });
    if (it == h.end()) throw Error("no hierarchy for quasi-identifier '" + q + "'");
    hs.push_back(*it);
  }
  std::vector<int> tops;
  int total = 0;
  for (const auto& x : hs) {
    tops.push_back(x.height());
    total += x.height();
  }
  Anonymization res;
  std::size_t best = 0;
  std::vector<int> lv(hs.size(), 0);
  // enumerate vectors with sum == s in lex order
  std::function<bool(std::size_t, int)> walk = [&](std::size_t i, int left) -> bool {
    if (i == lv.size()) {
      if (left != 0) return false;
      ++res.vectors_tried;
      Table g = generalize(t, quasi, hs, lv);
      auto rep = check_k_anonymity(g, k, quasi);
      best = std::max(best, rep.min_group);
      std::size_t small = 0;
      for (const auto& v : rep.violating) small += v.second.size();
      if (small > suppression_budget) return false;
      std::set<std::string> drop;
      for (const auto& v : rep.violating) drop.insert(v.second.begin(), v.second.end());
      Table kept = g;
      kept.ids.clear();
      kept.cells.clear();
      for (std::size_t r = 0; r < g.cells.size(); ++r) {
        if (drop.count(g.ids[r])) {
          res.suppressed.push_back(g.ids[r]);
        } else {
          kept.ids.push_back(g.ids[r]);
          kept.cells.push_back(g.cells[r]);
        }
      }
      res.ok = true;
      res.table = std::move(kept);
      res.levels = lv;
      return true;
    }
    for (int l = 0; l <= std::min(left, tops[i]); ++l) {
      lv[i] = l;
      if (walk(i + 1, left - l)) return true;
    }
    lv[i] = 0;
    return false;
  };
  for (int s = 0; s <= total; ++s)
    if (walk(0, s)) return res;
  res.best_k = best;
  return res;
}

namespace {

double numeric_cell(const Table& t, std::size_t r, int a) {
  const auto& v = t.cells[r][static_cast<std::size_t>(a)];
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw Error("record '" + t.ids[r] + "': '" + v + "' is not numeric");
  return x;
}

}  // namespace

double evaluate(const Query& q, const Table& t) {
  int a = t.attribute_index(q.attribute);
  if (a < 0) throw Error("unknown attribute '" + q.attribute + "'");
  double s = 0;
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    if (q.kind == Query::Kind::Count) {
      if (t.cells[r][static_cast<std::size_t>(a)] == q.equals) s += 1;
    } else {
      s += numeric_cell(t, r, a);
    }
  }
  return s;
}

// Supremum over adjacent pairs of the schema, not just pairs around t.
double global_sensitivity(const Query& q, const Table& t) {
  int a = t.attribute_index(q.attribute);
  if (a < 0) throw Error("unknown attribute '" + q.attribute + "'");
  if (q.kind == Query::Kind::Count) return 1;
  const auto& b = t.attributes[static_cast<std::size_t>(a)].bounds;
  if (!b) throw Error("sum over '" + q.attribute + "' needs declared bounds");
  return std::max({b->second - b->first, std::abs(b->first), std::abs(b->second)});
}

bool adjacent(const Table& a, const Table& b) {
  if (a.attributes != b.attributes) return false;
  const Table& big = a.cells.size() >= b.cells.size() ? a : b;
  const Table& small = a.cells.size() >= b.cells.size() ? b : a;
  if (big.cells.size() == small.cells.size()) {
    std::multiset<std::vector<std::string>> x(big.cells.begin(), big.cells.end());
    std::size_t diff = 0;
    for (const auto& row : small.cells) {
      auto it = x.find(row);
      if (it == x.end()) ++diff;
      else x.erase(it);
    }
    return diff <= 1;
  }
  if (big.cells.size() != small.cells.size() + 1) return false;
  std::multiset<std::vector<std::string>> x(big.cells.begin(), big.cells.end());
  for (const auto& row : small.cells) {
    auto it = x.find(row);
    if (it == x.end()) return false;
    x.erase(it);
  }
  return true;
}

double LaplaceSampler::operator()(double lambda) {
  // u uniform on the open interval (-1/2, 1/2), built from 53 raw bits so the stream is portable.
  double u = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
  double s = u < 0 ? -1.0 : 1.0;
  return -lambda * s * std::log1p(-2.0 * std::abs(u));
}

double laplace_density(double y, double lambda) { return std::exp(-std::abs(y) / lambda) / (2 * lambda); }

double Mechanism::lambda(const Table& t) const {
  if (!(epsilon > 0)) throw Error("epsilon must be positive");
  double gs = sensitivity ? *sensitivity : global_sensitivity(query, t);
  if (gs < 0) throw Error("sensitivity must be non-negative");
  return gs / epsilon;
}

NoisyAnswer laplace_answer(const Mechanism& m, const Table& t, Ledger& ledger, LaplaceSampler& rng) {
  double lam = m.lambda(t);
  double rem = ledger.remaining();
  if (m.epsilon > rem + 1e-12) {
    std::ostringstream os;
    os << "privacy budget exhausted: need " << m.epsilon << ", remaining " << rem;
    throw Error(os.str());
  }
  NoisyAnswer a;
  a.exact = evaluate(m.query, t);
  a.lambda = lam;
  a.noise = rng(lam);
  a.value = a.exact + a.noise;
  std::string desc = (m.query.kind == Query::Kind::Count ? "count(" : "sum(") + m.query.attribute +
                     (m.query.kind == Query::Kind::Count ? "=" + m.query.equals : "") + ")";
  ledger.entries.push_back({desc, m.epsilon, std::max(0.0, rem - m.epsilon)});
  return a;
}

double normalized_ratio(double x, double y) {
  double hi = std::max(x, y), lo = std::min(x, y);
  return hi == 0 ? 1.0 : lo / hi;
}

RatioTest dp_ratio_test(const Mechanism& m, const Table& t, const Table& t_adjacent, int trials, int bins,
                        std::uint64_t seed, double lambda_scale, int min_count, double slack) {
  if (!adjacent(t, t_adjacent)) throw Error("ratio test needs adjacent tables");
  if (trials <= 0 || bins <= 0) throw Error("trials and bins must be positive");
  double lam = m.lambda(t) * lambda_scale;
  double declared = m.lambda(t);
  double f = evaluate(m.query, t), g = evaluate(m.query, t_adjacent);
  double lo = std::min(f, g) - 4 * declared, hi = std::max(f, g) + 4 * declared;
  double w = (hi - lo) / bins;
  std::vector<long> cf(static_cast<std::size_t>(bins), 0), cg(static_cast<std::size_t>(bins), 0);
  LaplaceSampler rf(seed), rg(seed ^ 0x9e3779b97f4a7c15ULL);
  auto put = [&](std::vector<long>& c, double v) {
    if (v < lo || v >= hi) return;
    auto b = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / w), c.size() - 1);
    ++c[b];
  };
  for (int i = 0; i < trials; ++i) {
    put(cf, f + rf(lam));
    put(cg, g + rg(lam));
  }
  RatioTest res;
  for (std::size_t b = 0; b < cf.size(); ++b) {
    if (std::min(cf[b], cg[b]) < min_count) continue;
    ++res.bins_used;
    res.min_ratio = std::min(res.min_ratio, normalized_ratio(static_cast<double>(cf[b]), static_cast<double>(cg[b])));
  }
  res.threshold = std::exp(-m.epsilon) - slack;
  res.pass = res.bins_used > 0 && res.min_ratio >= res.threshold;
  return res;
}

}  // namespace secsci
