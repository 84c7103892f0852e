// SPDX-License-Identifier: Apache-2.0
#include "secsci/resource.hpp"

#include <algorithm>

namespace secsci {

Poset Poset::from_relation(std::vector<std::string> elems, std::vector<std::vector<bool>> le) {
  const std::size_t n = elems.size();
  if (le.size() != n) throw Error("poset relation has wrong size");
  for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (le[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (le[i][j] && le[j][i]) throw Error("levels " + elems[i] + " and " + elems[j] + " form a cycle");
  Poset p;
  p.elems_ = std::move(elems);
  p.le_ = std::move(le);
  return p;
}

Poset Poset::from_covers(std::vector<std::string> elems, const std::vector<std::pair<std::string, std::string>>& covers) {
  const std::size_t n = elems.size();
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (!idx.emplace(elems[i], i).second) throw Error("duplicate level " + elems[i]);
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : covers) {
    auto ia = idx.find(a), ib = idx.find(b);
    if (ia == idx.end() || ib == idx.end()) throw Error("unknown level in order: " + a + " <= " + b);
    le[ia->second][ib->second] = true;
  }
  return from_relation(std::move(elems), std::move(le));
}

std::optional<int> Poset::find(std::string_view name) const {
  for (std::size_t i = 0; i < elems_.size(); ++i)
    if (elems_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

int Poset::at(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error("unknown level " + std::string(name));
}

std::vector<std::pair<std::string, std::string>> Poset::covers() const {
  std::vector<std::pair<std::string, std::string>> out;
  const int n = static_cast<int>(size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b || !leq(a, b)) continue;
      bool covered = true;
      for (int c = 0; c < n && covered; ++c)
        if (c != a && c != b && leq(a, c) && leq(c, b)) covered = false;
      if (covered) out.emplace_back(elems_[static_cast<std::size_t>(a)], elems_[static_cast<std::size_t>(b)]);
    }
  return out;
}

namespace {

void check_matrix(const Matrix& x, const AcModel& m, const char* name) {
  if (x.size() != m.subjects.size()) throw Error(std::string(name) + " has wrong number of rows");
  std::set<std::string> acts(m.actions.begin(), m.actions.end());
  for (const auto& row : x) {
    if (row.size() != m.objects.size()) throw Error(std::string(name) + " has wrong number of columns");
    for (const auto& cell : row)
      for (const auto& a : cell)
        if (!acts.count(a)) throw Error(std::string(name) + " uses unknown action " + a);
  }
}

bool contains_all(const ActionSet& small, const ActionSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

void AcModel::validate() const {
  check_matrix(M, *this, "M");
  check_matrix(B, *this, "B");
}

AcReport check(const AcModel& m) {
  m.validate();
  AcReport r;
  for (std::size_t u = 0; u < m.subjects.size(); ++u)
    for (std::size_t i = 0; i < m.objects.size(); ++i)
      for (const auto& a : m.B[u][i])
        if (!m.M[u][i].count(a)) r.violations.push_back({m.subjects[u], m.objects[i], a});
  std::sort(r.violations.begin(), r.violations.end());
  r.ac_ok = r.violations.empty();
  return r;
}

void MlsModel::validate() const {
  for (const auto& u : subjects) {
    auto c = cl.find(u);
    auto p = pl.find(u);
    if (c == cl.end() || p == pl.end()) throw Error("subject " + u + " lacks cl or pl");
    levels.at(c->second);
    levels.at(p->second);
  }
  for (const auto& i : objects) {
    auto p = pl.find(i);
    if (p == pl.end()) throw Error("object " + i + " lacks pl");
    levels.at(p->second);
  }
}

MlsReport check(const MlsModel& m) {
  m.validate();
  MlsReport r;
  for (const auto& u : m.subjects)
    if (!m.levels.leq(m.pl.at(u), m.cl.at(u))) r.violations.push_back(u);
  std::sort(r.violations.begin(), r.violations.end());
  r.mls_ok = r.violations.empty();
  return r;
}

bool is_preorder(const std::vector<std::vector<bool>>& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!r[i][i]) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j])
        for (std::size_t k = 0; k < n; ++k)
          if (r[j][k] && !r[i][k]) return false;
  return true;
}

Preorders implicit_preorders(const AcModel& ac) {
  ac.validate();
  const std::size_t ns = ac.subjects.size(), no = ac.objects.size();
  Preorders p;
  p.subjects.assign(ns, std::vector<bool>(ns, true));
  p.objects.assign(no, std::vector<bool>(no, true));
  for (std::size_t u = 0; u < ns; ++u)
    for (std::size_t v = 0; v < ns; ++v)
      for (std::size_t i = 0; i < no && p.subjects[u][v]; ++i)
        p.subjects[u][v] = contains_all(ac.M[u][i], ac.M[v][i]);
  for (std::size_t i = 0; i < no; ++i)
    for (std::size_t j = 0; j < no; ++j)
      for (std::size_t u = 0; u < ns && p.objects[i][j]; ++u)
        p.objects[i][j] = contains_all(ac.B[u][i], ac.B[u][j]);
  return p;
}

namespace {

std::string level_name(const AcModel& ac, const std::vector<ActionSet>& f) {
  std::string s = "{";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ",";
    s += ac.objects[i] + ":{";
    bool first = true;
    for (const auto& a : f[i]) {
      if (!first) s += ",";
      s += a;
      first = false;
    }
    s += "}";
  }
  return s + "}";
}

}  // namespace

MlsModel ac_to_mls(const AcModel& ac) {
  ac.validate();
  std::vector<std::vector<ActionSet>> tables;
  std::vector<std::string> names;
  auto intern = [&](const std::vector<ActionSet>& f) {
    for (std::size_t k = 0; k < tables.size(); ++k)
      if (tables[k] == f) return names[k];
    tables.push_back(f);
    names.push_back(level_name(ac, f));
    return names.back();
  };
  MlsModel m;
  m.subjects = ac.subjects;
  for (std::size_t u = 0; u < ac.subjects.size(); ++u) {
    m.cl[ac.subjects[u]] = intern(ac.M[u]);
    m.pl[ac.subjects[u]] = intern(ac.B[u]);
  }
  const std::size_t n = tables.size();
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, true));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < ac.objects.size() && le[a][b]; ++i)
        le[a][b] = contains_all(tables[a][i], tables[b][i]);
  m.levels = Poset::from_relation(names, le);
  return m;
}

void AuthorizationModel::validate() const {
  ac.validate();
  mls().validate();
  for (const auto& i : ac.objects)
    if (!pl.count(i)) throw Error("object " + i + " lacks pl");
}

MlsModel AuthorizationModel::mls() const { return MlsModel{ac.subjects, ac.objects, levels, cl, pl}; }

AuthReport check(const AuthorizationModel& m) {
  m.validate();
  AuthReport r;
  auto ac = check(m.ac);
  r.ac_ok = ac.ac_ok;
  r.ac_violations = ac.violations;
  auto mls = check(m.mls());
  r.mls_ok = mls.mls_ok;
  r.mls_violations = mls.violations;
  for (std::size_t u = 0; u < m.ac.subjects.size(); ++u)
    for (std::size_t i = 0; i < m.ac.objects.size(); ++i) {
      const auto& su = m.ac.subjects[u];
      const auto& oi = m.ac.objects[i];
      const auto& cell = m.ac.B[u][i];
      if (cell.count(m.read) && !m.levels.leq(m.pl.at(oi), m.cl.at(su))) r.nru_violations.push_back({su, oi, m.read});
      if (cell.count(m.write) && !m.levels.leq(m.pl.at(su), m.pl.at(oi))) r.nwd_violations.push_back({su, oi, m.write});
    }
  r.no_read_up = r.nru_violations.empty();
  r.no_write_down = r.nwd_violations.empty();
  return r;
}

bool cell_secure(const AuthorizationModel& m, std::size_t u, std::size_t i) {
  const auto& su = m.ac.subjects[u];
  const auto& oi = m.ac.objects[i];
  const auto& b = m.ac.B[u][i];
  if (!contains_all(b, m.ac.M[u][i])) return false;
  if (!m.levels.leq(m.pl.at(su), m.cl.at(su))) return false;
  if (b.count(m.read) && !m.levels.leq(m.pl.at(oi), m.cl.at(su))) return false;
  if (b.count(m.write) && !m.levels.leq(m.pl.at(su), m.pl.at(oi))) return false;
  return true;
}

std::string tagged_action(const std::string& a, const std::string& level) { return "<" + a + "," + level + ">"; }

namespace {

std::vector<int> down(const Poset& p, int l) {
  std::vector<int> out;
  for (int x = 0; x < static_cast<int>(p.size()); ++x)
    if (p.leq(x, l)) out.push_back(x);
  return out;
}

const char* const kPresence = "•";

}  // namespace

AcModel authorization_to_ac(const AuthorizationModel& am, bool presence) {
  am.validate();
  const Poset& L = am.levels;
  AcModel out;
  out.subjects = am.ac.subjects;
  out.objects = am.ac.objects;
  std::vector<std::string> tags = am.ac.actions;
  if (presence) tags.emplace_back(kPresence);
  for (const auto& a : tags)
    for (const auto& l : L.elements()) out.actions.push_back(tagged_action(a, l));
  const std::size_t ns = out.subjects.size(), no = out.objects.size();
  out.M.assign(ns, std::vector<ActionSet>(no));
  out.B.assign(ns, std::vector<ActionSet>(no));
  for (std::size_t u = 0; u < ns; ++u) {
    int clu = L.at(am.cl.at(out.subjects[u]));
    int plu = L.at(am.pl.at(out.subjects[u]));
    for (std::size_t i = 0; i < no; ++i) {
      int pli = L.at(am.pl.at(out.objects[i]));
      auto& mh = out.M[u][i];
      auto& bh = out.B[u][i];
      for (const auto& a : am.ac.M[u][i])
        for (int x : down(L, clu))
          if (a != am.write || L.leq(x, pli)) mh.insert(tagged_action(a, L.elements()[static_cast<std::size_t>(x)]));
      for (const auto& a : am.ac.B[u][i]) {
        for (int x : down(L, plu)) bh.insert(tagged_action(a, L.elements()[static_cast<std::size_t>(x)]));
        if (a == am.read)
          for (int x : down(L, pli)) bh.insert(tagged_action(a, L.elements()[static_cast<std::size_t>(x)]));
      }
      if (presence) {
        for (int x : down(L, clu)) mh.insert(tagged_action(kPresence, L.elements()[static_cast<std::size_t>(x)]));
        for (int x : down(L, plu)) bh.insert(tagged_action(kPresence, L.elements()[static_cast<std::size_t>(x)]));
      }
    }
  }
  return out;
}

StepResult transition(const AuthorizationModel& am, const AuthEvent& e) {
  am.validate();
  AuthorizationModel next = am;
  const Poset& L = am.levels;
  auto need = [&](const std::string& who, bool known) {
    if (!known) throw Error("unknown name " + who);
  };
  auto subj = [&](const std::string& u) {
    auto it = std::find(am.ac.subjects.begin(), am.ac.subjects.end(), u);
    need(u, it != am.ac.subjects.end());
    return static_cast<std::size_t>(it - am.ac.subjects.begin());
  };
  switch (e.kind) {
    case AuthEvent::Kind::WriteRead: {
      std::size_t w = subj(e.writer), r = subj(e.reader);
      auto it = std::find(am.ac.objects.begin(), am.ac.objects.end(), e.object);
      need(e.object, it != am.ac.objects.end());
      std::size_t i = static_cast<std::size_t>(it - am.ac.objects.begin());
      L.at(e.from);
      L.at(e.to);
      if (am.pl.at(e.writer) != e.from)
        return {std::nullopt, "writer " + e.writer + " is at " + am.pl.at(e.writer) + ", not " + e.from};
      if (!am.ac.M[w][i].count(am.write)) return {std::nullopt, am.write + " not in M[" + e.writer + "," + e.object + "]"};
      if (!am.ac.M[r][i].count(am.read)) return {std::nullopt, am.read + " not in M[" + e.reader + "," + e.object + "]"};
      if (!L.leq(e.from, e.to))
        return {std::nullopt, "no-write-down: pl(" + e.writer + ")=" + e.from + " is not <= " + e.to};
      if (!L.leq(e.to, am.cl.at(e.reader)))
        return {std::nullopt, "no-read-up: " + e.to + " is not <= cl(" + e.reader + ")=" + am.cl.at(e.reader)};
      next.pl[e.object] = e.to;
      break;
    }
    case AuthEvent::Kind::Relocate:
      subj(e.subject);
      L.at(e.level);
      if (!L.leq(e.level, am.cl.at(e.subject)))
        return {std::nullopt, "clearance: " + e.level + " is not <= cl(" + e.subject + ")=" + am.cl.at(e.subject)};
      next.pl[e.subject] = e.level;
      break;
    case AuthEvent::Kind::SetClearance:
      subj(e.subject);
      L.at(e.level);
      if (!L.leq(am.pl.at(e.subject), e.level))
        return {std::nullopt, "clearance: pl(" + e.subject + ")=" + am.pl.at(e.subject) + " is not <= " + e.level};
      next.cl[e.subject] = e.level;
      break;
  }
  auto rep = check(next);
  if (!rep.no_read_up) {
    const auto& v = rep.nru_violations.front();
    return {std::nullopt, "no-read-up: pl(" + v.object + ")=" + next.pl.at(v.object) + " is not <= cl(" + v.subject + ")=" + next.cl.at(v.subject)};
  }
  if (!rep.no_write_down) {
    const auto& v = rep.nwd_violations.front();
    return {std::nullopt, "no-write-down: pl(" + v.subject + ")=" + next.pl.at(v.subject) + " is not <= pl(" + v.object + ")=" + next.pl.at(v.object)};
  }
  return {std::move(next), ""};
}

}  // namespace secsci
