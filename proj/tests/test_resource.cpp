// SPDX-License-Identifier: Apache-2.0
#include <doctest/doctest.h>
#include "oracle.hpp"

using namespace secsci;
using namespace secsci::test;

namespace {

bool includes(const ActionSet& big, const ActionSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Reflexive-transitive closure of the covers, by Warshall.
std::vector<std::vector<bool>> closure(const Poset& p) {
  const auto& el = p.elements();
  const std::size_t n = el.size();
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
  for (const auto& [a, b] : p.covers()) le[static_cast<std::size_t>(p.at(a))][static_cast<std::size_t>(p.at(b))] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (le[i][k] && le[k][j]) le[i][j] = true;
  return le;
}

struct Oracle {
  const AuthorizationModel& am;
  std::vector<std::vector<bool>> le;
  explicit Oracle(const AuthorizationModel& m) : am(m), le(closure(m.levels)) {}
  bool leq(const std::string& a, const std::string& b) const {
    return le[static_cast<std::size_t>(am.levels.at(a))][static_cast<std::size_t>(am.levels.at(b))];
  }
  bool cell(std::size_t u, std::size_t i) const {
    const auto& su = am.ac.subjects[u];
    const auto& oi = am.ac.objects[i];
    const auto& b = am.ac.B[u][i];
    return includes(am.ac.M[u][i], b) && leq(am.pl.at(su), am.cl.at(su)) &&
           (!b.count(am.read) || leq(am.pl.at(oi), am.cl.at(su))) && (!b.count(am.write) || leq(am.pl.at(su), am.pl.at(oi)));
  }
};

bool ac_ok_by_definition(const AcModel& m) {
  for (std::size_t u = 0; u < m.subjects.size(); ++u)
    for (std::size_t i = 0; i < m.objects.size(); ++i)
      if (!includes(m.M[u][i], m.B[u][i])) return false;
  return true;
}

AuthorizationModel vault() { return io::auth_from_json(load_fixture("vault.json")).model; }

}  // namespace

TEST_CASE("poset closure and validation") {
  auto p = Poset::from_covers({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  CHECK(p.leq("a", "c"));
  CHECK_FALSE(p.leq("c", "a"));
  CHECK(closure(p) == std::vector<std::vector<bool>>{{true, true, true}, {false, true, true}, {false, false, true}});
  CHECK_THROWS_AS(Poset::from_covers({"a", "b"}, {{"a", "b"}, {"b", "a"}}), Error);
  CHECK_THROWS_AS(Poset::from_covers({"a"}, {{"a", "z"}}), Error);
}

TEST_CASE("vault state q0 is secure") {
  auto am = vault();
  auto r = check(am);
  CHECK(r.mls_ok);
  CHECK(r.secure());
  auto hat = authorization_to_ac(am);
  CHECK(check(hat).ac_ok);
}

TEST_CASE("empty access matrix satisfies AC") {
  Gen g(5);
  for (int n = 0; n < 20; ++n) {
    auto m = g.ac_model();
    for (auto& row : m.B)
      for (auto& c : row) c.clear();
    CHECK(check(m).ac_ok);
  }
}

TEST_CASE("one injected access is reported alone") {
  Gen g(17);
  for (int n = 0; n < 200; ++n) {
    auto m = g.ac_model();
    for (std::size_t u = 0; u < m.subjects.size(); ++u)
      for (std::size_t i = 0; i < m.objects.size(); ++i) m.B[u][i] = m.M[u][i];
    std::vector<AccessTriple> free;
    for (std::size_t u = 0; u < m.subjects.size(); ++u)
      for (std::size_t i = 0; i < m.objects.size(); ++i)
        for (const auto& a : m.actions)
          if (!m.M[u][i].count(a)) free.push_back({m.subjects[u], m.objects[i], a});
    if (free.empty()) continue;
    auto t = free[static_cast<std::size_t>(g.below(static_cast<int>(free.size())))];
    auto u = static_cast<std::size_t>(std::find(m.subjects.begin(), m.subjects.end(), t.subject) - m.subjects.begin());
    auto i = static_cast<std::size_t>(std::find(m.objects.begin(), m.objects.end(), t.object) - m.objects.begin());
    m.B[u][i].insert(t.action);
    auto r = check(m);
    CHECK_FALSE(r.ac_ok);
    CHECK(r.violations == std::vector<AccessTriple>{t});

    // The derived MLS model flags exactly the violating subject.
    auto mls = check(ac_to_mls(m));
    CHECK(mls.violations == std::vector<std::string>{t.subject});
  }
}

TEST_CASE("implicit preorders") {
  AcModel same{{"alice", "bob"}, {"o"}, {"r"}, {{{"r"}}, {{"r"}}}, {{{}}, {{}}}};
  auto p = implicit_preorders(same);
  CHECK(p.subjects[0][1]);
  CHECK(p.subjects[1][0]);

  AcModel one{{"u"}, {"o"}, {"r"}, {{{"r"}}}, {{{}}}};
  CHECK(implicit_preorders(one).subjects == std::vector<std::vector<bool>>{{true}});

  Gen g(23);
  for (int n = 0; n < 200; ++n) {
    auto m = g.ac_model();
    auto pre = implicit_preorders(m);
    CHECK(is_preorder(pre.subjects));
    CHECK(is_preorder(pre.objects));
    for (std::size_t u = 0; u < m.subjects.size(); ++u)
      for (std::size_t v = 0; v < m.subjects.size(); ++v) {
        bool le = true;
        for (std::size_t i = 0; i < m.objects.size(); ++i) le = le && includes(m.M[v][i], m.M[u][i]);
        CHECK(pre.subjects[u][v] == le);
      }
    for (std::size_t i = 0; i < m.objects.size(); ++i)
      for (std::size_t j = 0; j < m.objects.size(); ++j) {
        bool le = true;
        for (std::size_t u = 0; u < m.subjects.size(); ++u) le = le && includes(m.B[u][j], m.B[u][i]);
        CHECK(pre.objects[i][j] == le);
      }
  }
}

TEST_CASE("AC to MLS: start matrix") {
  AcModel m{{"Alice", "Bob"},
            {"sheep", "oil"},
            {"milk", "wool", "meat", "cook"},
            {{{"milk", "wool", "meat"}, {}}, {{}, {"cook"}}},
            {}};
  m.B = m.M;
  CHECK(check(ac_to_mls(m)).mls_ok);
  for (auto& row : m.B)
    for (auto& c : row) c.clear();
  auto mls = ac_to_mls(m);
  CHECK(check(mls).mls_ok);
  // The empty table sits below every clearance.
  for (const auto& u : m.subjects) CHECK(mls.levels.leq(mls.pl.at(u), mls.cl.at(u)));
}

TEST_CASE("AC and MLS equivalence on random models") {
  Gen g(314);
  int violated = 0;
  for (int n = 0; n < 500; ++n) {
    auto m = g.ac_model();
    bool ok = check(m).ac_ok;
    CHECK(ok == ac_ok_by_definition(m));
    CHECK(ok == check(ac_to_mls(m)).mls_ok);
    violated += !ok;
  }
  CHECK(violated > 50);
  CHECK(violated < 450);
}

TEST_CASE("authorization biconditional on random models") {
  Gen g(2718);
  int secure = 0;
  for (int n = 0; n < 500; ++n) {
    auto am = g.authorization_model();
    Oracle o(am);
    auto hat = authorization_to_ac(am);
    bool all = true;
    for (std::size_t u = 0; u < am.ac.subjects.size(); ++u)
      for (std::size_t i = 0; i < am.ac.objects.size(); ++i) {
        bool lhs = o.cell(u, i);
        CHECK(cell_secure(am, u, i) == lhs);
        CHECK(includes(hat.M[u][i], hat.B[u][i]) == lhs);
        all = all && lhs;
      }
    CHECK(check(am).secure() == all);
    CHECK(check(hat).ac_ok == all);
    secure += all;
  }
  CHECK(secure > 50);
  CHECK(secure < 450);
}

TEST_CASE("write down leaves the tagged pair uncovered") {
  auto am = vault();
  // A at l4 writing into sheep at l1.
  am.pl["A"] = "l4";
  am.ac.B[0][0] = {"w"};
  auto hat = authorization_to_ac(am);
  auto tag = tagged_action("w", "l4");
  CHECK(hat.B[0][0].count(tag));
  CHECK_FALSE(hat.M[0][0].count(tag));
  CHECK_FALSE(check(am).no_write_down);

  auto empty = vault();
  auto bare = authorization_to_ac(empty, false);
  for (const auto& row : bare.B)
    for (const auto& c : row) CHECK(c.empty());
  CHECK(check(bare).ac_ok);
}

TEST_CASE("the sheep machine cycle returns to its initial state") {
  auto sc = io::auth_from_json(load_fixture("sheep-machine.json"));
  AuthorizationModel cur = sc.model;
  auto step = transition(cur, sc.events.at(0));
  REQUIRE(step.next);
  CHECK(step.next->pl.at("sheep") == "l2");
  for (const auto& e : sc.events) {
    auto r = transition(cur, e);
    REQUIRE_MESSAGE(r.next, r.violation);
    CHECK(check(*r.next).secure());
    cur = *r.next;
  }
  CHECK(cur == sc.model);
}

TEST_CASE("rejected transitions name the inequality") {
  auto am = vault();
  am.pl["A"] = "l4";
  AuthEvent down{AuthEvent::Kind::WriteRead, "A", "sheep", "l4", "l1", "B", "", ""};
  auto r = transition(am, down);
  CHECK_FALSE(r.next);
  CHECK(r.violation.find("no-write-down") != std::string::npos);

  AuthEvent up{AuthEvent::Kind::Relocate, "", "", "", "", "", "A", "l5"};
  auto r2 = transition(vault(), up);
  CHECK_FALSE(r2.next);
  CHECK(r2.violation.find("clearance") != std::string::npos);

  AuthEvent clear{AuthEvent::Kind::SetClearance, "", "", "", "", "", "B", "l2"};
  auto r3 = transition(vault(), clear);
  REQUIRE(r3.next);
  CHECK(r3.next->cl.at("B") == "l2");
}

TEST_CASE("monitor keeps secure states secure") {
  Gen g(55);
  int steps = 0;
  for (int n = 0; n < 300; ++n) {
    auto am = g.authorization_model();
    if (!check(am).secure()) continue;
    const auto& lv = am.levels.elements();
    for (int k = 0; k < 10; ++k) {
      AuthEvent e;
      auto pick = [&](const std::vector<std::string>& v) { return v[static_cast<std::size_t>(g.below(static_cast<int>(v.size())))]; };
      switch (g.below(3)) {
        case 0:
          e.kind = AuthEvent::Kind::WriteRead;
          e.writer = pick(am.ac.subjects);
          e.reader = pick(am.ac.subjects);
          e.object = pick(am.ac.objects);
          e.from = am.pl.at(e.writer);
          e.to = pick(lv);
          break;
        case 1:
          e.kind = AuthEvent::Kind::Relocate;
          e.subject = pick(am.ac.subjects);
          e.level = pick(lv);
          break;
        default:
          e.kind = AuthEvent::Kind::SetClearance;
          e.subject = pick(am.ac.subjects);
          e.level = pick(lv);
      }
      auto r = transition(am, e);
      if (!r.next) continue;
      ++steps;
      CHECK(check(*r.next).secure());
      am = *r.next;
    }
  }
  CHECK(steps > 100);
}
