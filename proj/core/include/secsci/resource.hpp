// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "secsci/trace.hpp"

namespace secsci {

using ActionSet = std::set<std::string>;
// Indexed [subject][object].
using Matrix = std::vector<std::vector<ActionSet>>;

// Finite partial order, stored as its reflexive-transitive closure.
class Poset {
 public:
  Poset() = default;
  // Throws Error if the closure is not antisymmetric or names are unknown.
  static Poset from_covers(std::vector<std::string> elems, const std::vector<std::pair<std::string, std::string>>& covers);
  static Poset from_relation(std::vector<std::string> elems, std::vector<std::vector<bool>> le);

  std::size_t size() const { return elems_.size(); }
  const std::vector<std::string>& elements() const { return elems_; }
  std::optional<int> find(std::string_view name) const;
  int at(std::string_view name) const;
  bool leq(int a, int b) const { return le_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  bool leq(std::string_view a, std::string_view b) const { return leq(at(a), at(b)); }
  // Covering pairs of the order, for serialization.
  std::vector<std::pair<std::string, std::string>> covers() const;
  bool operator==(const Poset& o) const { return elems_ == o.elems_ && le_ == o.le_; }

 private:
  std::vector<std::string> elems_;
  std::vector<std::vector<bool>> le_;
};

struct AcModel {
  std::vector<std::string> subjects;
  std::vector<std::string> objects;
  std::vector<std::string> actions;
  Matrix M;  // permissions
  Matrix B;  // accesses
  bool operator==(const AcModel&) const = default;
  void validate() const;
};

struct AccessTriple {
  std::string subject;
  std::string object;
  std::string action;
  auto operator<=>(const AccessTriple&) const = default;
};

struct AcReport {
  bool ac_ok = true;
  std::vector<AccessTriple> violations;  // sorted
};

AcReport check(const AcModel& m);

struct MlsModel {
  std::vector<std::string> subjects;
  std::vector<std::string> objects;
  Poset levels;
  std::map<std::string, std::string> cl;  // subjects
  std::map<std::string, std::string> pl;  // subjects and objects
  bool operator==(const MlsModel&) const = default;
  void validate() const;
};

struct MlsReport {
  bool mls_ok = true;
  std::vector<std::string> violations;  // subjects with pl > cl or incomparable
};

MlsReport check(const MlsModel& m);

struct Preorders {
  std::vector<std::vector<bool>> subjects;  // u <= v iff M[u,.] ⊆ M[v,.] pointwise
  std::vector<std::vector<bool>> objects;   // i <= j iff B[.,i] ⊆ B[.,j] pointwise
};

Preorders implicit_preorders(const AcModel& ac);
bool is_preorder(const std::vector<std::vector<bool>>& r);

// Levels are the function tables J -> ℘A that occur as some cl_u or pl_u, ordered pointwise.
MlsModel ac_to_mls(const AcModel& ac);

struct AuthorizationModel {
  AcModel ac;
  Poset levels;
  std::map<std::string, std::string> cl;
  std::map<std::string, std::string> pl;
  std::string read = "r";
  std::string write = "w";
  bool operator==(const AuthorizationModel&) const = default;
  void validate() const;
  MlsModel mls() const;
};

struct AuthReport {
  bool ac_ok = true;
  bool mls_ok = true;
  bool no_read_up = true;
  bool no_write_down = true;
  std::vector<AccessTriple> ac_violations;
  std::vector<std::string> mls_violations;
  std::vector<AccessTriple> nru_violations;
  std::vector<AccessTriple> nwd_violations;
  bool secure() const { return ac_ok && mls_ok && no_read_up && no_write_down; }
};

AuthReport check(const AuthorizationModel& m);

// Left-hand side of the biconditional for one cell.
bool cell_secure(const AuthorizationModel& m, std::size_t u, std::size_t i);

// Extended actions are tagged pairs "<a,l>". With presence = true each cell also carries
// "<•,l>" for l below cl_u (permissions) or pl_u (accesses), which makes the
// biconditional hold cell by cell even where B[u,i] is empty.
AcModel authorization_to_ac(const AuthorizationModel& am, bool presence = true);
std::string tagged_action(const std::string& a, const std::string& level);

struct AuthEvent {
  enum class Kind { WriteRead, Relocate, SetClearance };
  Kind kind = Kind::WriteRead;
  // WriteRead: writer moves object from its own level `from` to `to`; reader takes it at `to`.
  std::string writer, object, from, to, reader;
  // Relocate / SetClearance.
  std::string subject, level;
};

struct StepResult {
  std::optional<AuthorizationModel> next;
  std::string violation;  // the inequality that blocked the step
};

StepResult transition(const AuthorizationModel& am, const AuthEvent& e);

}  // namespace secsci
