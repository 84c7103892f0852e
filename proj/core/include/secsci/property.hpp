// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secsci/trace.hpp"

namespace secsci {

RegularProperty lower_closure(const RegularProperty& p);
RegularProperty interior(const RegularProperty& p);
// u*u_!(P): all histories whose u-purge lies in the u-purge image of P.
RegularProperty external_cylinder(const RegularProperty& p, std::string_view u);
RegularProperty cylinder_closure(const RegularProperty& p);
RegularProperty cylinder_interior(const RegularProperty& p);

struct LocalWitness {
  std::string subject;
  Word local;  // over the subject's sub-alphabet
};

struct ClassificationReport {
  bool safe = false;
  bool live = false;
  bool localized = false;
  bool authorized = false;
  bool available = false;
  std::optional<Word> not_safe;       // in closure(P) \ P
  std::optional<Word> not_live;       // no extension reaches P
  std::optional<Word> not_localized;  // in cyl(P) \ P
  std::optional<Word> not_authorized;
  std::optional<LocalWitness> not_available;
  // Liveness of each purge image, in subject order.
  std::vector<std::pair<std::string, bool>> local_live;
};

ClassificationReport classify(const RegularProperty& p);
bool is_safe(const RegularProperty& p);
bool is_live(const RegularProperty& p);
bool is_localized(const RegularProperty& p);
bool is_available(const RegularProperty& p);

enum class DecompositionKind { SafetyLiveness, AuthAvail, StrongAvailBreach };

std::optional<DecompositionKind> parse_decomposition_kind(std::string_view s);
std::string to_string(DecompositionKind k);

struct Decomposition {
  DecompositionKind kind;
  RegularProperty first;
  RegularProperty second;
  RegularProperty reconstructed;
  bool reconstructs = false;
  // Checks the kind declares on its parts.
  std::vector<std::pair<std::string, bool>> checks;
  bool sound() const;
};

Decomposition decompose(const RegularProperty& p, DecompositionKind kind);

struct DosWitness {
  std::string subject;
  Word extension;   // u's events only, appended to every history
  bool uniform = true;
  // Shortest history from which that subject cannot leave the complement, if not uniform.
  std::optional<Word> from;
};

struct DosReport {
  bool property_live = false;
  bool complement_live = false;
  std::vector<DosWitness> witnesses;  // subjects able to push any history into the complement
};

std::optional<DosReport> dos_witness(const RegularProperty& p);

}  // namespace secsci
