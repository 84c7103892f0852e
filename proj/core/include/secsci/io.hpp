// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "secsci/channel.hpp"
#include "secsci/privacy.hpp"
#include "secsci/prob.hpp"
#include "secsci/property.hpp"
#include "secsci/protocol.hpp"
#include "secsci/resource.hpp"
#include "secsci/trace.hpp"

#include <nlohmann/json.hpp>

namespace secsci::io {

using json = nlohmann::ordered_json;

json read_json(const std::filesystem::path& file);
std::string kind_of(const json& j);

struct NamedProperty {
  std::string name;
  RegularProperty property;
};

struct PropertySet {
  AlphabetPtr alphabet;
  std::vector<NamedProperty> properties;
  const RegularProperty& get(std::string_view name) const;
  bool operator==(const PropertySet& o) const;
};

struct AuthScenario {
  AuthorizationModel model;
  std::vector<AuthEvent> events;
  bool operator==(const AuthScenario& o) const;
};

struct StochasticFile {
  StochasticChannel channel;
  std::optional<Distribution> prior;
  bool operator==(const StochasticFile&) const = default;
};

struct DistributionFile {
  std::vector<std::string> outcomes;
  Distribution p;
  bool operator==(const DistributionFile&) const = default;
};

struct CipherFile {
  Cipher cipher;
  Distribution prior;  // over messages
  bool operator==(const CipherFile&) const = default;
};

struct PrivacyFile {
  Table table;
  std::vector<std::string> quasi;
  std::vector<Hierarchy> hierarchies;
  std::size_t k = 2;
  std::size_t suppression_budget = 0;
  std::optional<Table> external;
  std::vector<std::string> join;
  std::optional<Query> query;
  double epsilon = 1;
  double budget = 0;  // 0: no ledger limit beyond a single query
  bool operator==(const PrivacyFile&) const = default;
};

struct ProtocolFile {
  ProtocolSpec spec;
  bool operator==(const ProtocolFile&) const = default;
};

// Each loader validates; errors name the offending JSON pointer.
PropertySet property_set_from_json(const json& j);
json to_json(const PropertySet& p);
AcModel ac_from_json(const json& j);
json to_json(const AcModel& m);
AuthScenario auth_from_json(const json& j);
json to_json(const AuthScenario& a);
AuthEvent auth_event_from_json(const json& j);
SharedChannel channel_from_json(const json& j);
json to_json(const SharedChannel& m);
StochasticFile stochastic_from_json(const json& j);
json to_json(const StochasticFile& s);
DistributionFile distribution_from_json(const json& j);
json to_json(const DistributionFile& d);
Source source_from_json(const json& j);
json to_json(const Source& s);
ProbSharedChannel prob_channel_from_json(const json& j);
json to_json(const ProbSharedChannel& m);
CipherFile cipher_from_json(const json& j);
json to_json(const CipherFile& c);
// CSV paths in the sidecar resolve against `base`.
PrivacyFile privacy_from_json(const json& j, const std::filesystem::path& base);
json to_json(const PrivacyFile& p);  // tables inline
ProtocolSpec protocol_from_json(const json& j);
json to_json(const ProtocolSpec& p);
Scenario scenario_from_json(const json& j, const ProtocolSpec& p);
json to_json(const Scenario& s);

json to_json(const Table& t);
Table table_from_json(const json& j, const std::filesystem::path& base);

json word_json(const Alphabet& sigma, const Word& w);

}  // namespace secsci::io
