// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "secsci/trace.hpp"

namespace secsci {

enum class AttributeRole { Identifier, Quasi, Sensitive, Other };

struct Attribute {
  std::string name;
  AttributeRole role = AttributeRole::Other;
  std::vector<std::string> domain;  // empty: unconstrained
  std::optional<std::pair<double, double>> bounds;  // numeric attributes
  bool operator==(const Attribute&) const = default;
};

struct Table {
  std::vector<Attribute> attributes;
  std::vector<std::string> ids;                 // record ids
  std::vector<std::vector<std::string>> cells;  // [record][attribute]

  void validate() const;
  int attribute_index(std::string_view name) const;
  std::vector<int> attribute_indices(const std::vector<std::string>& names) const;
  std::vector<std::string> project(std::size_t r, const std::vector<int>& attrs) const;
  bool operator==(const Table&) const = default;
};

AttributeRole parse_role(std::string_view s);
std::string to_string(AttributeRole r);
Table parse_csv(const std::string& text, const std::string& id_column = "");

struct QidMatch {
  std::vector<std::string> attributes;
  std::vector<std::pair<std::string, std::string>> matches;  // (record id, external id)
};

// Subsets of join_attrs up to max_size, by size then attribute order; only subsets that identify someone.
std::vector<QidMatch> find_quasi_identifiers(const Table& t, const Table& external,
                                             const std::vector<std::string>& join_attrs, std::size_t max_size = 0);

// Records of t agreeing with external record `target` on each cumulative prefix of `attrs`.
std::vector<std::size_t> linkage_chain(const Table& t, const Table& external, std::string_view target,
                                       const std::vector<std::string>& attrs);

struct KAnonReport {
  bool ok = true;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> violating;  // (tuple, record ids), smallest first
  std::size_t min_group = 0;
};

KAnonReport check_k_anonymity(const Table& t, std::size_t k, const std::vector<std::string>& quasi);

// Level 0 is the raw value; the top level is "*".
struct Hierarchy {
  enum class Kind { Mask, Map, Ranges };
  struct Range {
    double lo, hi;
    std::string label;
    bool operator==(const Range&) const = default;
  };
  std::string attribute;
  Kind kind = Kind::Mask;
  int mask_levels = 0;                                   // Mask: hide one more trailing character per level
  std::vector<std::map<std::string, std::string>> maps;  // Map: each level maps the previous one
  std::vector<std::vector<Range>> ranges;                // Ranges: each level bins the raw number

  int height() const;  // index of the top level
  std::string generalize(const std::string& raw, int level) const;
  bool operator==(const Hierarchy&) const = default;
};

Table generalize(const Table& t, const std::vector<std::string>& quasi, const std::vector<Hierarchy>& h,
                 const std::vector<int>& levels);

struct Anonymization {
  bool ok = false;
  Table table;
  std::vector<int> levels;
  std::vector<std::string> suppressed;
  std::size_t best_k = 0;  // on failure
  std::size_t vectors_tried = 0;
};

// Exhaustive over the level lattice by total height, then lexicographically; first feasible vector wins.
Anonymization anonymize(const Table& t, std::size_t k, const std::vector<std::string>& quasi,
                        const std::vector<Hierarchy>& h, std::size_t suppression_budget);

struct Query {
  enum class Kind { Count, Sum };
  Kind kind = Kind::Count;
  std::string attribute;
  std::string equals;  // Count: predicate value
  bool operator==(const Query&) const = default;
};

double evaluate(const Query& q, const Table& t);
double global_sensitivity(const Query& q, const Table& t);
// Same schema, and either one record removed/added or exactly one record changed.
bool adjacent(const Table& a, const Table& b);

class LaplaceSampler {
 public:
  explicit LaplaceSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lambda);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

double laplace_density(double y, double lambda);

struct Mechanism {
  Query query;
  double epsilon = 1;
  std::optional<double> sensitivity;  // computed from the query when absent
  double lambda(const Table& t) const;
};

struct Ledger {
  double budget = 0;
  struct Entry {
    std::string query;
    double epsilon;
    double remaining;
  };
  std::vector<Entry> entries;
  double remaining() const { return entries.empty() ? budget : entries.back().remaining; }
};

struct NoisyAnswer {
  double value = 0;
  double exact = 0;
  double noise = 0;
  double lambda = 0;
};

// Throws Error when the ledger cannot cover epsilon.
NoisyAnswer laplace_answer(const Mechanism& m, const Table& t, Ledger& ledger, LaplaceSampler& rng);

struct RatioTest {
  double min_ratio = 1;
  double threshold = 0;
  int bins_used = 0;
  bool pass = false;
};

// `lambda_scale` multiplies the mechanism's noise scale; values below 1 break the guarantee.
RatioTest dp_ratio_test(const Mechanism& m, const Table& t, const Table& t_adjacent, int trials, int bins,
                        std::uint64_t seed, double lambda_scale = 1.0, int min_count = 1000, double slack = 0.05);

// Normalized ratio: the smaller over the larger.
double normalized_ratio(double x, double y);

}  // namespace secsci
