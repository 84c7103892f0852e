// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI/CLI.hpp>

#include "secsci/io.hpp"

namespace secsci::cli {

using json = io::json;

// Exit codes shared by every subcommand.
enum Exit : int { Holds = 0, Violated = 1, BadInput = 2 };

struct Outcome {
  int code = Holds;
  json result = json::object();
  std::string text;  // human-readable rendering
};

struct Globals {
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> bound;
};

// Set by the chosen subcommand's callback; main runs it and prints the report.
struct Command {
  std::string name;
  std::vector<std::string> inputs;
  std::function<Outcome()> run;
};

struct Context {
  Globals g;
  Command cmd;
  CLI::App* app = nullptr;

  // Registers `f` as the command to run when `sub` was parsed.
  void bind(CLI::App* sub, std::string name, std::function<std::vector<std::string>()> inputs,
            std::function<Outcome()> f);
};

void add_prop(CLI::App& app, Context& ctx);
void add_acm(CLI::App& app, Context& ctx);
void add_auth(CLI::App& app, Context& ctx);
void add_chan(CLI::App& app, Context& ctx);
void add_prob(CLI::App& app, Context& ctx);
void add_privacy(CLI::App& app, Context& ctx);
void add_proto(CLI::App& app, Context& ctx);
void add_corpus(CLI::App& app, Context& ctx);

// Helpers.
json load(const std::string& path);
std::string fnv1a64(const std::string& path);
// "[\"a\",\"b\"]" or "a,b"; empty string is the empty history.
std::vector<std::string> parse_list(const std::string& s);
json word_json(const std::vector<std::string>& ids);
std::string join(const std::vector<std::string>& v, const std::string& sep);
std::string yes(bool b);

}  // namespace secsci::cli
