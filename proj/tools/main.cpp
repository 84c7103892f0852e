// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"

namespace secsci::cli {

void Context::bind(CLI::App* sub, std::string name, std::function<std::vector<std::string>()> inputs,
                   std::function<Outcome()> f) {
  sub->callback([this, name = std::move(name), inputs = std::move(inputs), f = std::move(f)] {
    cmd.name = name;
    cmd.inputs = inputs();
    cmd.run = f;
  });
}

json load(const std::string& path) { return io::read_json(path); }

std::string fnv1a64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::vector<std::string> parse_list(const std::string& s) {
  std::vector<std::string> out;
  auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return out;
  if (s[first] == '[') {
    json j;
    try {
      j = json::parse(s);
    } catch (const json::exception& e) {
      throw Error(std::string("history: ") + e.what());
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_string()) throw Error("/" + std::to_string(i) + ": expected an event id");
      out.push_back(j[i].get<std::string>());
    }
    return out;
  }
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

json word_json(const std::vector<std::string>& ids) {
  json a = json::array();
  for (const auto& s : ids) a.push_back(s);
  return a;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

}  // namespace secsci::cli

int main(int argc, char** argv) {
  using namespace secsci::cli;
  CLI::App app{"secsci: security calculus toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  ctx.app = &app;
  app.add_flag("--json", ctx.g.json, "Print a JSON report");
  app.add_option("--seed", ctx.g.seed, "Seed for randomized commands");
  app.add_option("--bound", ctx.g.bound, "History length bound")->check(CLI::NonNegativeNumber);

  add_prop(app, ctx);
  add_acm(app, ctx);
  add_auth(app, ctx);
  add_chan(app, ctx);
  add_prob(app, ctx);
  add_privacy(app, ctx);
  add_proto(app, ctx);
  add_corpus(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BadInput;
  } catch (const secsci::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadInput;
  }
  if (!ctx.cmd.run) {
    std::cerr << "error: no command\n";
    return BadInput;
  }

  Outcome o;
  try {
    o = ctx.cmd.run();
  } catch (const secsci::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadInput;
  }

  if (ctx.g.json) {
    json inputs = json::array();
    for (const auto& p : ctx.cmd.inputs) inputs.push_back({{"path", p}, {"fnv1a64", fnv1a64(p)}});
    json report = {{"command", ctx.cmd.name}, {"inputs", inputs}, {"exit", o.code}, {"result", o.result}};
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << o.text;
    if (!o.text.empty() && o.text.back() != '\n') std::cout << "\n";
  }
  return o.code;
}
