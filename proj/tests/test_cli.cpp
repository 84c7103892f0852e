// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include <doctest/doctest.h>
#include "oracle.hpp"

using namespace secsci;
using namespace secsci::test;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI from the fixture directory; stderr is merged when `merge` is set.
Run cli(const std::string& args, bool merge = false) {
  const std::string cmd = "cd " + quote(fixture("corpus.json").parent_path().string()) + " && " + quote(SECSCI_CLI) + " " + args +
                          (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json report(const std::string& args) {
  auto r = cli("--json " + args);
  auto j = json::parse(r.out);
  CHECK(j.at("exit") == r.code);
  return j;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("exit codes follow the verdict") {
  CHECK(cli("chan noninterference elevator.json --subject B").code == 1);
  CHECK(cli("chan noninterference echo.json --subject A").code == 0);
  CHECK(cli("proto verify nspk.json nspk-lowe.json").code == 1);
  CHECK(cli("proto verify ping.json ping-fresh.json").code == 0);
  CHECK(cli("proto verify nspk-fixed.json nspk-lowe.json").code == 0);
  CHECK(cli("prob secrecy otp.json").code == 0);
  CHECK(cli("prob secrecy identity-cipher.json").code == 1);
  CHECK(cli("privacy kanon database_anon.json").code == 1);
  CHECK(cli("privacy anonymize vehicles.json").code == 0);
  CHECK(cli("prop classify sheep-properties.json").code == 0);
  CHECK(cli("prop classify sheep-properties.json --name MilkWool --require safe").code == 0);
  CHECK(cli("prop classify sheep-properties.json --name MilkWool --require live").code == 1);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("bogus").code == 2);
  CHECK(cli("prop classify missing.json").code == 2);
  CHECK(cli("chan view elevator.json").code == 2);
  CHECK(cli("chan view elevator.json --subject Z").code == 2);
  CHECK(cli("chan run elevator.json --history call9_A").code == 2);
  CHECK(cli("--bound -1 chan invert echo.json").code == 2);
  CHECK(cli("prop decompose sheep-properties.json --kind nonsense").code == 2);
}

TEST_CASE("schema errors carry a JSON pointer") {
  auto bad = std::filesystem::temp_directory_path() / "secsci-bad-elevator.json";
  auto j = load_fixture("elevator.json");
  j["elevator"]["floors"] = "two";
  std::ofstream(bad) << j.dump();
  auto r = cli("chan run " + quote(bad.string()), true);
  CHECK(r.code == 2);
  CHECK(contains(r.out, "/elevator/floors"));
  std::filesystem::remove(bad);
}

TEST_CASE("dp-answer demands a seed") {
  auto r = cli("privacy dp-answer exam.json", true);
  CHECK(r.code == 2);
  CHECK(contains(r.out, "--seed"));
  CHECK(cli("--seed 1 privacy dp-answer exam.json").code == 0);
  CHECK(cli("privacy dp-answer exam.json --insecure-seed").code == 0);
  // Same seed, same answer.
  CHECK(cli("--seed 5 privacy dp-answer exam.json").out == cli("--seed 5 privacy dp-answer exam.json").out);
}

TEST_CASE("elevator witness in the report") {
  auto j = report("chan noninterference elevator.json --subject B --focus call1_B");
  CHECK(j["command"] == "chan noninterference");
  const auto& w = j["result"]["witness"];
  CHECK(w["purge"] == json::array({"call1_B"}));
  CHECK(w["x"] == json::array({"call0_A", "call1_B"}));
  CHECK(w["y"] == json::array({"call1_A", "call1_B"}));
  CHECK(w["view_x"] == json::array({json::array({"move1"})}));
  CHECK(w["view_y"] == json::array({json::array({"stay1"})}));
  REQUIRE(j["inputs"].size() == 1);
  CHECK(j["inputs"][0]["fnv1a64"].get<std::string>().size() == 16);
}

TEST_CASE("Monty Hall inverse table") {
  auto r = report("prob invert montyhall.json")["result"];
  CHECK(r["rows"]["G0"].is_null());
  CHECK(r["rows"]["G1"] == json::array({"1/3", "0", "2/3"}));
  CHECK(r["rows"]["G2"] == json::array({"1/3", "2/3", "0"}));
  auto text = cli("prob invert montyhall.json").out;
  CHECK(contains(text, "undefined"));
}

TEST_CASE("the empty property is safe and not live") {
  auto p = report("prop classify empty.json")["result"]["properties"][0]["classes"];
  CHECK(p["safe"] == true);
  CHECK(p["live"] == false);
}

TEST_CASE("Lowe attack through the CLI") {
  auto r = cli("proto verify nspk.json nspk-lowe.json");
  CHECK(contains(r.out, "ATTACK on NSPK"));
  auto j = report("proto verify nspk.json nspk-lowe.json");
  CHECK(j["result"]["attack"] == true);
  CHECK(contains(cli("proto verify ping.json ping-fresh.json").out, "no attack"));
}

TEST_CASE("corpus inventory") {
  auto r = report("corpus list")["result"]["fixtures"];
  REQUIRE(r.is_array());
  CHECK(r.size() > 0);
  std::set<std::string> files;
  for (const auto& f : r) {
    files.insert(f["file"].get<std::string>());
    CHECK(f["present"] == true);
  }
  CHECK(files.count("nspk.json"));
  CHECK(files.count("sheep-properties.json"));
  CHECK(contains(cli("corpus list").out, "nspk.json -> "));
}

TEST_CASE("reports are byte-identical across runs") {
  for (const char* args : {"--json prop classify sheep-properties.json", "--json chan noninterference elevator.json --subject B",
                           "--json --seed 11 privacy dp-answer exam.json", "--json proto verify nspk.json nspk-lowe.json",
                           "--json prob noninterference noisy-leak.json --subject B"}) {
    INFO(args);
    CHECK(cli(args).out == cli(args).out);
  }
}

TEST_CASE("report top-level keys match the published schema") {
  std::ifstream in(SECSCI_REPORT_SCHEMA);
  REQUIRE(in);
  auto schema = json::parse(in);
  std::set<std::string> required;
  for (const auto& k : schema["required"]) required.insert(k.template get<std::string>());
  auto j = report("acm check acm-start.json");
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  CHECK(keys == required);
  std::set<std::string> commands;
  for (const auto& c : schema["properties"]["command"]["enum"]) commands.insert(c.template get<std::string>());
  CHECK(commands.size() == 24);
  CHECK(commands.count(j["command"].get<std::string>()));
}
