#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / ("anbverify-cli-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const auto err_path = scratch() / "stderr.txt";
  std::string cmd = std::string("ANBVERIFY_COLOR=0 '") + ANBVERIFY_BIN + "' " + args + " 2>'" + err_path.string() + "'";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream e(err_path);
  r.err.assign(std::istreambuf_iterator<char>(e), {});
  return r;
}

std::string write_file(const std::string& name, const std::string& text) {
  auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

// Schema: {model, sessions, depth, goals:[{id, kind, status, trace?, explored_depth?, states, millis?}]}
void check_schema(const json& doc, bool stats) {
  REQUIRE(doc.is_object());
  CHECK(doc.at("model").is_string());
  CHECK(doc.at("sessions").is_number_integer());
  CHECK(doc.at("depth").is_number_integer());
  REQUIRE(doc.at("goals").is_array());
  for (const json& g : doc.at("goals")) {
    CHECK(g.at("id").is_string());
    std::string kind = g.at("kind");
    CHECK((kind == "secrecy" || kind == "weak-auth" || kind == "strong-auth"));
    std::string status = g.at("status");
    CHECK((status == "safe" || status == "attack" || status == "unknown"));
    CHECK(g.at("states").is_number_unsigned());
    CHECK(g.contains("millis") == stats);
    CHECK(g.contains("trace") == (status == "attack"));
    CHECK(g.contains("explored_depth") == (status == "unknown"));
    if (!g.contains("trace")) continue;
    int n = 1;
    for (const json& t : g.at("trace")) {
      CHECK(t.at("n") == n++);
      CHECK(t.at("label").is_string());
      CHECK(t.at("from").is_string());
      CHECK(t.at("to").is_string());
      std::string d = t.at("delivery");
      CHECK((d == "send" || d == "direct" || d == "replay" || d == "composed"));
      CHECK(t.contains("origin_seq") == (d == "direct" || d == "replay"));
      if (t.contains("origin_seq")) CHECK(t.at("origin_seq").get<int>() < t.at("n").get<int>());
    }
  }
}

}  // namespace

TEST_CASE("verify base model: exit 1 and the three broken goals") {
  Run r = run("verify --model atp-base --sessions 1 --depth 20");
  CHECK(r.code == 1);
  for (const char* g : {"G4  strong-auth  attack", "G7  secrecy  attack", "G8  strong-auth  attack",
                        "G1  secrecy  safe", "G6  weak-auth  safe"}) {
    CHECK(r.out.find(g) != std::string::npos);
  }
  CHECK(r.out.find("\033[") == std::string::npos);
}

TEST_CASE("verify fixed model: exit 0") {
  Run r = run("verify --model atp-fixed --sessions 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("attack") == std::string::npos);
}

TEST_CASE("check on bad syntax: exit 2 with line and column") {
  std::string path = write_file("bad.anb", "Protocol: Bad\nTypes:\n  Agent A, B;\nKnowledge:\n  A: A, f(B;\n");
  Run r = run("check '" + path + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find(path + ":5:") != std::string::npos);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("check on a non-executable model: exit 2 naming role and action") {
  std::string path = write_file("noexec.anb",
                                "Protocol: N\nTypes:\n  Agent A, s;\n  Number X;\n  Function f;\nKnowledge:\n  A: A, s;\n"
                                "  s: s, f;\nActions:\n  A *->* s: f(X)  #M1\nGoals:\n  X secret between A, s  #G1\n");
  Run r = run("check '" + path + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find("role A cannot compose f(X) in action M1") != std::string::npos);
}

TEST_CASE("check builtins and render canonical text") {
  Run ok = run("check atp-base");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("19 actions, 8 goals") != std::string::npos);
  Run rendered = run("check --render toy-replay");
  CHECK(rendered.code == 0);
  CHECK(rendered.out.find("Protocol: ToyReplay") == 0);
  // rendering a file of the rendering is a fixed point
  std::string path = write_file("rendered.anb", rendered.out);
  CHECK(run("check --render '" + path + "'").out == rendered.out);
}

TEST_CASE("trace G8 as JSON ends in a replay of the A2.4 envelope") {
  Run r = run("trace --model atp-base --goal G8 --format json");
  CHECK(r.code == 1);
  json doc = json::parse(r.out);
  check_schema(doc, false);
  REQUIRE(doc["goals"].size() == 1);
  const json& g = doc["goals"][0];
  CHECK(g["id"] == "G8");
  const json& trace = g["trace"];
  const json& last = trace.back();
  CHECK(last["label"] == "A4.2");
  CHECK(last["delivery"] == "replay");
  CHECK(last["from"] == "aspspR");
  int origin = last["origin_seq"];
  const json& sealed = trace.at(static_cast<std::size_t>(origin - 1));
  CHECK(sealed["label"] == "A2.4");
  CHECK(sealed["delivery"] == "send");
  CHECK(sealed["from"] == "aspspR");
  CHECK(sealed["to"] == last["to"]);
}

TEST_CASE("trace without an attack") {
  Run r = run("trace --model atp-fixed --depth 10");
  CHECK(r.code == 0);
  CHECK(r.out == "no attack found up to depth 10\n");
}

TEST_CASE("JSON output matches the schema for every builtin") {
  for (const char* spec : {"atp-base", "atp-g4fix", "atp-g7g8fix", "atp-fixed", "toy-replay --sessions 2",
                           "toy-nonce --sessions 2"}) {
    CAPTURE(spec);
    Run r = run(std::string("verify --format json --model ") + spec);
    CHECK((r.code == 0 || r.code == 1));
    json doc = json::parse(r.out);
    check_schema(doc, false);
    CHECK(doc["model"] == std::string(spec).substr(0, std::string(spec).find(' ')));
  }
  Run stats = run("verify --format json --stats --model toy-nonce");
  check_schema(json::parse(stats.out), true);
  Run budget = run("verify --format json --model atp-fixed --budget 100");
  CHECK(budget.code == 0);
  check_schema(json::parse(budget.out), false);
}

TEST_CASE("output is byte-identical across runs and worker counts") {
  Run a = run("verify --model atp-base --format json");
  Run b = run("verify --model atp-base --format json");
  Run c = run("verify --model atp-base --format json --workers 4");
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("verify --model atp-base --bogus").code == 2);
  CHECK(run("verify --model atp-base --sessions 3").code == 2);
  CHECK(run("verify --model atp-base --format xml").code == 2);
  CHECK(run("verify").code == 2);
  CHECK(run("").code == 2);
  Run missing = run("verify --model /nonexistent/x.anb");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot read") != std::string::npos);
  Run goal = run("verify --model atp-base --goal G42");
  CHECK(goal.code == 2);
}

TEST_CASE("models lists the builtins") {
  Run r = run("models");
  CHECK(r.code == 0);
  CHECK(r.out.find("atp-base  sessions=1  expected attacks: G4,G7,G8") != std::string::npos);
  CHECK(r.out.find("toy-nonce  sessions=2  expected attacks: none") != std::string::npos);
}

TEST_CASE("files on disk verify like builtins") {
  std::ifstream in(std::string(ANBV_SOURCE_DIR) + "/models/atp-g4fix.anb");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  std::string path = write_file("g4fix.anb", text);
  Run file = run("verify --format json --model '" + path + "'");
  Run builtin = run("verify --format json --model atp-g4fix");
  CHECK(file.code == 1);
  json a = json::parse(file.out);
  json b = json::parse(builtin.out);
  a.erase("model");
  b.erase("model");
  CHECK(a == b);
}
