#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anbv/models.hpp"
#include "anbv/parser.hpp"
#include "anbv/strand.hpp"
#include "anbv/verifier.hpp"

namespace {

constexpr int kSafe = 0;
constexpr int kAttack = 1;
constexpr int kError = 2;

bool use_color() {
  const char* env = std::getenv("ANBVERIFY_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(STDOUT_FILENO) != 0;
}

anbv::SourceSpec resolve(const std::string& model) {
  for (const anbv::BuiltinModel& m : anbv::builtin_models()) {
    if (m.name == model) return anbv::builtin(model);
  }
  return anbv::load_file(model);
}

// nullopt after printing diagnostics
std::optional<anbv::Protocol> load(const std::string& model) {
  anbv::ParseResult r = anbv::parse(resolve(model));
  for (const anbv::Diagnostic& d : r.diagnostics) std::cerr << model << ":" << d.str() << "\n";
  if (!r.ok()) return std::nullopt;
  return std::move(*r.protocol);
}

struct Options {
  std::string model;
  int sessions = 1;
  int depth = 20;
  std::vector<std::string> goals;
  std::string format = "text";
  int workers = 1;
  int compose_depth = 2;
  std::uint64_t budget = 0;
  bool stats = false;
};

void add_search_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model,-m", o.model, "builtin model name or .anb path")->required();
  cmd->add_option("--sessions", o.sessions, "parallel sessions (1 or 2)")->check(CLI::Range(1, 2));
  cmd->add_option("--depth", o.depth, "maximum plies")->check(CLI::NonNegativeNumber);
  cmd->add_option("--goal", o.goals, "only check this goal (repeatable)");
  cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--workers", o.workers, "scenario worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--compose-depth", o.compose_depth, "intruder composition depth")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", o.budget, "state budget per scenario, 0 for none");
  cmd->add_flag("--stats", o.stats, "include state counts and wall time");
}

anbv::Report run_verify(const anbv::Protocol& p, const Options& o) {
  anbv::VerifyConfig cfg;
  cfg.sessions = o.sessions;
  cfg.max_depth = o.depth;
  cfg.goal_filter = o.goals;
  cfg.workers = o.workers;
  cfg.compose_depth = o.compose_depth;
  cfg.state_budget = o.budget;
  anbv::Report r = anbv::verify(p, cfg);
  r.model = o.model;
  return r;
}

int cmd_verify(const Options& o) {
  auto p = load(o.model);
  if (!p) return kError;
  anbv::Report r = run_verify(*p, o);
  std::cout << (o.format == "json" ? anbv::render_json(r, o.stats) : anbv::render_text(r, use_color(), o.stats));
  return r.any_attack() ? kAttack : kSafe;
}

int cmd_trace(const Options& o) {
  auto p = load(o.model);
  if (!p) return kError;
  anbv::Report r = run_verify(*p, o);
  const auto* hit = [&]() -> const anbv::Verdict* {
    for (const anbv::Verdict& v : r.goals) {
      if (v.status == anbv::Status::Attack) return &v;
    }
    return nullptr;
  }();
  if (!hit) {
    if (o.format == "json") {
      std::cout << "{\"model\": \"" << o.model << "\", \"trace\": null}\n";
    } else {
      std::cout << "no attack found up to depth " << o.depth << "\n";
    }
    return kSafe;
  }
  anbv::Report only = r;
  only.goals = {*hit};
  if (o.format == "json") {
    std::cout << anbv::render_json(only, o.stats);
  } else {
    std::cout << anbv::render_text(only, use_color(), o.stats);
  }
  return kAttack;
}

int cmd_check(const std::string& model, bool render) {
  auto p = load(model);
  if (!p) return kError;
  anbv::ProjectResult c = anbv::compile(*p);
  for (const anbv::Diagnostic& d : c.diagnostics) std::cerr << model << ":" << d.str() << "\n";
  if (!c.ok()) return kError;
  if (render) {
    std::cout << anbv::render(*p);
  } else {
    std::cout << model << ": ok (" << p->actions.size() << " actions, " << p->goals.size() << " goals)\n";
  }
  return kSafe;
}

int cmd_models() {
  for (const anbv::BuiltinModel& m : anbv::builtin_models()) {
    std::string attacks;
    for (const auto& [id, status] : m.expected) {
      if (status != anbv::Status::Attack) continue;
      if (!attacks.empty()) attacks += ",";
      attacks += id;
    }
    std::cout << m.name << "  sessions=" << m.sessions << "  expected attacks: " << (attacks.empty() ? "none" : attacks)
              << "\n";
  }
  return kSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anbverify: bounded-session verifier for Alice-and-Bob protocol models"};
  app.require_subcommand(1);

  Options verify_opts;
  auto* verify = app.add_subcommand("verify", "check every goal of a model");
  add_search_flags(verify, verify_opts);

  Options trace_opts;
  auto* trace = app.add_subcommand("trace", "print the shortest attack trace on a goal");
  add_search_flags(trace, trace_opts);

  std::string check_model;
  bool check_render = false;
  auto* check = app.add_subcommand("check", "parse, validate and compile a model");
  check->add_option("model", check_model, "builtin model name or .anb path")->required();
  check->add_flag("--render", check_render, "print the canonical form");

  auto* models = app.add_subcommand("models", "list builtin models");

  anbv::ReproConfig repro;
  std::string repro_format = "text";
  auto* reproduce = app.add_subcommand("reproduce", "run the builtin models against their expected verdicts");
  reproduce->add_option("--depth", repro.depth, "maximum plies for single-session rows")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--fixed-depth", repro.fixed_depth, "maximum plies for atp-fixed at two sessions")
      ->check(CLI::NonNegativeNumber);
  reproduce->add_option("--fixed-budget", repro.fixed_budget, "state budget per scenario for the two-session row, 0 for none");
  reproduce->add_option("--workers", repro.workers, "scenario worker threads")->check(CLI::PositiveNumber);
  reproduce->add_option("--format", repro_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*verify) return cmd_verify(verify_opts);
    if (*trace) return cmd_trace(trace_opts);
    if (*check) return cmd_check(check_model, check_render);
    if (*models) return cmd_models();
    if (*reproduce) {
      anbv::ReproReport r = anbv::reproduce(repro);
      std::cout << (repro_format == "json" ? anbv::render_json(r) : anbv::render_text(r, use_color()));
      return r.ok() ? kSafe : kAttack;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
