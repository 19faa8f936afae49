#include "anbv/models.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace anbv {

namespace {

struct Embedded {
  const char* name;
  const char* text;
};

const Embedded kEmbedded[] = {
#include "anbv/builtin_models.inc"
};

std::map<std::string, Status> table(const std::vector<std::string>& ids, const std::vector<std::string>& attacked) {
  std::map<std::string, Status> out;
  for (const std::string& id : ids) out[id] = Status::Safe;
  for (const std::string& id : attacked) out[id] = Status::Attack;
  return out;
}

const char* source_of(const std::string& name) {
  for (const Embedded& e : kEmbedded) {
    if (name == e.name) return e.text;
  }
  throw UnknownModel("unknown builtin model '" + name + "'");
}

}  // namespace

const std::vector<BuiltinModel>& builtin_models() {
  static const std::vector<BuiltinModel> models = [] {
    const std::vector<std::string> atp{"G1", "G2", "G3", "G4", "G5", "G6", "G7", "G8"};
    const std::vector<std::string> toy{"G1", "G2"};
    std::vector<BuiltinModel> out{
        {"atp-base", source_of("atp-base"), 1, table(atp, {"G4", "G7", "G8"})},
        {"atp-g4fix", source_of("atp-g4fix"), 1, table(atp, {"G7", "G8"})},
        {"atp-g7g8fix", source_of("atp-g7g8fix"), 1, table(atp, {"G4"})},
        {"atp-fixed", source_of("atp-fixed"), 1, table(atp, {})},
        {"toy-replay", source_of("toy-replay"), 2, table(toy, {"G1"})},
        {"toy-nonce", source_of("toy-nonce"), 2, table(toy, {})},
    };
    return out;
  }();
  return models;
}

const BuiltinModel& builtin_model(const std::string& name) {
  for (const BuiltinModel& m : builtin_models()) {
    if (m.name == name) return m;
  }
  throw UnknownModel("unknown builtin model '" + name + "'");
}

SourceSpec builtin(const std::string& name) { return {builtin_model(name).source, name}; }

bool ReproReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReproRow& r) { return r.pass; });
}

namespace {

Protocol parsed(const std::string& name) {
  ParseResult r = parse(builtin(name));
  if (!r.ok()) throw std::logic_error("builtin model " + name + " does not parse");
  return *r.protocol;
}

}  // namespace

ReproReport reproduce(const ReproConfig& cfg) {
  ReproReport out;
  for (const BuiltinModel& m : builtin_models()) {
    VerifyConfig vc;
    vc.sessions = m.sessions;
    vc.max_depth = cfg.depth;
    vc.workers = cfg.workers;
    vc.state_budget = cfg.state_budget;
    Report rep = verify(parsed(m.name), vc);
    std::vector<std::pair<std::string, Status>> expected(m.expected.begin(), m.expected.end());
    std::stable_sort(expected.begin(), expected.end(),
                     [](const auto& a, const auto& b) { return natural_less(a.first, b.first); });
    for (const auto& [id, status] : expected) {
      const Verdict* v = rep.goal(id);
      ReproRow row{m.name, m.sessions, cfg.depth, id, to_string(status), v ? v->status : Status::Unknown, false};
      row.pass = v && v->status == status;
      out.rows.push_back(std::move(row));
    }
  }
  VerifyConfig vc;
  vc.sessions = 2;
  vc.max_depth = cfg.fixed_depth;
  vc.workers = cfg.workers;
  vc.state_budget = cfg.fixed_budget;
  Report rep = verify(parsed("atp-fixed"), vc);
  for (const Verdict& v : rep.goals) {
    out.rows.push_back({"atp-fixed", 2, cfg.fixed_depth, v.goal_id, "no attack", v.status, v.status != Status::Attack});
  }
  return out;
}

std::string render_text(const ReproReport& r, bool color) {
  std::ostringstream out;
  out << "model         sessions  depth  goal  expected   actual   result\n";
  for (const ReproRow& row : r.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-13s %-9d %-6d %-5s %-10s %-8s ", row.model.c_str(), row.sessions, row.depth,
                  row.goal.c_str(), row.expected.c_str(), to_string(row.actual));
    out << line;
    const char* word = row.pass ? "ok" : "MISMATCH";
    if (color) {
      out << (row.pass ? "\033[32m" : "\033[1;31m") << word << "\033[0m\n";
    } else {
      out << word << "\n";
    }
  }
  std::size_t failed = std::count_if(r.rows.begin(), r.rows.end(), [](const ReproRow& x) { return !x.pass; });
  out << r.rows.size() - failed << "/" << r.rows.size() << " rows match\n";
  return out.str();
}

std::string render_json(const ReproReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ReproRow& row : r.rows) {
    nlohmann::ordered_json j;
    j["model"] = row.model;
    j["sessions"] = row.sessions;
    j["depth"] = row.depth;
    j["goal"] = row.goal;
    j["expected"] = row.expected;
    j["actual"] = to_string(row.actual);
    j["pass"] = row.pass;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  doc["ok"] = r.ok();
  return doc.dump(2) + "\n";
}

}  // namespace anbv
