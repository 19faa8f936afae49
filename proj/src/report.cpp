#include <cstdio>
#include <sstream>

#include "anbv/verifier.hpp"
#include "json.hpp"

namespace anbv {

namespace {

std::string style(bool color, const char* code, const std::string& text) {
  if (!color) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string fixed(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ms);
  return buf;
}

}  // namespace

std::string render_text(const Report& r, bool color, bool stats) {
  std::ostringstream out;
  out << "model " << r.model << ", sessions " << r.sessions << ", depth " << r.depth << "\n";
  for (const Verdict& v : r.goals) {
    std::string status = to_string(v.status);
    const char* code = v.status == Status::Safe ? "32" : v.status == Status::Attack ? "1;31" : "33";
    out << "  " << v.goal_id << "  " << to_string(v.kind) << "  " << style(color, code, status);
    if (v.status == Status::Safe) out << " (to depth " << r.depth << ")";
    if (v.status == Status::Attack) out << " in " << v.trace.size() << " plies";
    if (v.status == Status::Unknown) out << " (state budget reached; no attack up to depth " << v.explored_depth << ")";
    if (stats) out << "  [" << v.states << " states, " << fixed(v.millis) << " ms]";
    out << "\n";
    if (v.status != Status::Attack) continue;
    out << "    scenario: " << v.scenario << "\n";
    for (const Transition& t : v.trace) {
      out << "    " << t.n << ". " << t.label << "  " << t.from.str() << " -> " << t.to.str() << "  "
          << to_string(t.delivery);
      if (t.delivery == Transition::Delivery::Replay && t.origin_seq) out << " of #" << *t.origin_seq;
      out << ": " << t.payload.str() << "\n";
    }
    out << "    " << style(color, "1", "reason:") << " " << v.reason << "\n";
  }
  if (stats) out << "total " << r.states << " states, " << fixed(r.millis) << " ms\n";
  return out.str();
}

std::string render_json(const Report& r, bool stats) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["model"] = r.model;
  doc["sessions"] = r.sessions;
  doc["depth"] = r.depth;
  ordered_json goals = ordered_json::array();
  for (const Verdict& v : r.goals) {
    ordered_json g;
    g["id"] = v.goal_id;
    g["kind"] = to_string(v.kind);
    g["status"] = to_string(v.status);
    if (v.status == Status::Attack) {
      ordered_json trace = ordered_json::array();
      for (const Transition& t : v.trace) {
        ordered_json step;
        step["n"] = t.n;
        step["label"] = t.label;
        step["from"] = t.from.str();
        step["to"] = t.to.str();
        step["delivery"] = to_string(t.delivery);
        if (t.origin_seq) step["origin_seq"] = *t.origin_seq;
        trace.push_back(std::move(step));
      }
      g["trace"] = std::move(trace);
    }
    if (v.status == Status::Unknown) g["explored_depth"] = v.explored_depth;
    g["states"] = v.states;
    if (stats) g["millis"] = v.millis;
    goals.push_back(std::move(g));
  }
  doc["goals"] = std::move(goals);
  return doc.dump(2) + "\n";
}

}  // namespace anbv
