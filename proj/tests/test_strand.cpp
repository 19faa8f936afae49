#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "anbv/models.hpp"
#include "anbv/parser.hpp"
#include "anbv/strand.hpp"

using anbv::Event;
using anbv::FactEmission;
using anbv::FactKind;
using anbv::ProjectResult;
using anbv::RoleStrand;
using anbv::Term;

namespace {

anbv::Protocol load(const std::string& name) {
  anbv::ParseResult r = anbv::parse(anbv::builtin(name));
  REQUIRE(r.ok());
  return *r.protocol;
}

anbv::Protocol from_text(const std::string& text) {
  anbv::ParseResult r = anbv::parse({text, "test"});
  REQUIRE(r.protocol);
  return *r.protocol;
}

const Event* event(const RoleStrand& s, const std::string& label) {
  for (const Event& e : s.events) {
    if (e.action_label == label) return &e;
  }
  return nullptr;
}

// emission of `kind` for `goal` in a strand, with the label where it sits
std::vector<std::pair<std::string, FactEmission>> emissions(const RoleStrand& s, const std::string& goal, FactKind kind) {
  std::vector<std::pair<std::string, FactEmission>> out;
  for (const Event& e : s.events) {
    for (const FactEmission& f : e.facts) {
      if (f.goal_id == goal && f.kind == kind) out.emplace_back(e.action_label, f);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("base model projects to four strands in action order") {
  ProjectResult r = anbv::compile(load("atp-base"));
  REQUIRE(r.ok());
  REQUIRE(r.strands.size() == 4);
  const RoleStrand* psu = r.strand("PSU");
  REQUIRE(psu);
  std::vector<std::pair<Event::Kind, std::string>> got;
  for (const Event& e : psu->events) got.emplace_back(e.kind, e.action_label);
  using K = Event::Kind;
  std::vector<std::pair<Event::Kind, std::string>> want = {
      {K::Send, "A1.1"}, {K::Receive, "A3.1.1"}, {K::Send, "A3.1.2"}, {K::Receive, "A3.2.3"},
      {K::Send, "A3.2.4"}, {K::Receive, "A3.3.1"}, {K::Send, "A3.3.2"}};
  CHECK(got == want);

  // every action appears once as a send and once as a receive
  const anbv::Protocol p = anbv::expand_definitions(load("atp-base"));
  for (const anbv::Action& a : p.actions) {
    const Event* s = event(*r.strand(a.sender), a.label);
    const Event* v = event(*r.strand(a.receiver), a.label);
    REQUIRE(s);
    REQUIRE(v);
    CHECK(s->kind == K::Send);
    CHECK(v->kind == K::Receive);
  }
}

TEST_CASE("numbers are minted by their first sender") {
  ProjectResult r = anbv::compile(load("atp-base"));
  const Event* a11 = event(*r.strand("PSU"), "A1.1");
  REQUIRE(a11);
  CHECK(a11->fresh == std::vector<Term>{Term::variable("IntentAgreement")});
  const Event* a324 = event(*r.strand("PSU"), "A3.2.4");
  CHECK(a324->fresh == std::vector<Term>{Term::variable("SelectedAccounts")});
  const Event* a23 = event(*r.strand("AISP"), "A2.3");
  CHECK(a23->fresh.empty());

  ProjectResult fixed = anbv::compile(load("atp-fixed"));
  CHECK(event(*fixed.strand("AISP"), "A4.1")->fresh == std::vector<Term>{Term::variable("NAISP")});
}

TEST_CASE("sending a function the role does not hold is not executable") {
  std::string text = anbv::builtin("atp-base").text;
  text.replace(text.find("AISP *->* aspspA: AISP, fAISPSecret(AISP)  #A2.1"),
               std::string("AISP *->* aspspA: AISP, fAISPSecret(AISP)  #A2.1").size(),
               "AISP *->* aspspA: AISP, fPSUSecret(PSU)  #A2.1");
  ProjectResult r = anbv::compile(from_text(text));
  CHECK_FALSE(r.ok());
  bool named = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [](const anbv::Diagnostic& d) {
    return d.message.find("role AISP cannot compose fPSUSecret(PSU) in action A2.1") != std::string::npos;
  });
  CHECK(named);
}

TEST_CASE("addressing a role whose identity is unknown is not executable") {
  const char* text =
      "Protocol: T\nTypes:\n  Agent A, B, C;\n  Number N;\nKnowledge:\n  A: A, B;\n  B: B, A;\n  C: C;\n"
      "Actions:\n  A *->* B: N  #X1\n  B *->* C: N  #X2\n  C *->* A: N  #X3\nGoals:\n  N secret between A, B  #G1\n";
  ProjectResult r = anbv::compile(from_text(text));
  CHECK_FALSE(r.ok());
  bool named = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [](const anbv::Diagnostic& d) {
    return d.message.find("role B cannot address C in action X2") != std::string::npos;
  });
  CHECK(named);
}

TEST_CASE("G4: witness before PSU is known in the base model, after in the fix") {
  ProjectResult base = anbv::compile(load("atp-base"));
  auto w = emissions(*base.strand("aspspR"), "G4", FactKind::Witness);
  REQUIRE(w.size() == 1);
  CHECK(w[0].first == "A3.2.2");
  CHECK_FALSE(w[0].second.peer.has_value());
  auto q = emissions(*base.strand("PSU"), "G4", FactKind::Request);
  REQUIRE(q.size() == 1);
  CHECK(q[0].first == "A3.2.3");
  CHECK(q[0].second.peer == base.strand("aspspR")->role_term);

  ProjectResult fix = anbv::compile(load("atp-g4fix"));
  auto wf = emissions(*fix.strand("aspspR"), "G4", FactKind::Witness);
  REQUIRE(wf.size() == 1);
  CHECK(wf[0].first == "A3.2.2");
  CHECK(wf[0].second.peer == Term::variable("PSU"));
  // the fix hands PSU to aspspR at A2.3
  auto binds = event(*fix.strand("aspspR"), "A2.3")->pattern.binds();
  CHECK(std::find(binds.begin(), binds.end(), Term::variable("PSU")) != binds.end());
}

TEST_CASE("G8: witness and request both at A4.2") {
  ProjectResult r = anbv::compile(load("atp-base"));
  auto w = emissions(*r.strand("aspspR"), "G8", FactKind::Witness);
  auto q = emissions(*r.strand("AISP"), "G8", FactKind::Request);
  REQUIRE(w.size() == 1);
  REQUIRE(q.size() == 1);
  CHECK(w[0].first == "A4.2");
  CHECK(q[0].first == "A4.2");
  CHECK(w[0].second.payload_template == q[0].second.payload_template);
}

TEST_CASE("witness and request templates agree for every auth goal of every model") {
  for (const anbv::BuiltinModel& m : anbv::builtin_models()) {
    CAPTURE(m.name);
    anbv::Protocol p = anbv::expand_definitions(load(m.name));
    ProjectResult r = anbv::compile(p);
    REQUIRE(r.ok());
    for (const anbv::Goal& g : p.goals) {
      if (g.kind == anbv::GoalKind::Secrecy) {
        for (const std::string& party : g.parties) {
          auto s = emissions(*r.strand(party), g.id, FactKind::Secret);
          CHECK(s.size() == g.components().size());
        }
        continue;
      }
      auto w = emissions(*r.strand(g.peer), g.id, FactKind::Witness);
      auto q = emissions(*r.strand(g.authenticator), g.id, FactKind::Request);
      REQUIRE(w.size() == 1);
      REQUIRE(q.size() == 1);
      CHECK(w[0].second.payload_template == q[0].second.payload_template);
      CHECK(w[0].second.payload_template == g.payload);
    }
  }
}

TEST_CASE("knowledge grows along each strand and sends are ground in view") {
  for (const anbv::BuiltinModel& m : anbv::builtin_models()) {
    CAPTURE(m.name);
    ProjectResult r = anbv::compile(load(m.name));
    for (const RoleStrand& s : r.strands) {
      CAPTURE(s.role);
      const anbv::KnowledgeSet* prev = &s.initial_knowledge;
      const std::set<Term>* prev_bound = &s.initial_bound;
      for (const Event& e : s.events) {
        CHECK(prev->subset_of(e.knowledge));
        CHECK(std::includes(e.bound.begin(), e.bound.end(), prev_bound->begin(), prev_bound->end()));
        if (e.kind == Event::Kind::Send) {
          CHECK(anbv::ground_in_view(e.message, e.bound));
          CHECK(anbv::ground_in_view(e.counterpart_term, e.bound));
        }
        prev = &e.knowledge;
        prev_bound = &e.bound;
      }
    }
  }
}

TEST_CASE("receive patterns: replayable token, shaped nonce reply") {
  ProjectResult base = anbv::compile(load("atp-base"));
  const Event* a42 = event(*base.strand("AISP"), "A4.2");
  REQUIRE(a42);
  CHECK(a42->pattern.kind == anbv::Pattern::Kind::Bind);

  ProjectResult fixed = anbv::compile(load("atp-fixed"));
  const Event* f42 = event(*fixed.strand("AISP"), "A4.2");
  REQUIRE(f42->pattern.kind == anbv::Pattern::Kind::Tuple);
  REQUIRE(f42->pattern.items.size() == 2);
  CHECK(f42->pattern.items[0] == anbv::Pattern::check(Term::variable("NAISP")));
  CHECK(f42->pattern.items[1].kind == anbv::Pattern::Kind::Bind);

  // the first message to an unknown AISP binds the sender from the channel
  const Event* a21 = event(*base.strand("aspspA"), "A2.1");
  CHECK(a21->binds_counterpart);
  CHECK(a21->pattern.items.at(1) == anbv::Pattern::check(Term::apply("fAISPSecret", {Term::variable("AISP")})));
}

TEST_CASE("a goal whose peer never sends the payload is unrealizable") {
  const char* text =
      "Protocol: T\nTypes:\n  Agent A, s;\n  Number N;\n  Function f;\nKnowledge:\n  A: A, s, f;\n  s: s;\n"
      "Actions:\n  A *->* s: f(N)  #X1\n  s *->* A: f(N)  #X2\nGoals:\n  s authenticates A on N  #G1\n";
  ProjectResult r = anbv::compile(from_text(text));
  bool named = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [](const anbv::Diagnostic& d) {
    return d.message.find("goal G1 is unrealizable") != std::string::npos;
  });
  CHECK(named);
}

TEST_CASE("cyclic definitions surface as a diagnostic") {
  const char* text =
      "Protocol: T\nTypes:\n  Agent A, s;\n  Function f;\nDefinitions:\n  X: f(Y);\n  Y: f(X);\n"
      "Knowledge:\n  A: A, s, f;\n  s: s;\nActions:\n  A *->* s: X  #X1\nGoals:\n  X secret between A, s  #G1\n";
  ProjectResult r = anbv::compile(from_text(text));
  CHECK_FALSE(r.ok());
}
