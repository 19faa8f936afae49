#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <random>

#include "anbv/pattern.hpp"

using anbv::AtomKind;
using anbv::KnowledgeSet;
using anbv::Pattern;
using anbv::SlotType;
using anbv::Substitution;
using anbv::Term;

namespace {

Term var(const char* n) { return Term::variable(n); }
Term agent(const char* n) { return Term::atom(n, AtomKind::Honest); }
Term trusted(const char* n) { return Term::atom(n, AtomKind::Trusted); }
Term pub(const char* n) { return Term::atom(n, AtomKind::Public); }
Term fn(const char* f, std::vector<Term> args) { return Term::apply(f, std::move(args)); }
Term tup(std::vector<Term> items) { return Term::tuple(std::move(items)); }

const anbv::TypeEnv kTypes = {{"AISP", SlotType::Agent}, {"PSU", SlotType::Agent}, {"X", SlotType::Any},
                              {"Y", SlotType::Any},      {"N", SlotType::Number}};

}  // namespace

TEST_CASE("substitution keeps entries sorted and overwrites") {
  Substitution s;
  s.bind(var("Y"), pub("b"));
  s.bind(var("X"), pub("a"));
  s.bind(var("Y"), pub("c"));
  REQUIRE(s.size() == 2);
  CHECK(*s.find(var("Y")) == pub("c"));
  CHECK(s.entries()[0].first < s.entries()[1].first);
}

TEST_CASE("substitute replaces opaque slots whole and reports unbound variables") {
  Substitution s;
  Term blob = fn("f", {var("X")});
  s.bind(blob, pub("v"));
  CHECK(*anbv::substitute(tup({blob, pub("a")}), s) == tup({pub("v"), pub("a")}));
  CHECK_FALSE(anbv::substitute(var("X"), s).has_value());
  s.bind(var("X"), pub("x"));
  CHECK(*anbv::substitute(fn("g", {var("X")}), s) == fn("g", {pub("x")}));
}

TEST_CASE("slot typing") {
  CHECK(anbv::admits(SlotType::Agent, agent("a1")));
  CHECK(anbv::admits(SlotType::Agent, Term::atom("i", AtomKind::Intruder)));
  CHECK_FALSE(anbv::admits(SlotType::Agent, pub("c")));
  CHECK(anbv::admits(SlotType::Number, Term::fresh("N", 1, "A")));
  CHECK(anbv::admits(SlotType::Number, pub("c")));
  CHECK_FALSE(anbv::admits(SlotType::Number, fn("f", {pub("c")})));
  CHECK(anbv::admits(SlotType::Any, fn("f", {pub("c")})));
}

TEST_CASE("server-side function the receiver cannot recompute collapses to one slot") {
  KnowledgeSet k{var("AISP"), trusted("aspspA"), trusted("aspspR")};
  k.add_function("fEndpoint", 1);
  Term token = fn("fClientCredToken", {var("AISP")});
  Pattern p = anbv::recognizable_pattern(k, {var("AISP")}, token, kTypes);
  CHECK(p == Pattern::bind(token, SlotType::Any));
}

TEST_CASE("identity then secret: bind first, check after") {
  KnowledgeSet k{trusted("aspspA"), trusted("aspspR")};
  k.add_function("fAISPSecret", 1);
  Term msg = tup({var("AISP"), fn("fAISPSecret", {var("AISP")})});
  Pattern p = anbv::recognizable_pattern(k, {}, msg, kTypes);
  CHECK(p == Pattern::tuple({Pattern::bind(var("AISP"), SlotType::Agent),
                             Pattern::check(fn("fAISPSecret", {var("AISP")}))}));

  auto ok = anbv::match_pattern(p, tup({agent("a1"), fn("fAISPSecret", {agent("a1")})}), {});
  REQUIRE(ok);
  CHECK(*ok->find(var("AISP")) == agent("a1"));
  CHECK_FALSE(anbv::match_pattern(p, tup({agent("a1"), fn("fAISPSecret", {agent("p1")})}), {}));
}

TEST_CASE("known ground constant is checked") {
  KnowledgeSet k{pub("c")};
  CHECK(anbv::recognizable_pattern(k, {}, pub("c"), kTypes) == Pattern::check(pub("c")));
}

TEST_CASE("undeclared variable is a malformed template") {
  CHECK_THROWS_AS(anbv::recognizable_pattern({}, {}, var("Q"), kTypes), anbv::MalformedTemplate);
}

TEST_CASE("match examples") {
  Term intent = fn("fCreateIntent", {fn("fClientCredToken", {agent("a1")}), Term::fresh("N", 1, "PSU")});
  auto m = anbv::match_pattern(Pattern::bind(var("X"), SlotType::Any), intent, {});
  REQUIRE(m);
  CHECK(*m->find(var("X")) == intent);

  Pattern shaped = Pattern::tuple({Pattern::check(pub("n1")), Pattern::bind(var("X"), SlotType::Any)});
  CHECK_FALSE(anbv::match_pattern(shaped, intent, {}));
  CHECK_FALSE(anbv::match_pattern(shaped, tup({pub("n1"), pub("a"), pub("b")}), {}));
  CHECK(anbv::match_pattern(shaped, tup({pub("n1"), pub("a")}), {}));
}

TEST_CASE("repeated variable must match equal terms") {
  Pattern p = anbv::recognizable_pattern({}, {}, tup({var("X"), var("X")}), kTypes);
  CHECK(p.binds().size() == 1);
  CHECK(anbv::match_pattern(p, tup({pub("a"), pub("a")}), {}));
  CHECK_FALSE(anbv::match_pattern(p, tup({pub("a"), pub("b")}), {}));
}

TEST_CASE("prior bindings feed checks and are never modified") {
  Substitution prior;
  prior.bind(var("X"), pub("a"));
  Substitution copy = prior;
  Pattern p = anbv::recognizable_pattern({}, {var("X")}, tup({var("X"), var("Y")}), kTypes);
  CHECK_FALSE(anbv::match_pattern(p, tup({pub("b"), pub("c")}), prior));
  auto ok = anbv::match_pattern(p, tup({pub("a"), pub("c")}), prior);
  REQUIRE(ok);
  CHECK(*ok->find(var("Y")) == pub("c"));
  CHECK(prior == copy);
}

TEST_CASE("number slots reject non-numbers") {
  Pattern p = anbv::recognizable_pattern({}, {}, tup({var("N"), var("X")}), kTypes);
  CHECK(anbv::match_pattern(p, tup({Term::fresh("N", 2, "A"), pub("x")}), {}));
  CHECK_FALSE(anbv::match_pattern(p, tup({fn("f", {pub("c")}), pub("x")}), {}));
}

TEST_CASE("a single bind accepts every ground payload") {
  std::mt19937 rng(5);
  std::vector<Term> leaves = {pub("a"), agent("b1"), Term::fresh("N", 1, "A"), trusted("s")};
  Pattern any = Pattern::bind(var("X"), SlotType::Any);
  std::function<Term(int)> gen = [&](int d) -> Term {
    if (d <= 1 || rng() % 3 == 0) return leaves[rng() % leaves.size()];
    if (rng() % 2) return fn("f", {gen(d - 1)});
    return tup({gen(d - 1), gen(d - 1)});
  };
  for (int n = 0; n < 500; ++n) {
    Term t = gen(4);
    auto m = anbv::match_pattern(any, t, {});
    REQUIRE(m);
    CHECK(*m->find(var("X")) == t);
  }
}

TEST_CASE("pattern round trip: matching an instance recovers consistent bindings") {
  std::mt19937 rng(99);
  std::vector<Term> vars = {var("X"), var("Y"), var("AISP")};
  std::vector<Term> values = {agent("a1"), agent("p1"), trusted("s")};
  std::vector<Term> consts = {pub("c"), trusted("s")};
  const char* fns[] = {"f", "g"};
  std::function<Term(int)> gen = [&](int d) -> Term {
    if (d <= 1 || rng() % 3 == 0) {
      if (rng() % 3 == 0) return consts[rng() % consts.size()];
      return vars[rng() % vars.size()];
    }
    if (rng() % 2) return fn(fns[rng() % 2], {gen(d - 1)});
    return tup({gen(d - 1), gen(d - 1)});
  };
  int checked = 0;
  for (int n = 0; n < 400; ++n) {
    Term msg = gen(4);
    Substitution sigma;
    for (std::size_t v = 0; v < vars.size(); ++v) sigma.bind(vars[v], values[(v + n) % values.size()]);
    auto payload = anbv::substitute(msg, sigma);
    REQUIRE(payload);

    KnowledgeSet k{pub("c"), trusted("s")};
    if (rng() % 2) k.add_function("f", 1);
    if (rng() % 2) k.add_function("g", 1);
    std::set<Term> bound;
    Substitution prior;
    for (const Term& v : vars) {
      if (rng() % 3 == 0) {
        bound.insert(v);
        k.add(v);
        prior.bind(v, *sigma.find(v));
      }
    }
    Pattern p = anbv::recognizable_pattern(k, bound, msg, kTypes);
    auto m = anbv::match_pattern(p, *payload, prior);
    CAPTURE(msg.str());
    CAPTURE(p.str());
    REQUIRE(m);
    for (const auto& [slot, value] : m->entries()) {
      auto expected = anbv::substitute(slot, sigma);
      REQUIRE(expected);
      CHECK(*expected == value);
    }
    ++checked;
  }
  CHECK(checked == 400);
}
