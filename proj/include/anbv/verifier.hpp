#ifndef ANBV_VERIFIER_HPP
#define ANBV_VERIFIER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anbv/intruder.hpp"
#include "anbv/model.hpp"
#include "anbv/strand.hpp"

namespace anbv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One role-variable instantiation per session. Trusted constants are not
/// listed; they always play themselves.
struct Scenario {
  std::vector<std::map<std::string, Term>> sessions;

  std::string str() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Honest name used for a role variable: lower-case initial plus "1", or the
/// whole lower-cased role name when two roles share an initial.
std::map<std::string, Term> honest_candidates(const Protocol& p);

/// Every instantiation of the role variables over {honest candidate, i} per
/// session that satisfies the inequality constraints. The first role
/// variable (and the first session) varies fastest. Throws ConfigError
/// unless sessions is 1 or 2.
std::vector<Scenario> instantiate_scenarios(const Protocol& p, int sessions);

/// A protocol ready for search.
struct CompiledModel {
  Protocol protocol;  // definitions expanded
  std::vector<RoleStrand> strands;
};

/// Throws ConfigError carrying the first diagnostic when compilation fails.
CompiledModel compile_model(const Protocol& p);

struct Transition {
  enum class Delivery { Send, Direct, Replay, Composed };
  int n = 0;
  std::string label;
  Term from;
  Term to;
  Delivery delivery = Delivery::Send;
  std::optional<int> origin_seq;
  // enough to re-execute the step
  int instance = 0;
  Term payload;
};

const char* to_string(Transition::Delivery d);

struct Fact {
  FactKind kind = FactKind::Witness;
  int goal = 0;  // index into the protocol's goals
  Term owner;
  std::optional<Term> peer;
  Term payload;
  std::vector<Term> parties;
  std::string label;  // action where it was emitted
};

struct Violation {
  int goal = 0;
  std::string reason;
};

/// Runs one scenario: instances of every honest or trusted role per session
/// plus the intruder playing the rest.
class Engine {
 public:
  struct Instance {
    int session = 0;  // 1-based
    const RoleStrand* strand = nullptr;
    Term agent;
  };
  struct Local {
    int pc = 0;
    Substitution sigma;
  };
  struct State {
    std::vector<Local> locals;
    IntruderState intruder;
    std::shared_ptr<const std::vector<Fact>> facts;
  };
  struct Step {
    Transition transition;
    State next;
  };
  struct Key {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    friend bool operator==(const Key&, const Key&) = default;
  };

  Engine(const CompiledModel& model, Scenario scenario, int compose_depth = 2);

  const Scenario& scenario() const { return scenario_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<Term>& agents() const { return cfg_.agents; }
  const CompiledModel& model() const { return *model_; }

  State initial() const;
  /// Ordered by (instance index, delivery order); `depth` is the number of
  /// transitions already taken.
  std::vector<Step> successors(const State& st, int depth) const;
  bool finished(const State& st) const;
  /// Violations among goals whose index is set in `filter` (all when empty).
  std::vector<Violation> check_goals(const State& st, const std::vector<bool>& filter = {}) const;
  Key key(const State& st) const;

  /// Re-executes a trace from the initial state; nullopt if some step is not
  /// enabled.
  std::optional<State> replay(const std::vector<Transition>& trace) const;

 private:
  bool constraints_hold(const Instance& inst, const Substitution& sigma) const;
  void emit(const Instance& inst, const Event& ev, const Substitution& sigma, State& st) const;
  Expectation expectation(const State& st, std::size_t index) const;

  const CompiledModel* model_;
  Scenario scenario_;
  IntruderConfig cfg_;
  std::vector<Instance> instances_;
  std::vector<std::pair<Term, Term>> constraints_;  // role terms of each inequality
  KnowledgeSet intruder_initial_;
};

enum class Status { Safe, Attack, Unknown };
const char* to_string(Status s);

struct GoalFinding {
  std::vector<Transition> trace;
  std::string reason;
  std::uint64_t states = 0;  // states explored when the violation was found
};

struct ScenarioResult {
  std::map<int, GoalFinding> attacks;  // by goal index
  bool complete = false;       // no transition was cut off by the depth bound
  bool budget_exhausted = false;
  /// Deepest iteration that finished; goals without an attack hold up to it.
  int explored_depth = -1;
  std::uint64_t states = 0;
};

/// Iterative deepening over plies with a transposition table per iteration.
/// Each state is checked at its minimal depth, so every reported trace is a
/// shortest one. `budget` caps visited states (0 = unlimited).
ScenarioResult search(const Engine& engine, int max_depth, const std::vector<bool>& filter,
                      std::uint64_t budget = 0);

struct VerifyConfig {
  int sessions = 1;
  int max_depth = 20;
  std::vector<std::string> goal_filter;
  int workers = 1;
  int compose_depth = 2;
  std::uint64_t state_budget = 0;
};

struct Verdict {
  std::string goal_id;
  GoalKind kind = GoalKind::Secrecy;
  Status status = Status::Safe;
  std::vector<Transition> trace;
  std::string reason;
  std::string scenario;
  /// Unknown only: no scenario has an attack up to this many plies.
  int explored_depth = -1;
  std::uint64_t states = 0;
  double millis = 0;
};

struct Report {
  std::string model;
  int sessions = 1;
  int depth = 0;
  std::vector<Verdict> goals;  // natural order of goal ids
  std::uint64_t states = 0;
  double millis = 0;

  bool any_attack() const;
  const Verdict* goal(const std::string& id) const;
};

/// Natural ordering of identifiers: digit runs compare numerically.
bool natural_less(const std::string& a, const std::string& b);

/// Searches every scenario (in parallel when workers > 1) and aggregates per
/// goal: attack if any scenario breaks it (shortest trace, earliest scenario
/// on ties), safe if every search ran to completion, unknown otherwise.
/// Every attack trace is replayed before it is reported; a trace that fails
/// to reproduce its violation throws std::logic_error.
Report verify(const Protocol& p, const VerifyConfig& cfg);

/// Human-readable report; `color` adds ANSI styling, `stats` adds timings.
std::string render_text(const Report& r, bool color, bool stats);
/// JSON report with stable key order; `stats` adds timings.
std::string render_json(const Report& r, bool stats);

}  // namespace anbv

#endif  // ANBV_VERIFIER_HPP
