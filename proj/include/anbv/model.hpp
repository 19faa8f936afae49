#ifndef ANBV_MODEL_HPP
#define ANBV_MODEL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anbv/pattern.hpp"
#include "anbv/term.hpp"

namespace anbv {

struct SourcePos {
  int line = 0;  // 0 when the item was not parsed from text
  int column = 0;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;
  int column = 1;

  std::string str() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);

struct AgentDecl {
  std::string name;
  bool trusted = false;  // lower-case initial
  friend bool operator==(const AgentDecl&, const AgentDecl&) = default;
};

struct FunctionDecl {
  std::string name;
  int arity = -1;  // inferred from first application; -1 while unused
  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

struct Definition {
  std::string name;
  Term body;
  SourcePos pos;
};

/// One entry of a role's initial knowledge: a term or a bare function symbol.
struct KnowledgeItem {
  std::optional<Term> term;
  std::string function;
};

struct RoleKnowledge {
  std::string role;
  std::vector<KnowledgeItem> items;
  SourcePos pos;
};

struct InequalityConstraint {
  std::string left;
  std::string right;
  SourcePos pos;
};

enum class Channel { Plain, Secure, Authentic, Confidential };
const char* arrow_of(Channel c);

struct Action {
  std::string label;
  std::string sender;
  std::string receiver;
  Channel channel = Channel::Secure;
  Term message;
  SourcePos pos;
};

enum class GoalKind { Secrecy, WeakAuth, StrongAuth };
const char* to_string(GoalKind k);

struct Goal {
  std::string id;
  GoalKind kind = GoalKind::Secrecy;
  Term payload;
  std::vector<std::string> parties;  // secrecy only
  std::string authenticator;         // auth only: "A authenticates B on M" has A here
  std::string peer;                  // ... and B here
  SourcePos pos;

  /// Secrecy of a tuple payload means secrecy of each component.
  std::vector<Term> components() const;
};

struct Protocol {
  std::string name;
  std::vector<AgentDecl> agents;
  std::vector<std::string> numbers;
  std::vector<FunctionDecl> functions;
  std::vector<Definition> definitions;
  std::vector<RoleKnowledge> knowledge;
  std::vector<InequalityConstraint> constraints;
  std::vector<Action> actions;
  std::vector<Goal> goals;

  const AgentDecl* agent(const std::string& name) const;
  const FunctionDecl* function(const std::string& name) const;
  const Definition* definition(const std::string& name) const;
  const RoleKnowledge* knowledge_of(const std::string& role) const;
  bool is_number(const std::string& name) const;

  /// The term a role name denotes inside templates.
  Term role_term(const std::string& role) const;
  /// Slot types for every role variable and number.
  TypeEnv variable_types() const;
  /// Functions listed in the knowledge of every role; the intruder holds them too.
  std::vector<std::string> public_functions() const;
};

/// Structural equality, ignoring source positions.
bool same_structure(const Protocol& a, const Protocol& b);

/// Static checks. Reports undeclared identifiers, duplicate labels and
/// declarations, definition cycles, ill-formed constraints, arity clashes,
/// unsupported channels, and goals whose payload no action ever carries.
std::vector<Diagnostic> validate(const Protocol& p);

class DefinitionCycle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replaces every definition reference in definitions, knowledge, actions and
/// goals by its body, recursively. Throws DefinitionCycle naming the cycle.
Protocol expand_definitions(const Protocol& p);

/// Fills FunctionDecl::arity from first use; returns clash diagnostics.
std::vector<Diagnostic> infer_arities(Protocol& p);

/// Whether every component of `payload` occurs in `message`.
bool carries(const Term& message, const Term& payload);

}  // namespace anbv

#endif  // ANBV_MODEL_HPP
