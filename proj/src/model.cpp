#include "anbv/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace anbv {

std::string Diagnostic::str() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " +
         (severity == Severity::Error ? "error: " : "warning: ") + message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

const char* arrow_of(Channel c) {
  switch (c) {
    case Channel::Plain: return "->";
    case Channel::Secure: return "*->*";
    case Channel::Authentic: return "*->";
    case Channel::Confidential: return "->*";
  }
  return "->";
}

const char* to_string(GoalKind k) {
  switch (k) {
    case GoalKind::Secrecy: return "secrecy";
    case GoalKind::WeakAuth: return "weak-auth";
    case GoalKind::StrongAuth: return "strong-auth";
  }
  return "?";
}

std::vector<Term> Goal::components() const {
  if (payload.is_tuple()) return {payload.args().begin(), payload.args().end()};
  return {payload};
}

const AgentDecl* Protocol::agent(const std::string& n) const {
  auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentDecl& a) { return a.name == n; });
  return it == agents.end() ? nullptr : &*it;
}

const FunctionDecl* Protocol::function(const std::string& n) const {
  auto it = std::find_if(functions.begin(), functions.end(), [&](const FunctionDecl& f) { return f.name == n; });
  return it == functions.end() ? nullptr : &*it;
}

const Definition* Protocol::definition(const std::string& n) const {
  auto it = std::find_if(definitions.begin(), definitions.end(), [&](const Definition& d) { return d.name == n; });
  return it == definitions.end() ? nullptr : &*it;
}

const RoleKnowledge* Protocol::knowledge_of(const std::string& role) const {
  auto it = std::find_if(knowledge.begin(), knowledge.end(), [&](const RoleKnowledge& k) { return k.role == role; });
  return it == knowledge.end() ? nullptr : &*it;
}

bool Protocol::is_number(const std::string& n) const {
  return std::find(numbers.begin(), numbers.end(), n) != numbers.end();
}

Term Protocol::role_term(const std::string& role) const {
  const AgentDecl* a = agent(role);
  if (a && a->trusted) return Term::atom(role, AtomKind::Trusted);
  return Term::variable(role);
}

TypeEnv Protocol::variable_types() const {
  TypeEnv env;
  for (const AgentDecl& a : agents) {
    if (!a.trusted) env[a.name] = SlotType::Agent;
  }
  for (const std::string& n : numbers) env[n] = SlotType::Number;
  return env;
}

std::vector<std::string> Protocol::public_functions() const {
  std::vector<std::string> out;
  for (const FunctionDecl& f : functions) {
    bool everywhere = !agents.empty();
    for (const AgentDecl& a : agents) {
      const RoleKnowledge* k = knowledge_of(a.name);
      if (!k || std::none_of(k->items.begin(), k->items.end(),
                             [&](const KnowledgeItem& it) { return !it.term && it.function == f.name; })) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) out.push_back(f.name);
  }
  return out;
}

namespace {

bool same_term(const std::optional<Term>& a, const std::optional<Term>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

}  // namespace

bool same_structure(const Protocol& a, const Protocol& b) {
  if (a.name != b.name || a.agents != b.agents || a.numbers != b.numbers || a.functions != b.functions) return false;
  if (a.definitions.size() != b.definitions.size() || a.knowledge.size() != b.knowledge.size() ||
      a.constraints.size() != b.constraints.size() || a.actions.size() != b.actions.size() ||
      a.goals.size() != b.goals.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.definitions.size(); ++i) {
    if (a.definitions[i].name != b.definitions[i].name || !(a.definitions[i].body == b.definitions[i].body)) return false;
  }
  for (std::size_t i = 0; i < a.knowledge.size(); ++i) {
    const auto& x = a.knowledge[i];
    const auto& y = b.knowledge[i];
    if (x.role != y.role || x.items.size() != y.items.size()) return false;
    for (std::size_t j = 0; j < x.items.size(); ++j) {
      if (!same_term(x.items[j].term, y.items[j].term) || x.items[j].function != y.items[j].function) return false;
    }
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    if (a.constraints[i].left != b.constraints[i].left || a.constraints[i].right != b.constraints[i].right) return false;
  }
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    const auto& x = a.actions[i];
    const auto& y = b.actions[i];
    if (x.label != y.label || x.sender != y.sender || x.receiver != y.receiver || x.channel != y.channel ||
        !(x.message == y.message)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.goals.size(); ++i) {
    const auto& x = a.goals[i];
    const auto& y = b.goals[i];
    if (x.id != y.id || x.kind != y.kind || !(x.payload == y.payload) || x.parties != y.parties ||
        x.authenticator != y.authenticator || x.peer != y.peer) {
      return false;
    }
  }
  return true;
}

bool carries(const Term& message, const Term& payload) {
  if (message.contains(payload)) return true;
  if (!payload.is_tuple()) return false;
  return std::all_of(payload.args().begin(), payload.args().end(),
                     [&](const Term& c) { return message.contains(c); });
}

namespace {

Diagnostic diag_at(const SourcePos& pos, std::string message,
                   Diagnostic::Severity sev = Diagnostic::Severity::Error) {
  return Diagnostic{sev, std::move(message), std::max(pos.line, 1), std::max(pos.column, 1)};
}

void visit_applications(const Term& t, const std::function<void(const Term&)>& f) {
  if (t.is_fnapp()) f(t);
  for (const Term& c : t.args()) visit_applications(c, f);
}

// Every term of the protocol with the position of the item holding it.
void for_each_term(const Protocol& p, const std::function<void(const Term&, const SourcePos&)>& f) {
  for (const Definition& d : p.definitions) f(d.body, d.pos);
  for (const RoleKnowledge& k : p.knowledge) {
    for (const KnowledgeItem& it : k.items) {
      if (it.term) f(*it.term, k.pos);
    }
  }
  for (const Action& a : p.actions) f(a.message, a.pos);
  for (const Goal& g : p.goals) f(g.payload, g.pos);
}

// Returns the definition names forming a cycle through `start`, if any.
std::vector<std::string> find_cycle(const Protocol& p, const std::string& start) {
  std::vector<std::string> stack;
  std::set<std::string> done;
  std::function<bool(const std::string&)> dfs = [&](const std::string& name) -> bool {
    if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
      stack.push_back(name);
      return true;
    }
    if (done.contains(name)) return false;
    const Definition* d = p.definition(name);
    if (!d) return false;
    stack.push_back(name);
    for (const Term& v : variables_of(d->body)) {
      if (dfs(v.name())) return true;
    }
    stack.pop_back();
    done.insert(name);
    return false;
  };
  if (!dfs(start)) return {};
  auto first = std::find(stack.begin(), stack.end(), stack.back());
  return {first, stack.end()};
}

std::string join(const std::vector<std::string>& names, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

}  // namespace

std::vector<Diagnostic> infer_arities(Protocol& p) {
  std::vector<Diagnostic> diags;
  std::map<std::string, int> seen;
  for_each_term(p, [&](const Term& t, const SourcePos& pos) {
    visit_applications(t, [&](const Term& app) {
      const int arity = static_cast<int>(app.args().size());
      auto [it, inserted] = seen.emplace(app.name(), arity);
      if (!inserted && it->second != arity) {
        diags.push_back(diag_at(pos, "function '" + app.name() + "' applied to " + std::to_string(arity) +
                                         " arguments, earlier to " + std::to_string(it->second)));
      }
    });
  });
  for (FunctionDecl& f : p.functions) {
    auto it = seen.find(f.name);
    f.arity = it == seen.end() ? -1 : it->second;
  }
  return diags;
}

std::vector<Diagnostic> validate(const Protocol& p) {
  std::vector<Diagnostic> diags;
  auto error = [&](const SourcePos& pos, std::string msg) { diags.push_back(diag_at(pos, std::move(msg))); };

  std::set<std::string> declared;
  auto declare = [&](const std::string& name) {
    if (!declared.insert(name).second) error({}, "identifier '" + name + "' declared more than once");
  };
  for (const AgentDecl& a : p.agents) declare(a.name);
  for (const std::string& n : p.numbers) declare(n);
  for (const FunctionDecl& f : p.functions) declare(f.name);
  for (const Definition& d : p.definitions) declare(d.name);

  auto is_agent = [&](const std::string& n) { return p.agent(n) != nullptr; };
  auto check_agent = [&](const std::string& n, const SourcePos& pos, const char* what) {
    if (!is_agent(n)) error(pos, std::string(what) + " '" + n + "' is not a declared agent");
  };

  for_each_term(p, [&](const Term& t, const SourcePos& pos) {
    for (const Term& v : variables_of(t)) {
      const std::string& n = v.name();
      if (p.function(n)) {
        error(pos, "function '" + n + "' used without arguments");
      } else if (!is_agent(n) && !p.is_number(n) && !p.definition(n)) {
        error(pos, "undeclared identifier '" + n + "'");
      }
    }
    visit_applications(t, [&](const Term& app) {
      if (!p.function(app.name())) error(pos, "undeclared function '" + app.name() + "'");
    });
  });

  Protocol copy = p;
  for (Diagnostic& d : infer_arities(copy)) diags.push_back(std::move(d));

  bool cyclic = false;
  std::set<std::string> reported;
  for (const Definition& d : p.definitions) {
    auto cycle = find_cycle(p, d.name);
    if (cycle.empty()) continue;
    cyclic = true;
    std::vector<std::string> key(cycle.begin(), cycle.end() - 1);
    std::sort(key.begin(), key.end());
    if (reported.insert(join(key, ",")).second) error(d.pos, "cyclic definitions: " + join(cycle, " -> "));
  }

  for (const RoleKnowledge& k : p.knowledge) {
    check_agent(k.role, k.pos, "knowledge role");
    for (const KnowledgeItem& it : k.items) {
      if (!it.term && !p.function(it.function)) error(k.pos, "undeclared function '" + it.function + "'");
    }
  }
  for (const InequalityConstraint& c : p.constraints) {
    check_agent(c.left, c.pos, "constraint side");
    check_agent(c.right, c.pos, "constraint side");
    if (c.left == c.right) error(c.pos, "constraint " + c.left + "!=" + c.right + " can never hold");
    const AgentDecl* l = p.agent(c.left);
    const AgentDecl* r = p.agent(c.right);
    if (l && r && l->trusted && r->trusted && c.left != c.right) {
      error(c.pos, "constraint " + c.left + "!=" + c.right + " names trusted constants on both sides");
    }
  }

  std::set<std::string> labels;
  for (const Action& a : p.actions) {
    check_agent(a.sender, a.pos, "sender");
    check_agent(a.receiver, a.pos, "receiver");
    if (a.sender == a.receiver) error(a.pos, "action " + a.label + " sends from " + a.sender + " to itself");
    if (a.channel == Channel::Authentic || a.channel == Channel::Confidential) {
      error(a.pos, std::string("unsupported channel '") + arrow_of(a.channel) + "' in action " + a.label);
    }
    if (!labels.insert(a.label).second) error(a.pos, "duplicate action label '" + a.label + "'");
  }

  std::optional<Protocol> expanded;
  if (!cyclic) expanded = expand_definitions(p);

  std::set<std::string> goal_ids;
  for (std::size_t gi = 0; gi < p.goals.size(); ++gi) {
    const Goal& g = p.goals[gi];
    if (!goal_ids.insert(g.id).second) error(g.pos, "duplicate goal id '" + g.id + "'");
    if (g.kind == GoalKind::Secrecy) {
      if (g.parties.empty()) error(g.pos, "secrecy goal " + g.id + " lists no agents");
      for (const std::string& party : g.parties) check_agent(party, g.pos, "secrecy party");
    } else {
      check_agent(g.authenticator, g.pos, "authenticator");
      check_agent(g.peer, g.pos, "authenticated peer");
      if (g.authenticator == g.peer) error(g.pos, "goal " + g.id + " authenticates a role against itself");
    }
    if (!expanded) continue;
    const Goal& eg = expanded->goals[gi];
    for (const Term& c : eg.components()) {
      const bool sent = std::any_of(expanded->actions.begin(), expanded->actions.end(),
                                    [&](const Action& a) { return a.message.contains(c); });
      if (!sent) error(g.pos, "goal " + g.id + " is unrealizable: " + c.str() + " is never sent");
    }
  }
  return diags;
}

Protocol expand_definitions(const Protocol& p) {
  std::map<std::string, Term> memo;
  std::vector<std::string> stack;
  std::function<Term(const Term&)> expand = [&](const Term& t) -> Term {
    if (t.is_variable()) {
      const Definition* d = p.definition(t.name());
      if (!d) return t;
      if (auto it = memo.find(d->name); it != memo.end()) return it->second;
      if (std::find(stack.begin(), stack.end(), d->name) != stack.end()) {
        auto first = std::find(stack.begin(), stack.end(), d->name);
        std::vector<std::string> cycle(first, stack.end());
        cycle.push_back(d->name);
        throw DefinitionCycle("cyclic definitions: " + join(cycle, " -> "));
      }
      stack.push_back(d->name);
      Term body = expand(d->body);
      stack.pop_back();
      memo.emplace(d->name, body);
      return body;
    }
    if (t.is_ground() || t.args().empty()) return t;
    std::vector<Term> parts;
    for (const Term& c : t.args()) parts.push_back(expand(c));
    return t.is_tuple() ? Term::tuple(std::move(parts)) : Term::apply(t.name(), std::move(parts));
  };

  Protocol out = p;
  for (const Definition& d : p.definitions) expand(Term::variable(d.name));
  out.definitions.clear();
  for (RoleKnowledge& k : out.knowledge) {
    for (KnowledgeItem& it : k.items) {
      if (it.term) it.term = expand(*it.term);
    }
  }
  for (Action& a : out.actions) a.message = expand(a.message);
  for (Goal& g : out.goals) g.payload = expand(g.payload);
  return out;
}

}  // namespace anbv
