#include "anbv/strand.hpp"

#include <algorithm>
#include <map>

namespace anbv {

const char* to_string(FactKind k) {
  switch (k) {
    case FactKind::Witness:
      return "witness";
    case FactKind::Request:
      return "request";
    case FactKind::Secret:
      return "secret";
  }
  return "?";
}

const RoleStrand* ProjectResult::strand(const std::string& role) const {
  for (const RoleStrand& s : strands) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

namespace {

Diagnostic error_at(const SourcePos& pos, std::string message) {
  Diagnostic d;
  d.message = std::move(message);
  d.line = std::max(pos.line, 1);
  d.column = std::max(pos.column, 1);
  return d;
}

bool executable(const KnowledgeSet& k, const std::set<Term>& bound, const Term& t) {
  return ground_in_view(t, bound) && derive(k, t);
}

// Smallest subterm that blocks composing `t`.
Term blocking_subterm(const KnowledgeSet& k, const std::set<Term>& bound, const Term& t) {
  if (executable(k, bound, t)) return t;
  if (t.is_tuple() || (t.is_fnapp() && k.holds(t.name()))) {
    for (const Term& c : t.args()) {
      if (!executable(k, bound, c)) return blocking_subterm(k, bound, c);
    }
  }
  return t;
}

}  // namespace

ProjectResult project(const Protocol& p) {
  ProjectResult out;
  const TypeEnv types = p.variable_types();
  const auto public_fns = p.public_functions();

  // number -> role that mints it
  std::map<std::string, std::string> minter;
  for (const Action& a : p.actions) {
    for (const Term& v : variables_of(a.message)) {
      if (p.is_number(v.name())) minter.emplace(v.name(), a.sender);
    }
  }

  for (const AgentDecl& agent : p.agents) {
    RoleStrand s;
    s.role = agent.name;
    s.role_term = p.role_term(agent.name);
    s.trusted = agent.trusted;

    KnowledgeSet k;
    std::set<Term> bound;
    k.add(s.role_term);
    if (s.role_term.is_variable()) bound.insert(s.role_term);
    for (const std::string& fn : public_fns) {
      const FunctionDecl* d = p.function(fn);
      k.add_function(fn, d ? d->arity : -1);
    }
    if (const RoleKnowledge* rk = p.knowledge_of(agent.name)) {
      for (const KnowledgeItem& item : rk->items) {
        if (item.term) {
          k.add(*item.term);
          for (const Term& v : variables_of(*item.term)) bound.insert(v);
        } else {
          const FunctionDecl* d = p.function(item.function);
          k.add_function(item.function, d ? d->arity : -1);
        }
      }
    }
    s.initial_knowledge = k;
    s.initial_bound = bound;

    for (const Action& a : p.actions) {
      if (a.sender == agent.name) {
        Event e;
        e.kind = Event::Kind::Send;
        e.action_label = a.label;
        e.counterpart = a.receiver;
        e.counterpart_term = p.role_term(a.receiver);
        e.channel = a.channel;
        e.message = a.message;
        for (const Term& v : variables_of(a.message)) {
          if (p.is_number(v.name()) && !bound.contains(v) && minter[v.name()] == agent.name) {
            e.fresh.push_back(v);
            bound.insert(v);
            k.add(v);
          }
        }
        if (!ground_in_view(e.counterpart_term, bound)) {
          out.diagnostics.push_back(error_at(a.pos, "role " + agent.name + " cannot address " + a.receiver +
                                                        " in action " + a.label + ": identity unknown"));
        }
        if (!executable(k, bound, a.message)) {
          Term blk = blocking_subterm(k, bound, a.message);
          out.diagnostics.push_back(error_at(a.pos, "role " + agent.name + " cannot compose " + blk.str() +
                                                        " in action " + a.label));
        }
        k.add(a.message);
        e.knowledge = k;
        e.bound = bound;
        s.events.push_back(std::move(e));
      } else if (a.receiver == agent.name) {
        Event e;
        e.kind = Event::Kind::Receive;
        e.action_label = a.label;
        e.counterpart = a.sender;
        e.counterpart_term = p.role_term(a.sender);
        e.channel = a.channel;
        e.message = a.message;
        if (e.counterpart_term.is_variable() && !bound.contains(e.counterpart_term)) {
          e.binds_counterpart = true;
          bound.insert(e.counterpart_term);
          k.add(e.counterpart_term);
        }
        try {
          e.pattern = recognizable_pattern(k, bound, a.message, types);
        } catch (const MalformedTemplate& ex) {
          out.diagnostics.push_back(error_at(a.pos, ex.what()));
        }
        for (const Term& b : e.pattern.binds()) {
          bound.insert(b);
          k.add(b);
        }
        k.add(a.message);
        e.knowledge = k;
        e.bound = bound;
        s.events.push_back(std::move(e));
      }
    }
    out.strands.push_back(std::move(s));
  }
  return out;
}

namespace {

RoleStrand* find_strand(std::vector<RoleStrand>& strands, const std::string& role) {
  for (RoleStrand& s : strands) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

}  // namespace

std::vector<Diagnostic> annotate_goals(std::vector<RoleStrand>& strands, const std::vector<Goal>& goals) {
  std::vector<Diagnostic> diags;
  for (const Goal& g : goals) {
    if (g.kind == GoalKind::Secrecy) {
      for (const std::string& role : g.parties) {
        RoleStrand* s = find_strand(strands, role);
        if (!s || s->events.empty()) continue;
        std::vector<Term> parties;
        for (const std::string& r : g.parties) {
          const RoleStrand* rs = find_strand(strands, r);
          if (rs) parties.push_back(rs->role_term);
        }
        for (const Term& c : g.components()) {
          auto in_view = [&](const Event& e) {
            if (!executable(e.knowledge, e.bound, c)) return false;
            const std::set<Term>& bound = e.bound;
            return std::all_of(parties.begin(), parties.end(),
                               [&](const Term& t) { return ground_in_view(t, bound); });
          };
          for (Event& e : s->events) {
            if (in_view(e)) {
              e.facts.push_back({FactKind::Secret, g.id, std::nullopt, c, parties});
              break;
            }
          }
        }
      }
      continue;
    }

    RoleStrand* auth = find_strand(strands, g.authenticator);
    RoleStrand* peer = find_strand(strands, g.peer);
    if (!auth || !peer) continue;

    Event* witness = nullptr;
    for (Event& e : peer->events) {
      if (e.kind == Event::Kind::Send && carries(e.message, g.payload)) {
        witness = &e;
        break;
      }
    }
    Event* request = nullptr;
    for (Event& e : auth->events) {
      if (e.kind == Event::Kind::Receive && carries(e.message, g.payload) && executable(e.knowledge, e.bound, g.payload)) {
        request = &e;
      }
    }
    if (!witness || !request) {
      diags.push_back(error_at(g.pos, "goal " + g.id + " is unrealizable: " +
                                          (witness ? g.authenticator + " never receives" : g.peer + " never sends") +
                                          " its payload"));
      continue;
    }
    std::optional<Term> wpeer;
    if (ground_in_view(auth->role_term, witness->bound)) wpeer = auth->role_term;
    witness->facts.push_back({FactKind::Witness, g.id, wpeer, g.payload, {}});
    std::optional<Term> rpeer;
    if (ground_in_view(peer->role_term, request->bound)) rpeer = peer->role_term;
    request->facts.push_back({FactKind::Request, g.id, rpeer, g.payload, {}});
  }
  return diags;
}

ProjectResult compile(const Protocol& p) {
  Protocol expanded;
  try {
    expanded = expand_definitions(p);
  } catch (const DefinitionCycle& ex) {
    ProjectResult r;
    r.diagnostics.push_back(error_at({}, ex.what()));
    return r;
  }
  ProjectResult r = project(expanded);
  auto more = annotate_goals(r.strands, expanded.goals);
  r.diagnostics.insert(r.diagnostics.end(), more.begin(), more.end());
  return r;
}

}  // namespace anbv
