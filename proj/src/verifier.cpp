#include "anbv/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

namespace anbv {

const char* to_string(Transition::Delivery d) {
  switch (d) {
    case Transition::Delivery::Send:
      return "send";
    case Transition::Delivery::Direct:
      return "direct";
    case Transition::Delivery::Replay:
      return "replay";
    case Transition::Delivery::Composed:
      return "composed";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Safe:
      return "safe";
    case Status::Attack:
      return "attack";
    case Status::Unknown:
      return "unknown";
  }
  return "?";
}

std::string Scenario::str() const {
  std::string out;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    if (s) out += " | ";
    bool first = true;
    for (const auto& [role, agent] : sessions[s]) {
      if (!first) out += ", ";
      first = false;
      out += role + "=" + agent.name();
    }
  }
  return out;
}

// ---------------------------------------------------------------- scenarios

std::map<std::string, Term> honest_candidates(const Protocol& p) {
  std::map<char, int> initials;
  for (const AgentDecl& a : p.agents) {
    if (!a.trusted) ++initials[static_cast<char>(std::tolower(static_cast<unsigned char>(a.name[0])))];
  }
  std::map<std::string, Term> out;
  for (const AgentDecl& a : p.agents) {
    if (a.trusted) continue;
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(a.name[0])));
    std::string name;
    if (initials[c] == 1) {
      name = std::string(1, c) + "1";
    } else {
      for (char ch : a.name) name += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    out.emplace(a.name, Term::atom(name, AtomKind::Honest));
  }
  return out;
}

namespace {

std::optional<Term> constraint_value(const Protocol& p, const std::string& name,
                                     const std::map<std::string, Term>& session, const Substitution* sigma) {
  const AgentDecl* a = p.agent(name);
  if (!a) return std::nullopt;
  if (a->trusted) return Term::atom(name, AtomKind::Trusted);
  if (sigma) {
    if (const Term* v = sigma->find(Term::variable(name))) return *v;
  }
  auto it = session.find(name);
  if (it == session.end()) return std::nullopt;
  return it->second;
}

bool session_ok(const Protocol& p, const std::map<std::string, Term>& session, const Substitution* sigma) {
  for (const InequalityConstraint& c : p.constraints) {
    auto l = constraint_value(p, c.left, session, sigma);
    auto r = constraint_value(p, c.right, session, sigma);
    if (l && r && *l == *r) return false;
  }
  return true;
}

}  // namespace

std::vector<Scenario> instantiate_scenarios(const Protocol& p, int sessions) {
  if (sessions < 1 || sessions > 2) throw ConfigError("sessions must be 1 or 2");
  const auto honest = honest_candidates(p);
  std::vector<std::string> vars;
  for (const AgentDecl& a : p.agents) {
    if (!a.trusted) vars.push_back(a.name);
  }
  std::vector<std::map<std::string, Term>> singles;
  const std::size_t combos = std::size_t{1} << vars.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::map<std::string, Term> s;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      s.emplace(vars[v], (mask >> v) & 1 ? intruder_agent() : honest.at(vars[v]));
    }
    if (session_ok(p, s, nullptr)) singles.push_back(std::move(s));
  }
  std::vector<Scenario> out;
  if (sessions == 1) {
    for (auto& s : singles) out.push_back({{s}});
  } else {
    for (const auto& second : singles) {
      for (const auto& first : singles) out.push_back({{first, second}});
    }
  }
  return out;
}

CompiledModel compile_model(const Protocol& p) {
  for (const Diagnostic& d : validate(p)) {
    if (d.severity == Diagnostic::Severity::Error) throw ConfigError(d.str());
  }
  ProjectResult r = compile(p);
  for (const Diagnostic& d : r.diagnostics) {
    if (d.severity == Diagnostic::Severity::Error) throw ConfigError(d.str());
  }
  return {expand_definitions(p), std::move(r.strands)};
}

// ---------------------------------------------------------------- engine

Engine::Engine(const CompiledModel& model, Scenario scenario, int compose_depth)
    : model_(&model), scenario_(std::move(scenario)) {
  const Protocol& p = model.protocol;
  cfg_.compose_depth = compose_depth;

  std::set<Term> universe{intruder_agent()};
  for (const AgentDecl& a : p.agents) {
    if (a.trusted) universe.insert(Term::atom(a.name, AtomKind::Trusted));
  }
  for (const auto& session : scenario_.sessions) {
    for (const auto& [role, agent] : session) {
      universe.insert(agent);
      auto& dom = cfg_.domains[role];
      if (std::find(dom.begin(), dom.end(), agent) == dom.end()) dom.push_back(agent);
    }
  }
  for (auto& [role, dom] : cfg_.domains) {
    if (std::find(dom.begin(), dom.end(), intruder_agent()) == dom.end()) dom.push_back(intruder_agent());
  }
  cfg_.agents.assign(universe.begin(), universe.end());
  for (const InequalityConstraint& c : p.constraints) {
    if (p.agent(c.left) && p.agent(c.right)) constraints_.emplace_back(p.role_term(c.left), p.role_term(c.right));
  }

  for (const Term& a : cfg_.agents) intruder_initial_.add(a);
  intruder_initial_.add(intruder_constant());
  for (const std::string& fn : p.public_functions()) {
    const FunctionDecl* d = p.function(fn);
    intruder_initial_.add_function(fn, d ? d->arity : -1);
  }

  for (std::size_t s = 0; s < scenario_.sessions.size(); ++s) {
    const auto& session = scenario_.sessions[s];
    const int sid = static_cast<int>(s) + 1;
    for (const RoleStrand& strand : model.strands) {
      Term agent;
      if (strand.trusted) {
        agent = strand.role_term;
      } else {
        agent = session.at(strand.role);
      }
      if (agent == intruder_agent()) {
        // the intruder plays this role: it starts with the role's knowledge
        Substitution sigma;
        for (const auto& [role, value] : session) sigma.bind(Term::variable(role), value);
        for (const std::string& n : p.numbers) sigma.bind(Term::variable(n), Term::fresh(n, sid, strand.role));
        if (const RoleKnowledge* rk = p.knowledge_of(strand.role)) {
          for (const KnowledgeItem& item : rk->items) {
            if (item.term) {
              if (auto t = substitute(*item.term, sigma)) intruder_initial_.add(*t);
            } else {
              const FunctionDecl* d = p.function(item.function);
              intruder_initial_.add_function(item.function, d ? d->arity : -1);
            }
          }
        }
        continue;
      }
      instances_.push_back({sid, &strand, agent});
    }
  }
}

Engine::State Engine::initial() const {
  State st;
  st.intruder = IntruderState(intruder_initial_);
  st.facts = std::make_shared<const std::vector<Fact>>();
  const Protocol& p = model_->protocol;
  for (const Instance& inst : instances_) {
    Local local;
    const auto& session = scenario_.sessions[inst.session - 1];
    for (const Term& slot : inst.strand->initial_bound) {
      if (!slot.is_variable()) continue;
      if (p.is_number(slot.name())) {
        local.sigma.bind(slot, Term::fresh(slot.name(), inst.session, inst.strand->role));
      } else if (auto it = session.find(slot.name()); it != session.end()) {
        local.sigma.bind(slot, it->second);
      }
    }
    if (inst.strand->role_term.is_variable()) local.sigma.bind(inst.strand->role_term, inst.agent);
    st.locals.push_back(std::move(local));
  }
  return st;
}

bool Engine::finished(const State& st) const {
  for (std::size_t x = 0; x < instances_.size(); ++x) {
    if (st.locals[x].pc < static_cast<int>(instances_[x].strand->events.size())) return false;
  }
  return true;
}

bool Engine::constraints_hold(const Instance& inst, const Substitution& sigma) const {
  // a role variable is played by one of its scenario agents or by the intruder
  for (const auto& [slot, value] : sigma.entries()) {
    if (!slot.is_variable()) continue;
    auto it = cfg_.domains.find(slot.name());
    if (it == cfg_.domains.end()) continue;
    if (std::find(it->second.begin(), it->second.end(), value) == it->second.end()) return false;
  }
  const auto& session = scenario_.sessions[inst.session - 1];
  auto value = [&](const Term& side) -> const Term* {
    if (!side.is_variable()) return &side;
    if (const Term* v = sigma.find(side)) return v;
    auto it = session.find(side.name());
    return it == session.end() ? nullptr : &it->second;
  };
  for (const auto& [l, r] : constraints_) {
    const Term* a = value(l);
    const Term* b = value(r);
    if (a && b && *a == *b) return false;
  }
  return true;
}

void Engine::emit(const Instance& inst, const Event& ev, const Substitution& sigma, State& st) const {
  if (ev.facts.empty()) return;
  auto facts = std::make_shared<std::vector<Fact>>(*st.facts);
  const auto& goals = model_->protocol.goals;
  for (const FactEmission& fe : ev.facts) {
    auto payload = substitute(fe.payload_template, sigma);
    if (!payload) continue;
    Fact f;
    f.kind = fe.kind;
    f.goal = static_cast<int>(std::find_if(goals.begin(), goals.end(),
                                           [&](const Goal& g) { return g.id == fe.goal_id; }) -
                              goals.begin());
    f.owner = inst.agent;
    if (fe.peer) f.peer = substitute(*fe.peer, sigma);
    f.payload = *payload;
    f.label = ev.action_label;
    for (const Term& party : fe.parties) {
      if (auto v = substitute(party, sigma)) f.parties.push_back(*v);
    }
    facts->push_back(std::move(f));
  }
  st.facts = std::move(facts);
}

Expectation Engine::expectation(const State& st, std::size_t index) const {
  const Instance& inst = instances_[index];
  const Local& local = st.locals[index];
  const Event& ev = inst.strand->events[static_cast<std::size_t>(local.pc)];
  Expectation e;
  e.receiver = inst.agent;
  e.channel = ev.channel;
  e.pattern = &ev.pattern;
  e.sigma = local.sigma;
  if (ev.binds_counterpart) {
    e.sender_slot = ev.counterpart_term;
  } else {
    e.claimed_sender = substitute(ev.counterpart_term, local.sigma);
  }
  return e;
}

std::vector<Engine::Step> Engine::successors(const State& st, int depth) const {
  std::vector<Step> out;
  for (std::size_t x = 0; x < instances_.size(); ++x) {
    const Instance& inst = instances_[x];
    const Local& local = st.locals[x];
    if (local.pc >= static_cast<int>(inst.strand->events.size())) continue;
    const Event& ev = inst.strand->events[static_cast<std::size_t>(local.pc)];

    if (ev.kind == Event::Kind::Send) {
      Substitution sigma = local.sigma;
      for (const Term& v : ev.fresh) sigma.bind(v, Term::fresh(v.name(), inst.session, inst.strand->role));
      auto payload = substitute(ev.message, sigma);
      auto receiver = substitute(ev.counterpart_term, sigma);
      if (!payload || !receiver) continue;
      Step step{{}, st};
      SealedEnvelope env{inst.agent, *receiver, *payload, ev.action_label, depth + 1, ev.channel, false};
      step.next.intruder = observe(st.intruder, env);
      step.next.locals[x].sigma = sigma;
      step.next.locals[x].pc++;
      emit(inst, ev, sigma, step.next);
      step.transition = {depth + 1, ev.action_label, inst.agent, *receiver, Transition::Delivery::Send,
                         std::nullopt, static_cast<int>(x), *payload};
      out.push_back(std::move(step));
      continue;
    }

    Expectation expect = expectation(st, x);
    for (Delivery& d : deliverables(st.intruder, expect, cfg_)) {
      if (!constraints_hold(inst, d.sigma)) continue;
      Step step{{}, st};
      Transition t{depth + 1, ev.action_label, d.claimed_sender, inst.agent, Transition::Delivery::Composed,
                   std::nullopt, static_cast<int>(x), d.payload};
      if (d.kind == Delivery::Kind::Replay) {
        const SealedEnvelope& env = st.intruder.observed()[d.envelope];
        t.delivery = (!env.consumed && env.origin_label == ev.action_label) ? Transition::Delivery::Direct
                                                                            : Transition::Delivery::Replay;
        t.origin_seq = env.seq;
        step.next.intruder.mark_consumed(d.envelope);
      }
      if (ev.channel == Channel::Plain) step.next.intruder.learn(d.payload);
      step.next.locals[x].sigma = std::move(d.sigma);
      step.next.locals[x].pc++;
      emit(inst, ev, step.next.locals[x].sigma, step.next);
      step.transition = std::move(t);
      out.push_back(std::move(step));
    }
  }
  return out;
}

namespace {

std::string list_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t n = 0; n < ts.size(); ++n) {
    if (n) out += ", ";
    out += ts[n].str();
  }
  return out;
}

}  // namespace

std::vector<Violation> Engine::check_goals(const State& st, const std::vector<bool>& filter) const {
  std::vector<Violation> out;
  const auto& goals = model_->protocol.goals;
  const Term i = intruder_agent();
  const auto& facts = *st.facts;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (!filter.empty() && !filter[g]) continue;
    const Goal& goal = goals[g];
    const int gi = static_cast<int>(g);
    if (goal.kind == GoalKind::Secrecy) {
      for (const Fact& f : facts) {
        if (f.goal != gi || f.kind != FactKind::Secret) continue;
        if (std::find(f.parties.begin(), f.parties.end(), i) != f.parties.end()) continue;
        if (derive(st.intruder.knowledge(), f.payload)) {
          out.push_back({gi, "intruder derives " + f.payload.str() + ", secret between " + list_terms(f.parties)});
          break;
        }
      }
      continue;
    }
    std::map<std::tuple<Term, Term, Term>, int> requests;
    std::map<std::tuple<Term, Term, Term>, int> witnesses;
    for (const Fact& f : facts) {
      if (f.goal != gi || !f.peer) continue;
      if (f.kind == FactKind::Witness) ++witnesses[{f.owner, *f.peer, f.payload}];
      if (f.kind == FactKind::Request && !(f.owner == i) && !(*f.peer == i)) ++requests[{f.peer.value(), f.owner, f.payload}];
    }
    std::optional<std::string> reason;
    for (const auto& [key, count] : requests) {
      const auto& [peer, owner, payload] = key;
      auto it = witnesses.find(key);
      int sent = it == witnesses.end() ? 0 : it->second;
      if (sent == 0) {
        reason = owner.str() + " accepted " + payload.str() + " as from " + peer.str() + ", who never sent it to " +
                 owner.str();
        // a witness that could not name its peer explains the gap
        for (const Fact& f : facts) {
          if (f.goal == gi && f.kind == FactKind::Witness && !f.peer && f.owner == peer && f.payload == payload) {
            *reason += "; " + peer.str() + "'s witness at " + f.label + " has peer UNBOUND";
            break;
          }
        }
        break;
      }
      if (goal.kind == GoalKind::StrongAuth && count > sent) {
        reason = owner.str() + " accepted " + payload.str() + " from " + peer.str() + " " + std::to_string(count) +
                 " times, sent " + std::to_string(sent) + " times";
        break;
      }
    }
    if (reason) out.push_back({gi, *reason});
  }
  return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t other_mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  return x ^ (x >> 33);
}

}  // namespace

Engine::Key Engine::key(const State& st) const {
  Key k;
  auto fold = [&](std::uint64_t v) {
    k.hi = splitmix(k.hi ^ v);
    k.lo = other_mix(k.lo + v * 0x2545f4914f6cdd1dULL);
  };
  for (const Local& l : st.locals) {
    fold(static_cast<std::uint64_t>(l.pc));
    for (const auto& [slot, value] : l.sigma.entries()) {
      fold(slot.hash());
      fold(value.hash());
    }
  }
  fold(0x6b);
  for (const Term& t : st.intruder.knowledge().terms()) fold(t.hash());
  // envelopes and facts are sets: combine order-independently
  std::uint64_t eh = 0, el = 0;
  for (const SealedEnvelope& e : st.intruder.observed()) {
    std::uint64_t h = mix_hash(mix_hash(mix_hash(e.sender.hash(), e.receiver.hash()), e.payload.hash()),
                               std::hash<std::string>{}(e.origin_label));
    eh += splitmix(h);
    el += other_mix(h);
  }
  fold(eh);
  fold(el);
  std::uint64_t fh = 0, fl = 0;
  for (const Fact& f : *st.facts) {
    std::uint64_t h = mix_hash(mix_hash(static_cast<std::uint64_t>(f.kind), static_cast<std::uint64_t>(f.goal)),
                               mix_hash(f.owner.hash(), f.payload.hash()));
    h = mix_hash(h, f.peer ? f.peer->hash() : 0x77);
    for (const Term& t : f.parties) h = mix_hash(h, t.hash());
    fh += splitmix(h);
    fl += other_mix(h);
  }
  fold(fh);
  fold(fl);
  return k;
}

std::optional<Engine::State> Engine::replay(const std::vector<Transition>& trace) const {
  State st = initial();
  int depth = 0;
  for (const Transition& t : trace) {
    bool found = false;
    for (Step& s : successors(st, depth)) {
      const Transition& c = s.transition;
      if (c.instance == t.instance && c.label == t.label && c.payload == t.payload && c.from == t.from &&
          c.to == t.to && (c.delivery == Transition::Delivery::Composed) == (t.delivery == Transition::Delivery::Composed)) {
        st = std::move(s.next);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    ++depth;
  }
  return st;
}

// ---------------------------------------------------------------- search

namespace {

struct KeyHash {
  std::size_t operator()(const Engine::Key& k) const noexcept { return static_cast<std::size_t>(k.hi ^ (k.lo << 1)); }
};

struct Searcher {
  const Engine& engine;
  const std::vector<bool>& filter;
  std::uint64_t budget;
  ScenarioResult result;
  std::size_t wanted = 0;
  int limit = 0;
  bool cutoff = false;
  bool stop = false;
  std::unordered_map<Engine::Key, int, KeyHash> seen;
  std::vector<Transition> path;

  void visit(const Engine::State& st, int depth) {
    if (stop) return;
    auto [it, inserted] = seen.try_emplace(engine.key(st), depth);
    if (!inserted) {
      if (it->second <= depth) return;
      it->second = depth;
    }
    ++result.states;
    if (budget && result.states >= budget) {
      result.budget_exhausted = true;
      stop = true;
      return;
    }
    if (depth == limit) {
      for (const Violation& v : engine.check_goals(st, filter)) {
        if (result.attacks.contains(v.goal)) continue;
        result.attacks.emplace(v.goal, GoalFinding{path, v.reason, result.states});
        if (result.attacks.size() == wanted) stop = true;
      }
      if (!engine.finished(st)) cutoff = true;
      return;
    }
    for (Engine::Step& s : engine.successors(st, depth)) {
      path.push_back(std::move(s.transition));
      visit(s.next, depth + 1);
      path.pop_back();
      if (stop) return;
    }
  }
};

}  // namespace

ScenarioResult search(const Engine& engine, int max_depth, const std::vector<bool>& filter, std::uint64_t budget) {
  Searcher s{engine, filter, budget, {}, 0, 0, false, false, {}, {}};
  const auto& goals = engine.model().protocol.goals;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (filter.empty() || filter[g]) ++s.wanted;
  }
  if (s.wanted == 0) {
    s.result.complete = true;
    return s.result;
  }
  const Engine::State init = engine.initial();
  std::uint64_t prev = 0;
  for (int d = 0; d <= max_depth && !s.stop; ++d) {
    s.limit = d;
    s.cutoff = false;
    s.seen.clear();
    const std::uint64_t before = s.result.states;
    s.visit(init, 0);
    if (!s.result.budget_exhausted) s.result.explored_depth = d;
    if (!s.stop && !s.cutoff) {
      s.result.complete = true;
      break;
    }
    // Don't start an iteration that the budget can't finish. Its size is
    // guessed from the last growth ratio, never below the last iteration.
    const std::uint64_t last = s.result.states - before;
    if (budget && !s.stop && d < max_depth) {
      const double growth = prev ? std::max(1.0, static_cast<double>(last) / static_cast<double>(prev)) : 1.0;
      if (static_cast<double>(s.result.states) + growth * static_cast<double>(last) >= static_cast<double>(budget)) {
        s.result.budget_exhausted = true;
        s.stop = true;
      }
    }
    prev = last;
  }
  return s.result;
}

// ---------------------------------------------------------------- verify

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      std::string na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
      nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

bool Report::any_attack() const {
  return std::any_of(goals.begin(), goals.end(), [](const Verdict& v) { return v.status == Status::Attack; });
}

const Verdict* Report::goal(const std::string& id) const {
  for (const Verdict& v : goals) {
    if (v.goal_id == id) return &v;
  }
  return nullptr;
}

Report verify(const Protocol& p, const VerifyConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  if (cfg.max_depth < 0) throw ConfigError("depth must be non-negative");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.compose_depth < 1) throw ConfigError("compose depth must be at least 1");
  const CompiledModel model = compile_model(p);
  const auto& goals = model.protocol.goals;

  std::vector<bool> filter(goals.size(), cfg.goal_filter.empty());
  for (const std::string& id : cfg.goal_filter) {
    auto it = std::find_if(goals.begin(), goals.end(), [&](const Goal& g) { return g.id == id; });
    if (it == goals.end()) throw ConfigError("unknown goal '" + id + "'");
    filter[static_cast<std::size_t>(it - goals.begin())] = true;
  }

  const std::vector<Scenario> scenarios = instantiate_scenarios(model.protocol, cfg.sessions);
  std::vector<ScenarioResult> results(scenarios.size());
  std::vector<double> millis(scenarios.size(), 0.0);
  std::atomic<std::size_t> next{0};
  // swapping the two sessions of a scenario renames sessions and nothing else
  std::vector<bool> mirrored(scenarios.size(), false);
  for (std::size_t n = 0; n < scenarios.size(); ++n) {
    if (scenarios[n].sessions.size() != 2) continue;
    Scenario swapped{{scenarios[n].sessions[1], scenarios[n].sessions[0]}};
    for (std::size_t m = 0; m < n; ++m) {
      if (scenarios[m] == swapped && !mirrored[m]) mirrored[n] = true;
    }
  }
  auto work = [&] {
    for (std::size_t n = next++; n < scenarios.size(); n = next++) {
      if (mirrored[n]) continue;
      const auto t0 = std::chrono::steady_clock::now();
      Engine engine(model, scenarios[n], cfg.compose_depth);
      results[n] = search(engine, cfg.max_depth, filter, cfg.state_budget);
      millis[n] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int workers = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(scenarios.size(), 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  Report report;
  report.model = p.name;
  report.sessions = cfg.sessions;
  report.depth = cfg.max_depth;
  for (const ScenarioResult& r : results) report.states += r.states;
  const bool all_complete = std::all_of(results.begin(), results.end(), [](const ScenarioResult& r) {
    return !r.budget_exhausted;
  });
  double total_ms = 0;
  for (double m : millis) total_ms += m;

  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (!filter[g]) continue;
    Verdict v;
    v.goal_id = goals[g].id;
    v.kind = goals[g].kind;
    v.states = report.states;
    v.millis = total_ms;
    std::optional<std::size_t> best;
    for (std::size_t n = 0; n < results.size(); ++n) {
      auto it = results[n].attacks.find(static_cast<int>(g));
      if (it == results[n].attacks.end()) continue;
      if (!best || it->second.trace.size() < results[*best].attacks.at(static_cast<int>(g)).trace.size()) best = n;
    }
    if (best) {
      const GoalFinding& f = results[*best].attacks.at(static_cast<int>(g));
      Engine engine(model, scenarios[*best], cfg.compose_depth);
      auto end = engine.replay(f.trace);
      bool reproduced = false;
      if (end) {
        for (const Violation& viol : engine.check_goals(*end)) reproduced |= viol.goal == static_cast<int>(g);
      }
      if (!reproduced) throw std::logic_error("attack trace for " + v.goal_id + " does not replay");
      v.status = Status::Attack;
      v.trace = f.trace;
      v.reason = f.reason;
      v.scenario = scenarios[*best].str();
      v.states = f.states;
      v.millis = millis[*best];
    } else {
      v.status = all_complete ? Status::Safe : Status::Unknown;
      if (!all_complete) {
        v.explored_depth = cfg.max_depth;
        for (std::size_t n = 0; n < results.size(); ++n) {
          if (!mirrored[n]) v.explored_depth = std::min(v.explored_depth, results[n].explored_depth);
        }
      }
    }
    report.goals.push_back(std::move(v));
  }
  std::stable_sort(report.goals.begin(), report.goals.end(),
                   [](const Verdict& a, const Verdict& b) { return natural_less(a.goal_id, b.goal_id); });
  report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace anbv
