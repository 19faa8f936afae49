#include "anbv/intruder.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace anbv {

Term intruder_agent() {
  static const Term i = Term::atom("i", AtomKind::Intruder);
  return i;
}

Term intruder_constant() {
  static const Term c = Term::atom("c_i", AtomKind::Public);
  return c;
}

IntruderState::IntruderState()
    : knowledge_(std::make_shared<const KnowledgeSet>()),
      observed_(std::make_shared<const std::vector<SealedEnvelope>>()) {}

IntruderState::IntruderState(KnowledgeSet initial)
    : knowledge_(std::make_shared<const KnowledgeSet>(std::move(initial))),
      observed_(std::make_shared<const std::vector<SealedEnvelope>>()) {}

bool IntruderState::learn(const Term& t) {
  if (derive(*knowledge_, t)) return false;
  auto next = std::make_shared<KnowledgeSet>(*knowledge_);
  if (!next->add(t)) return false;
  knowledge_ = std::move(next);
  return true;
}

void IntruderState::mark_consumed(std::size_t index) {
  if ((*observed_)[index].consumed) return;
  auto next = std::make_shared<std::vector<SealedEnvelope>>(*observed_);
  (*next)[index].consumed = true;
  observed_ = std::move(next);
}

void IntruderState::append(SealedEnvelope env) {
  auto next = std::make_shared<std::vector<SealedEnvelope>>(*observed_);
  next->push_back(std::move(env));
  observed_ = std::move(next);
}

IntruderState observe(const IntruderState& st, const SealedEnvelope& env) {
  IntruderState out = st;
  out.append(env);
  const Term i = intruder_agent();
  if (env.channel == Channel::Plain || env.sender == i || env.receiver == i) out.learn(env.payload);
  return out;
}

namespace {

void collect_slots(const Pattern& p, std::vector<std::pair<Term, SlotType>>& out) {
  if (p.kind == Pattern::Kind::Bind) {
    bool seen = std::any_of(out.begin(), out.end(), [&](const auto& s) { return s.first == p.term; });
    if (!seen) out.emplace_back(p.term, p.type);
  }
  for (const Pattern& c : p.items) collect_slots(c, out);
}

// Held terms carry every equality the receiver could later test, so junk
// only needs one representative per shape: compositions up to
// `compose_depth` built over the junk constant alone.
std::vector<Term> opaque_candidates(const KnowledgeSet& k, int compose_depth) {
  KnowledgeSet junk{intruder_constant()};
  for (const auto& [fn, arity] : k.functions()) junk.add_function(fn, arity);
  std::set<Term> out;
  for (const Term& t : close(junk, std::max(compose_depth, 1))) {
    if (t.depth() <= compose_depth) out.insert(t);
  }
  out.insert(k.terms().begin(), k.terms().end());
  return {out.begin(), out.end()};
}

const std::vector<Term>& cached_opaque_candidates(const KnowledgeSet& k, int compose_depth) {
  thread_local std::unordered_map<std::uint64_t, std::vector<Term>> cache;
  const std::uint64_t key = mix_hash(k.fingerprint(), static_cast<std::uint64_t>(compose_depth));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();
  return cache.emplace(key, opaque_candidates(k, compose_depth)).first->second;
}

std::vector<Term> number_candidates(const KnowledgeSet& k) {
  std::set<Term> out{intruder_constant()};
  for (const Term& t : k.terms()) {
    if (admits(SlotType::Number, t)) out.insert(t);
  }
  return {out.begin(), out.end()};
}

std::optional<Term> instantiate(const Pattern& p, const Substitution& s) {
  switch (p.kind) {
    case Pattern::Kind::Bind: {
      const Term* v = s.find(p.term);
      if (!v) return std::nullopt;
      return *v;
    }
    case Pattern::Kind::Check:
      return substitute(p.term, s);
    case Pattern::Kind::Tuple: {
      std::vector<Term> items;
      for (const Pattern& c : p.items) {
        auto v = instantiate(c, s);
        if (!v) return std::nullopt;
        items.push_back(std::move(*v));
      }
      return Term::tuple(std::move(items));
    }
  }
  return std::nullopt;
}

struct Composer {
  const KnowledgeSet& k;
  const Pattern& pattern;
  const std::vector<std::pair<Term, SlotType>>& slots;
  const std::vector<std::vector<Term>>& pools;
  std::set<Term>& payloads;

  void run(std::size_t i, Substitution& s) {
    if (i == slots.size()) {
      auto payload = instantiate(pattern, s);
      if (payload && derive(k, *payload)) payloads.insert(*payload);
      return;
    }
    if (s.bound(slots[i].first)) {
      run(i + 1, s);
      return;
    }
    for (const Term& v : pools[i]) {
      Substitution next = s;
      next.bind(slots[i].first, v);
      run(i + 1, next);
    }
  }
};

}  // namespace

std::vector<Delivery> deliverables(const IntruderState& st, const Expectation& expect, const IntruderConfig& cfg) {
  std::vector<Delivery> out;
  if (!expect.pattern) return out;
  const Term i = intruder_agent();
  const auto& observed = st.observed();

  auto with_sender = [&](const Term& sender) -> std::optional<Substitution> {
    if (expect.claimed_sender) {
      if (!(*expect.claimed_sender == sender)) return std::nullopt;
      return expect.sigma;
    }
    if (!admits(SlotType::Agent, sender)) return std::nullopt;
    Substitution s = expect.sigma;
    if (expect.sender_slot) s.bind(*expect.sender_slot, sender);
    return s;
  };

  // replays: identical envelopes collapse onto the first unconsumed copy
  std::set<std::pair<Term, Term>> seen;
  std::vector<std::size_t> order;
  for (std::size_t n = 0; n < observed.size(); ++n) {
    if (!observed[n].consumed) order.push_back(n);
  }
  for (std::size_t n = 0; n < observed.size(); ++n) {
    if (observed[n].consumed) order.push_back(n);
  }
  std::vector<Delivery> replays;
  for (std::size_t n : order) {
    const SealedEnvelope& env = observed[n];
    if (!(env.receiver == expect.receiver) || env.channel != expect.channel) continue;
    if (!seen.emplace(env.sender, env.payload).second) continue;
    auto base = with_sender(env.sender);
    if (!base) continue;
    auto sigma = match_pattern(*expect.pattern, env.payload, *base);
    if (!sigma) continue;
    replays.push_back({Delivery::Kind::Replay, n, env.payload, env.sender, std::move(*sigma)});
  }
  std::sort(replays.begin(), replays.end(), [&](const Delivery& a, const Delivery& b) {
    return observed[a.envelope].seq < observed[b.envelope].seq;
  });
  out = std::move(replays);

  // composition: the intruder speaks as itself, or as anyone on a plain channel
  std::vector<Term> claims;
  if (expect.channel == Channel::Plain) {
    if (expect.claimed_sender) {
      claims.push_back(*expect.claimed_sender);
    } else {
      claims = cfg.agents;
    }
  } else if (!expect.claimed_sender || *expect.claimed_sender == i) {
    claims.push_back(i);
  }
  if (claims.empty()) return out;

  const KnowledgeSet& k = st.knowledge();
  std::vector<std::pair<Term, SlotType>> slots;
  collect_slots(*expect.pattern, slots);
  std::vector<std::vector<Term>> pools;
  std::optional<std::vector<Term>> opaque;
  std::optional<std::vector<Term>> numbers;
  for (const auto& [slot, type] : slots) {
    switch (type) {
      case SlotType::Agent: {
        auto dom = slot.is_variable() ? cfg.domains.find(slot.name()) : cfg.domains.end();
        pools.push_back(dom == cfg.domains.end() ? cfg.agents : dom->second);
        break;
      }
      case SlotType::Number:
        if (!numbers) numbers = number_candidates(k);
        pools.push_back(*numbers);
        break;
      case SlotType::Any:
        if (!opaque) opaque = cached_opaque_candidates(k, cfg.compose_depth);
        pools.push_back(*opaque);
        break;
    }
  }

  for (const Term& claim : claims) {
    auto base = with_sender(claim);
    if (!base) continue;
    std::set<Term> payloads;
    Composer c{k, *expect.pattern, slots, pools, payloads};
    Substitution s = *base;
    c.run(0, s);
    for (const Term& payload : payloads) {
      bool replayed = std::any_of(out.begin(), out.end(), [&](const Delivery& d) {
        return d.kind == Delivery::Kind::Replay && d.claimed_sender == claim && d.payload == payload;
      });
      if (replayed) continue;
      auto sigma = match_pattern(*expect.pattern, payload, *base);
      if (!sigma) continue;
      out.push_back({Delivery::Kind::Composed, 0, payload, claim, std::move(*sigma)});
    }
  }
  return out;
}

}  // namespace anbv
