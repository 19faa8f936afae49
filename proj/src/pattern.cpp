#include "anbv/pattern.hpp"

#include <algorithm>

namespace anbv {

const Term* Substitution::find(const Term& slot) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), slot,
                             [](const auto& e, const Term& key) { return e.first < key; });
  if (it == entries_.end() || !(it->first == slot)) return nullptr;
  return &it->second;
}

void Substitution::bind(const Term& slot, const Term& value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), slot,
                             [](const auto& e, const Term& key) { return e.first < key; });
  if (it != entries_.end() && it->first == slot) {
    it->second = value;
  } else {
    entries_.emplace(it, slot, value);
  }
}

std::uint64_t Substitution::fingerprint() const {
  std::uint64_t h = 0x5b1d;
  for (const auto& [slot, value] : entries_) h = mix_hash(mix_hash(h, slot.hash()), value.hash());
  return h;
}

std::optional<Term> substitute(const Term& tmpl, const Substitution& sigma) {
  if (const Term* v = sigma.find(tmpl)) return *v;
  if (tmpl.is_ground()) return tmpl;
  if (tmpl.is_variable()) return std::nullopt;
  std::vector<Term> parts;
  parts.reserve(tmpl.args().size());
  for (const Term& c : tmpl.args()) {
    auto s = substitute(c, sigma);
    if (!s) return std::nullopt;
    parts.push_back(std::move(*s));
  }
  return tmpl.is_tuple() ? Term::tuple(std::move(parts)) : Term::apply(tmpl.name(), std::move(parts));
}

bool admits(SlotType type, const Term& value) {
  switch (type) {
    case SlotType::Agent:
      return value.is_atom() && value.atom_kind() != AtomKind::Public;
    case SlotType::Number:
      return value.is_fresh() || (value.is_atom() && value.atom_kind() == AtomKind::Public);
    case SlotType::Any:
      return true;
  }
  return false;
}

std::vector<Term> Pattern::binds() const {
  std::vector<Term> out;
  if (kind == Kind::Bind) out.push_back(term);
  for (const Pattern& p : items) {
    auto sub = p.binds();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::string Pattern::str() const {
  switch (kind) {
    case Kind::Check:
      return "?" + term.str();
    case Kind::Bind:
      return "!" + term.str();
    case Kind::Tuple: {
      std::string out = "(";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].str();
      }
      return out + ")";
    }
  }
  return {};
}

bool ground_in_view(const Term& t, const std::set<Term>& bound) {
  if (t.is_ground() || bound.contains(t)) return true;
  if (t.is_variable()) return false;
  return std::all_of(t.args().begin(), t.args().end(),
                     [&](const Term& c) { return ground_in_view(c, bound); });
}

namespace {

void collect_direct(const Term& t, const std::set<Term>& bound, std::set<Term>& out) {
  if (t.is_variable()) {
    if (!bound.contains(t)) out.insert(t);
  } else if (t.is_tuple()) {
    for (const Term& c : t.args()) collect_direct(c, bound, out);
  }
}

struct ViewBuilder {
  KnowledgeSet view;
  std::set<Term> view_bound;
  const std::set<Term>& direct;
  const TypeEnv& types;
  std::set<Term> assigned;

  Pattern build(const Term& t) {
    if (t.is_variable()) {
      if (direct.contains(t) && assigned.insert(t).second) return Pattern::bind(t, types.at(t.name()));
      return Pattern::check(t);
    }
    if (t.is_atom() || t.is_fresh()) return Pattern::check(t);
    if (!t.is_tuple() && ground_in_view(t, view_bound) && derive(view, t)) return Pattern::check(t);
    if (t.is_tuple()) {
      std::vector<Pattern> items;
      items.reserve(t.args().size());
      for (const Term& c : t.args()) items.push_back(build(c));
      return Pattern::tuple(std::move(items));
    }
    // unrecognisable application: the whole subtree is one opaque slot
    assigned.insert(t);
    view.add(t);
    view_bound.insert(t);
    return Pattern::bind(t, SlotType::Any);
  }
};

}  // namespace

Pattern recognizable_pattern(const KnowledgeSet& k, const std::set<Term>& bound, const Term& msg,
                             const TypeEnv& types) {
  for (const Term& v : variables_of(msg)) {
    if (!types.contains(v.name())) throw MalformedTemplate("template variable '" + v.name() + "' is undeclared");
  }
  std::set<Term> direct;
  collect_direct(msg, bound, direct);

  ViewBuilder b{k, bound, direct, types, {}};
  for (const Term& s : bound) b.view.add(s);
  for (const Term& v : direct) {
    b.view.add(v);
    b.view_bound.insert(v);
  }
  return b.build(msg);
}

namespace {

bool bind_pass(const Pattern& p, const Term& payload, Substitution& s,
               std::vector<std::pair<const Pattern*, Term>>& checks) {
  switch (p.kind) {
    case Pattern::Kind::Tuple:
      if (!payload.is_tuple() || payload.args().size() != p.items.size()) return false;
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (!bind_pass(p.items[i], payload.args()[i], s, checks)) return false;
      }
      return true;
    case Pattern::Kind::Bind:
      if (const Term* prior = s.find(p.term)) return *prior == payload;
      if (!admits(p.type, payload)) return false;
      s.bind(p.term, payload);
      return true;
    case Pattern::Kind::Check:
      checks.emplace_back(&p, payload);
      return true;
  }
  return false;
}

}  // namespace

std::optional<Substitution> match_pattern(const Pattern& p, const Term& payload, const Substitution& sigma) {
  Substitution s = sigma;
  std::vector<std::pair<const Pattern*, Term>> checks;
  if (!bind_pass(p, payload, s, checks)) return std::nullopt;
  for (const auto& [check, value] : checks) {
    auto expected = substitute(check->term, s);
    if (!expected || !(*expected == value)) return std::nullopt;
  }
  return s;
}

}  // namespace anbv
