#include "anbv/knowledge.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace anbv {

KnowledgeSet::KnowledgeSet(std::initializer_list<Term> terms,
                           std::initializer_list<std::pair<std::string, int>> functions) {
  for (const Term& t : terms) add(t);
  for (const auto& [fn, arity] : functions) add_function(fn, arity);
}

bool KnowledgeSet::add(const Term& t) {
  if (!terms_.insert(t).second) return false;
  if (t.is_tuple()) {
    for (const Term& item : t.args()) add(item);
  }
  return true;
}

void KnowledgeSet::add_function(const std::string& fn, int arity) {
  auto [it, inserted] = functions_.emplace(fn, arity);
  if (!inserted && it->second < 0) it->second = arity;
}

std::uint64_t KnowledgeSet::fingerprint() const {
  std::uint64_t h = 0x51ed2701;
  for (const Term& t : terms_) h = mix_hash(h, t.hash());
  for (const auto& [fn, arity] : functions_) {
    for (char c : fn) h = mix_hash(h, static_cast<unsigned char>(c));
    h = mix_hash(h, static_cast<std::uint64_t>(arity + 1));
  }
  return h;
}

bool KnowledgeSet::subset_of(const KnowledgeSet& other) const {
  return std::includes(other.terms_.begin(), other.terms_.end(), terms_.begin(), terms_.end()) &&
         std::all_of(functions_.begin(), functions_.end(),
                     [&](const auto& f) { return other.holds(f.first); });
}

bool derive(const KnowledgeSet& k, const Term& t) {
  if (k.contains(t)) return true;
  switch (t.kind()) {
    case Term::Kind::Tuple:
      return std::all_of(t.args().begin(), t.args().end(), [&](const Term& c) { return derive(k, c); });
    case Term::Kind::FnApp:
      return k.holds(t.name()) &&
             std::all_of(t.args().begin(), t.args().end(), [&](const Term& c) { return derive(k, c); });
    default:
      return false;
  }
}

namespace {

void product(const std::vector<Term>& pool, std::size_t arity, std::vector<Term>& prefix,
             const std::string& fn, std::set<Term>& out) {
  if (prefix.size() == arity) {
    out.insert(fn.empty() ? Term::tuple(prefix) : Term::apply(fn, prefix));
    return;
  }
  for (const Term& t : pool) {
    prefix.push_back(t);
    product(pool, arity, prefix, fn, out);
    prefix.pop_back();
  }
}

}  // namespace

std::set<Term> close(const KnowledgeSet& k, int depth_bound) {
  if (depth_bound < 1) throw std::invalid_argument("close: depth_bound must be >= 1");
  std::set<Term> level = k.terms();
  for (int d = 2; d <= depth_bound; ++d) {
    const std::vector<Term> pool(level.begin(), level.end());
    std::set<Term> next = level;
    std::vector<Term> prefix;
    product(pool, 2, prefix, "", next);
    for (const auto& [fn, arity] : k.functions()) {
      if (arity < 0) continue;
      if (arity == 0) {
        next.insert(Term::apply(fn, {}));
        continue;
      }
      product(pool, static_cast<std::size_t>(arity), prefix, fn, next);
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace anbv
