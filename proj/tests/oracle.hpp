// Brute-force reference for derivability, independent of derive()/close().
#ifndef ANBV_TESTS_ORACLE_HPP
#define ANBV_TESTS_ORACLE_HPP

#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "anbv/knowledge.hpp"
#include "anbv/term.hpp"

namespace oracle {

using TermSet = std::unordered_set<anbv::Term, anbv::TermHash>;

struct Instance {
  std::vector<anbv::Term> held;                          // knowledge terms
  std::vector<std::pair<std::string, int>> functions;   // held function symbols
  anbv::Term target;
};

inline void analyse(const anbv::Term& t, TermSet& out) {
  if (!out.insert(t).second) return;
  if (t.is_tuple()) {
    for (const anbv::Term& c : t.args()) analyse(c, out);
  }
}

// Every term buildable with construction depth <= depth: level 1 is the held
// terms plus tuple components; each further level pairs and applies.
inline TermSet closure(const Instance& in, int depth) {
  TermSet level;
  for (const anbv::Term& t : in.held) analyse(t, level);
  for (int d = 2; d <= depth; ++d) {
    std::vector<anbv::Term> prev(level.begin(), level.end());
    TermSet next = level;
    for (const anbv::Term& a : prev) {
      for (const auto& [fn, arity] : in.functions) {
        if (arity == 1) next.insert(anbv::Term::apply(fn, {a}));
      }
      for (const anbv::Term& b : prev) {
        next.insert(anbv::Term::tuple({a, b}));
        for (const auto& [fn, arity] : in.functions) {
          if (arity == 2) next.insert(anbv::Term::apply(fn, {a, b}));
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

inline bool derivable(const Instance& in) { return closure(in, in.target.depth()).contains(in.target); }

// Fixed pool: six atoms, f/1 and g/2. Each instance holds a random subset of
// the functions.
class Generator {
 public:
  explicit Generator(unsigned seed) : rng_(seed) {
    for (int n = 0; n < 6; ++n) atoms_.push_back(anbv::Term::atom("a" + std::to_string(n), anbv::AtomKind::Public));
  }

  anbv::Term term(int max_depth) {
    if (max_depth <= 1 || pick(3) == 0) return atoms_[pick(atoms_.size())];
    switch (pick(3)) {
      case 0:
        return anbv::Term::apply("f", {term(max_depth - 1)});
      case 1:
        return anbv::Term::apply("g", {term(max_depth - 1), term(max_depth - 1)});
      default:
        return anbv::Term::tuple({term(max_depth - 1), term(max_depth - 1)});
    }
  }

  Instance instance() {
    Instance in;
    std::size_t n = 1 + pick(4);
    for (std::size_t k = 0; k < n; ++k) in.held.push_back(term(2));
    if (pick(2)) in.functions.emplace_back("f", 1);
    if (pick(2)) in.functions.emplace_back("g", 2);
    in.target = term(3);
    return in;
  }

  anbv::KnowledgeSet knowledge(const Instance& in) const {
    anbv::KnowledgeSet k;
    for (const anbv::Term& t : in.held) k.add(t);
    for (const auto& [fn, arity] : in.functions) k.add_function(fn, arity);
    return k;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937 rng_;
  std::vector<anbv::Term> atoms_;
};

}  // namespace oracle

#endif
