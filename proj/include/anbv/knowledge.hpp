#ifndef ANBV_KNOWLEDGE_HPP
#define ANBV_KNOWLEDGE_HPP

#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "anbv/term.hpp"

namespace anbv {

/// Terms an agent holds plus the function symbols it may apply.
///
/// Tuples are analysed on insertion: every component of a stored tuple is
/// stored as well, so membership of a component is a plain lookup. Function
/// applications are never analysed; functions are one-way.
///
/// Runtime knowledge (intruder, instantiated roles) is ground. The strand
/// compiler also uses it symbolically, where role and number variables stand
/// for the values a role has bound.
class KnowledgeSet {
 public:
  KnowledgeSet() = default;
  KnowledgeSet(std::initializer_list<Term> terms,
               std::initializer_list<std::pair<std::string, int>> functions = {});

  /// Returns true when something new was learned.
  bool add(const Term& t);
  /// `arity` < 0 means unknown; close() skips functions of unknown arity.
  void add_function(const std::string& fn, int arity = -1);

  bool contains(const Term& t) const { return terms_.contains(t); }
  bool holds(const std::string& fn) const { return functions_.contains(fn); }

  const std::set<Term>& terms() const { return terms_; }
  const std::map<std::string, int>& functions() const { return functions_; }

  /// Order-independent fingerprint of the stored terms and functions.
  std::uint64_t fingerprint() const;

  bool subset_of(const KnowledgeSet& other) const;

  friend bool operator==(const KnowledgeSet&, const KnowledgeSet&) = default;

 private:
  std::set<Term> terms_;
  std::map<std::string, int> functions_;
};

/// Composition-only deduction: `t` is derivable iff it is held, or it is a
/// tuple/application of a held function whose parts are all derivable.
bool derive(const KnowledgeSet& k, const Term& t);

/// Every term with construction depth <= `depth_bound` (held terms have
/// depth 1). Composition builds pairs and applications of held functions of
/// known arity. Throws std::invalid_argument when depth_bound < 1.
std::set<Term> close(const KnowledgeSet& k, int depth_bound);

}  // namespace anbv

#endif  // ANBV_KNOWLEDGE_HPP
