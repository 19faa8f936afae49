#ifndef ANBV_PATTERN_HPP
#define ANBV_PATTERN_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anbv/knowledge.hpp"
#include "anbv/term.hpp"

namespace anbv {

/// Finite map from binding slots to ground values, kept sorted.
///
/// A slot is either a variable or an opaque template (a function
/// application the holder received but cannot recompute). Substitution looks
/// up whole subterms before descending, so an opaque slot stands in for its
/// entire template.
class Substitution {
 public:
  const Term* find(const Term& slot) const;
  bool bound(const Term& slot) const { return find(slot) != nullptr; }
  /// Overwrites an existing entry.
  void bind(const Term& slot, const Term& value);
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<Term, Term>>& entries() const { return entries_; }
  std::uint64_t fingerprint() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::vector<std::pair<Term, Term>> entries_;
};

/// Instantiates a template; nullopt when a variable is left unbound.
std::optional<Term> substitute(const Term& tmpl, const Substitution& sigma);

enum class SlotType : std::uint8_t { Agent, Number, Any };

/// Type of each declared variable; variables missing here are malformed.
using TypeEnv = std::map<std::string, SlotType>;

/// Whether a ground value may fill a slot of the given type.
bool admits(SlotType type, const Term& value);

/// Receiver's view of an expected message.
struct Pattern {
  enum class Kind : std::uint8_t { Check, Bind, Tuple };

  Kind kind = Kind::Check;
  Term term;  // Check: expected template; Bind: slot
  SlotType type = SlotType::Any;
  std::vector<Pattern> items;

  static Pattern check(Term expected) { return {Kind::Check, std::move(expected), SlotType::Any, {}}; }
  static Pattern bind(Term slot, SlotType type) { return {Kind::Bind, std::move(slot), type, {}}; }
  static Pattern tuple(std::vector<Pattern> items) {
    return {Kind::Tuple, Term(), SlotType::Any, std::move(items)};
  }

  /// Slots bound by this pattern, in traversal order.
  std::vector<Term> binds() const;
  std::string str() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Whether `t` is ground once the slots in `bound` are known.
bool ground_in_view(const Term& t, const std::set<Term>& bound);

class MalformedTemplate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Computes what a holder of `k` can recognise in `msg`.
///
/// `bound` lists slots already bound for the holder. Direct variable leaves
/// (reachable through tuples only) become Bind on first occurrence. A
/// subterm that is ground in the holder's view and derivable becomes Check;
/// anything else under a function symbol collapses into one opaque Bind.
/// Throws MalformedTemplate for variables absent from `types`.
Pattern recognizable_pattern(const KnowledgeSet& k, const std::set<Term>& bound, const Term& msg,
                             const TypeEnv& types);

/// Structural match of a ground payload. Binds are applied first, then every
/// Check is compared after substitution, so a Bind earlier or later in the
/// same message can feed a Check. Returns nullopt on mismatch; `sigma` is
/// never modified.
std::optional<Substitution> match_pattern(const Pattern& p, const Term& payload, const Substitution& sigma);

}  // namespace anbv

#endif  // ANBV_PATTERN_HPP
