#ifndef ANBV_TERM_HPP
#define ANBV_TERM_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace anbv {

enum class AtomKind : std::uint8_t {
  Trusted,   // lower-case agent constants, never played by the intruder
  Honest,    // honest instantiation of a role variable
  Intruder,  // the intruder identity `i`
  Public,    // public constants, including the intruder's junk constant
};

/// Immutable symbolic message term.
///
/// Terms are cheap to copy handles onto shared, hash-annotated nodes.
/// Equality is structural; function symbols are uninterpreted, and tuples are
/// fixed-arity and never flattened.
class Term {
 public:
  enum class Kind : std::uint8_t { Atom, Variable, Fresh, FnApp, Tuple };

  Term();  // the atom "?"; only useful as a placeholder

  static Term atom(std::string name, AtomKind kind);
  static Term variable(std::string name);
  static Term fresh(std::string name, int session, std::string owner);
  static Term apply(std::string fn, std::vector<Term> args);
  /// Throws std::invalid_argument when fewer than two items are given.
  static Term tuple(std::vector<Term> items);

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_variable() const { return kind() == Kind::Variable; }
  bool is_fresh() const { return kind() == Kind::Fresh; }
  bool is_fnapp() const { return kind() == Kind::FnApp; }
  bool is_tuple() const { return kind() == Kind::Tuple; }

  /// Atom/variable/fresh name, or the function symbol of an application.
  const std::string& name() const { return node_->name; }
  AtomKind atom_kind() const { return node_->atom_kind; }
  int session() const { return node_->session; }
  const std::string& owner() const { return node_->owner; }
  /// Function arguments or tuple items; empty for leaves.
  std::span<const Term> args() const { return node_->children; }

  std::uint64_t hash() const { return node_->hash; }
  bool is_ground() const { return node_->ground; }
  /// Leaves have depth 1.
  int depth() const { return node_->depth; }

  bool contains(const Term& sub) const;
  std::string str() const;

  friend bool operator==(const Term& a, const Term& b);
  /// Total order by hash, then structure: stable across runs, not alphabetical.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind = Kind::Atom;
    AtomKind atom_kind = AtomKind::Public;
    int session = 0;
    std::string name;
    std::string owner;
    std::vector<Term> children;
    std::uint64_t hash = 0;
    bool ground = true;
    int depth = 1;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(Node node);

  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return static_cast<std::size_t>(t.hash()); }
};

/// Collects every distinct variable occurring in `t`, in first-occurrence order.
std::vector<Term> variables_of(const Term& t);

std::uint64_t mix_hash(std::uint64_t seed, std::uint64_t value);

}  // namespace anbv

#endif  // ANBV_TERM_HPP
