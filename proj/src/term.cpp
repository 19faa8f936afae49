#include "anbv/term.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace anbv {

std::uint64_t mix_hash(std::uint64_t seed, std::uint64_t value) {
  // splitmix64 finaliser over the combined word
  std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t string_hash(const std::string& s) {
  // FNV-1a; std::hash is not guaranteed stable across implementations
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Term::Term() {
  static const Term placeholder = atom("?", AtomKind::Public);
  node_ = placeholder.node_;
}

Term Term::make(Node node) {
  std::uint64_t h = mix_hash(static_cast<std::uint64_t>(node.kind), string_hash(node.name));
  switch (node.kind) {
    case Kind::Atom:
      h = mix_hash(h, static_cast<std::uint64_t>(node.atom_kind));
      break;
    case Kind::Variable:
      node.ground = false;
      break;
    case Kind::Fresh:
      h = mix_hash(h, static_cast<std::uint64_t>(node.session));
      h = mix_hash(h, string_hash(node.owner));
      break;
    case Kind::FnApp:
    case Kind::Tuple: {
      int deepest = 0;
      for (const Term& c : node.children) {
        h = mix_hash(h, c.hash());
        node.ground = node.ground && c.is_ground();
        deepest = std::max(deepest, c.depth());
      }
      h = mix_hash(h, node.children.size());
      node.depth = deepest + 1;
      break;
    }
  }
  node.hash = h;
  return Term(std::make_shared<const Node>(std::move(node)));
}

Term Term::atom(std::string name, AtomKind kind) {
  Node n;
  n.kind = Kind::Atom;
  n.name = std::move(name);
  n.atom_kind = kind;
  return make(std::move(n));
}

Term Term::variable(std::string name) {
  Node n;
  n.kind = Kind::Variable;
  n.name = std::move(name);
  return make(std::move(n));
}

Term Term::fresh(std::string name, int session, std::string owner) {
  Node n;
  n.kind = Kind::Fresh;
  n.name = std::move(name);
  n.session = session;
  n.owner = std::move(owner);
  return make(std::move(n));
}

Term Term::apply(std::string fn, std::vector<Term> args) {
  Node n;
  n.kind = Kind::FnApp;
  n.name = std::move(fn);
  n.children = std::move(args);
  return make(std::move(n));
}

Term Term::tuple(std::vector<Term> items) {
  if (items.size() < 2) throw std::invalid_argument("tuple needs at least two items");
  Node n;
  n.kind = Kind::Tuple;
  n.children = std::move(items);
  return make(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  // hashes are deterministic, so ordering by them first is still stable
  if (auto c = x.hash <=> y.hash; c != 0) return c;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  if (auto c = x.name <=> y.name; c != 0) return c;
  if (auto c = x.atom_kind <=> y.atom_kind; c != 0) return c;
  if (auto c = x.session <=> y.session; c != 0) return c;
  if (auto c = x.owner <=> y.owner; c != 0) return c;
  if (auto c = x.children.size() <=> y.children.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (auto c = x.children[i] <=> y.children[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool Term::contains(const Term& sub) const {
  if (*this == sub) return true;
  if (depth() <= sub.depth()) return false;
  return std::any_of(args().begin(), args().end(), [&](const Term& c) { return c.contains(sub); });
}

std::string Term::str() const {
  switch (kind()) {
    case Kind::Atom:
    case Kind::Variable:
      return name();
    case Kind::Fresh:
      return name() + "#" + std::to_string(session());
    case Kind::FnApp:
    case Kind::Tuple: {
      std::string out = is_fnapp() ? name() + "(" : "(";
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i) out += ", ";
        out += args()[i].str();
      }
      return out + ")";
    }
  }
  return {};
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.str(); }

std::vector<Term> variables_of(const Term& t) {
  std::vector<Term> out;
  std::function<void(const Term&)> walk = [&](const Term& u) {
    if (u.is_ground()) return;
    if (u.is_variable()) {
      if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
      return;
    }
    for (const Term& c : u.args()) walk(c);
  };
  walk(t);
  return out;
}

}  // namespace anbv
