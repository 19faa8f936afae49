#ifndef ANBV_STRAND_HPP
#define ANBV_STRAND_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anbv/knowledge.hpp"
#include "anbv/model.hpp"
#include "anbv/pattern.hpp"

namespace anbv {

enum class FactKind { Witness, Request, Secret };
const char* to_string(FactKind k);

/// A goal fact a strand emits when it executes an event.
struct FactEmission {
  FactKind kind = FactKind::Witness;
  std::string goal_id;
  /// Witness/request: the other party as seen by the emitter; nullopt when
  /// that identity is still unbound at the emission point.
  std::optional<Term> peer;
  Term payload_template;
  /// Secret only: the listed parties, as role terms.
  std::vector<Term> parties;
};

struct Event {
  enum class Kind { Send, Receive };
  Kind kind = Kind::Send;
  std::string action_label;
  std::string counterpart;   // role name of the other endpoint
  Term counterpart_term;     // role term of the other endpoint
  Channel channel = Channel::Secure;
  Term message;              // expanded template
  Pattern pattern;           // receive only
  bool binds_counterpart = false;  // receive: the channel binds the sender's identity
  std::vector<Term> fresh;   // send only: number variables minted here
  std::vector<FactEmission> facts;
  KnowledgeSet knowledge;    // symbolic knowledge after the event
  std::set<Term> bound;      // slots bound after the event
};

struct RoleStrand {
  std::string role;
  Term role_term;
  bool trusted = false;
  KnowledgeSet initial_knowledge;
  std::set<Term> initial_bound;
  std::vector<Event> events;
};

struct ProjectResult {
  std::vector<RoleStrand> strands;  // agent declaration order
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
  const RoleStrand* strand(const std::string& role) const;
};

/// Slices an expanded, validated protocol into one strand per role and
/// checks executability: every sent subterm must be derivable from what the
/// sender knows plus the numbers it mints (a number is minted by the sender
/// of the first action carrying it).
ProjectResult project(const Protocol& p);

/// Attaches witness/request/secret emissions for every goal:
/// witness at the authenticated role's first send carrying the payload,
/// request at the authenticator's last receive carrying it, secret at each
/// listed role's first event after which the payload and all parties are
/// ground in its view. Returns goal-unrealizable diagnostics.
std::vector<Diagnostic> annotate_goals(std::vector<RoleStrand>& strands, const std::vector<Goal>& goals);

/// The whole pipeline: expand definitions, project, annotate.
ProjectResult compile(const Protocol& p);

}  // namespace anbv

#endif  // ANBV_STRAND_HPP
