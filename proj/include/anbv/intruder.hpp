#ifndef ANBV_INTRUDER_HPP
#define ANBV_INTRUDER_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "anbv/knowledge.hpp"
#include "anbv/model.hpp"
#include "anbv/pattern.hpp"

namespace anbv {

/// The single intruder identity.
Term intruder_agent();
/// The intruder's junk constant, usable wherever a number or opaque value fits.
Term intruder_constant();

struct SealedEnvelope {
  Term sender;
  Term receiver;
  Term payload;
  std::string origin_label;
  int seq = 0;
  Channel channel = Channel::Secure;
  bool consumed = false;
};

struct IntruderConfig {
  /// Agent names the intruder may claim or fill into agent slots.
  std::vector<Term> agents;
  /// Narrower agent ranges for particular role variables.
  std::map<std::string, std::vector<Term>> domains;
  int compose_depth = 2;
};

/// Intruder knowledge plus every envelope seen so far. Copies share storage
/// until one of them changes.
class IntruderState {
 public:
  IntruderState();
  explicit IntruderState(KnowledgeSet initial);

  const KnowledgeSet& knowledge() const { return *knowledge_; }
  const std::vector<SealedEnvelope>& observed() const { return *observed_; }

  bool learn(const Term& t);
  void mark_consumed(std::size_t index);
  void append(SealedEnvelope env);

 private:
  std::shared_ptr<const KnowledgeSet> knowledge_;
  std::shared_ptr<const std::vector<SealedEnvelope>> observed_;
};

/// Stores the envelope; the payload is learned only when the intruder is an
/// endpoint or the channel is plain.
IntruderState observe(const IntruderState& st, const SealedEnvelope& env);

struct Delivery {
  enum class Kind { Replay, Composed };
  Kind kind = Kind::Replay;
  std::size_t envelope = 0;  // replay: index into observed()
  Term payload;
  Term claimed_sender;
  /// The receiver's bindings after matching.
  Substitution sigma;
};

struct Expectation {
  Term receiver;
  /// nullopt when the receiver does not know yet who is talking to it; the
  /// actual sender is then bound to `sender_slot` before matching.
  std::optional<Term> claimed_sender;
  std::optional<Term> sender_slot;
  Channel channel = Channel::Secure;
  const Pattern* pattern = nullptr;
  Substitution sigma;
};

/// Everything the intruder can make the receiver accept: replays of
/// envelopes sealed for it (by the expected sender, if known) and, when the
/// intruder may speak on the channel, composed payloads whose every part it
/// can derive. Agent slots range over `cfg.agents`, number slots over known
/// numbers plus the junk constant, opaque slots over held terms plus the
/// junk constant and its compositions (pairs, applications of held
/// functions) of term depth up to `cfg.compose_depth`. Order is
/// deterministic: replays by sequence, then composed payloads by term order.
std::vector<Delivery> deliverables(const IntruderState& st, const Expectation& expect, const IntruderConfig& cfg);

}  // namespace anbv

#endif  // ANBV_INTRUDER_HPP
