#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slick/ast.hpp"
#include "slick/eval.hpp"

namespace mas {

using AgentId = slick::Fact;

struct MessageId {
  AgentId author;
  std::uint32_t seq = 0;

  auto operator<=>(const MessageId&) const = default;

  std::string render() const;  // e.g. "amy 1"
};

/// A policy-carrying message. Equality is by author and contents; the id and
/// the original source text are carried for display and round-tripping.
struct Message {
  MessageId id;
  slick::Policy contents;
  std::string source;  // verbatim policy text

  const AgentId& author() const { return id.author; }

  bool operator==(const Message& o) const {
    return id.author == o.id.author && contents == o.contents;
  }
  auto operator<=>(const Message& o) const {
    if (auto c = id.author <=> o.id.author; c != 0) return c;
    return contents <=> o.contents;
  }
};

Message make_message(AgentId author, std::uint32_t seq, std::string source);

/// An enactable action: a basis agreement plus extra justifying messages.
struct Action {
  AgentId actor;
  Message basis;
  std::vector<Message> extra;

  auto operator<=>(const Action&) const = default;
  bool operator==(const Action&) const = default;
};

enum class Verb : std::uint8_t { Reads, Writes };

std::string verb_name(Verb v);

/// A data-plane effect: `affector <reads|writes> variable`, recognised from
/// true facts of exactly that three-child shape.
struct Effect {
  AgentId affector;
  Verb verb;
  slick::Fact variable;
  slick::Fact fact;  // the full effect-shaped fact

  auto operator<=>(const Effect&) const = default;
};

/// Pushes the rule's consequent under `author says ...`, preserving safety.
slick::Rule reflect_author(slick::Rule rule, const AgentId& author);

/// Flattens messages into one policy: each message contributes its rules
/// plus their author-reflected copies. Messages are deduplicated by
/// (author, contents), keeping first occurrence order.
slick::Policy extract(const std::vector<Message>& messages);

/// The synthetic `actor a.` message enactment adds on the actor's behalf.
Message reflect_actor(const AgentId& actor);

/// payload(action) = [basis, reflect_actor(actor)] ++ extra.
std::vector<Message> payload(const Action& action);

Effect effect_from_fact(const slick::Fact& fact, bool& ok);

/// All effects among the true facts of the action's extracted payload.
/// Effects are enumerated regardless of validity.
std::vector<Effect> enum_effects_of(const Action& action,
                                    std::size_t bound = slick::kDefaultBound);

bool dec_valid_act(const Action& action,
                   std::size_t bound = slick::kDefaultBound);

/// How permission views the surrounding configuration. `stated` returns
/// nullopt when statedness of a message cannot be decided.
struct ConfigView {
  std::vector<Message> stated;
  std::vector<Message> agreed;
  bool statedness_known = true;
};

struct UnknownStatedness : std::runtime_error {
  explicit UnknownStatedness(const std::string& what)
      : std::runtime_error(what) {}
};

struct PermissionBreakdown {
  bool valid = false;
  bool sourced = false;
  bool based = false;
  std::vector<MessageId> unsourced;  // payload messages not stated

  bool permitted() const { return valid && sourced && based; }
};

/// permitted = valid_act and sourced and based. The synthetic reflect_actor
/// message counts as stated by virtue of the enactment itself.
PermissionBreakdown dec_permitted(const ConfigView& view, const Action& action,
                                  std::size_t bound = slick::kDefaultBound);

}  // namespace mas
