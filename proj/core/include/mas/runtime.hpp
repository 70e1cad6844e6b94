#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mas/model.hpp"

namespace mas {

/// The authoritative ledger: which actions are enacted, which messages are
/// stated, and the current ordered agreement list.
struct Config {
  std::vector<Action> enacted;
  std::vector<Message> stated;
  std::vector<Message> agreed;

  bool is_stated(const Message& m) const;
  bool is_agreed(const Message& m) const;
  void add_stated(const Message& m);  // append, deduplicating by equality

  ConfigView view_for_permission() const;
};

struct SystemState {
  Config config;
  std::map<AgentId, std::vector<Message>> views;

  std::vector<Message>& view(const AgentId& a) { return views[a]; }
  bool viewed(const AgentId& a, const Message& m) const;
  void add_view(const AgentId& a, const Message& m);
};

SystemState initial(const std::vector<AgentId>& agents);

struct StateUpdate {
  AgentId issuer;
  Message message;
};
struct EnactUpdate {
  Action action;
};
struct AgreeUpdate {
  AgentId issuer;
  std::vector<Message> agreed;
};
struct GossipUpdate {
  AgentId from;
  AgentId to;
  Message message;
};
struct ForgetUpdate {
  AgentId agent;
  Message message;
};

using Update =
    std::variant<StateUpdate, EnactUpdate, AgreeUpdate, GossipUpdate,
                 ForgetUpdate>;

enum class Reject : std::uint8_t {
  NotAuthor,
  AlreadyViewed,
  PayloadNotViewed,
  BadGossip,
  NotViewed,
  Prohibited,  // only under strict mode
};

std::string reject_name(Reject r);

/// One line of the audit trail. Rejected updates leave the state unchanged.
struct TraceEvent {
  std::size_t index = 0;
  Update update;
  bool applied = false;
  std::optional<Reject> reject;
  std::optional<PermissionBreakdown> permission;  // enactments only
  std::vector<Effect> effects;                    // enactments only
};

struct EngineOptions {
  std::size_t bound = slick::kDefaultBound;
  /// When set, prohibited enactments are rejected instead of logged.
  bool strict = false;
  /// The only issuer whose Agree updates are accepted.
  AgentId authority = slick::Fact::leaf("consortium");
};

/// Applies one update, mutating the state on success, and returns the trace
/// event describing what happened. Precondition failures reject the update
/// rather than aborting the run. Permission for an enactment is judged
/// against the configuration that includes the enactment itself, so an
/// applied enactment is always sourced.
TraceEvent apply_update(SystemState& state, Update update,
                        const EngineOptions& options, std::size_t index);

/// Accuracy: every message in any agent's view is stated.
bool accurate(const SystemState& state);

}  // namespace mas
