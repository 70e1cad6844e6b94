#include "mas/runtime.hpp"

#include <algorithm>
#include <utility>

namespace mas {

bool Config::is_stated(const Message& m) const {
  return std::find(stated.begin(), stated.end(), m) != stated.end();
}

bool Config::is_agreed(const Message& m) const {
  return std::find(agreed.begin(), agreed.end(), m) != agreed.end();
}

void Config::add_stated(const Message& m) {
  if (!is_stated(m)) stated.push_back(m);
}

ConfigView Config::view_for_permission() const {
  ConfigView v;
  v.stated = stated;
  v.agreed = agreed;
  return v;
}

bool SystemState::viewed(const AgentId& a, const Message& m) const {
  auto it = views.find(a);
  if (it == views.end()) return false;
  return std::find(it->second.begin(), it->second.end(), m) != it->second.end();
}

void SystemState::add_view(const AgentId& a, const Message& m) {
  if (!viewed(a, m)) views[a].push_back(m);
}

SystemState initial(const std::vector<AgentId>& agents) {
  SystemState s;
  for (const AgentId& a : agents) s.views[a];
  return s;
}

std::string reject_name(Reject r) {
  switch (r) {
    case Reject::NotAuthor: return "NotAuthor";
    case Reject::AlreadyViewed: return "AlreadyViewed";
    case Reject::PayloadNotViewed: return "PayloadNotViewed";
    case Reject::BadGossip: return "BadGossip";
    case Reject::NotViewed: return "NotViewed";
    case Reject::Prohibited: return "Prohibited";
  }
  return "?";
}

namespace {

TraceEvent rejected(std::size_t index, Update update, Reject why) {
  TraceEvent e;
  e.index = index;
  e.update = std::move(update);
  e.applied = false;
  e.reject = why;
  return e;
}

TraceEvent applied(std::size_t index, Update update) {
  TraceEvent e;
  e.index = index;
  e.update = std::move(update);
  e.applied = true;
  return e;
}

}  // namespace

TraceEvent apply_update(SystemState& state, Update update,
                        const EngineOptions& options, std::size_t index) {
  if (auto* u = std::get_if<StateUpdate>(&update)) {
    if (u->issuer != u->message.author())
      return rejected(index, update, Reject::NotAuthor);
    if (state.viewed(u->message.author(), u->message))
      return rejected(index, update, Reject::AlreadyViewed);
    state.config.add_stated(u->message);
    state.add_view(u->message.author(), u->message);
    return applied(index, update);
  }
  if (auto* u = std::get_if<EnactUpdate>(&update)) {
    const Action& a = u->action;
    Message self = reflect_actor(a.actor);
    for (const Message& m : payload(a)) {
      if (m == self) continue;
      if (!state.viewed(a.actor, m))
        return rejected(index, update, Reject::PayloadNotViewed);
    }
    // Judge permission against the configuration as of this enactment:
    // payload messages count as stated by it.
    ConfigView view = state.config.view_for_permission();
    for (const Message& m : payload(a)) view.stated.push_back(m);
    PermissionBreakdown breakdown =
        dec_permitted(view, a, options.bound);
    std::vector<Effect> effects = enum_effects_of(a, options.bound);
    if (options.strict && !breakdown.permitted()) {
      TraceEvent e = rejected(index, update, Reject::Prohibited);
      e.permission = std::move(breakdown);
      e.effects = std::move(effects);
      return e;
    }
    state.config.enacted.push_back(a);
    for (const Message& m : payload(a)) state.config.add_stated(m);
    TraceEvent e = applied(index, update);
    e.permission = std::move(breakdown);
    e.effects = std::move(effects);
    return e;
  }
  if (auto* u = std::get_if<AgreeUpdate>(&update)) {
    if (u->issuer != options.authority)
      return rejected(index, update, Reject::NotAuthor);
    state.config.agreed = u->agreed;
    return applied(index, update);
  }
  if (auto* u = std::get_if<GossipUpdate>(&update)) {
    if (!state.viewed(u->from, u->message))
      return rejected(index, update, Reject::BadGossip);
    state.add_view(u->to, u->message);
    return applied(index, update);
  }
  const auto& u = std::get<ForgetUpdate>(update);
  if (!state.viewed(u.agent, u.message))
    return rejected(index, update, Reject::NotViewed);
  auto& v = state.views[u.agent];
  v.erase(std::remove(v.begin(), v.end(), u.message), v.end());
  return applied(index, update);
}

bool accurate(const SystemState& state) {
  for (const auto& [agent, view] : state.views)
    for (const Message& m : view)
      if (!state.config.is_stated(m)) return false;
  return true;
}

}  // namespace mas
