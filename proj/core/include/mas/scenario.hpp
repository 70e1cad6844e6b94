#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mas/dataplane.hpp"
#include "mas/trace.hpp"

namespace mas {

struct Trigger {
  enum class Kind : std::uint8_t { OnStart, OnTruths, OnAgreementChange };
  Kind kind = Kind::OnStart;
  std::vector<slick::Fact> facts;  // OnTruths: all must be true in own view
  std::size_t min_epoch = 1;       // OnAgreementChange: agree count reached
};

struct GossipSpec {
  bool all = false;  // every other agent
  std::vector<AgentId> to;
};

struct Reaction {
  enum class Kind : std::uint8_t {
    StateAndGossip,
    EnactUsing,
    RequestAccess,
    Forget,
  };
  Kind kind = Kind::StateAndGossip;

  // StateAndGossip
  std::string statement;  // statement key, e.g. "surf 1"
  GossipSpec gossip;

  // EnactUsing
  bool basis_is_current_agreement = true;
  std::string basis_statement;          // used when not the current agreement
  bool extras_all_viewed = false;       // view minus exceptions minus basis
  std::vector<std::string> extras_except;
  std::vector<std::string> extras;      // explicit statement keys

  // RequestAccess; the justifying action is the agent's latest enactment.
  Verb verb = Verb::Reads;
  slick::Fact variable;

  // Forget
  std::vector<std::string> forget;
};

/// One script step: a one-shot reaction guarded by a trigger. A denied
/// RequestAccess stays pending while the asset does not exist yet.
struct ScriptStep {
  Trigger trigger;
  Reaction reaction;
};

struct ProgramEntry {
  std::size_t after_round = 0;
  std::vector<std::string> agreed;  // statement keys
};

struct ScenarioSpec {
  std::string name;
  std::vector<AgentId> agents;  // round-robin order
  AgentId consortium = slick::Fact::leaf("consortium");
  std::map<std::string, Message> statements;
  std::vector<ProgramEntry> program;  // ordered Agree stream
  std::map<std::string, std::vector<ScriptStep>> scripts;  // by agent name
  std::size_t max_rounds = 64;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads a scenario bundle: a directory holding manifest.json plus one
/// .slick file per statement.
ScenarioSpec load_scenario(const std::string& dir);

/// Resolves a scenario name against a directory path, ./scenarios, and the
/// build-time default directory.
std::string resolve_scenario_dir(const std::string& name_or_path);

struct RunResult {
  Trace trace;
  SystemState state;
  AssetStore store;
  std::size_t rounds = 0;
};

/// Runs the scenario to quiescence: single-threaded round-robin over the
/// agents, then the consortium's Agree stream, until a full round passes
/// with no activity and the stream is exhausted.
RunResult run_scenario(const ScenarioSpec& spec,
                       const EngineOptions& options = {},
                       const std::set<std::string>& disabled_agents = {});

}  // namespace mas
