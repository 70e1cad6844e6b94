#include "mas/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "slick/parse.hpp"

#ifndef SLICK_SCENARIO_DIR
#define SLICK_SCENARIO_DIR ""
#endif

namespace mas {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot read " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

slick::Fact fact_arg(const std::string& text, const std::string& what) {
  slick::FactParse p = slick::parse_fact(text);
  if (!p.ok()) throw ScenarioError("bad " + what + ": " + text);
  return p.fact;
}

// Statement keys look like "surf 1": author then sequence number.
MessageId id_from_key(const std::string& key) {
  std::size_t cut = key.rfind(' ');
  if (cut == std::string::npos)
    throw ScenarioError("bad statement key: " + key);
  MessageId id;
  id.author = fact_arg(key.substr(0, cut), "statement author");
  id.seq = static_cast<std::uint32_t>(std::stoul(key.substr(cut + 1)));
  return id;
}

Trigger trigger_from_json(const json& j) {
  Trigger t;
  if (j.contains("on_start")) {
    t.kind = Trigger::Kind::OnStart;
  } else if (j.contains("on_truths")) {
    t.kind = Trigger::Kind::OnTruths;
    for (const json& f : j.at("on_truths"))
      t.facts.push_back(fact_arg(f.get<std::string>(), "trigger fact"));
  } else if (j.contains("on_agreement_change")) {
    t.kind = Trigger::Kind::OnAgreementChange;
    t.min_epoch = j.at("on_agreement_change").get<std::size_t>();
  } else {
    throw ScenarioError("script step has no trigger: " + j.dump());
  }
  return t;
}

Reaction reaction_from_json(const json& j) {
  Reaction r;
  if (j.contains("state")) {
    r.kind = Reaction::Kind::StateAndGossip;
    r.statement = j.at("state").get<std::string>();
    if (j.contains("gossip_to")) {
      const json& g = j.at("gossip_to");
      if (g.is_string() && g.get<std::string>() == "all") {
        r.gossip.all = true;
      } else {
        for (const json& to : g)
          r.gossip.to.push_back(fact_arg(to.get<std::string>(), "recipient"));
      }
    }
    return r;
  }
  if (j.contains("enact")) {
    r.kind = Reaction::Kind::EnactUsing;
    const json& e = j.at("enact");
    const std::string basis = e.at("basis").get<std::string>();
    if (basis == "agreement") {
      r.basis_is_current_agreement = true;
    } else {
      r.basis_is_current_agreement = false;
      r.basis_statement = basis;
    }
    const json& extras = e.at("extras");
    if (extras.is_object()) {
      r.extras_all_viewed = true;
      for (const json& x : extras.at("all_viewed_except"))
        r.extras_except.push_back(x.get<std::string>());
    } else {
      for (const json& x : extras) r.extras.push_back(x.get<std::string>());
    }
    return r;
  }
  if (j.contains("access")) {
    r.kind = Reaction::Kind::RequestAccess;
    const json& a = j.at("access");
    r.verb = a.at("verb").get<std::string>() == "reads" ? Verb::Reads
                                                        : Verb::Writes;
    r.variable = fact_arg(a.at("variable").get<std::string>(), "variable");
    return r;
  }
  if (j.contains("forget")) {
    r.kind = Reaction::Kind::Forget;
    for (const json& x : j.at("forget")) r.forget.push_back(x.get<std::string>());
    return r;
  }
  throw ScenarioError("script step has no reaction: " + j.dump());
}

}  // namespace

ScenarioSpec load_scenario(const std::string& dir) {
  fs::path root(dir);
  json manifest;
  try {
    manifest = json::parse(read_file(root / "manifest.json"));
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad manifest: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    spec.name = manifest.at("name").get<std::string>();
    for (const json& a : manifest.at("agents"))
      spec.agents.push_back(fact_arg(a.get<std::string>(), "agent"));
    spec.consortium =
        fact_arg(manifest.at("consortium").get<std::string>(), "consortium");
    if (manifest.contains("max_rounds"))
      spec.max_rounds = manifest.at("max_rounds").get<std::size_t>();
    for (const auto& [key, file] : manifest.at("statements").items()) {
      MessageId id = id_from_key(key);
      std::string source = read_file(root / file.get<std::string>());
      spec.statements.emplace(key,
                              make_message(id.author, id.seq, source));
    }
    for (const json& p : manifest.at("program")) {
      ProgramEntry entry;
      entry.after_round = p.at("round").get<std::size_t>();
      for (const json& k : p.at("agree"))
        entry.agreed.push_back(k.get<std::string>());
      spec.program.push_back(std::move(entry));
    }
    for (const auto& [agent, steps] : manifest.at("scripts").items()) {
      std::vector<ScriptStep> script;
      for (const json& s : steps)
        script.push_back({trigger_from_json(s), reaction_from_json(s)});
      spec.scripts.emplace(agent, std::move(script));
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad manifest: ") + e.what());
  }
  for (const auto& [agent, script] : spec.scripts) {
    bool known = false;
    for (const AgentId& a : spec.agents) known = known || a.render() == agent;
    if (!known) throw ScenarioError("script for unknown agent: " + agent);
  }
  for (const ProgramEntry& p : spec.program)
    for (const std::string& key : p.agreed)
      if (!spec.statements.count(key))
        throw ScenarioError("program references unknown statement: " + key);
  return spec;
}

std::string resolve_scenario_dir(const std::string& name_or_path) {
  std::vector<fs::path> candidates = {
      fs::path(name_or_path),
      fs::path("scenarios") / name_or_path,
      fs::path(SLICK_SCENARIO_DIR) / name_or_path,
  };
  for (const fs::path& c : candidates)
    if (fs::is_regular_file(c / "manifest.json")) return c.string();
  throw ScenarioError("no scenario found for '" + name_or_path + "'");
}

namespace {

class Runner {
 public:
  Runner(const ScenarioSpec& spec, const EngineOptions& options,
         const std::set<std::string>& disabled)
      : spec_(spec), options_(options), disabled_(disabled) {
    result_.trace.header.bound = options.bound;
    result_.trace.header.strict = options.strict;
    result_.trace.header.authority = options.authority;
    result_.state = initial(spec.agents);
  }

  RunResult run() {
    for (std::size_t round = 0;; ++round) {
      if (round >= spec_.max_rounds)
        throw ScenarioError("scenario '" + spec_.name +
                            "' did not quiesce within " +
                            std::to_string(spec_.max_rounds) + " rounds");
      activity_ = false;
      for (const AgentId& agent : spec_.agents) {
        if (disabled_.count(agent.render())) continue;
        take_turn(agent, round);
      }
      run_program(round);
      if (!activity_ && program_next_ == spec_.program.size()) break;
      result_.rounds = round + 1;
    }
    return std::move(result_);
  }

 private:
  const Message& statement(const std::string& key) const {
    auto it = spec_.statements.find(key);
    if (it == spec_.statements.end())
      throw ScenarioError("unknown statement: " + key);
    return it->second;
  }

  void push(Update update) {
    TraceEvent e = apply_update(result_.state, std::move(update), options_,
                                result_.trace.records.size());
    activity_ = true;
    result_.trace.records.emplace_back(std::move(e));
  }

  bool trigger_ready(const AgentId& agent, const Trigger& t,
                     std::size_t round) {
    switch (t.kind) {
      case Trigger::Kind::OnStart:
        return true;
      case Trigger::Kind::OnAgreementChange:
        return epoch_ >= t.min_epoch;
      case Trigger::Kind::OnTruths: {
        slick::Denotation d = slick::eval(
            extract(result_.state.views[agent]), options_.bound);
        for (const slick::Fact& f : t.facts)
          if (!d.is_true(f)) return false;
        return true;
      }
    }
    (void)round;
    return false;
  }

  void take_turn(const AgentId& agent, std::size_t round) {
    auto it = spec_.scripts.find(agent.render());
    if (it == spec_.scripts.end()) return;
    const std::vector<ScriptStep>& script = it->second;
    std::vector<bool>& fired = fired_[agent.render()];
    fired.resize(script.size(), false);
    for (std::size_t i = 0; i < script.size(); ++i) {
      if (fired[i]) continue;
      if (!trigger_ready(agent, script[i].trigger, round)) continue;
      fired[i] = react(agent, script[i].reaction);
    }
  }

  // Returns false when the reaction should stay pending for a retry.
  bool react(const AgentId& agent, const Reaction& r) {
    switch (r.kind) {
      case Reaction::Kind::StateAndGossip: {
        const Message& m = statement(r.statement);
        push(StateUpdate{agent, m});
        if (r.gossip.all) {
          for (const AgentId& to : spec_.agents)
            if (to != agent) push(GossipUpdate{agent, to, m});
        } else {
          for (const AgentId& to : r.gossip.to)
            push(GossipUpdate{agent, to, m});
        }
        return true;
      }
      case Reaction::Kind::EnactUsing: {
        Action a;
        a.actor = agent;
        if (r.basis_is_current_agreement) {
          if (result_.state.config.agreed.empty())
            throw ScenarioError(agent.render() +
                                " enacts on the current agreement, but none "
                                "is in force");
          a.basis = result_.state.config.agreed.front();
        } else {
          a.basis = statement(r.basis_statement);
        }
        if (r.extras_all_viewed) {
          for (const Message& m : result_.state.views[agent]) {
            if (m == a.basis) continue;
            bool excluded = false;
            for (const std::string& key : r.extras_except)
              excluded = excluded || statement(key) == m;
            if (!excluded) a.extra.push_back(m);
          }
        } else {
          for (const std::string& key : r.extras)
            a.extra.push_back(statement(key));
        }
        push(EnactUpdate{std::move(a)});
        return true;
      }
      case Reaction::Kind::RequestAccess: {
        AccessRequest req{agent, r.verb, r.variable, latest_enactment(agent)};
        AccessEvent got = request_access(result_.store, result_.trace, req);
        activity_ = true;
        // Not-yet-written assets become available once the writer's own
        // accesses land, so keep the request pending.
        return !(got.reason && *got.reason == Deny::NoSuchAsset);
      }
      case Reaction::Kind::Forget: {
        for (const std::string& key : r.forget)
          push(ForgetUpdate{agent, statement(key)});
        return true;
      }
    }
    return true;
  }

  std::size_t latest_enactment(const AgentId& agent) const {
    for (std::size_t i = result_.trace.records.size(); i-- > 0;) {
      const auto* ev = std::get_if<TraceEvent>(&result_.trace.records[i]);
      if (ev == nullptr || !ev->applied) continue;
      const auto* en = std::get_if<EnactUpdate>(&ev->update);
      if (en != nullptr && en->action.actor == agent) return i;
    }
    return result_.trace.records.size();  // denied as NoSuchEnactment
  }

  void run_program(std::size_t round) {
    while (program_next_ < spec_.program.size() &&
           spec_.program[program_next_].after_round <= round) {
      const ProgramEntry& entry = spec_.program[program_next_++];
      AgreeUpdate u;
      u.issuer = spec_.consortium;
      for (const std::string& key : entry.agreed)
        u.agreed.push_back(statement(key));
      push(std::move(u));
      ++epoch_;
    }
  }

  const ScenarioSpec& spec_;
  EngineOptions options_;
  std::set<std::string> disabled_;
  RunResult result_;
  std::map<std::string, std::vector<bool>> fired_;
  std::size_t program_next_ = 0;
  std::size_t epoch_ = 0;
  bool activity_ = false;
};

}  // namespace

RunResult run_scenario(const ScenarioSpec& spec, const EngineOptions& options,
                       const std::set<std::string>& disabled_agents) {
  return Runner(spec, options, disabled_agents).run();
}

}  // namespace mas
