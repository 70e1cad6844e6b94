#include <set>
#include <string>
#include <variant>
#include <vector>

#include "checks.hpp"
#include "doctest.h"
#include "mas/scenario.hpp"
#include "slick/parse.hpp"

using namespace mas;
using slick::Fact;

namespace {

Fact leaf(const std::string& s) { return Fact::leaf(s); }

Fact fact(const std::string& s) {
  slick::FactParse p = slick::parse_fact(s);
  REQUIRE(p.ok());
  return p.fact;
}

RunResult run(const std::string& name, bool strict = false,
              const std::set<std::string>& disabled = {}) {
  ScenarioSpec spec = load_scenario(resolve_scenario_dir(name));
  EngineOptions options;
  options.strict = strict;
  return run_scenario(spec, options, disabled);
}

std::vector<const TraceEvent*> applied_enacts(const Trace& trace) {
  std::vector<const TraceEvent*> out;
  for (const TraceRecord& r : trace.records) {
    const auto* ev = std::get_if<TraceEvent>(&r);
    if (ev != nullptr && ev->applied &&
        std::holds_alternative<EnactUpdate>(ev->update))
      out.push_back(ev);
  }
  return out;
}

const AccessEvent* find_access(const Trace& trace, const Fact& agent,
                               Verb verb, const Fact& variable,
                               bool granted) {
  for (const TraceRecord& r : trace.records) {
    const auto* a = std::get_if<AccessEvent>(&r);
    if (a != nullptr && a->granted == granted &&
        a->request.agent == agent && a->request.verb == verb &&
        a->request.variable == variable)
      return a;
  }
  return nullptr;
}

bool in_some_enacted_payload(const Trace& trace, const Message& m) {
  for (const TraceEvent* ev : applied_enacts(trace)) {
    const auto& action = std::get<EnactUpdate>(ev->update).action;
    for (const Message& p : payload(action))
      if (p == m) return true;
  }
  return false;
}

void check_invariants(const Trace& trace) {
  for (const std::string& p : checks::trace_problems(trace)) {
    CAPTURE(p);
    FAIL_CHECK(p);
  }
}

}  // namespace

TEST_CASE("all five bundles load with parsing statements and scripts") {
  const char* names[] = {"scenario1", "scenario2", "scenario3", "scenario4",
                         "scenario5"};
  for (const char* name : names) {
    ScenarioSpec spec = load_scenario(resolve_scenario_dir(name));
    CHECK(spec.name == name);
    CHECK(!spec.agents.empty());
    CHECK(!spec.statements.empty());
    CHECK(!spec.program.empty());
    for (const auto& [key, m] : spec.statements) {
      CHECK(key == m.id.render());
      CHECK(!m.contents.rules.empty());
    }
  }
  CHECK_THROWS_AS(resolve_scenario_dir("no-such-scenario"), ScenarioError);
}

TEST_CASE("scenario 1: the isolated workflow ends with amy's read") {
  RunResult r = run("scenario1");
  check_invariants(r.trace);

  // Every enactment in this scenario is permitted.
  auto enacts = applied_enacts(r.trace);
  CHECK(enacts.size() == 3);
  for (const TraceEvent* ev : enacts) CHECK(ev->permission->permitted());

  Fact num_patients = fact("(amy count-patients) num-patients");
  const AccessEvent* amy_read =
      find_access(r.trace, leaf("amy"), Verb::Reads, num_patients, true);
  REQUIRE(amy_read != nullptr);
  CHECK(amy_read->content == "asset:(amy count-patients) num-patients");
  CHECK(r.store.has(num_patients));

  // dan's control claim is stated yet never justifies anything.
  ScenarioSpec spec = load_scenario(resolve_scenario_dir("scenario1"));
  const Message& dan1 = spec.statements.at("dan 1");
  CHECK(r.state.config.is_stated(dan1));
  CHECK(!in_some_enacted_payload(r.trace, dan1));
}

TEST_CASE("scenario 2: bob's four-step workflow completes across domains") {
  RunResult r = run("scenario2");
  check_invariants(r.trace);

  auto enacts = applied_enacts(r.trace);
  CHECK(enacts.size() == 3);  // st-antonius, bob, surf
  for (const TraceEvent* ev : enacts) CHECK(ev->permission->permitted());

  struct Expect {
    const char* agent;
    Verb verb;
    const char* variable;
  } expected[] = {
      {"bob", Verb::Writes, "(bob step1) filter-consented"},
      {"surf", Verb::Writes, "(surf utils) entry-count"},
      {"surf", Verb::Reads, "(bob step1) filter-consented"},
      {"surf", Verb::Reads, "(st-antonius patients-2024) patients"},
      {"surf", Verb::Writes, "(bob step2) consented"},
      {"st-antonius", Verb::Writes, "(st-antonius patients-2024) patients"},
      {"st-antonius", Verb::Reads, "(surf utils) entry-count"},
      {"st-antonius", Verb::Reads, "(bob step2) consented"},
      {"st-antonius", Verb::Writes, "(bob step3) num-consented"},
      {"bob", Verb::Reads, "(bob step3) num-consented"},
  };
  for (const Expect& e : expected) {
    CAPTURE(e.variable);
    CHECK(find_access(r.trace, leaf(e.agent), e.verb, fact(e.variable),
                      true) != nullptr);
  }

  // Physical ordering shows through: some read was denied NoSuchAsset and
  // retried to a later grant.
  bool retried = false;
  for (const TraceRecord& rec : r.trace.records) {
    const auto* a = std::get_if<AccessEvent>(&rec);
    if (a == nullptr || a->granted || a->reason != Deny::NoSuchAsset) continue;
    const AccessEvent* later = find_access(r.trace, a->request.agent,
                                           a->request.verb,
                                           a->request.variable, true);
    if (later != nullptr && later->index > a->index) retried = true;
  }
  CHECK(retried);
}

TEST_CASE("scenario 3: both workflows interleave in one run") {
  RunResult r = run("scenario3");
  check_invariants(r.trace);

  auto enacts = applied_enacts(r.trace);
  CHECK(enacts.size() == 6);
  for (const TraceEvent* ev : enacts) CHECK(ev->permission->permitted());

  CHECK(find_access(r.trace, leaf("amy"), Verb::Reads,
                    fact("(amy count-patients) num-patients"), true) !=
        nullptr);
  CHECK(find_access(r.trace, leaf("bob"), Verb::Reads,
                    fact("(bob step3) num-consented"), true) != nullptr);
}

TEST_CASE("scenario 3: bob's workflow survives amy crashing at start") {
  RunResult r = run("scenario3", false, {"amy"});
  check_invariants(r.trace);

  for (const TraceEvent* ev : applied_enacts(r.trace))
    CHECK(ev->permission->permitted());

  // Scenario 2's chain still completes...
  CHECK(find_access(r.trace, leaf("bob"), Verb::Reads,
                    fact("(bob step3) num-consented"), true) != nullptr);
  // ...while amy's half never happens.
  CHECK(find_access(r.trace, leaf("amy"), Verb::Reads,
                    fact("(amy count-patients) num-patients"), true) ==
        nullptr);
  CHECK(!r.store.has(fact("(amy count-patients) num-patients")));
}

TEST_CASE("scenario 4: delegation authorises surf without st-antonius") {
  RunResult r = run("scenario4");
  check_invariants(r.trace);

  ScenarioSpec spec = load_scenario(resolve_scenario_dir("scenario4"));

  const TraceEvent* surf_enact = nullptr;
  for (const TraceEvent* ev : applied_enacts(r.trace)) {
    const auto& action = std::get<EnactUpdate>(ev->update).action;
    if (action.actor == leaf("surf")) surf_enact = ev;
  }
  REQUIRE(surf_enact != nullptr);
  CHECK(surf_enact->permission->permitted());

  // The justification predates the delegation statement: no st-antonius
  // message newer than st-antonius 5 appears in the payload.
  const auto& action = std::get<EnactUpdate>(surf_enact->update).action;
  for (const Message& m : payload(action))
    if (m.author() == leaf("st-antonius")) CHECK(m.id.seq <= 5);
  bool reads_patients = false;
  for (const Effect& e : surf_enact->effects)
    reads_patients =
        reads_patients ||
        (e.verb == Verb::Reads &&
         e.variable == fact("(st-antonius patients-2024) patients"));
  CHECK(reads_patients);
  CHECK(find_access(r.trace, leaf("surf"), Verb::Reads,
                    fact("(st-antonius patients-2024) patients"), true) !=
        nullptr);

  // The sensitive statement reaches surf only, and surf later forgets it.
  const Message& st6 = spec.statements.at("st-antonius 6");
  CHECK(r.state.config.is_stated(st6));
  CHECK(!r.state.viewed(leaf("dan"), st6));
  CHECK(!r.state.viewed(leaf("consortium"), st6));
  CHECK(!r.state.viewed(leaf("surf"), st6));  // forgotten after reading
  CHECK(!in_some_enacted_payload(r.trace, st6));
}

TEST_CASE("scenario 5: amendment, break-the-glass, and recovery") {
  RunResult r = run("scenario5");
  check_invariants(r.trace);

  ScenarioSpec spec = load_scenario(resolve_scenario_dir("scenario5"));
  const Message& c1 = spec.statements.at("consortium 1");
  const Message& c2 = spec.statements.at("consortium 2");

  // The agree stream ran in full: c1, c2, break-the-glass, c2 again.
  std::vector<std::vector<Message>> agreements;
  for (const TraceRecord& rec : r.trace.records) {
    const auto* ev = std::get_if<TraceEvent>(&rec);
    if (ev == nullptr || !ev->applied) continue;
    if (const auto* agree = std::get_if<AgreeUpdate>(&ev->update))
      agreements.push_back(agree->agreed);
  }
  REQUIRE(agreements.size() == 4);
  CHECK(agreements[0] == std::vector<Message>{c1});
  CHECK(agreements[1] == std::vector<Message>{c2});
  CHECK(agreements[2].empty());
  CHECK(agreements[3] == std::vector<Message>{c2});

  // amy's enactment under consortium 2 needs no authorisation message:
  // the insensitivity statement cuts st-antonius's involvement.
  const TraceEvent* amy_enact = nullptr;
  const TraceEvent* dan_enact = nullptr;
  const TraceEvent* surf_recovery = nullptr;
  for (const TraceEvent* ev : applied_enacts(r.trace)) {
    const auto& action = std::get<EnactUpdate>(ev->update).action;
    if (action.actor == leaf("amy")) amy_enact = ev;
    if (action.actor == leaf("dan")) dan_enact = ev;
    if (action.actor == leaf("surf") && action.basis == c2)
      surf_recovery = ev;
  }
  REQUIRE(amy_enact != nullptr);
  CHECK(amy_enact->permission->permitted());
  CHECK(std::get<EnactUpdate>(amy_enact->update).action.basis == c2);

  // dan acted while the agreements were empty: recorded, judged prohibited.
  REQUIRE(dan_enact != nullptr);
  CHECK(dan_enact->permission->valid);
  CHECK(dan_enact->permission->sourced);
  CHECK(!dan_enact->permission->based);
  CHECK(!dan_enact->permission->permitted());

  // Every enactment between break-the-glass and recovery is prohibited.
  std::size_t glass = 0, restore = 0, seen = 0;
  for (std::size_t i = 0; i < r.trace.records.size(); ++i) {
    const auto* ev = std::get_if<TraceEvent>(&r.trace.records[i]);
    if (ev == nullptr || !ev->applied) continue;
    if (std::holds_alternative<AgreeUpdate>(ev->update)) {
      ++seen;
      if (seen == 3) glass = i;
      if (seen == 4) restore = i;
    }
  }
  REQUIRE(glass < restore);
  for (const TraceEvent* ev : applied_enacts(r.trace)) {
    if (ev->index > glass && ev->index < restore)
      CHECK(!ev->permission->permitted());
  }

  // Activity resumed after the agreements were restored.
  REQUIRE(surf_recovery != nullptr);
  CHECK(surf_recovery->index > restore);
  CHECK(surf_recovery->permission->permitted());
}

TEST_CASE("scenario 5 strict: the prohibited enactment is rejected") {
  RunResult r = run("scenario5", true);
  check_invariants(r.trace);

  const TraceEvent* dan_reject = nullptr;
  for (const TraceRecord& rec : r.trace.records) {
    const auto* ev = std::get_if<TraceEvent>(&rec);
    if (ev == nullptr || ev->applied) continue;
    const auto* en = std::get_if<EnactUpdate>(&ev->update);
    if (en != nullptr && en->action.actor == leaf("dan")) dan_reject = ev;
  }
  REQUIRE(dan_reject != nullptr);
  CHECK(dan_reject->reject == Reject::Prohibited);
  REQUIRE(dan_reject->permission.has_value());
  CHECK(!dan_reject->permission->based);

  for (const TraceEvent* ev : applied_enacts(r.trace))
    CHECK(ev->permission->permitted());
}
