#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "doctest.h"
#include "mas/dataplane.hpp"
#include "mas/runtime.hpp"
#include "mas/trace.hpp"

using namespace mas;
using slick::Fact;

namespace {

Fact leaf(const std::string& s) { return Fact::leaf(s); }

struct Fixture {
  SystemState state = initial({leaf("consortium"), leaf("amy"), leaf("bob")});
  EngineOptions options;
  Trace trace;

  TraceEvent apply(Update u) {
    TraceEvent e =
        apply_update(state, std::move(u), options, trace.records.size());
    trace.records.emplace_back(e);
    return e;
  }
};

Message msg(const std::string& author, std::uint32_t seq,
            const std::string& src) {
  return make_message(leaf(author), seq, src);
}

}  // namespace

TEST_CASE("the initial state is empty and accurate") {
  SystemState s = initial({leaf("amy"), leaf("bob")});
  CHECK(s.config.stated.empty());
  CHECK(s.config.enacted.empty());
  CHECK(s.config.agreed.empty());
  CHECK(s.views.size() == 2);
  CHECK(s.views[leaf("amy")].empty());
  CHECK(accurate(s));
}

TEST_CASE("state updates require the author and are one-shot") {
  Fixture f;
  Message m = msg("amy", 1, "sun.");

  TraceEvent bad = f.apply(StateUpdate{leaf("bob"), m});
  CHECK(!bad.applied);
  CHECK(bad.reject == Reject::NotAuthor);
  CHECK(f.state.config.stated.empty());

  TraceEvent ok = f.apply(StateUpdate{leaf("amy"), m});
  CHECK(ok.applied);
  CHECK(f.state.config.is_stated(m));
  CHECK(f.state.viewed(leaf("amy"), m));
  CHECK(accurate(f.state));

  TraceEvent again = f.apply(StateUpdate{leaf("amy"), m});
  CHECK(!again.applied);
  CHECK(again.reject == Reject::AlreadyViewed);
}

TEST_CASE("gossip moves only viewed messages") {
  Fixture f;
  Message m = msg("amy", 1, "sun.");

  TraceEvent bad = f.apply(GossipUpdate{leaf("amy"), leaf("bob"), m});
  CHECK(!bad.applied);
  CHECK(bad.reject == Reject::BadGossip);

  f.apply(StateUpdate{leaf("amy"), m});
  TraceEvent ok = f.apply(GossipUpdate{leaf("amy"), leaf("bob"), m});
  CHECK(ok.applied);
  CHECK(f.state.viewed(leaf("bob"), m));
  CHECK(accurate(f.state));

  // Second-hand gossip works once the recipient holds the message.
  TraceEvent onward = f.apply(GossipUpdate{leaf("bob"), leaf("consortium"), m});
  CHECK(onward.applied);
}

TEST_CASE("forget clears the view but never statedness") {
  Fixture f;
  Message m = msg("amy", 1, "sun.");

  CHECK(f.apply(ForgetUpdate{leaf("amy"), m}).reject == Reject::NotViewed);

  f.apply(StateUpdate{leaf("amy"), m});
  TraceEvent ok = f.apply(ForgetUpdate{leaf("amy"), m});
  CHECK(ok.applied);
  CHECK(!f.state.viewed(leaf("amy"), m));
  CHECK(f.state.config.is_stated(m));
  CHECK(accurate(f.state));
}

TEST_CASE("only the authority may replace the agreements") {
  Fixture f;
  Message m = msg("consortium", 1, "sun.");
  CHECK(f.apply(AgreeUpdate{leaf("amy"), {m}}).reject == Reject::NotAuthor);
  CHECK(f.state.config.agreed.empty());

  CHECK(f.apply(AgreeUpdate{leaf("consortium"), {m}}).applied);
  CHECK(f.state.config.agreed == std::vector<Message>{m});

  CHECK(f.apply(AgreeUpdate{leaf("consortium"), {}}).applied);
  CHECK(f.state.config.agreed.empty());
}

TEST_CASE("enactment requires a viewed payload and records its judgement") {
  Fixture f;
  Message basis = msg("consortium", 1, "bob reads data1 if actor bob.");
  Message extra = msg("bob", 1, "night.");
  Action a{leaf("bob"), basis, {extra}};

  CHECK(f.apply(EnactUpdate{a}).reject == Reject::PayloadNotViewed);
  CHECK(f.state.config.enacted.empty());

  f.apply(StateUpdate{leaf("consortium"), basis});
  f.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  f.apply(StateUpdate{leaf("bob"), extra});
  f.apply(AgreeUpdate{leaf("consortium"), {basis}});

  TraceEvent e = f.apply(EnactUpdate{a});
  CHECK(e.applied);
  REQUIRE(e.permission.has_value());
  CHECK(e.permission->valid);
  CHECK(e.permission->sourced);
  CHECK(e.permission->based);
  CHECK(e.permission->permitted());
  REQUIRE(e.effects.size() == 1);
  CHECK(e.effects.front().fact.render() == "bob reads data1");
  CHECK(f.state.config.enacted.size() == 1);
  CHECK(accurate(f.state));

  // Enacting transitively states the payload, reflection included.
  CHECK(f.state.config.is_stated(reflect_actor(leaf("bob"))));
}

TEST_CASE("prohibited enactments are logged loosely, rejected strictly") {
  Fixture f;
  Message basis = msg("consortium", 1, "bob reads data1 if actor bob.");
  f.apply(StateUpdate{leaf("consortium"), basis});
  f.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  Action a{leaf("bob"), basis, {}};

  // agreed is empty, so the action is unbased.
  TraceEvent loose = f.apply(EnactUpdate{a});
  CHECK(loose.applied);
  REQUIRE(loose.permission.has_value());
  CHECK(loose.permission->valid);
  CHECK(loose.permission->sourced);
  CHECK(!loose.permission->based);
  CHECK(!loose.permission->permitted());
  CHECK(f.state.config.enacted.size() == 1);

  Fixture strict;
  strict.options.strict = true;
  strict.apply(StateUpdate{leaf("consortium"), basis});
  strict.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  TraceEvent rej = strict.apply(EnactUpdate{a});
  CHECK(!rej.applied);
  CHECK(rej.reject == Reject::Prohibited);
  REQUIRE(rej.permission.has_value());
  CHECK(!rej.permission->permitted());
  CHECK(rej.effects.size() == 1);  // judged, but not enacted
  CHECK(strict.state.config.enacted.empty());
}

TEST_CASE("traces round-trip through JSON lines") {
  Fixture f;
  Message basis = msg("consortium", 1, "bob reads data1 if actor bob.");
  f.apply(StateUpdate{leaf("consortium"), basis});
  f.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  f.apply(AgreeUpdate{leaf("consortium"), {basis}});
  f.apply(EnactUpdate{Action{leaf("bob"), basis, {}}});
  f.apply(ForgetUpdate{leaf("bob"), basis});
  f.apply(StateUpdate{leaf("bob"), basis});  // rejected: not the author
  AccessRequest req{leaf("bob"), Verb::Reads, leaf("data1"), 3};
  AssetStore store;
  request_access(store, f.trace, req);

  std::string text = trace_to_jsonl(f.trace);
  Trace back = trace_from_jsonl(text);
  CHECK(back.header.format == f.trace.header.format);
  CHECK(back.header.bound == f.trace.header.bound);
  CHECK(back.header.strict == f.trace.header.strict);
  CHECK(back.header.authority == f.trace.header.authority);
  REQUIRE(back.records.size() == f.trace.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i)
    CHECK(record_to_json(back.records[i]) == record_to_json(f.trace.records[i]));
  CHECK(trace_to_jsonl(back) == text);

  std::string path =
      (std::filesystem::temp_directory_path() / "roundtrip.jsonl").string();
  save_trace(f.trace, path);
  Trace loaded = load_trace(path);
  CHECK(trace_to_jsonl(loaded) == text);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(trace_from_jsonl("not json\n"), TraceFormatError);
  CHECK_THROWS_AS(trace_from_jsonl("{\"format\":\"other/9\"}\n"),
                  TraceFormatError);
}

TEST_CASE("replay reproduces traces and flags tampering") {
  CHECK(replay(Trace{}).state.config.stated.empty());

  Fixture f;
  Message basis = msg("consortium", 1, "bob reads data1 if actor bob.");
  f.apply(StateUpdate{leaf("consortium"), basis});
  f.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  f.apply(AgreeUpdate{leaf("consortium"), {basis}});
  f.apply(EnactUpdate{Action{leaf("bob"), basis, {}}});

  ReplayResult r = replay(f.trace);
  CHECK(r.state.config.enacted.size() == 1);
  CHECK(r.snapshots.size() == f.trace.records.size());
  CHECK(r.snapshots.back().config.agreed == f.state.config.agreed);

  Trace tampered = f.trace;
  auto& ev = std::get<TraceEvent>(tampered.records[3]);
  ev.permission->valid = !ev.permission->valid;
  CHECK_THROWS_AS(replay(tampered), ReplayDivergence);
  try {
    replay(tampered);
  } catch (const ReplayDivergence& d) {
    CHECK(d.index == 3);
  }

  Trace wrong_outcome = f.trace;
  std::get<TraceEvent>(wrong_outcome.records[1]).applied = false;
  CHECK_THROWS_AS(replay(wrong_outcome), ReplayDivergence);
}

TEST_CASE("audit reports the judgement of an enactment") {
  Fixture f;
  Message basis = msg("consortium", 1, "bob reads data1 if actor bob.");
  f.apply(StateUpdate{leaf("consortium"), basis});
  f.apply(GossipUpdate{leaf("consortium"), leaf("bob"), basis});
  f.apply(AgreeUpdate{leaf("consortium"), {basis}});
  f.apply(EnactUpdate{Action{leaf("bob"), basis, {}}});

  AuditReport report = audit(f.trace, 3);
  CHECK(report.index == 3);
  CHECK(report.action.actor == leaf("bob"));
  CHECK(report.payload.size() == 2);
  CHECK(report.permission.permitted());
  CHECK(report.effects.size() == 1);
  CHECK(report.error_facts.empty());
  CHECK(!report.render().empty());
  CHECK(report.render() == audit(f.trace, 3).render());

  CHECK_THROWS_AS(audit(f.trace, 0), NotAnEnactment);
  CHECK_THROWS_AS(audit(f.trace, 99), NotAnEnactment);
  CHECK(audit_all(f.trace).size() == 1);
}

TEST_CASE("audit surfaces the error facts of an invalid enactment") {
  Fixture f;
  Message m1 = msg("amy", 1, "error if bob reads data1.");
  Message m2 = msg("bob", 1, "bob reads data1.");
  f.apply(StateUpdate{leaf("amy"), m1});
  f.apply(GossipUpdate{leaf("amy"), leaf("bob"), m1});
  f.apply(StateUpdate{leaf("bob"), m2});
  f.apply(AgreeUpdate{leaf("consortium"), {m1}});
  TraceEvent e = f.apply(EnactUpdate{Action{leaf("bob"), m1, {m2}}});
  CHECK(e.applied);
  REQUIRE(e.permission.has_value());
  CHECK(!e.permission->valid);

  AuditReport report = audit(f.trace, 4);
  CHECK(!report.permission.valid);
  REQUIRE(report.error_facts.size() == 1);
  CHECK(report.error_facts.front() == leaf("error"));
  CHECK(report.effects.size() == 1);
}
