#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mas/runtime.hpp"

namespace mas {

enum class Deny : std::uint8_t {
  NoSuchEnactment,
  EffectNotOfAction,
  NoSuchAsset,
};

std::string deny_name(Deny d);

struct AccessRequest {
  AgentId agent;
  Verb verb;
  slick::Fact variable;
  std::size_t action_ref;  // trace index of the justifying enactment
};

/// A data-plane record: an asset read/write mediated against the trace.
struct AccessEvent {
  std::size_t index = 0;
  AccessRequest request;
  bool granted = false;
  std::optional<Deny> reason;
  std::string content;  // asset bytes moved by a granted access
};

using TraceRecord = std::variant<TraceEvent, AccessEvent>;

struct TraceHeader {
  std::string format = "slick-trace/1";
  std::size_t bound = slick::kDefaultBound;
  bool strict = false;
  AgentId authority = slick::Fact::leaf("consortium");

  EngineOptions options() const { return {bound, strict, authority}; }
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;
};

/// JSON Lines: one header line, then one record per line.
std::string trace_to_jsonl(const Trace& trace);
void save_trace(const Trace& trace, const std::string& path);

struct TraceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
Trace trace_from_jsonl(const std::string& text);
Trace load_trace(const std::string& path);

/// Canonical single-line JSON for one record, used for bit-exact replay
/// comparison and by the trace writer.
std::string record_to_json(const TraceRecord& record);

struct ReplayDivergence : std::runtime_error {
  std::size_t index;
  ReplayDivergence(std::size_t index, const std::string& what)
      : std::runtime_error(what), index(index) {}
};

struct AssetStore;  // mas/dataplane.hpp

/// Re-runs every recorded update and access request from the initial state
/// and demands bit-identical outcomes; throws ReplayDivergence otherwise.
/// Returns the reconstructed final state.
struct ReplayResult {
  SystemState state;
  std::vector<SystemState> snapshots;  // state after each record
};
ReplayResult replay(const Trace& trace);

/// Audit report for one applied enactment.
struct AuditReport {
  std::size_t index = 0;
  Action action;
  std::vector<Message> payload;
  PermissionBreakdown permission;
  std::vector<Effect> effects;
  std::vector<slick::Fact> error_facts;  // `error ...` truths when invalid

  std::string render() const;
};

struct NotAnEnactment : std::runtime_error {
  using std::runtime_error::runtime_error;
};

AuditReport audit(const Trace& trace, std::size_t index);
/// Reports for every enactment in the trace (applied or strict-rejected).
std::vector<AuditReport> audit_all(const Trace& trace);

}  // namespace mas
