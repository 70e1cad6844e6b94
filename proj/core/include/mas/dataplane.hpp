#pragma once

#include <map>
#include <string>

#include "mas/trace.hpp"

namespace mas {

struct Asset {
  std::string bytes;
  AgentId writer;
  std::size_t trace_index = 0;  // the access event that wrote it
};

/// Physical asset store, keyed by variable.
struct AssetStore {
  std::map<slick::Fact, Asset> assets;

  bool has(const slick::Fact& variable) const {
    return assets.count(variable) != 0;
  }
};

/// Deterministic placeholder contents for a written variable.
std::string asset_bytes(const slick::Fact& variable);

/// Mediates one asset access: the request must point at an applied Enact
/// whose effect list contains (agent, verb, variable). The resulting access
/// event is appended to the trace and returned.
AccessEvent request_access(AssetStore& store, Trace& trace,
                           const AccessRequest& request);

}  // namespace mas
