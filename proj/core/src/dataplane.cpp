#include "mas/dataplane.hpp"

namespace mas {

std::string asset_bytes(const slick::Fact& variable) {
  return "asset:" + variable.render();
}

AccessEvent request_access(AssetStore& store, Trace& trace,
                           const AccessRequest& request) {
  AccessEvent out;
  out.index = trace.records.size();
  out.request = request;
  auto deny = [&](Deny why) {
    out.granted = false;
    out.reason = why;
    trace.records.push_back(out);
    return out;
  };
  const TraceEvent* enactment = nullptr;
  if (request.action_ref < trace.records.size()) {
    if (const auto* ev =
            std::get_if<TraceEvent>(&trace.records[request.action_ref])) {
      if (ev->applied && std::holds_alternative<EnactUpdate>(ev->update))
        enactment = ev;
    }
  }
  if (enactment == nullptr) return deny(Deny::NoSuchEnactment);
  bool covered = false;
  for (const Effect& e : enactment->effects) {
    if (e.affector == request.agent && e.verb == request.verb &&
        e.variable == request.variable) {
      covered = true;
      break;
    }
  }
  if (!covered) return deny(Deny::EffectNotOfAction);
  if (request.verb == Verb::Writes) {
    std::string bytes = asset_bytes(request.variable);
    store.assets[request.variable] = {bytes, request.agent, out.index};
    out.granted = true;
    out.content = bytes;
    trace.records.push_back(out);
    return out;
  }
  auto it = store.assets.find(request.variable);
  if (it == store.assets.end()) return deny(Deny::NoSuchAsset);
  out.granted = true;
  out.content = it->second.bytes;
  trace.records.push_back(out);
  return out;
}

}  // namespace mas
