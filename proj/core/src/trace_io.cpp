#include "mas/trace.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "mas/dataplane.hpp"
#include "slick/parse.hpp"

namespace mas {

namespace {

using nlohmann::json;

slick::Fact fact_from_string(const std::string& text) {
  slick::FactParse p = slick::parse_fact(text);
  if (!p.ok()) throw TraceFormatError("bad fact in trace: " + text);
  return p.fact;
}

json message_to_json(const Message& m) {
  return {{"author", m.author().render()},
          {"seq", m.id.seq},
          {"policy", m.source}};
}

Message message_from_json(const json& j) {
  return make_message(fact_from_string(j.at("author").get<std::string>()),
                      j.at("seq").get<std::uint32_t>(),
                      j.at("policy").get<std::string>());
}

json messages_to_json(const std::vector<Message>& ms) {
  json out = json::array();
  for (const Message& m : ms) out.push_back(message_to_json(m));
  return out;
}

std::vector<Message> messages_from_json(const json& j) {
  std::vector<Message> out;
  for (const json& e : j) out.push_back(message_from_json(e));
  return out;
}

json action_to_json(const Action& a) {
  return {{"actor", a.actor.render()},
          {"basis", message_to_json(a.basis)},
          {"extra", messages_to_json(a.extra)}};
}

Action action_from_json(const json& j) {
  Action a;
  a.actor = fact_from_string(j.at("actor").get<std::string>());
  a.basis = message_from_json(j.at("basis"));
  a.extra = messages_from_json(j.at("extra"));
  return a;
}

json update_to_json(const Update& u) {
  if (const auto* s = std::get_if<StateUpdate>(&u))
    return {{"kind", "state"},
            {"issuer", s->issuer.render()},
            {"message", message_to_json(s->message)}};
  if (const auto* e = std::get_if<EnactUpdate>(&u))
    return {{"kind", "enact"}, {"action", action_to_json(e->action)}};
  if (const auto* a = std::get_if<AgreeUpdate>(&u))
    return {{"kind", "agree"},
            {"issuer", a->issuer.render()},
            {"agreed", messages_to_json(a->agreed)}};
  if (const auto* g = std::get_if<GossipUpdate>(&u))
    return {{"kind", "gossip"},
            {"from", g->from.render()},
            {"to", g->to.render()},
            {"message", message_to_json(g->message)}};
  const auto& f = std::get<ForgetUpdate>(u);
  return {{"kind", "forget"},
          {"agent", f.agent.render()},
          {"message", message_to_json(f.message)}};
}

Update update_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "state")
    return StateUpdate{fact_from_string(j.at("issuer").get<std::string>()),
                       message_from_json(j.at("message"))};
  if (kind == "enact") return EnactUpdate{action_from_json(j.at("action"))};
  if (kind == "agree")
    return AgreeUpdate{fact_from_string(j.at("issuer").get<std::string>()),
                       messages_from_json(j.at("agreed"))};
  if (kind == "gossip")
    return GossipUpdate{fact_from_string(j.at("from").get<std::string>()),
                        fact_from_string(j.at("to").get<std::string>()),
                        message_from_json(j.at("message"))};
  if (kind == "forget")
    return ForgetUpdate{fact_from_string(j.at("agent").get<std::string>()),
                        message_from_json(j.at("message"))};
  throw TraceFormatError("unknown update kind: " + kind);
}

Reject reject_from_name(const std::string& name) {
  for (Reject r : {Reject::NotAuthor, Reject::AlreadyViewed,
                   Reject::PayloadNotViewed, Reject::BadGossip,
                   Reject::NotViewed, Reject::Prohibited})
    if (reject_name(r) == name) return r;
  throw TraceFormatError("unknown rejection reason: " + name);
}

json permission_to_json(const PermissionBreakdown& p) {
  json unsourced = json::array();
  for (const MessageId& id : p.unsourced) unsourced.push_back(id.render());
  return {{"valid", p.valid},
          {"sourced", p.sourced},
          {"based", p.based},
          {"permitted", p.permitted()},
          {"unsourced", unsourced}};
}

PermissionBreakdown permission_from_json(const json& j) {
  PermissionBreakdown p;
  p.valid = j.at("valid").get<bool>();
  p.sourced = j.at("sourced").get<bool>();
  p.based = j.at("based").get<bool>();
  for (const json& e : j.at("unsourced")) {
    const std::string text = e.get<std::string>();
    std::size_t cut = text.rfind(' ');
    if (cut == std::string::npos)
      throw TraceFormatError("bad message id: " + text);
    p.unsourced.push_back(
        {fact_from_string(text.substr(0, cut)),
         static_cast<std::uint32_t>(std::stoul(text.substr(cut + 1)))});
  }
  return p;
}

json effect_to_json(const Effect& e) {
  return {{"affector", e.affector.render()},
          {"verb", verb_name(e.verb)},
          {"variable", e.variable.render()}};
}

Effect effect_from_json(const json& j) {
  Effect e;
  e.affector = fact_from_string(j.at("affector").get<std::string>());
  e.verb = j.at("verb").get<std::string>() == "reads" ? Verb::Reads
                                                      : Verb::Writes;
  e.variable = fact_from_string(j.at("variable").get<std::string>());
  e.fact = slick::Fact::node(
      {e.affector, slick::Fact::leaf(verb_name(e.verb)), e.variable});
  return e;
}

json event_to_json(const TraceEvent& e) {
  json j = {{"type", "event"},
            {"index", e.index},
            {"update", update_to_json(e.update)},
            {"applied", e.applied}};
  if (e.reject) j["reason"] = reject_name(*e.reject);
  if (e.permission) j["permission"] = permission_to_json(*e.permission);
  if (e.permission) {
    json effects = json::array();
    for (const Effect& eff : e.effects) effects.push_back(effect_to_json(eff));
    j["effects"] = effects;
  }
  return j;
}

TraceEvent event_from_json(const json& j) {
  TraceEvent e;
  e.index = j.at("index").get<std::size_t>();
  e.update = update_from_json(j.at("update"));
  e.applied = j.at("applied").get<bool>();
  if (j.contains("reason"))
    e.reject = reject_from_name(j.at("reason").get<std::string>());
  if (j.contains("permission"))
    e.permission = permission_from_json(j.at("permission"));
  if (j.contains("effects"))
    for (const json& eff : j.at("effects"))
      e.effects.push_back(effect_from_json(eff));
  return e;
}

json access_to_json(const AccessEvent& e) {
  json j = {{"type", "access"},
            {"tag", "data-plane"},
            {"index", e.index},
            {"request",
             {{"agent", e.request.agent.render()},
              {"verb", verb_name(e.request.verb)},
              {"variable", e.request.variable.render()},
              {"action", e.request.action_ref}}},
            {"granted", e.granted}};
  if (e.reason) j["reason"] = deny_name(*e.reason);
  if (e.granted) j["content"] = e.content;
  return j;
}

AccessEvent access_from_json(const json& j) {
  AccessEvent e;
  e.index = j.at("index").get<std::size_t>();
  const json& r = j.at("request");
  e.request.agent = fact_from_string(r.at("agent").get<std::string>());
  e.request.verb = r.at("verb").get<std::string>() == "reads" ? Verb::Reads
                                                              : Verb::Writes;
  e.request.variable = fact_from_string(r.at("variable").get<std::string>());
  e.request.action_ref = r.at("action").get<std::size_t>();
  e.granted = j.at("granted").get<bool>();
  if (j.contains("reason")) {
    const std::string name = j.at("reason").get<std::string>();
    for (Deny d : {Deny::NoSuchEnactment, Deny::EffectNotOfAction,
                   Deny::NoSuchAsset})
      if (deny_name(d) == name) e.reason = d;
    if (!e.reason) throw TraceFormatError("unknown denial reason: " + name);
  }
  if (j.contains("content")) e.content = j.at("content").get<std::string>();
  return e;
}

json header_to_json(const TraceHeader& h) {
  return {{"type", "header"},
          {"format", h.format},
          {"bound", h.bound},
          {"strict", h.strict},
          {"authority", h.authority.render()}};
}

TraceHeader header_from_json(const json& j) {
  TraceHeader h;
  h.format = j.at("format").get<std::string>();
  if (h.format != TraceHeader{}.format)
    throw TraceFormatError("unsupported trace format: " + h.format);
  h.bound = j.at("bound").get<std::size_t>();
  h.strict = j.at("strict").get<bool>();
  h.authority = fact_from_string(j.at("authority").get<std::string>());
  return h;
}

}  // namespace

std::string deny_name(Deny d) {
  switch (d) {
    case Deny::NoSuchEnactment: return "NoSuchEnactment";
    case Deny::EffectNotOfAction: return "EffectNotOfAction";
    case Deny::NoSuchAsset: return "NoSuchAsset";
  }
  return "?";
}

std::string record_to_json(const TraceRecord& record) {
  if (const auto* e = std::get_if<TraceEvent>(&record))
    return event_to_json(*e).dump();
  return access_to_json(std::get<AccessEvent>(record)).dump();
}

std::string trace_to_jsonl(const Trace& trace) {
  std::string out = header_to_json(trace.header).dump();
  out += '\n';
  for (const TraceRecord& r : trace.records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << trace_to_jsonl(trace);
}

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw TraceFormatError(std::string("bad trace line: ") + e.what());
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        trace.header = header_from_json(j);
        saw_header = true;
      } else if (type == "event") {
        trace.records.emplace_back(event_from_json(j));
      } else if (type == "access") {
        trace.records.emplace_back(access_from_json(j));
      } else {
        throw TraceFormatError("unknown record type: " + type);
      }
    } catch (const json::exception& e) {
      throw TraceFormatError(std::string("bad trace record: ") + e.what());
    }
  }
  if (!saw_header) throw TraceFormatError("trace has no header line");
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return trace_from_jsonl(buf.str());
}

ReplayResult replay(const Trace& trace) {
  ReplayResult out;
  out.state = initial({});
  AssetStore store;
  Trace rebuilt;
  rebuilt.header = trace.header;
  EngineOptions options = trace.header.options();
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& rec = trace.records[i];
    if (const auto* ev = std::get_if<TraceEvent>(&rec)) {
      TraceEvent got = apply_update(out.state, ev->update, options, i);
      if (record_to_json(got) != record_to_json(rec))
        throw ReplayDivergence(i, "replay diverges at record " +
                                      std::to_string(i));
      rebuilt.records.emplace_back(std::move(got));
    } else {
      const auto& ae = std::get<AccessEvent>(rec);
      AccessEvent got = request_access(store, rebuilt, ae.request);
      if (record_to_json(got) != record_to_json(rec))
        throw ReplayDivergence(i, "replay diverges at record " +
                                      std::to_string(i));
    }
    out.snapshots.push_back(out.state);
  }
  return out;
}

namespace {

bool is_error_fact(const slick::Fact& f) {
  if (f.is_leaf()) return f.text() == "error";
  return !f.children().empty() && f.children().front().is_leaf() &&
         f.children().front().text() == "error";
}

}  // namespace

AuditReport audit(const Trace& trace, std::size_t index) {
  if (index >= trace.records.size())
    throw NotAnEnactment("record " + std::to_string(index) +
                         " is out of range");
  const auto* ev = std::get_if<TraceEvent>(&trace.records[index]);
  if (ev == nullptr || !std::holds_alternative<EnactUpdate>(ev->update))
    throw NotAnEnactment("record " + std::to_string(index) +
                         " is not an enactment");
  const Action& action = std::get<EnactUpdate>(ev->update).action;
  AuditReport out;
  out.index = index;
  out.action = action;
  out.payload = payload(action);
  if (ev->permission) out.permission = *ev->permission;
  out.effects = ev->effects;
  if (!out.permission.valid) {
    slick::Denotation d =
        slick::eval(extract(out.payload), trace.header.bound);
    for (const slick::Fact& f : d.trues)
      if (is_error_fact(f)) out.error_facts.push_back(f);
  }
  return out;
}

std::vector<AuditReport> audit_all(const Trace& trace) {
  std::vector<AuditReport> out;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto* ev = std::get_if<TraceEvent>(&trace.records[i]);
    if (ev != nullptr && std::holds_alternative<EnactUpdate>(ev->update))
      out.push_back(audit(trace, i));
  }
  return out;
}

std::string AuditReport::render() const {
  std::ostringstream out;
  out << "enactment #" << index << " by " << action.actor.render() << "\n";
  out << "  basis: " << action.basis.id.render()
      << (permission.based ? " (agreed)" : " (NOT agreed)") << "\n";
  out << "  payload:\n";
  for (const Message& m : payload)
    out << "    " << m.id.render() << ": " << m.source << "\n";
  out << "  valid: " << (permission.valid ? "yes" : "no") << "\n";
  for (const slick::Fact& f : error_facts)
    out << "    error fact: " << f.render() << "\n";
  out << "  sourced: " << (permission.sourced ? "yes" : "no") << "\n";
  for (const MessageId& id : permission.unsourced)
    out << "    unsourced: " << id.render() << "\n";
  out << "  based: " << (permission.based ? "yes" : "no") << "\n";
  out << "  permitted: " << (permission.permitted() ? "yes" : "no") << "\n";
  out << "  effects:\n";
  for (const Effect& e : effects)
    out << "    " << e.affector.render() << " " << verb_name(e.verb) << " "
        << e.variable.render() << "\n";
  return out.str();
}

}  // namespace mas
