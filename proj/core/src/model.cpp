#include "mas/model.hpp"

#include <utility>

#include "slick/parse.hpp"

namespace mas {

std::string MessageId::render() const {
  return author.render() + " " + std::to_string(seq);
}

Message make_message(AgentId author, std::uint32_t seq, std::string source) {
  slick::ParseResult r = slick::parse_policy(source);
  if (!r.ok()) {
    std::string what = "message " + author.render() + " " +
                       std::to_string(seq) + " does not parse:";
    for (const slick::Diag& d : r.diags) what += "\n  " + d.render();
    throw std::invalid_argument(what);
  }
  Message m;
  m.id = {std::move(author), seq};
  m.contents = std::move(r.policy);
  m.source = std::move(source);
  return m;
}

std::string verb_name(Verb v) { return v == Verb::Reads ? "reads" : "writes"; }

slick::Rule reflect_author(slick::Rule rule, const AgentId& author) {
  rule.head = slick::Atom::node({slick::Atom::from_fact(author),
                                 slick::Atom::lit("says"),
                                 std::move(rule.head)});
  return rule;
}

slick::Policy extract(const std::vector<Message>& messages) {
  std::vector<const Message*> unique;
  for (const Message& m : messages) {
    bool seen = false;
    for (const Message* u : unique)
      if (*u == m) {
        seen = true;
        break;
      }
    if (!seen) unique.push_back(&m);
  }
  slick::Policy out;
  for (const Message* m : unique) {
    for (const slick::Rule& r : m->contents.rules) {
      out.rules.push_back(r);
      out.rules.push_back(reflect_author(r, m->author()));
    }
  }
  return out;
}

Message reflect_actor(const AgentId& actor) {
  slick::Rule rule;
  rule.head = slick::Atom::node(
      {slick::Atom::lit("actor"), slick::Atom::from_fact(actor)});
  Message m;
  m.id = {actor, 0};
  m.contents.rules.push_back(std::move(rule));
  m.source = m.contents.rules.front().render();
  return m;
}

std::vector<Message> payload(const Action& action) {
  std::vector<Message> out;
  out.reserve(action.extra.size() + 2);
  out.push_back(action.basis);
  out.push_back(reflect_actor(action.actor));
  out.insert(out.end(), action.extra.begin(), action.extra.end());
  return out;
}

Effect effect_from_fact(const slick::Fact& fact, bool& ok) {
  ok = false;
  Effect e;
  if (fact.is_leaf() || fact.children().size() != 3) return e;
  const slick::Fact& verb = fact.children()[1];
  if (!verb.is_leaf()) return e;
  if (verb.text() == "reads") e.verb = Verb::Reads;
  else if (verb.text() == "writes") e.verb = Verb::Writes;
  else return e;
  e.affector = fact.children()[0];
  e.variable = fact.children()[2];
  e.fact = fact;
  ok = true;
  return e;
}

std::vector<Effect> enum_effects_of(const Action& action, std::size_t bound) {
  slick::Denotation d = slick::eval(extract(payload(action)), bound);
  std::vector<Effect> out;
  for (const slick::Fact& f : d.trues) {
    bool ok = false;
    Effect e = effect_from_fact(f, ok);
    if (ok) out.push_back(std::move(e));
  }
  return out;
}

bool dec_valid_act(const Action& action, std::size_t bound) {
  return slick::dec_valid(extract(payload(action)), bound);
}

PermissionBreakdown dec_permitted(const ConfigView& view, const Action& action,
                                  std::size_t bound) {
  if (!view.statedness_known)
    throw UnknownStatedness("statedness of the configuration is not known");
  PermissionBreakdown out;
  out.valid = dec_valid_act(action, bound);
  Message self = reflect_actor(action.actor);
  out.sourced = true;
  for (const Message& m : payload(action)) {
    if (m == self) continue;  // stated by the enactment itself
    bool stated = false;
    for (const Message& s : view.stated)
      if (s == m) {
        stated = true;
        break;
      }
    if (!stated) {
      out.sourced = false;
      out.unsourced.push_back(m.id);
    }
  }
  out.based = false;
  for (const Message& a : view.agreed)
    if (a == action.basis) {
      out.based = true;
      break;
    }
  return out;
}

}  // namespace mas
