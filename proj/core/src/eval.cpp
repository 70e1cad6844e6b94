#include "slick/eval.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace slick {

namespace {

struct Binding {
  std::string name;
  Fact value;
};

using Bindings = std::vector<Binding>;

const Fact* lookup(const Bindings& b, const std::string& name) {
  for (const Binding& e : b)
    if (e.name == name) return &e.value;
  return nullptr;
}

bool match(const Atom& pat, const Fact& f, Bindings& b) {
  switch (pat.kind()) {
    case Atom::Kind::Lit:
      return f.is_leaf() && f.text() == pat.text();
    case Atom::Kind::Var: {
      if (const Fact* bound = lookup(b, pat.text())) return *bound == f;
      b.push_back({pat.text(), f});
      return true;
    }
    case Atom::Kind::Node: {
      if (f.is_leaf() || f.children().size() != pat.children().size())
        return false;
      for (std::size_t i = 0; i < pat.children().size(); ++i)
        if (!match(pat.children()[i], f.children()[i], b)) return false;
      return true;
    }
  }
  return false;
}

// Ground instantiation straight to a Fact; bound subtrees are shared.
Fact instantiate(const Atom& a, const Bindings& b) {
  switch (a.kind()) {
    case Atom::Kind::Lit:
      return Fact::leaf(a.text());
    case Atom::Kind::Var:
      return *lookup(b, a.text());  // safety guarantees the binding
    case Atom::Kind::Node: {
      std::vector<Fact> children;
      children.reserve(a.children().size());
      for (const Atom& c : a.children()) children.push_back(instantiate(c, b));
      return Fact::node(std::move(children));
    }
  }
  return Fact();
}

Atom substitute(const Atom& a, const Bindings& b) {
  switch (a.kind()) {
    case Atom::Kind::Lit:
      return a;
    case Atom::Kind::Var:
      if (const Fact* bound = lookup(b, a.text()))
        return Atom::from_fact(*bound);
      return a;
    case Atom::Kind::Node: {
      std::vector<Atom> children;
      children.reserve(a.children().size());
      for (const Atom& c : a.children()) children.push_back(substitute(c, b));
      return Atom::node(std::move(children));
    }
  }
  return a;
}

using Env = std::vector<std::pair<std::string, Atom>>;

const Atom* env_lookup(const Env& env, const std::string& name) {
  for (const auto& [n, v] : env)
    if (n == name) return &v;
  return nullptr;
}

bool occurs(const std::string& name, const Atom& a, const Env& env) {
  if (a.kind() == Atom::Kind::Var) {
    if (a.text() == name) return true;
    if (const Atom* v = env_lookup(env, a.text())) return occurs(name, *v, env);
    return false;
  }
  for (const Atom& c : a.children())
    if (occurs(name, c, env)) return true;
  return false;
}

// First-order unification with occurs check; `env` accumulates the unifier.
bool unify(const Atom& x, const Atom& y, Env& env) {
  if (x.kind() == Atom::Kind::Var) {
    if (const Atom* v = env_lookup(env, x.text())) return unify(*v, y, env);
    if (y.kind() == Atom::Kind::Var && y.text() == x.text()) return true;
    if (occurs(x.text(), y, env)) return false;
    env.emplace_back(x.text(), y);
    return true;
  }
  if (y.kind() == Atom::Kind::Var) return unify(y, x, env);
  if (x.kind() == Atom::Kind::Lit || y.kind() == Atom::Kind::Lit)
    return x.kind() == y.kind() && x.text() == y.text();
  if (x.children().size() != y.children().size()) return false;
  for (std::size_t i = 0; i < x.children().size(); ++i)
    if (!unify(x.children()[i], y.children()[i], env)) return false;
  return true;
}

// Check conditions are read existentially over the (infinite) universe of
// ground facts for any variables the positive conditions left unbound.
bool check_cond(const Cond& cond, const Bindings& b,
                const std::set<Fact>& assumed) {
  if (cond.kind == CondKind::True) {
    Atom g = substitute(cond.atoms.front(), b);
    // Unbound variables leave infinitely many instances, only finitely many
    // of which are derivable, so the negation is satisfiable.
    if (!g.is_ground()) return true;
    return assumed.count(g.to_fact()) == 0;
  }
  std::vector<Atom> atoms;
  atoms.reserve(cond.atoms.size());
  for (const Atom& a : cond.atoms) atoms.push_back(substitute(a, b));
  bool all_identical = true;
  bool some_identical = false;
  bool some_unifiable = false;
  bool all_unifiable = true;
  {
    Env env;
    for (std::size_t i = 1; i < atoms.size(); ++i)
      if (!unify(atoms[0], atoms[i], env)) {
        all_unifiable = false;
        break;
      }
  }
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      bool identical = atoms[i] == atoms[j];
      all_identical = all_identical && identical;
      some_identical = some_identical || identical;
      if (!some_unifiable) {
        Env env;
        some_unifiable = unify(atoms[i], atoms[j], env);
      }
    }
  if (cond.kind == CondKind::Same)
    return cond.sign == Sign::Pos ? all_unifiable : !all_identical;
  // Diff: all pairwise distinct.
  return cond.sign == Sign::Pos ? !some_identical : some_unifiable;
}

struct BoundExceeded {};

class Engine {
 public:
  Engine(const Policy& policy, std::size_t bound)
      : policy_(policy), bound_(bound) {}

  Denotation run() {
    Denotation d;
    try {
      std::set<Fact> lower;
      std::set<Fact> upper;
      while (true) {
        upper = consequences(lower);
        std::set<Fact> next_lower = consequences(upper);
        if (next_lower == lower) break;
        lower = std::move(next_lower);
      }
      d.trues = std::move(lower);
      for (const Fact& f : upper)
        if (d.trues.count(f) == 0) d.unknowns.insert(f);
      d.steps_used = steps_;
    } catch (const BoundExceeded&) {
      d.trues = {Fact::leaf("error")};
      d.unknowns.clear();
      d.bound_exceeded = true;
      d.steps_used = steps_;
    }
    return d;
  }

 private:
  // Least fixpoint of the one-step operator with negation read against the
  // fixed `assumed` set, computed semi-naively: after seeding with the
  // body-positive-free rules, every further derivation must match at least
  // one fact that is new since the previous pass.
  std::set<Fact> consequences(const std::set<Fact>& assumed) {
    std::set<Fact> s;
    std::set<Fact> delta;
    for (const Rule& rule : policy_.rules) {
      if (count_positives(rule) != 0) continue;
      Bindings none;
      if (!checks_pass(rule, none, assumed)) continue;
      Fact head = instantiate(rule.head, none);
      if (s.insert(head).second) {
        count_step();
        delta.insert(std::move(head));
      }
    }
    while (!delta.empty()) {
      std::set<Fact> next;
      for (const Rule& rule : policy_.rules) {
        std::size_t n = count_positives(rule);
        for (std::size_t j = 0; j < n; ++j) {
          Bindings b;
          enumerate(rule, 0, j, s, delta, assumed, b, next);
        }
      }
      std::set<Fact> fresh;
      for (const Fact& f : next) {
        if (s.insert(f).second) {
          count_step();
          fresh.insert(f);
        }
      }
      delta = std::move(fresh);
    }
    return s;
  }

  static std::size_t count_positives(const Rule& rule) {
    std::size_t n = 0;
    for (const Cond& c : rule.body)
      if (c.kind == CondKind::True && c.sign == Sign::Pos) ++n;
    return n;
  }

  bool checks_pass(const Rule& rule, const Bindings& b,
                   const std::set<Fact>& assumed) const {
    for (const Cond& c : rule.body) {
      if (c.kind == CondKind::True && c.sign == Sign::Pos) continue;
      if (!check_cond(c, b, assumed)) return false;
    }
    return true;
  }

  void count_step() {
    if (++steps_ > bound_) throw BoundExceeded{};
  }

  // Matches the rule's positive conditions in body order; the condition at
  // position `delta_pos` draws candidates from `delta`, the rest from `s`.
  void enumerate(const Rule& rule, std::size_t idx, std::size_t delta_pos,
                 const std::set<Fact>& s, const std::set<Fact>& delta,
                 const std::set<Fact>& assumed, Bindings& b,
                 std::set<Fact>& out) {
    // Find the idx-th positive condition.
    std::size_t seen = 0;
    const Atom* pat = nullptr;
    for (const Cond& c : rule.body) {
      if (c.kind != CondKind::True || c.sign != Sign::Pos) continue;
      if (seen++ == idx) {
        pat = &c.atoms.front();
        break;
      }
    }
    if (pat == nullptr) {
      if (!checks_pass(rule, b, assumed)) return;
      Fact head = instantiate(rule.head, b);
      if (s.count(head) == 0) out.insert(std::move(head));
      return;
    }
    const std::set<Fact>& source = idx == delta_pos ? delta : s;
    for (const Fact& f : source) {
      std::size_t mark = b.size();
      if (match(*pat, f, b))
        enumerate(rule, idx + 1, delta_pos, s, delta, assumed, b, out);
      b.resize(mark);
    }
  }

  const Policy& policy_;
  std::size_t bound_;
  std::size_t steps_ = 0;
};

}  // namespace

Denotation eval(const Policy& policy, std::size_t bound) {
  return Engine(policy, bound).run();
}

Truth truth(const Policy& policy, const Fact& fact, std::size_t bound) {
  Denotation d = eval(policy, bound);
  if (d.trues.count(fact)) return Truth::True;
  if (d.unknowns.count(fact)) return Truth::Undecided;
  return Truth::NotTrue;
}

bool dec_valid(const Policy& policy, std::size_t bound) {
  return eval(policy, bound).valid();
}

}  // namespace slick
