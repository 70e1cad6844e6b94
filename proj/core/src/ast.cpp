#include "slick/ast.hpp"

#include <functional>
#include <type_traits>
#include <utility>

namespace slick {

struct Fact::Rep {
  std::string leaf;
  std::vector<Fact> children;
  bool is_leaf = true;
  std::size_t hash = 0;
  std::uint64_t nodes = 1;  // subtree size, for fast ordering
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const std::shared_ptr<const Fact::Rep>& empty_rep() {
  static const std::shared_ptr<const Fact::Rep> rep = [] {
    auto r = std::make_shared<Fact::Rep>();
    r->hash = mix(1, std::hash<std::string>{}(""));
    return r;
  }();
  return rep;
}

}  // namespace

Fact::Fact() : rep_(empty_rep()) {}

Fact Fact::leaf(std::string text) {
  auto rep = std::make_shared<Rep>();
  rep->hash = mix(1, std::hash<std::string>{}(text));
  rep->leaf = std::move(text);
  return Fact(std::move(rep));
}

Fact Fact::node(std::vector<Fact> children) {
  auto rep = std::make_shared<Rep>();
  rep->is_leaf = false;
  std::size_t h = 2;
  std::uint64_t nodes = 1;
  for (const Fact& c : children) {
    h = mix(h, c.hash());
    nodes += c.rep_->nodes;
  }
  rep->hash = h;
  rep->nodes = nodes;
  rep->children = std::move(children);
  return Fact(std::move(rep));
}

bool Fact::is_leaf() const { return rep_->is_leaf && !rep_->leaf.empty(); }
const std::string& Fact::text() const { return rep_->leaf; }
const std::vector<Fact>& Fact::children() const { return rep_->children; }
std::size_t Fact::hash() const { return rep_->hash; }

int Fact::compare(const Fact& o) const {
  if (rep_ == o.rep_) return 0;
  if (rep_->hash != o.rep_->hash)
    return rep_->hash < o.rep_->hash ? -1 : 1;
  if (rep_->nodes != o.rep_->nodes)
    return rep_->nodes < o.rep_->nodes ? -1 : 1;
  if (rep_->is_leaf != o.rep_->is_leaf) return rep_->is_leaf ? -1 : 1;
  if (rep_->is_leaf) return rep_->leaf.compare(o.rep_->leaf);
  const auto& a = rep_->children;
  const auto& b = o.rep_->children;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = a[i].compare(b[i]); c != 0) return c;
  return 0;
}

namespace {

// Child position rendering: leaves stay bare, any nested node is wrapped.
template <typename T>
std::string render_child(const T& child);

template <typename T>
std::string render_children(const std::vector<T>& children) {
  std::string out;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i != 0) out += ' ';
    out += render_child(children[i]);
  }
  return out;
}

std::string render_inner(const Fact& f) { return render_children(f.children()); }
std::string render_inner(const Atom& a) { return render_children(a.children()); }

template <typename T>
std::string render_child(const T& child) {
  if constexpr (std::is_same_v<T, Fact>) {
    if (child.is_leaf()) return child.text();
  } else {
    if (child.kind() != Atom::Kind::Node) return child.text();
  }
  return "(" + render_inner(child) + ")";
}

template <typename T>
std::string render_top(const T& value, bool leaf, std::size_t arity) {
  if (leaf) return value.text();
  if (arity >= 2) return render_inner(value);
  return "(" + render_inner(value) + ")";
}

}  // namespace

std::string Fact::render() const {
  return render_top(*this, is_leaf(), children().size());
}

Atom Atom::lit(std::string text) {
  Atom a;
  a.kind_ = Kind::Lit;
  a.text_ = std::move(text);
  return a;
}

Atom Atom::var(std::string name) {
  Atom a;
  a.kind_ = Kind::Var;
  a.text_ = std::move(name);
  return a;
}

Atom Atom::node(std::vector<Atom> children) {
  Atom a;
  a.kind_ = Kind::Node;
  a.children_ = std::move(children);
  return a;
}

Atom Atom::from_fact(const Fact& fact) {
  if (fact.is_leaf()) return lit(fact.text());
  std::vector<Atom> children;
  children.reserve(fact.children().size());
  for (const Fact& c : fact.children()) children.push_back(from_fact(c));
  return node(std::move(children));
}

bool Atom::has_var(const std::string& name) const {
  if (kind_ == Kind::Var) return text_ == name;
  for (const Atom& c : children_)
    if (c.has_var(name)) return true;
  return false;
}

bool Atom::is_ground() const {
  if (kind_ == Kind::Var) return false;
  for (const Atom& c : children_)
    if (!c.is_ground()) return false;
  return true;
}

Fact Atom::to_fact() const {
  if (kind_ == Kind::Lit) return Fact::leaf(text_);
  std::vector<Fact> children;
  children.reserve(children_.size());
  for (const Atom& c : children_) children.push_back(c.to_fact());
  return Fact::node(std::move(children));
}

std::string Atom::render() const {
  return render_top(*this, kind_ != Kind::Node, children_.size());
}

int Atom::compare(const Atom& o) const {
  if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
  if (kind_ != Kind::Node) return text_.compare(o.text_);
  if (children_.size() != o.children_.size())
    return children_.size() < o.children_.size() ? -1 : 1;
  for (std::size_t i = 0; i < children_.size(); ++i)
    if (int c = children_[i].compare(o.children_[i]); c != 0) return c;
  return 0;
}

std::string Cond::render() const {
  std::string out;
  if (sign == Sign::Neg) out += "not ";
  switch (kind) {
    case CondKind::True:
      out += atoms.front().render();
      break;
    case CondKind::Same:
    case CondKind::Diff:
      out += kind == CondKind::Same ? "same {" : "diff {";
      for (const Atom& a : atoms) {
        out += ' ';
        out += render_child(a);
      }
      out += " }";
      break;
  }
  return out;
}

std::string Rule::render() const {
  std::string out = head.render();
  for (std::size_t i = 0; i < body.size(); ++i) {
    out += i == 0 ? " if " : " and ";
    out += body[i].render();
  }
  out += '.';
  return out;
}

std::string Policy::render() const {
  std::string out;
  for (const Rule& r : rules) {
    out += r.render();
    out += '\n';
  }
  return out;
}

Policy compose(Policy a, const Policy& b) {
  a.rules.insert(a.rules.end(), b.rules.begin(), b.rules.end());
  return a;
}

namespace {

void collect_vars(const Atom& atom, std::vector<std::string>& out) {
  if (atom.kind() == Atom::Kind::Var) {
    for (const std::string& v : out)
      if (v == atom.text()) return;
    out.push_back(atom.text());
    return;
  }
  for (const Atom& c : atom.children()) collect_vars(c, out);
}

}  // namespace

std::vector<std::string> unsafe_head_vars(const Rule& rule) {
  std::vector<std::string> head_vars;
  collect_vars(rule.head, head_vars);
  std::vector<std::string> unsafe;
  for (const std::string& v : head_vars) {
    bool bound = false;
    for (const Cond& c : rule.body) {
      if (c.kind != CondKind::True || c.sign != Sign::Pos) continue;
      if (c.atoms.front().has_var(v)) {
        bound = true;
        break;
      }
    }
    if (!bound) unsafe.push_back(v);
  }
  return unsafe;
}

bool dec_safe(const Rule& rule) { return unsafe_head_vars(rule).empty(); }

}  // namespace slick
