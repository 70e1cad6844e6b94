#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace slick {

/// A ground fact: a rosetree whose leaves are string literals. Facts share
/// structure (copies are O(1)) and memoise a hash and node count, so deeply
/// nested facts stay cheap to build, compare, and deduplicate.
class Fact {
 public:
  Fact();

  static Fact leaf(std::string text);
  static Fact node(std::vector<Fact> children);

  bool is_leaf() const;
  bool is_node() const { return !is_leaf(); }
  const std::string& text() const;
  const std::vector<Fact>& children() const;
  std::size_t hash() const;

  /// Total order: structural equality, with an arbitrary but deterministic
  /// order between distinct facts (hash-first for speed).
  int compare(const Fact& o) const;
  bool operator==(const Fact& o) const { return compare(o) == 0; }
  std::strong_ordering operator<=>(const Fact& o) const {
    int c = compare(o);
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }

  /// Concrete-syntax rendering. Nodes of two or more children render
  /// space-separated without outer parentheses at the top level; a node of
  /// one child keeps its parentheses so rendering round-trips.
  std::string render() const;

  struct Rep;  // implementation detail, defined in ast.cpp

 private:
  explicit Fact(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

/// An atom: a fact whose leaves may alternatively be variables.
class Atom {
 public:
  enum class Kind : std::uint8_t { Lit, Var, Node };

  Atom() : kind_(Kind::Lit), text_("") {}

  static Atom lit(std::string text);
  static Atom var(std::string name);
  static Atom node(std::vector<Atom> children);
  static Atom from_fact(const Fact& fact);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  const std::vector<Atom>& children() const { return children_; }

  bool has_var(const std::string& name) const;
  bool is_ground() const;
  /// Converts to a Fact; only defined when is_ground().
  Fact to_fact() const;

  int compare(const Atom& o) const;
  bool operator==(const Atom& o) const { return compare(o) == 0; }
  std::strong_ordering operator<=>(const Atom& o) const {
    int c = compare(o);
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }

  std::string render() const;

 private:
  Kind kind_;
  std::string text_;
  std::vector<Atom> children_;
};

enum class Sign : std::uint8_t { Pos, Neg };
enum class CondKind : std::uint8_t { True, Same, Diff };

/// One body condition: a (possibly negated) truth check, or an (in)equality
/// constraint over two or more atoms.
struct Cond {
  Sign sign = Sign::Pos;
  CondKind kind = CondKind::True;
  std::vector<Atom> atoms;  // one atom for True; >= 2 for Same/Diff

  auto operator<=>(const Cond&) const = default;

  std::string render() const;
};

struct Rule {
  Atom head;
  std::vector<Cond> body;

  auto operator<=>(const Rule&) const = default;

  std::string render() const;  // includes the trailing '.'
};

struct Policy {
  std::vector<Rule> rules;

  auto operator<=>(const Policy&) const = default;

  std::string render() const;  // one rule per line
};

/// Concatenates two policies; the denotation is order-independent.
Policy compose(Policy a, const Policy& b);

/// Safety check: every variable in the head must occur inside some positive
/// truth condition of the body. Returns the offending variable names, empty
/// when the rule is safe. Same/Diff and negated conditions never bind.
std::vector<std::string> unsafe_head_vars(const Rule& rule);
bool dec_safe(const Rule& rule);

}  // namespace slick
