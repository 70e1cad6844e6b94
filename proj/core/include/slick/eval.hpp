#pragma once

#include <cstddef>
#include <set>

#include "slick/ast.hpp"

namespace slick {

inline constexpr std::size_t kDefaultBound = 30000;

/// Three-valued denotation: facts in `trues` are true, facts in `unknowns`
/// are undecided, everything else is not true.
struct Denotation {
  std::set<Fact> trues;
  std::set<Fact> unknowns;
  bool bound_exceeded = false;
  std::size_t steps_used = 0;

  bool is_true(const Fact& f) const { return trues.count(f) != 0; }
  /// A policy is valid when it does not derive the bare `error` fact.
  bool valid() const { return trues.count(Fact::leaf("error")) == 0; }
};

/// Evaluates a policy under the well-founded semantics via the alternating
/// fixpoint. One step is one derivation of a not-yet-derived ground fact
/// within the current fixpoint phase; if the cumulative step count exceeds
/// `bound`, the result is the trivialised denotation {error} with
/// bound_exceeded set.
Denotation eval(const Policy& policy, std::size_t bound = kDefaultBound);

/// truth(policy, fact): true / false (undecided) / not-true.
enum class Truth { True, Undecided, NotTrue };
Truth truth(const Policy& policy, const Fact& fact,
            std::size_t bound = kDefaultBound);

bool dec_valid(const Policy& policy, std::size_t bound = kDefaultBound);

}  // namespace slick
