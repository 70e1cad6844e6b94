#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slick/ast.hpp"

namespace slick {

struct Diag {
  int line = 0;  // 1-based
  int col = 0;   // 1-based
  std::string message;

  std::string render() const;
};

struct ParseResult {
  Policy policy;
  std::vector<Diag> diags;

  bool ok() const { return diags.empty(); }
};

/// Parses Slick source into a policy. Identifiers starting with an ASCII
/// uppercase letter are variables; `//` starts a line comment; conjunctive
/// heads expand into one rule per head atom. Unsafe rules are reported as
/// diagnostics and excluded from the returned policy.
ParseResult parse_policy(std::string_view src);

/// Parses a single ground fact (e.g. a query or trigger); empty result on
/// failure or when the text contains variables.
struct FactParse {
  Fact fact;
  std::vector<Diag> diags;
  bool ok() const { return diags.empty(); }
};
FactParse parse_fact(std::string_view src);

}  // namespace slick
