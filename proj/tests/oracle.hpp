// Independent test oracle for stratified programs: a stratum-by-stratum
// bottom-up fixpoint over an explicit Herbrand base, sharing no code with
// the production evaluator. Also hosts the random program generator used by
// the property suites.
#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "slick/ast.hpp"
#include "slick/parse.hpp"

namespace oracle {

// Programs are unary: facts are "pN cM" pairs. Predicate index doubles as
// the stratum: rules may positively use predicates up to their head's, and
// negatively only strictly lower ones.
struct Literal {
  int pred = 0;
  bool positive = true;
  bool is_var = false;  // argument: variable X or a constant
  int constant = 0;
};

struct OracleRule {
  int head_pred = 0;
  bool head_var = false;
  int head_constant = 0;
  std::vector<Literal> body;  // empty body = ground fact (head_var false)
};

struct Program {
  int num_preds = 0;
  int num_consts = 0;
  std::vector<OracleRule> rules;
};

inline std::string pred_name(int p) { return "p" + std::to_string(p); }
inline std::string const_name(int c) { return "c" + std::to_string(c); }

inline std::string to_slick(const Program& prog) {
  std::string out;
  for (const OracleRule& r : prog.rules) {
    out += pred_name(r.head_pred);
    out += ' ';
    out += r.head_var ? "X" : const_name(r.head_constant);
    bool first = true;
    for (const Literal& l : r.body) {
      out += first ? " if " : " and ";
      first = false;
      if (!l.positive) out += "not ";
      out += pred_name(l.pred);
      out += ' ';
      out += l.is_var ? "X" : const_name(l.constant);
    }
    out += ".\n";
  }
  return out;
}

inline Program random_program(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  Program prog;
  prog.num_preds = pick(1, 5);
  prog.num_consts = pick(1, 4);
  int facts = pick(1, 8);
  int rules = pick(0, 6);
  for (int i = 0; i < facts; ++i) {
    OracleRule r;
    r.head_pred = pick(0, prog.num_preds - 1);
    r.head_constant = pick(0, prog.num_consts - 1);
    prog.rules.push_back(r);
  }
  for (int i = 0; i < rules; ++i) {
    OracleRule r;
    r.head_pred = pick(0, prog.num_preds - 1);
    r.head_var = pick(0, 1) == 1;
    if (!r.head_var) r.head_constant = pick(0, prog.num_consts - 1);
    int conds = pick(1, 3);
    for (int k = 0; k < conds; ++k) {
      Literal l;
      l.positive = pick(0, 3) != 0;
      // Stratification: negative dependencies go strictly down a stratum.
      l.pred = l.positive ? pick(0, r.head_pred)
                          : (r.head_pred > 0 ? pick(0, r.head_pred - 1) : -1);
      if (l.pred < 0) {
        l.positive = true;
        l.pred = pick(0, r.head_pred);
      }
      l.is_var = pick(0, 1) == 1;
      if (!l.is_var) l.constant = pick(0, prog.num_consts - 1);
      r.body.push_back(l);
    }
    bool neg_var = false;
    for (const Literal& l : r.body) neg_var = neg_var || (!l.positive && l.is_var);
    if (r.head_var || neg_var) {
      // Safety, and oracle faithfulness: the variable must be bound by a
      // positive condition, or an unbound negation would range over the
      // whole (infinite) fact universe rather than the constants.
      bool bound = false;
      for (const Literal& l : r.body) bound = bound || (l.positive && l.is_var);
      if (!bound) {
        Literal l;
        l.positive = true;
        l.pred = pick(0, r.head_pred);
        l.is_var = true;
        r.body.push_back(l);
      }
    }
    prog.rules.push_back(r);
  }
  return prog;
}

// Perfect-model evaluation: ground every rule over the constants, then take
// the least fixpoint stratum by stratum, reading negation against the
// finished lower strata.
inline std::set<std::pair<int, int>> evaluate(const Program& prog) {
  std::set<std::pair<int, int>> model;
  for (int stratum = 0; stratum < prog.num_preds; ++stratum) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const OracleRule& r : prog.rules) {
        if (r.head_pred != stratum) continue;
        for (int c = 0; c < prog.num_consts; ++c) {
          // c instantiates X; rules without variables only need c == 0.
          bool uses_var = r.head_var;
          for (const Literal& l : r.body) uses_var = uses_var || l.is_var;
          if (!uses_var && c > 0) continue;
          bool fires = true;
          for (const Literal& l : r.body) {
            int arg = l.is_var ? c : l.constant;
            bool holds = model.count({l.pred, arg}) != 0;
            if (l.positive != holds) {
              fires = false;
              break;
            }
          }
          if (!fires) continue;
          int arg = r.head_var ? c : r.head_constant;
          if (model.insert({r.head_pred, arg}).second) changed = true;
        }
      }
    }
  }
  return model;
}

inline std::set<slick::Fact> model_as_facts(
    const std::set<std::pair<int, int>>& model) {
  std::set<slick::Fact> out;
  for (const auto& [p, c] : model)
    out.insert(slick::Fact::node({slick::Fact::leaf(pred_name(p)),
                                  slick::Fact::leaf(const_name(c))}));
  return out;
}

inline slick::Policy parse_program(const Program& prog) {
  slick::ParseResult r = slick::parse_policy(to_slick(prog));
  return r.policy;
}

}  // namespace oracle
