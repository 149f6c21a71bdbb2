#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ulmc/cfa.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// State predicates over discrete states. Atoms:
//   proc.Location  proc.AssertViolation  proc.Term      (0/1 by origin match)
//   glob:name CMP int   with CMP in {=, !=, <=, >=, <=s, >=s}
//   assertViolation (any assert hit)   term (every CFA at a term location)
//   true / false
// Combined with !, &&, || and parentheses.

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Pred {
  enum class Kind {
    True, False, Not, And, Or,
    AtLoc, AtViolation, AtTerm, GlobCmp, AnyViolation, AllTerm,
  };
  enum class CmpOp { Eq, Ne, Le, Ge, SLe, SGe };

  Kind kind = Kind::True;
  PredPtr a, b;              // Not/And/Or
  uint32_t cfa = 0;          // AtLoc/AtViolation/AtTerm
  std::string loc_name;      // AtLoc (matched against location origin)
  uint32_t global = 0;       // GlobCmp: index into Network::globals
  CmpOp cmp = CmpOp::Eq;
  int64_t literal = 0;
};

bool eval_pred(const Pred& p, const Network& net, const DiscreteState& s);

// Throws ParseError; resolves process/location/global names against `net`.
PredPtr parse_pred(const std::string& text, const Network& net);

// ---------------------------------------------------------------------------
// Estimate expressions: integer arithmetic over globalTime, the predicate
// atoms (as 0/1) and literals, with +, -, *, || and explicit parentheses.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Num, GlobalTime, Atom, Add, Sub, Mul, Or };
  Kind kind = Kind::Num;
  int64_t num = 0;
  PredPtr atom;
  ExprPtr a, b;
};

int64_t eval_expr(const Expr& e, const Network& net, const DiscreteState& s,
                  uint64_t global_time);

ExprPtr parse_expr(const std::string& text, const Network& net);

// ---------------------------------------------------------------------------
// Queries: E<> pred | A[] pred | E[<=bound;runs] (max: expr).

struct Query {
  enum class Kind { Exists, Always, EstimateMax };
  Kind kind = Kind::Exists;
  PredPtr pred;        // Exists / Always
  ExprPtr expr;        // EstimateMax
  uint64_t time_bound = 0;
  uint64_t runs = 0;
};

Query parse_query(const std::string& text, const Network& net);

}  // namespace ulmc
