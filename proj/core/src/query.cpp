#include "ulmc/query.hpp"

#include <cctype>

#include "ulmc/errors.hpp"

namespace ulmc {

namespace {

uint64_t read_global(const Network& net, const DiscreteState& s, uint32_t gi) {
  const GlobalDef& g = net.globals[gi];
  if (g.address) {
    const unsigned size = type_byte_size(g.reg.type);
    uint64_t raw = 0;
    for (unsigned i = 0; i < size; ++i)
      raw |= static_cast<uint64_t>(s.mem.bytes[*g.address + i]) << (8 * i);
    return raw;
  }
  for (uint32_t p = 0; p < net.plain_global_def.size(); ++p)
    if (net.plain_global_def[p] == gi) return s.global[p].bv.bits;
  return 0;
}

bool origin_matches(const Network& net, const DiscreteState& s, uint32_t cfa,
                    const std::string& name) {
  const Location& l = net.cfas[cfa].locations[s.locs[cfa]];
  return l.name == name || l.origin == name;
}

}  // namespace

bool eval_pred(const Pred& p, const Network& net, const DiscreteState& s) {
  switch (p.kind) {
    case Pred::Kind::True: return true;
    case Pred::Kind::False: return false;
    case Pred::Kind::Not: return !eval_pred(*p.a, net, s);
    case Pred::Kind::And: return eval_pred(*p.a, net, s) && eval_pred(*p.b, net, s);
    case Pred::Kind::Or: return eval_pred(*p.a, net, s) || eval_pred(*p.b, net, s);
    case Pred::Kind::AtLoc: return origin_matches(net, s, p.cfa, p.loc_name);
    case Pred::Kind::AtViolation:
      return net.cfas[p.cfa].locations[s.locs[p.cfa]].is_assert_violation;
    case Pred::Kind::AtTerm:
      return net.cfas[p.cfa].locations[s.locs[p.cfa]].is_term;
    case Pred::Kind::AnyViolation: return s.assert_hit;
    case Pred::Kind::AllTerm: {
      for (uint32_t c = 0; c < net.cfas.size(); ++c)
        if (!net.cfas[c].locations[s.locs[c]].is_term) return false;
      return true;
    }
    case Pred::Kind::GlobCmp: {
      const GlobalDef& g = net.globals[p.global];
      const unsigned w = type_bit_width(g.reg.type);
      const uint64_t raw = read_global(net, s, p.global);
      const uint64_t lit = static_cast<uint64_t>(p.literal) & BitVec::mask(w);
      const BitVec a = BitVec::of(w, raw), b = BitVec::of(w, lit);
      switch (p.cmp) {
        case Pred::CmpOp::Eq: return a.bits == b.bits;
        case Pred::CmpOp::Ne: return a.bits != b.bits;
        case Pred::CmpOp::Le: return bv_leq(a, b);
        case Pred::CmpOp::Ge: return bv_geq(a, b);
        case Pred::CmpOp::SLe: return bv_sleq(a, b);
        case Pred::CmpOp::SGe: return bv_sgeq(a, b);
      }
      return false;
    }
  }
  return false;
}

int64_t eval_expr(const Expr& e, const Network& net, const DiscreteState& s,
                  uint64_t global_time) {
  switch (e.kind) {
    case Expr::Kind::Num: return e.num;
    case Expr::Kind::GlobalTime: return static_cast<int64_t>(global_time);
    case Expr::Kind::Atom: return eval_pred(*e.atom, net, s) ? 1 : 0;
    case Expr::Kind::Add:
      return eval_expr(*e.a, net, s, global_time) + eval_expr(*e.b, net, s, global_time);
    case Expr::Kind::Sub:
      return eval_expr(*e.a, net, s, global_time) - eval_expr(*e.b, net, s, global_time);
    case Expr::Kind::Mul:
      return eval_expr(*e.a, net, s, global_time) * eval_expr(*e.b, net, s, global_time);
    case Expr::Kind::Or:
      return (eval_expr(*e.a, net, s, global_time) != 0 ||
              eval_expr(*e.b, net, s, global_time) != 0)
                 ? 1
                 : 0;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Shared tokenizer for predicates, expressions, and query headers.

namespace {

struct QTok {
  enum class K {
    Ident, Num, Dot, Colon, LPar, RPar, Not, AndAnd, OrOr,
    Eq, Ne, Le, Ge, SLe, SGe, Plus, Minus, Star, Semi, LBrack, RBrack, End,
  };
  K k = K::End;
  std::string text;
  int64_t num = 0;
  uint32_t col = 0;
};

class QLexer {
 public:
  explicit QLexer(const std::string& s) : s_(s) { advance(); }
  const QTok& peek() const { return t_; }
  QTok take() {
    QTok t = t_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    t_ = QTok{};
    t_.col = static_cast<uint32_t>(i_ + 1);
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    auto two = [&](QTok::K k) { t_.k = k; i_ += 2; };
    auto one = [&](QTok::K k) { t_.k = k; i_ += 1; };
    if (c == '&' && i_ + 1 < s_.size() && s_[i_ + 1] == '&') return two(QTok::K::AndAnd);
    if (c == '|' && i_ + 1 < s_.size() && s_[i_ + 1] == '|') return two(QTok::K::OrOr);
    if (c == '!' && i_ + 1 < s_.size() && s_[i_ + 1] == '=') return two(QTok::K::Ne);
    if (c == '<' && i_ + 1 < s_.size() && s_[i_ + 1] == '=') {
      if (i_ + 2 < s_.size() && s_[i_ + 2] == 's') {
        t_.k = QTok::K::SLe;
        i_ += 3;
        return;
      }
      return two(QTok::K::Le);
    }
    if (c == '>' && i_ + 1 < s_.size() && s_[i_ + 1] == '=') {
      if (i_ + 2 < s_.size() && s_[i_ + 2] == 's') {
        t_.k = QTok::K::SGe;
        i_ += 3;
        return;
      }
      return two(QTok::K::Ge);
    }
    switch (c) {
      case '.': return one(QTok::K::Dot);
      case ':': return one(QTok::K::Colon);
      case '(': return one(QTok::K::LPar);
      case ')': return one(QTok::K::RPar);
      case '!': return one(QTok::K::Not);
      case '=': return one(QTok::K::Eq);
      case '+': return one(QTok::K::Plus);
      case '-': return one(QTok::K::Minus);
      case '*': return one(QTok::K::Star);
      case ';': return one(QTok::K::Semi);
      case '[': return one(QTok::K::LBrack);
      case ']': return one(QTok::K::RBrack);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      t_.k = QTok::K::Num;
      t_.text = s_.substr(i_, j - i_);
      t_.num = std::stoll(t_.text);
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      t_.k = QTok::K::Ident;
      t_.text = s_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' in query",
                     {0, t_.col});
  }

  const std::string& s_;
  size_t i_ = 0;
  QTok t_;
};

PredPtr mk_pred(Pred p) { return std::make_shared<Pred>(std::move(p)); }
ExprPtr mk_expr(Expr e) { return std::make_shared<Expr>(std::move(e)); }

class QueryParser {
 public:
  QueryParser(const std::string& text, const Network& net) : lex_(text), net_(net) {}

  PredPtr pred_only() {
    PredPtr p = pred_or();
    expect_end();
    return p;
  }
  ExprPtr expr_only() {
    ExprPtr e = expr_or();
    expect_end();
    return e;
  }

  // E[<=bound;runs] (max: expr)
  Query estimate_query() {
    Query q;
    const QTok head = expect(QTok::K::Ident, "E");
    if (head.text != "E") throw ParseError("expected E[...]", {0, head.col});
    expect(QTok::K::LBrack, "'['");
    expect(QTok::K::Le, "'<='");
    q.time_bound = static_cast<uint64_t>(expect(QTok::K::Num, "bound").num);
    expect(QTok::K::Semi, "';'");
    q.runs = static_cast<uint64_t>(expect(QTok::K::Num, "run count").num);
    expect(QTok::K::RBrack, "']'");
    expect(QTok::K::LPar, "'('");
    const QTok maxkw = expect(QTok::K::Ident, "max");
    if (maxkw.text != "max") throw ParseError("expected max:", {0, maxkw.col});
    expect(QTok::K::Colon, "':'");
    q.kind = Query::Kind::EstimateMax;
    q.expr = expr_or();
    expect(QTok::K::RPar, "')'");
    expect_end();
    return q;
  }

 private:
  QTok expect(QTok::K k, const char* what) {
    if (lex_.peek().k != k)
      throw ParseError(std::string("expected ") + what, {0, lex_.peek().col});
    return lex_.take();
  }
  void expect_end() {
    if (lex_.peek().k != QTok::K::End)
      throw ParseError("trailing tokens in query", {0, lex_.peek().col});
  }

  PredPtr pred_or() {
    PredPtr a = pred_and();
    while (lex_.peek().k == QTok::K::OrOr) {
      lex_.take();
      Pred p;
      p.kind = Pred::Kind::Or;
      p.a = a;
      p.b = pred_and();
      a = mk_pred(std::move(p));
    }
    return a;
  }
  PredPtr pred_and() {
    PredPtr a = pred_unary();
    while (lex_.peek().k == QTok::K::AndAnd) {
      lex_.take();
      Pred p;
      p.kind = Pred::Kind::And;
      p.a = a;
      p.b = pred_unary();
      a = mk_pred(std::move(p));
    }
    return a;
  }
  PredPtr pred_unary() {
    if (lex_.peek().k == QTok::K::Not) {
      lex_.take();
      Pred p;
      p.kind = Pred::Kind::Not;
      p.a = pred_unary();
      return mk_pred(std::move(p));
    }
    if (lex_.peek().k == QTok::K::LPar) {
      lex_.take();
      PredPtr p = pred_or();
      expect(QTok::K::RPar, "')'");
      return p;
    }
    return pred_atom();
  }

  PredPtr pred_atom() {
    const QTok t = expect(QTok::K::Ident, "predicate atom");
    if (t.text == "true") return mk_pred(Pred{});
    if (t.text == "false") {
      Pred p;
      p.kind = Pred::Kind::False;
      return mk_pred(std::move(p));
    }
    if (t.text == "assertViolation" && lex_.peek().k != QTok::K::Dot) {
      Pred p;
      p.kind = Pred::Kind::AnyViolation;
      return mk_pred(std::move(p));
    }
    if (t.text == "term" && lex_.peek().k != QTok::K::Dot) {
      Pred p;
      p.kind = Pred::Kind::AllTerm;
      return mk_pred(std::move(p));
    }
    if (t.text == "glob") {
      expect(QTok::K::Colon, "':' after glob");
      const QTok g = expect(QTok::K::Ident, "global name");
      auto gi = net_.find_global(g.text);
      if (!gi) throw ParseError("unknown global " + g.text, {0, g.col});
      Pred p;
      p.kind = Pred::Kind::GlobCmp;
      p.global = *gi;
      const QTok op = lex_.take();
      switch (op.k) {
        case QTok::K::Eq: p.cmp = Pred::CmpOp::Eq; break;
        case QTok::K::Ne: p.cmp = Pred::CmpOp::Ne; break;
        case QTok::K::Le: p.cmp = Pred::CmpOp::Le; break;
        case QTok::K::Ge: p.cmp = Pred::CmpOp::Ge; break;
        case QTok::K::SLe: p.cmp = Pred::CmpOp::SLe; break;
        case QTok::K::SGe: p.cmp = Pred::CmpOp::SGe; break;
        default: throw ParseError("expected comparison", {0, op.col});
      }
      bool neg = false;
      if (lex_.peek().k == QTok::K::Minus) {
        lex_.take();
        neg = true;
      }
      const QTok lit = expect(QTok::K::Num, "integer literal");
      p.literal = neg ? -lit.num : lit.num;
      return mk_pred(std::move(p));
    }
    // proc.Location | proc.AssertViolation | proc.Term
    auto ci = net_.find_cfa(t.text);
    if (!ci) throw ParseError("unknown process " + t.text, {0, t.col});
    expect(QTok::K::Dot, "'.' after process name");
    const QTok loc = expect(QTok::K::Ident, "location name");
    Pred p;
    p.cfa = *ci;
    if (loc.text == "AssertViolation") {
      p.kind = Pred::Kind::AtViolation;
    } else if (loc.text == "Term") {
      p.kind = Pred::Kind::AtTerm;
    } else {
      bool known = false;
      for (const Location& l : net_.cfas[*ci].locations)
        if (l.name == loc.text || l.origin == loc.text) known = true;
      if (!known)
        throw ParseError("unknown location " + t.text + "." + loc.text, {0, loc.col});
      p.kind = Pred::Kind::AtLoc;
      p.loc_name = loc.text;
    }
    return mk_pred(std::move(p));
  }

  ExprPtr expr_or() {
    ExprPtr a = expr_sum();
    while (lex_.peek().k == QTok::K::OrOr) {
      lex_.take();
      Expr e;
      e.kind = Expr::Kind::Or;
      e.a = a;
      e.b = expr_sum();
      a = mk_expr(std::move(e));
    }
    return a;
  }
  ExprPtr expr_sum() {
    ExprPtr a = expr_prod();
    while (lex_.peek().k == QTok::K::Plus || lex_.peek().k == QTok::K::Minus) {
      const bool plus = lex_.take().k == QTok::K::Plus;
      Expr e;
      e.kind = plus ? Expr::Kind::Add : Expr::Kind::Sub;
      e.a = a;
      e.b = expr_prod();
      a = mk_expr(std::move(e));
    }
    return a;
  }
  ExprPtr expr_prod() {
    ExprPtr a = expr_prim();
    while (lex_.peek().k == QTok::K::Star) {
      lex_.take();
      Expr e;
      e.kind = Expr::Kind::Mul;
      e.a = a;
      e.b = expr_prim();
      a = mk_expr(std::move(e));
    }
    return a;
  }
  ExprPtr expr_prim() {
    if (lex_.peek().k == QTok::K::LPar) {
      lex_.take();
      ExprPtr e = expr_or();
      expect(QTok::K::RPar, "')'");
      return e;
    }
    if (lex_.peek().k == QTok::K::Num) {
      Expr e;
      e.num = lex_.take().num;
      return mk_expr(std::move(e));
    }
    if (lex_.peek().k == QTok::K::Minus) {
      lex_.take();
      Expr e;
      e.num = -expect(QTok::K::Num, "number").num;
      return mk_expr(std::move(e));
    }
    if (lex_.peek().k == QTok::K::Ident && lex_.peek().text == "globalTime") {
      lex_.take();
      Expr e;
      e.kind = Expr::Kind::GlobalTime;
      return mk_expr(std::move(e));
    }
    Expr e;
    e.kind = Expr::Kind::Atom;
    e.atom = pred_atom();
    return mk_expr(std::move(e));
  }

  QLexer lex_;
  const Network& net_;
};

}  // namespace

PredPtr parse_pred(const std::string& text, const Network& net) {
  return QueryParser(text, net).pred_only();
}

ExprPtr parse_expr(const std::string& text, const Network& net) {
  return QueryParser(text, net).expr_only();
}

Query parse_query(const std::string& text, const Network& net) {
  // The E<> / A[] heads contain characters the token stream does not model
  // well; peel them off up front.
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  Query q;
  if (text.compare(i, 3, "E<>") == 0) {
    q.kind = Query::Kind::Exists;
    q.pred = parse_pred(text.substr(i + 3), net);
    return q;
  }
  if (text.compare(i, 3, "A[]") == 0) {
    q.kind = Query::Kind::Always;
    q.pred = parse_pred(text.substr(i + 3), net);
    return q;
  }
  if (text.compare(i, 2, "E[") == 0) {
    return QueryParser(text.substr(i), net).estimate_query();
  }
  throw ParseError("query must start with E<>, A[] or E[<=bound;runs]",
                   {0, static_cast<uint32_t>(i + 1)});
}

}  // namespace ulmc
