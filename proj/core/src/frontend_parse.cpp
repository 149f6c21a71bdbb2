#include <cctype>

#include "ulmc/errors.hpp"
#include "ulmc/frontend.hpp"

namespace ulmc {

uint64_t IrType::byte_size() const {
  switch (kind) {
    case Kind::Void: return 0;
    case Kind::Int: return bits == 1 ? 1 : bits / 8;
    case Kind::Ptr: return 8;
    case Kind::Array: return count * elem->byte_size();
  }
  return 0;
}

bool IrType::operator==(const IrType& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Int) return bits == o.bits;
  if (kind == Kind::Array) return count == o.count && *elem == *o.elem;
  return true;
}

const IrBlock* IrFunction::find_block(std::string_view label) const {
  for (const IrBlock& b : blocks)
    if (b.label == label) return &b;
  return nullptr;
}

const IrFunction* IrModule::find_function(std::string_view name) const {
  for (const IrFunction& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

bool IrModule::is_declared(std::string_view name) const {
  for (const auto& [n, _] : declarations)
    if (n == name) return true;
  return false;
}

namespace {

struct Tok {
  enum class K {
    Ident,    // bare word (add, i32, label, x, ...)
    LocalId,  // %name
    GlobalId, // @name
    Num,
    Eq, Comma, LPar, RPar, LBrace, RBrace, LBrack, RBrack, Colon, Star,
    End,
  };
  K k = K::End;
  std::string text;
  int64_t num = 0;
  uint32_t line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { next(); }
  const Tok& peek() const { return t_; }
  Tok take() {
    Tok t = t_;
    next();
    return t;
  }

 private:
  void next() {
    for (;;) {
      while (i_ < s_.size() &&
             std::isspace(static_cast<unsigned char>(s_[i_]))) {
        if (s_[i_] == '\n') ++line_, col0_ = i_ + 1;
        ++i_;
      }
      if (i_ < s_.size() && s_[i_] == ';') {  // comment to end of line
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
        continue;
      }
      break;
    }
    t_ = Tok{};
    t_.line = line_;
    t_.col = static_cast<uint32_t>(i_ - col0_ + 1);
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    auto one = [&](Tok::K k) {
      t_.k = k;
      ++i_;
    };
    switch (c) {
      case '=': return one(Tok::K::Eq);
      case ',': return one(Tok::K::Comma);
      case '(': return one(Tok::K::LPar);
      case ')': return one(Tok::K::RPar);
      case '{': return one(Tok::K::LBrace);
      case '}': return one(Tok::K::RBrace);
      case '[': return one(Tok::K::LBrack);
      case ']': return one(Tok::K::RBrack);
      case ':': return one(Tok::K::Colon);
      case '*': return one(Tok::K::Star);
      default: break;
    }
    if (c == '%' || c == '@') {
      size_t j = i_ + 1;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                               s_[j] == '_' || s_[j] == '.'))
        ++j;
      if (j == i_ + 1) throw ParseError("empty identifier", {t_.line, t_.col});
      t_.k = c == '%' ? Tok::K::LocalId : Tok::K::GlobalId;
      t_.text = s_.substr(i_ + 1, j - i_ - 1);
      i_ = j;
      return;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i_ + (c == '-' ? 1 : 0);
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      t_.k = Tok::K::Num;
      t_.text = s_.substr(i_, j - i_);
      t_.num = std::stoll(t_.text);
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                               s_[j] == '_' || s_[j] == '.'))
        ++j;
      t_.k = Tok::K::Ident;
      t_.text = s_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'",
                     {t_.line, t_.col});
  }

  const std::string& s_;
  size_t i_ = 0;
  uint32_t line_ = 1;
  size_t col0_ = 0;
  Tok t_;
};

class IrParser {
 public:
  explicit IrParser(const std::string& text) : lex_(text) {}

  IrModule parse() {
    IrModule m;
    while (lex_.peek().k != Tok::K::End) {
      const Tok t = lex_.peek();
      if (t.k == Tok::K::GlobalId) {
        m.globals.push_back(global());
      } else if (t.k == Tok::K::Ident && t.text == "declare") {
        m.declarations.push_back(declare());
      } else if (t.k == Tok::K::Ident && t.text == "define") {
        m.functions.push_back(define());
      } else {
        throw ParseError("expected global, declare or define", {t.line, t.col});
      }
    }
    return m;
  }

 private:
  Tok expect(Tok::K k, const char* what) {
    if (lex_.peek().k != k)
      throw ParseError(std::string("expected ") + what,
                       {lex_.peek().line, lex_.peek().col});
    return lex_.take();
  }

  IrType type() {
    const Tok t = lex_.peek();
    if (t.k == Tok::K::LBrack) {
      lex_.take();
      const Tok n = expect(Tok::K::Num, "array length");
      const Tok x = expect(Tok::K::Ident, "x");
      if (x.text != "x") throw ParseError("expected x in array type", {x.line, x.col});
      IrType elem = type();
      expect(Tok::K::RBrack, "']'");
      return IrType::array_ty(static_cast<uint64_t>(n.num), std::move(elem));
    }
    const Tok id = expect(Tok::K::Ident, "type");
    if (id.text == "void") return IrType::void_ty();
    if (id.text == "ptr") return IrType::ptr_ty();
    if (id.text.size() >= 2 && id.text[0] == 'i') {
      const std::string digits = id.text.substr(1);
      if (digits == "1" || digits == "8" || digits == "16" || digits == "32" ||
          digits == "64")
        return IrType::int_ty(static_cast<unsigned>(std::stoul(digits)));
    }
    throw ParseError("unsupported type " + id.text, {id.line, id.col});
  }

  IrOperand operand() {
    const Tok t = lex_.take();
    IrOperand op;
    if (t.k == Tok::K::LocalId) {
      op.kind = IrOperand::Kind::Reg;
      op.name = t.text;
    } else if (t.k == Tok::K::GlobalId) {
      op.kind = IrOperand::Kind::Global;
      op.name = t.text;
    } else if (t.k == Tok::K::Num) {
      op.kind = IrOperand::Kind::Const;
      op.value = t.num;
    } else if (t.k == Tok::K::Ident && (t.text == "true" || t.text == "false")) {
      op.kind = IrOperand::Kind::Const;
      op.value = t.text == "true" ? 1 : 0;
    } else {
      throw ParseError("expected operand", {t.line, t.col});
    }
    return op;
  }

  IrModule::Global global() {
    const Tok name = expect(Tok::K::GlobalId, "@name");
    expect(Tok::K::Eq, "'='");
    const Tok kw = expect(Tok::K::Ident, "global");
    if (kw.text != "global")
      throw ParseError("only `@g = global <ty> <init>` is supported",
                       {kw.line, kw.col});
    IrModule::Global g;
    g.name = name.text;
    g.type = type();
    if (g.type.kind == IrType::Kind::Void || g.type.kind == IrType::Kind::Array)
      throw ParseError("unsupported global type", {kw.line, kw.col});
    const Tok init = expect(Tok::K::Num, "initializer");
    g.init = init.num;
    return g;
  }

  std::pair<std::string, IrType> declare() {
    lex_.take();  // declare
    IrType ret = type();
    const Tok name = expect(Tok::K::GlobalId, "@name");
    expect(Tok::K::LPar, "'('");
    while (lex_.peek().k != Tok::K::RPar) {
      type();
      if (lex_.peek().k == Tok::K::LocalId) lex_.take();  // optional param name
      if (lex_.peek().k == Tok::K::Comma) lex_.take();
    }
    expect(Tok::K::RPar, "')'");
    return {name.text, std::move(ret)};
  }

  IrFunction define() {
    lex_.take();  // define
    IrFunction fn;
    fn.ret = type();
    fn.name = expect(Tok::K::GlobalId, "@name").text;
    expect(Tok::K::LPar, "'('");
    while (lex_.peek().k != Tok::K::RPar) {
      IrType pt = type();
      const Tok pn = expect(Tok::K::LocalId, "%param");
      fn.params.emplace_back(std::move(pt), pn.text);
      if (lex_.peek().k == Tok::K::Comma) lex_.take();
    }
    expect(Tok::K::RPar, "')'");
    expect(Tok::K::LBrace, "'{'");

    IrBlock block;
    bool have_block = false;
    auto flush = [&] {
      if (!have_block) return;
      if (block.body.empty())
        throw ParseError("block " + block.label + " has no terminator");
      fn.blocks.push_back(std::move(block));
      block = IrBlock{};
    };

    while (lex_.peek().k != Tok::K::RBrace) {
      const Tok t = lex_.peek();
      if (t.k == Tok::K::Ident && peek_is_label()) {
        flush();
        block.label = lex_.take().text;
        expect(Tok::K::Colon, "':'");
        have_block = true;
        continue;
      }
      if (!have_block)
        throw ParseError("instruction before the first block label",
                         {t.line, t.col});
      block.body.push_back(instruction());
    }
    lex_.take();  // }
    flush();
    if (fn.blocks.empty()) throw ParseError("function " + fn.name + " has no blocks");
    return fn;
  }

  // An Ident directly followed by ':' is a block label.
  bool peek_is_label() {
    // The lexer has one-token lookahead only; labels are idents that are not
    // instruction heads.
    const std::string& s = lex_.peek().text;
    static const char* heads[] = {"store", "br", "ret", "call"};
    for (const char* h : heads)
      if (s == h) return false;
    return true;
  }

  IrInstr instruction() {
    const Tok t = lex_.peek();
    IrInstr in;
    in.line = t.line;

    if (t.k == Tok::K::LocalId) {
      in.result = lex_.take().text;
      expect(Tok::K::Eq, "'='");
      const Tok op = expect(Tok::K::Ident, "opcode");
      return with_result(std::move(in), op);
    }
    const Tok op = expect(Tok::K::Ident, "instruction");
    if (op.text == "store") {
      in.op = IrInstr::Op::Store;
      in.type = type();
      in.args.push_back(operand());
      expect(Tok::K::Comma, "','");
      const IrType pt = type();
      if (pt.kind != IrType::Kind::Ptr)
        throw ParseError("store needs a ptr destination", {op.line, op.col});
      in.args.push_back(operand());
      return in;
    }
    if (op.text == "br") {
      if (lex_.peek().k == Tok::K::Ident && lex_.peek().text == "label") {
        lex_.take();
        in.op = IrInstr::Op::Br;
        in.label_a = expect(Tok::K::LocalId, "%label").text;
        return in;
      }
      in.op = IrInstr::Op::CondBr;
      const IrType ct = type();
      if (!(ct.kind == IrType::Kind::Int && ct.bits == 1))
        throw ParseError("br condition must be i1", {op.line, op.col});
      in.args.push_back(operand());
      expect(Tok::K::Comma, "','");
      expect_ident("label");
      in.label_a = expect(Tok::K::LocalId, "%label").text;
      expect(Tok::K::Comma, "','");
      expect_ident("label");
      in.label_b = expect(Tok::K::LocalId, "%label").text;
      return in;
    }
    if (op.text == "ret") {
      in.op = IrInstr::Op::Ret;
      in.type = type();
      if (in.type.kind != IrType::Kind::Void) in.args.push_back(operand());
      return in;
    }
    if (op.text == "call") {
      parse_call(in);
      if (in.type.kind != IrType::Kind::Void)
        throw ParseError("value-returning call needs a result register",
                         {op.line, op.col});
      return in;
    }
    if (op.text == "phi")
      throw ParseError("PhiNotSupported", {op.line, op.col});
    throw ParseError("UnsupportedInstruction: " + op.text, {op.line, op.col});
  }

  void expect_ident(const char* word) {
    const Tok t = expect(Tok::K::Ident, word);
    if (t.text != word)
      throw ParseError(std::string("expected ") + word, {t.line, t.col});
  }

  void parse_call(IrInstr& in) {
    in.op = IrInstr::Op::Call;
    in.type = type();
    in.callee = expect(Tok::K::GlobalId, "@callee").text;
    expect(Tok::K::LPar, "'('");
    while (lex_.peek().k != Tok::K::RPar) {
      in.arg_types.push_back(type());
      in.args.push_back(operand());
      if (lex_.peek().k == Tok::K::Comma) lex_.take();
    }
    expect(Tok::K::RPar, "')'");
  }

  IrInstr with_result(IrInstr in, const Tok& op) {
    static const std::pair<const char*, IrInstr::Op> binops[] = {
        {"add", IrInstr::Op::Add},   {"sub", IrInstr::Op::Sub},
        {"mul", IrInstr::Op::Mul},   {"udiv", IrInstr::Op::UDiv},
        {"sdiv", IrInstr::Op::SDiv}, {"shl", IrInstr::Op::Shl},
        {"ashr", IrInstr::Op::AShr}, {"lshr", IrInstr::Op::LShr},
    };
    for (const auto& [name, o] : binops) {
      if (op.text == name) {
        in.op = o;
        in.type = type();
        if (in.type.kind != IrType::Kind::Int || in.type.bits == 1)
          throw ParseError("integer arithmetic needs i8..i64", {op.line, op.col});
        in.args.push_back(operand());
        expect(Tok::K::Comma, "','");
        in.args.push_back(operand());
        return in;
      }
    }
    if (op.text == "icmp") {
      in.op = IrInstr::Op::ICmp;
      const Tok cc = expect(Tok::K::Ident, "condition code");
      static const char* ccs[] = {"eq", "ne", "ule", "sle", "uge", "sge",
                                  "ult", "slt", "ugt", "sgt"};
      bool ok = false;
      for (const char* c : ccs) ok = ok || cc.text == c;
      if (!ok)
        throw ParseError("UnsupportedInstruction: icmp " + cc.text,
                         {cc.line, cc.col});
      in.pred = cc.text;
      in.type = type();
      if (in.type.kind == IrType::Kind::Void || in.type.kind == IrType::Kind::Array ||
          (in.type.kind == IrType::Kind::Int && in.type.bits == 1))
        throw ParseError("icmp operand type must be i8..i64 or ptr",
                         {op.line, op.col});
      in.args.push_back(operand());
      expect(Tok::K::Comma, "','");
      in.args.push_back(operand());
      return in;
    }
    if (op.text == "zext" || op.text == "sext" || op.text == "trunc") {
      in.op = op.text == "zext"   ? IrInstr::Op::ZExt
              : op.text == "sext" ? IrInstr::Op::SExt
                                  : IrInstr::Op::TruncOp;
      in.arg_types.push_back(type());  // source type
      in.args.push_back(operand());
      expect_ident("to");
      in.type = type();  // destination type
      return in;
    }
    if (op.text == "load") {
      in.op = IrInstr::Op::Load;
      in.type = type();
      if (in.type.kind == IrType::Kind::Void || in.type.kind == IrType::Kind::Array)
        throw ParseError("load type must be scalar", {op.line, op.col});
      expect(Tok::K::Comma, "','");
      const IrType pt = type();
      if (pt.kind != IrType::Kind::Ptr)
        throw ParseError("load needs a ptr source", {op.line, op.col});
      in.args.push_back(operand());
      return in;
    }
    if (op.text == "alloca") {
      in.op = IrInstr::Op::Alloca;
      in.type = type();
      if (in.type.kind == IrType::Kind::Void)
        throw ParseError("alloca void", {op.line, op.col});
      return in;
    }
    if (op.text == "getelementptr") {
      in.op = IrInstr::Op::Gep;
      in.type = type();  // element type
      expect(Tok::K::Comma, "','");
      const IrType pt = type();
      if (pt.kind != IrType::Kind::Ptr)
        throw ParseError("getelementptr needs a ptr base", {op.line, op.col});
      in.args.push_back(operand());
      while (lex_.peek().k == Tok::K::Comma) {
        lex_.take();
        IrType it = type();
        if (it.kind != IrType::Kind::Int || it.bits < 32)
          throw ParseError("gep index must be i32 or i64", {op.line, op.col});
        in.arg_types.push_back(std::move(it));
        in.args.push_back(operand());
      }
      if (in.args.size() < 2)
        throw ParseError("getelementptr needs an index", {op.line, op.col});
      return in;
    }
    if (op.text == "call") {
      parse_call(in);
      if (in.type.kind == IrType::Kind::Void)
        throw ParseError("void call cannot define a register", {op.line, op.col});
      return in;
    }
    if (op.text == "phi") throw ParseError("PhiNotSupported", {op.line, op.col});
    throw ParseError("UnsupportedInstruction: " + op.text, {op.line, op.col});
  }

  Lexer lex_;
};

}  // namespace

IrModule parse_subset_ir(const std::string& text) {
  IrModule m = IrParser(text).parse();
  // Referenced callees must be defined or declared.
  for (const IrFunction& f : m.functions)
    for (const IrBlock& b : f.blocks)
      for (const IrInstr& in : b.body)
        if (in.op == IrInstr::Op::Call && !m.find_function(in.callee) &&
            !m.is_declared(in.callee))
          throw ParseError("unknown callee @" + in.callee + " in @" + f.name,
                           {in.line, 1});
  return m;
}

}  // namespace ulmc
