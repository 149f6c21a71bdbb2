#include "ulmc/ul_text.hpp"

#include <cctype>
#include <sstream>

#include "ulmc/errors.hpp"

namespace ulmc {

namespace {

// ---------------------------------------------------------------------------
// Sequence tokenizer. Tokens: identifiers, integers, and the punctuation
// `<-` (or the arrow), `;`, `,`, `[`, `]`, `^`.

struct Token {
  enum class Kind { Ident, Int, Arrow, Semi, Comma, LBrack, RBrack, Caret, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t value = 0;
  uint32_t col = 0;
};

class SeqLexer {
 public:
  explicit SeqLexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    tok_ = Token{};
    tok_.col = static_cast<uint32_t>(i_ + 1);
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    auto single = [&](Token::Kind k) {
      tok_.kind = k;
      tok_.text = c;
      ++i_;
    };
    if (c == ';') return single(Token::Kind::Semi);
    if (c == ',') return single(Token::Kind::Comma);
    if (c == '[') return single(Token::Kind::LBrack);
    if (c == ']') return single(Token::Kind::RBrack);
    if (c == '^') return single(Token::Kind::Caret);
    if (c == '<' && i_ + 1 < s_.size() && s_[i_ + 1] == '-') {
      tok_.kind = Token::Kind::Arrow;
      i_ += 2;
      return;
    }
    // UTF-8 leftwards arrow
    if (static_cast<unsigned char>(c) == 0xE2 && i_ + 2 < s_.size() &&
        static_cast<unsigned char>(s_[i_ + 1]) == 0x86 &&
        static_cast<unsigned char>(s_[i_ + 2]) == 0x90) {
      tok_.kind = Token::Kind::Arrow;
      i_ += 3;
      return;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i_ + (c == '-' ? 1 : 0);
      if (j >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[j])))
        throw ParseError("stray '-'", {0, tok_.col});
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      tok_.kind = Token::Kind::Int;
      tok_.text = s_.substr(i_, j - i_);
      tok_.value = std::stoll(tok_.text);
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                               s_[j] == '_' || s_[j] == '.'))
        ++j;
      tok_.kind = Token::Kind::Ident;
      tok_.text = s_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", {0, tok_.col});
  }

  const std::string& s_;
  size_t i_ = 0;
  Token tok_;
};

class SeqParser {
 public:
  SeqParser(const std::string& text, const RegScope& scope)
      : lex_(text), scope_(scope) {}

  InstructionSequence parse() {
    InstructionSequence seq;
    bool first = true;
    while (lex_.peek().kind != Token::Kind::End) {
      if (!first) expect(Token::Kind::Semi, "';'");
      if (lex_.peek().kind == Token::Kind::End) break;  // trailing ';'
      Instruction in = instruction();
      if (is_internal(in.op)) {
        if (!first)
          throw ParseError("MisplacedInternal: guard must be the first instruction",
                           {0, lex_.peek().col});
        seq.guard = std::move(in);
      } else {
        seq.body.push_back(std::move(in));
      }
      first = false;
    }
    return seq;
  }

 private:
  Token expect(Token::Kind k, const char* what) {
    if (lex_.peek().kind != k)
      throw ParseError(std::string("expected ") + what, {0, lex_.peek().col});
    return lex_.take();
  }

  RegRef reg_ref(const Token& t) {
    auto hit = scope_.lookup(t.text);
    if (!hit) throw ParseError("UnknownRegister: " + t.text, {0, t.col});
    RegRef r;
    r.index = hit->index;
    r.global = hit->global;
    r.name = t.text;
    return r;
  }

  Operand operand() {
    const Token t = lex_.take();
    if (t.kind == Token::Kind::Ident) return Operand::make_reg(reg_ref(t));
    if (t.kind != Token::Kind::LBrack)
      throw ParseError("expected operand", {0, t.col});
    const Token num = expect(Token::Kind::Int, "integer");
    expect(Token::Kind::RBrack, "']'");
    expect(Token::Kind::Caret, "'^'");
    const Token ty = expect(Token::Kind::Ident, "type name");
    bool is_signed = false;
    std::string tyname = ty.text;
    if (tyname.size() > 2 && tyname.ends_with("_2")) {
      is_signed = true;
      tyname.resize(tyname.size() - 2);
    }
    auto ult = type_from_name(tyname);
    if (!ult || *ult == UlType::Bool)
      throw ParseError("bad constant type " + ty.text, {0, ty.col});
    std::optional<Operand> op;
    if (is_signed) {
      if (*ult == UlType::Addr)
        throw ParseError("signed Addr constants are not a thing", {0, ty.col});
      op = Operand::make_sconst(num.value, *ult);
    } else {
      if (num.value < 0)
        throw ParseError("negative value needs the _2 spelling", {0, num.col});
      op = Operand::make_uconst(static_cast<uint64_t>(num.value), *ult);
    }
    if (!op)
      throw ParseError("OutOfRange: " + num.text + " does not fit " + tyname,
                       {0, num.col});
    return *op;
  }

  Instruction instruction() {
    const Token head = expect(Token::Kind::Ident, "instruction");
    Instruction in;

    // Internal and Store have no destination.
    if (head.text == "Assume" || head.text == "NegAssume") {
      in.op = head.text == "Assume" ? Opcode::Assume : Opcode::NegAssume;
      const Token r = expect(Token::Kind::Ident, "register");
      in.args.push_back(Operand::make_reg(reg_ref(r)));
      return in;
    }
    if (head.text == "Assert") {
      in.op = Opcode::Assert;
      return in;
    }
    if (head.text == "Store") {
      in.op = Opcode::Store;
      in.args.push_back(operand());
      expect(Token::Kind::Comma, "','");
      in.args.push_back(operand());
      return in;
    }

    // Otherwise: `r` (Decl) or `r <- Opcode ...`.
    if (opcode_from_name(head.text))
      throw ParseError(head.text + " needs a destination register", {0, head.col});
    RegRef dest = reg_ref(head);
    if (lex_.peek().kind != Token::Kind::Arrow) {
      in.op = Opcode::Decl;
      in.dest = std::move(dest);
      return in;
    }
    lex_.take();  // arrow
    const Token opname = expect(Token::Kind::Ident, "opcode");
    auto op = opcode_from_name(opname.text);
    if (!op || is_internal(*op) || *op == Opcode::Store || *op == Opcode::Decl)
      throw ParseError("unknown opcode " + opname.text, {0, opname.col});
    in.op = *op;
    in.dest = std::move(dest);
    for (unsigned i = 0; i < opcode_arity(*op); ++i) {
      if (i > 0) expect(Token::Kind::Comma, "','");
      in.args.push_back(operand());
    }
    return in;
  }

  SeqLexer lex_;
  const RegScope& scope_;
};

}  // namespace

InstructionSequence parse_sequence(const std::string& text, const RegScope& scope,
                                   bool typecheck) {
  InstructionSequence seq = SeqParser(text, scope).parse();
  if (typecheck) {
    if (auto te = typecheck_sequence(seq, scope))
      throw ParseError("TypeError at instruction " + std::to_string(te->instr_index) +
                       ": " + te->reason);
  }
  return seq;
}

std::string render_operand(const Operand& op) {
  if (op.kind == OperandKind::Reg) return op.reg.name;
  std::ostringstream out;
  if (op.kind == OperandKind::SConst)
    out << "[" << op.svalue << "]^" << type_name(op.ctype) << "_2";
  else
    out << "[" << op.pattern << "]^" << type_name(op.ctype);
  return out.str();
}

std::string render_instruction(const Instruction& in) {
  std::ostringstream out;
  switch (in.op) {
    case Opcode::Assume:
    case Opcode::NegAssume:
      out << opcode_name(in.op) << " " << in.args[0].reg.name;
      return out.str();
    case Opcode::Assert:
      return "Assert";
    case Opcode::Store:
      out << "Store " << render_operand(in.args[0]) << ", "
          << render_operand(in.args[1]);
      return out.str();
    case Opcode::Decl:
      return in.dest->name;
    default:
      break;
  }
  out << in.dest->name << " <- " << opcode_name(in.op);
  for (size_t i = 0; i < in.args.size(); ++i)
    out << (i ? ", " : " ") << render_operand(in.args[i]);
  return out.str();
}

std::string render_sequence(const InstructionSequence& seq) {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const Instruction& in) {
    if (!first) out << "; ";
    out << render_instruction(in);
    first = false;
  };
  if (seq.guard) emit(*seq.guard);
  for (const Instruction& in : seq.body) emit(in);
  return out.str();
}

// ---------------------------------------------------------------------------
// .ul model files.

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

uint64_t parse_u64(const std::string& s, uint32_t line) {
  try {
    size_t pos = 0;
    const uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + s + "'", {line, 1});
  }
}

int64_t parse_i64(const std::string& s, uint32_t line) {
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'", {line, 1});
  }
}

struct PendingEdge {
  std::string from, to, text;
  uint32_t line;
};

}  // namespace

Network parse_program(const std::string& text) {
  Network net;
  std::optional<Cfa> current;
  std::vector<PendingEdge> pending;
  bool saw_memsize = false;

  std::istringstream in(text);
  std::string raw;
  uint32_t lineno = 0;

  auto finish_process = [&](uint32_t line) {
    if (!current) return;
    // Resolve and typecheck edges now that all registers are known.
    for (const PendingEdge& pe : pending) {
      auto from = current->find_location(pe.from);
      auto to = current->find_location(pe.to);
      if (!from) throw ParseError("UnknownLocation: " + pe.from, {pe.line, 1});
      if (!to) throw ParseError("UnknownLocation: " + pe.to, {pe.line, 1});
      RegScope scope{net.plain_globals, current->registers};
      Edge e;
      e.from = *from;
      e.to = *to;
      try {
        e.seq = parse_sequence(pe.text, scope, /*typecheck=*/true);
      } catch (const ParseError& pe_err) {
        throw ParseError(std::string(pe_err.what()), {pe.line, 1});
      }
      current->edges.push_back(std::move(e));
    }
    pending.clear();
    unsigned inits = 0;
    for (const Location& l : current->locations) inits += l.is_init;
    if (inits != 1)
      throw ParseError("process " + current->name + " needs exactly one init location",
                       {line, 1});
    net.cfas.push_back(std::move(*current));
    current.reset();
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::vector<std::string> w = split_words(raw);
    if (w.empty()) continue;
    const std::string& kw = w[0];

    if (kw == "memsize") {
      if (w.size() != 2) throw ParseError("memsize <bytes>", {lineno, 1});
      net.memsize = parse_u64(w[1], lineno);
      saw_memsize = true;
    } else if (kw == "static") {
      if (w.size() != 2) throw ParseError("static <bytes>", {lineno, 1});
      net.static_bytes = parse_u64(w[1], lineno);
    } else if (kw == "global") {
      if (current) throw ParseError("global inside process", {lineno, 1});
      // global <name> : <type> [= <int>] [@ <addr>]
      if (w.size() < 4 || w[2] != ":")
        throw ParseError("global <name> : <type> [= <int>] [@ <addr>]", {lineno, 1});
      GlobalDef g;
      g.reg.name = w[1];
      auto t = type_from_name(w[3]);
      if (!t) throw ParseError("unknown type " + w[3], {lineno, 1});
      g.reg.type = *t;
      size_t i = 4;
      if (i < w.size() && w[i] == "=") {
        if (i + 1 >= w.size()) throw ParseError("missing initializer", {lineno, 1});
        const int64_t v = parse_i64(w[i + 1], lineno);
        const unsigned width = type_bit_width(g.reg.type);
        g.init_pattern = static_cast<uint64_t>(v) & BitVec::mask(width);
        i += 2;
      }
      if (i < w.size() && w[i] == "@") {
        if (i + 1 >= w.size()) throw ParseError("missing address", {lineno, 1});
        g.address = parse_u64(w[i + 1], lineno);
        i += 2;
      }
      if (i != w.size()) throw ParseError("trailing tokens", {lineno, 1});
      if (net.find_global(g.reg.name))
        throw ParseError("DuplicateName: global " + g.reg.name, {lineno, 1});
      net.globals.push_back(std::move(g));
      net.finalize();  // keep plain_globals usable while parsing processes
    } else if (kw == "process") {
      if (current) throw ParseError("nested process", {lineno, 1});
      if (w.size() != 2) throw ParseError("process <name>", {lineno, 1});
      current = Cfa{};
      current->name = w[1];
    } else if (kw == "register") {
      if (!current) throw ParseError("register outside process", {lineno, 1});
      if (w.size() != 4 || w[2] != ":")
        throw ParseError("register <name> : <type>", {lineno, 1});
      auto t = type_from_name(w[3]);
      if (!t) throw ParseError("unknown type " + w[3], {lineno, 1});
      for (const RegisterInfo& r : current->registers)
        if (r.name == w[1])
          throw ParseError("DuplicateName: register " + w[1], {lineno, 1});
      current->registers.push_back({w[1], *t});
    } else if (kw == "location") {
      if (!current) throw ParseError("location outside process", {lineno, 1});
      if (w.size() < 2) throw ParseError("location <name> [flags]", {lineno, 1});
      Location l;
      l.name = w[1];
      l.origin = w[1];
      for (size_t i = 2; i < w.size(); ++i) {
        if (w[i] == "init") l.is_init = true;
        else if (w[i] == "term") l.is_term = true;
        else if (w[i] == "assertviolation") l.is_assert_violation = true;
        else if (w[i] == "origin") {
          if (i + 1 >= w.size()) throw ParseError("origin <name>", {lineno, 1});
          l.origin = w[++i];
          l.synthetic = true;
        } else {
          throw ParseError("unknown location flag " + w[i], {lineno, 1});
        }
      }
      if (current->find_location(l.name))
        throw ParseError("DuplicateName: location " + l.name, {lineno, 1});
      current->locations.push_back(std::move(l));
    } else if (kw == "edge") {
      if (!current) throw ParseError("edge outside process", {lineno, 1});
      // edge <from> -> <to> : <sequence text>
      if (w.size() < 4 || w[2] != "->")
        throw ParseError("edge <from> -> <to> : <sequence>", {lineno, 1});
      PendingEdge pe;
      pe.from = w[1];
      pe.to = w[3];
      pe.line = lineno;
      const size_t colon = raw.find(':', raw.find(w[3]) + w[3].size());
      pe.text = colon == std::string::npos ? "" : raw.substr(colon + 1);
      if (w.size() > 4 && w[4] != ":" && colon == std::string::npos)
        throw ParseError("expected ':' after edge head", {lineno, 1});
      pending.push_back(std::move(pe));
    } else if (kw == "end") {
      if (!current) throw ParseError("end outside process", {lineno, 1});
      finish_process(lineno);
    } else {
      throw ParseError("unknown directive " + kw, {lineno, 1});
    }
  }
  if (current) throw ParseError("missing end for process " + current->name, {lineno, 1});
  if (!saw_memsize) throw ParseError("missing memsize line", {lineno, 1});
  net.finalize();
  return net;
}

std::string render_program(const Network& net) {
  std::ostringstream out;
  out << "memsize " << net.memsize << "\n";
  if (net.static_bytes) out << "static " << net.static_bytes << "\n";
  for (const GlobalDef& g : net.globals) {
    out << "global " << g.reg.name << " : " << type_name(g.reg.type);
    if (g.init_pattern || g.address) out << " = " << g.init_pattern;
    if (g.address) out << " @ " << *g.address;
    out << "\n";
  }
  for (const Cfa& cfa : net.cfas) {
    out << "process " << cfa.name << "\n";
    for (const RegisterInfo& r : cfa.registers)
      out << "  register " << r.name << " : " << type_name(r.type) << "\n";
    for (const Location& l : cfa.locations) {
      out << "  location " << l.name;
      if (l.is_init) out << " init";
      if (l.is_term) out << " term";
      if (l.is_assert_violation) out << " assertviolation";
      if (l.synthetic && l.origin != l.name) out << " origin " << l.origin;
      out << "\n";
    }
    for (const Edge& e : cfa.edges) {
      out << "  edge " << cfa.locations[e.from].name << " -> "
          << cfa.locations[e.to].name << " : " << render_sequence(e.seq) << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

uint64_t model_hash(const Network& net) {
  const std::string s = render_program(net);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ulmc
