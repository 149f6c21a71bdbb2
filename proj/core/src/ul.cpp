#include "ulmc/ul.hpp"

namespace ulmc {

const char* type_name(UlType t) {
  switch (t) {
    case UlType::Int8: return "Int8";
    case UlType::Int16: return "Int16";
    case UlType::Int32: return "Int32";
    case UlType::Int64: return "Int64";
    case UlType::Bool: return "Bool";
    case UlType::Addr: return "Addr";
  }
  return "?";
}

std::optional<UlType> type_from_name(std::string_view s) {
  if (s == "Int8") return UlType::Int8;
  if (s == "Int16") return UlType::Int16;
  if (s == "Int32") return UlType::Int32;
  if (s == "Int64") return UlType::Int64;
  if (s == "Bool") return UlType::Bool;
  if (s == "Addr") return UlType::Addr;
  return std::nullopt;
}

namespace {
constexpr const char* kOpcodeNames[kNumOpcodes] = {
    "Add", "Sub", "Div", "SDiv", "Mult", "LShl", "AShr", "LShr",
    "SExt", "ZExt", "Trunc", "BoolSExt", "BoolZExt",
    "LEq", "SLEq", "NEq", "Eq", "GEq", "SGEq",
    "Load", "Store", "Assume", "NegAssume", "Assert",
    "Decl", "NonDet", "Copy",
};
}  // namespace

const char* opcode_name(Opcode o) { return kOpcodeNames[static_cast<size_t>(o)]; }

std::optional<Opcode> opcode_from_name(std::string_view s) {
  for (unsigned i = 0; i < kNumOpcodes; ++i)
    if (s == kOpcodeNames[i]) return static_cast<Opcode>(i);
  return std::nullopt;
}

std::optional<Operand> Operand::make_uconst(uint64_t value, UlType t) {
  if (!is_int_type(t) && t != UlType::Addr) return std::nullopt;
  const unsigned w = type_bit_width(t);
  if (w < 64 && value > BitVec::mask(w)) return std::nullopt;  // OutOfRange
  Operand op;
  op.kind = OperandKind::UConst;
  op.ctype = t;
  op.pattern = value & BitVec::mask(w);
  return op;
}

std::optional<Operand> Operand::make_sconst(int64_t value, UlType t) {
  if (!is_int_type(t)) return std::nullopt;  // no signed Addr constants
  const unsigned w = type_bit_width(t);
  if (w < 64) {
    const int64_t lo = -(int64_t(1) << (w - 1));
    const int64_t hi = (int64_t(1) << (w - 1)) - 1;
    if (value < lo || value > hi) return std::nullopt;  // OutOfRange
  }
  Operand op;
  op.kind = OperandKind::SConst;
  op.ctype = t;
  op.pattern = static_cast<uint64_t>(value) & BitVec::mask(w);
  op.svalue = value;
  return op;
}

std::optional<BitVec> encode_const(const Operand& op) {
  if (op.kind == OperandKind::Reg) return std::nullopt;
  return BitVec::of(type_bit_width(op.ctype), op.pattern);
}

namespace {

// Type of an operand under the scope; constants type as their annotation.
UlType operand_type(const Operand& op, const RegScope& scope) {
  if (op.kind == OperandKind::Reg) return scope.type_of(op.reg);
  return op.ctype;
}

bool width_compatible(UlType t) { return is_int_type(t) || t == UlType::Addr; }

std::optional<std::string> check_instr(const Instruction& in, const RegScope& scope) {
  const Opcode op = in.op;
  if (opcode_has_dest(op) != in.dest.has_value())
    return std::string("bad dest for ") + opcode_name(op);
  if (in.args.size() != opcode_arity(op))
    return std::string("bad arity for ") + opcode_name(op);

  auto dest_type = [&]() { return scope.type_of(*in.dest); };

  if (is_arith(op)) {
    UlType a = operand_type(in.args[0], scope), b = operand_type(in.args[1], scope);
    UlType d = dest_type();
    if (!width_compatible(a) || !width_compatible(b) || !width_compatible(d))
      return std::string("arith requires integer or address operands");
    if (type_bit_width(a) != type_bit_width(b) || type_bit_width(a) != type_bit_width(d))
      return std::string("arith width mismatch");
    return std::nullopt;
  }
  if (is_cmp(op)) {
    UlType a = operand_type(in.args[0], scope), b = operand_type(in.args[1], scope);
    if (!width_compatible(a) || !width_compatible(b))
      return std::string("cmp requires integer or address operands");
    if (type_bit_width(a) != type_bit_width(b)) return std::string("cmp width mismatch");
    if (dest_type() != UlType::Bool) return std::string("cmp dest must be Bool");
    return std::nullopt;
  }
  switch (op) {
    case Opcode::SExt:
    case Opcode::ZExt: {
      UlType s = operand_type(in.args[0], scope), d = dest_type();
      if (!is_int_type(s) || !is_int_type(d)) return std::string("ext requires IntN -> IntM");
      if (type_bit_width(d) <= type_bit_width(s)) return std::string("ext requires M > N");
      return std::nullopt;
    }
    case Opcode::Trunc: {
      UlType s = operand_type(in.args[0], scope), d = dest_type();
      if (!is_int_type(s) || !is_int_type(d)) return std::string("trunc requires IntN -> IntM");
      if (type_bit_width(d) >= type_bit_width(s)) return std::string("trunc requires M < N");
      return std::nullopt;
    }
    case Opcode::BoolSExt:
    case Opcode::BoolZExt: {
      if (operand_type(in.args[0], scope) != UlType::Bool)
        return std::string("bool cast requires Bool source");
      if (!is_int_type(dest_type())) return std::string("bool cast dest must be IntM");
      return std::nullopt;
    }
    case Opcode::Load: {
      if (operand_type(in.args[0], scope) != UlType::Addr)
        return std::string("Load source must be Addr");
      UlType d = dest_type();
      if (!is_int_type(d) && d != UlType::Addr)
        return std::string("Load dest must be IntB or Addr");
      return std::nullopt;
    }
    case Opcode::Store: {
      if (operand_type(in.args[0], scope) != UlType::Addr)
        return std::string("Store address must be Addr");
      UlType v = operand_type(in.args[1], scope);
      if (!is_int_type(v) && v != UlType::Addr)
        return std::string("Store value must be IntB or Addr");
      return std::nullopt;
    }
    case Opcode::Assume:
    case Opcode::NegAssume: {
      if (in.args[0].kind != OperandKind::Reg)
        return std::string("Assume takes a register");
      if (operand_type(in.args[0], scope) != UlType::Bool)
        return std::string("Assume register must be Bool");
      return std::nullopt;
    }
    case Opcode::Assert:
    case Opcode::Decl:
    case Opcode::NonDet:
      return std::nullopt;
    case Opcode::Copy: {
      if (operand_type(in.args[0], scope) != dest_type())
        return std::string("Copy requires identical source and dest types");
      return std::nullopt;
    }
    default:
      return std::string("unreachable opcode");
  }
}

// Rejects register references outside the scope (typecheck never accepts a
// sequence with an unknown register).
bool regs_resolved(const Instruction& in, const RegScope& scope) {
  auto ok = [&](const RegRef& r) {
    const auto& tbl = r.global ? scope.globals : scope.locals;
    return r.index < tbl.size() && tbl[r.index].name == r.name;
  };
  if (in.dest && !ok(*in.dest)) return false;
  for (const auto& a : in.args)
    if (a.kind == OperandKind::Reg && !ok(a.reg)) return false;
  return true;
}

}  // namespace

std::optional<TypeError> typecheck_sequence(const InstructionSequence& seq,
                                            const RegScope& scope) {
  size_t index = 0;
  if (seq.guard) {
    if (!is_internal(seq.guard->op))
      return TypeError{0, "guard must be an Internal instruction"};
    if (!regs_resolved(*seq.guard, scope))
      return TypeError{0, "unknown register in guard"};
    if (auto why = check_instr(*seq.guard, scope)) return TypeError{0, *why};
    index = 1;
  }
  for (size_t i = 0; i < seq.body.size(); ++i, ++index) {
    const Instruction& in = seq.body[i];
    if (is_internal(in.op))
      return TypeError{index, "Internal instruction not at head"};
    if (!regs_resolved(in, scope)) return TypeError{index, "unknown register"};
    if (auto why = check_instr(in, scope)) return TypeError{index, *why};
  }
  return std::nullopt;
}

}  // namespace ulmc
