#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulmc/bitvec.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Types. Integer types are uninterpreted bit vectors; Bool and Addr are
// distinct. Addr values are 64-bit byte addresses into the model memory.

enum class UlType : uint8_t { Int8, Int16, Int32, Int64, Bool, Addr };

inline bool is_int_type(UlType t) {
  return t == UlType::Int8 || t == UlType::Int16 || t == UlType::Int32 ||
         t == UlType::Int64;
}

// Bit width used for value representation. Bool has no language-level width;
// it is represented as a single bit.
inline unsigned type_bit_width(UlType t) {
  switch (t) {
    case UlType::Int8: return 8;
    case UlType::Int16: return 16;
    case UlType::Int32: return 32;
    case UlType::Int64: return 64;
    case UlType::Bool: return 1;
    case UlType::Addr: return 64;
  }
  return 0;
}

// Storage size in bytes when written to memory.
inline unsigned type_byte_size(UlType t) {
  return t == UlType::Bool ? 1 : type_bit_width(t) / 8;
}

const char* type_name(UlType t);
std::optional<UlType> type_from_name(std::string_view s);

// ---------------------------------------------------------------------------
// Opcodes.

enum class Opcode : uint8_t {
  // Arith
  Add, Sub, Div, SDiv, Mult, LShl, AShr, LShr,
  // Cast
  SExt, ZExt, Trunc, BoolSExt, BoolZExt,
  // Cmp
  LEq, SLEq, NEq, Eq, GEq, SGEq,
  // Memory
  Load, Store,
  // Internal
  Assume, NegAssume, Assert,
  // Assigns
  Decl, NonDet, Copy,
};

constexpr unsigned kNumOpcodes = 27;

inline bool is_arith(Opcode o) { return o >= Opcode::Add && o <= Opcode::LShr; }
inline bool is_cast(Opcode o) { return o >= Opcode::SExt && o <= Opcode::BoolZExt; }
inline bool is_cmp(Opcode o) { return o >= Opcode::LEq && o <= Opcode::SGEq; }
inline bool is_memory(Opcode o) { return o == Opcode::Load || o == Opcode::Store; }
inline bool is_internal(Opcode o) {
  return o == Opcode::Assume || o == Opcode::NegAssume || o == Opcode::Assert;
}
inline bool is_assign(Opcode o) {
  return o == Opcode::Decl || o == Opcode::NonDet || o == Opcode::Copy;
}

const char* opcode_name(Opcode o);
std::optional<Opcode> opcode_from_name(std::string_view s);

// Number of source operands per the grammar.
inline unsigned opcode_arity(Opcode o) {
  if (is_arith(o) || is_cmp(o) || o == Opcode::Store) return 2;
  if (is_cast(o) || o == Opcode::Load || o == Opcode::Copy ||
      o == Opcode::Assume || o == Opcode::NegAssume)
    return 1;
  return 0;  // Assert, Decl, NonDet
}
inline bool opcode_has_dest(Opcode o) {
  return !is_internal(o) && o != Opcode::Store;
}

// ---------------------------------------------------------------------------
// Registers and operands. Register references are resolved to indices at
// parse time; `global` selects the shared register set of the network.

struct RegRef {
  uint32_t index = 0;
  bool global = false;
  std::string name;

  bool operator==(const RegRef& o) const {
    return index == o.index && global == o.global && name == o.name;
  }
};

struct RegisterInfo {
  std::string name;
  UlType type = UlType::Int8;
};

// View of the register environment an instruction sequence is typed against:
// the automaton's locals plus the operand-addressable shared globals.
struct RegScope {
  std::span<const RegisterInfo> globals;
  std::span<const RegisterInfo> locals;

  struct Hit {
    bool global;
    uint32_t index;
    UlType type;
  };
  std::optional<Hit> lookup(std::string_view name) const {
    for (uint32_t i = 0; i < locals.size(); ++i)
      if (locals[i].name == name) return Hit{false, i, locals[i].type};
    for (uint32_t i = 0; i < globals.size(); ++i)
      if (globals[i].name == name) return Hit{true, i, globals[i].type};
    return std::nullopt;
  }
  UlType type_of(const RegRef& r) const {
    return r.global ? globals[r.index].type : locals[r.index].type;
  }
};

enum class OperandKind : uint8_t { Reg, UConst, SConst };

// Constants carry their annotated type: [n]^IntB, [z]^IntB_2 (2s-complement)
// or [n]^Addr. The encoded pattern is fixed at construction.
struct Operand {
  OperandKind kind = OperandKind::Reg;
  RegRef reg;               // Reg
  UlType ctype = UlType::Int8;  // UConst/SConst annotation (IntB, or Addr for UConst)
  uint64_t pattern = 0;     // encoded bits for constants
  int64_t svalue = 0;       // SConst: original signed value, for rendering

  static Operand make_reg(RegRef r) {
    Operand op;
    op.kind = OperandKind::Reg;
    op.reg = std::move(r);
    return op;
  }
  static std::optional<Operand> make_uconst(uint64_t value, UlType t);
  static std::optional<Operand> make_sconst(int64_t value, UlType t);

  bool operator==(const Operand& o) const {
    if (kind != o.kind) return false;
    if (kind == OperandKind::Reg) return reg == o.reg;
    return ctype == o.ctype && pattern == o.pattern &&
           (kind != OperandKind::SConst || svalue == o.svalue);
  }
};

// Encoded bit pattern of a constant operand (its value at the annotated width).
std::optional<BitVec> encode_const(const Operand& op);

// ---------------------------------------------------------------------------
// Instructions and sequences.

struct Instruction {
  Opcode op = Opcode::Decl;
  std::optional<RegRef> dest;
  std::vector<Operand> args;

  bool operator==(const Instruction&) const = default;
};

// An edge label: optional Internal guard at the head, then any number of
// non-Internal instructions. The empty sequence is the identity label.
struct InstructionSequence {
  std::optional<Instruction> guard;
  std::vector<Instruction> body;

  bool empty() const { return !guard && body.empty(); }
  size_t length() const { return body.size() + (guard ? 1 : 0); }
  bool operator==(const InstructionSequence&) const = default;
};

// ---------------------------------------------------------------------------
// Typechecking. Accepts iff widths agree per operation class:
//   arith: equal widths (Addr counts as 64 bits), dest same width, no Bool;
//   cmp:   equal widths, Bool dest;
//   SExt/ZExt: IntN -> IntM with M > N; Trunc: M < N;
//   BoolSExt/BoolZExt: Bool -> IntM;
//   Load:  Addr source, dest IntB or Addr;
//   Store: Addr first operand, second IntB or Addr;
//   Assume/NegAssume: Bool register; Copy: exact type equality.
// Constants type as their annotation. O(sequence length).

struct TypeError {
  size_t instr_index = 0;  // 0 = guard when present, body starts after it
  std::string reason;
};

std::optional<TypeError> typecheck_sequence(const InstructionSequence& seq,
                                            const RegScope& scope);

}  // namespace ulmc
