#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ulmc/ul.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Runtime values. The variant agrees with the register's type: IntB values
// are bit vectors, Bool is a truth value, Addr is a 64-bit byte address.

enum class ValueKind : uint8_t { Bits, Boolean, Address };

struct Value {
  ValueKind kind = ValueKind::Bits;
  BitVec bv;  // Boolean: width 1, bits 0/1. Address: width 64.

  static Value bits(BitVec b) { return {ValueKind::Bits, b}; }
  static Value boolean(bool b) { return {ValueKind::Boolean, BitVec::of(1, b ? 1 : 0)}; }
  static Value address(uint64_t a) { return {ValueKind::Address, BitVec::of(64, a)}; }

  // Zero pattern of the given type (initial register value).
  static Value zero_of(UlType t) {
    if (t == UlType::Bool) return boolean(false);
    if (t == UlType::Addr) return address(0);
    return bits(BitVec::of(type_bit_width(t), 0));
  }

  bool as_bool() const { return bv.bits != 0; }
  uint64_t addr() const { return bv.bits; }

  bool operator==(const Value&) const = default;
};

// Register environment of one automaton (or the shared globals), indexed by
// register index. Plain value type: copies are independent states.
using Env = std::vector<Value>;

Env make_env(std::span<const RegisterInfo> regs);

// ---------------------------------------------------------------------------
// Byte memory with a bump pointer. Zero-indexed; update touches one byte.

struct Memory {
  std::vector<uint8_t> bytes;
  uint64_t pointer = 0;  // next unused byte

  static Memory of_size(uint64_t memsize) {
    Memory m;
    m.bytes.assign(memsize, 0);
    return m;
  }
  uint64_t size() const { return bytes.size(); }

  bool operator==(const Memory&) const = default;
};

// Bump allocation: returns the old pointer and advances it, nullopt when the
// request exceeds memsize.
std::optional<uint64_t> alloc(Memory& mem, uint64_t nbytes);

// ---------------------------------------------------------------------------
// Sequence execution.

// Supplies values for NonDet destinations; must return a value of the
// requested type.
using Chooser = std::function<Value(UlType)>;

Chooser zero_chooser();
// Consumes `values` in order; raw bit patterns converted to the asked type.
Chooser scripted_chooser(std::vector<uint64_t> values);

enum class GuardResult : uint8_t { Enabled, Blocked, AssertHit };

enum class StepStatus : uint8_t {
  Ok,
  Blocked,    // false Assume / true NegAssume at the head
  Error,      // absorbing run failure: div by zero, SDiv overflow, bad access
  AssertHit,  // Assert guard fired; body effects are applied
};

struct ExecCtx {
  Env& local;
  Env& global;
  const RegScope& scope;
};

// Operand evaluation: registers from the environments, constants from their
// encoded pattern wrapped per annotated type.
Value eval_operand(const Operand& op, const Env& local, const Env& global);

// Guard evaluation only (no state change).
GuardResult check_guard(const Instruction& internal, const Env& local,
                        const Env& global);

// One non-Internal instruction. Mutates the environments/memory it is given;
// the caller owns copy discipline.
StepStatus exec_instruction(const Instruction& in, ExecCtx ctx, Memory& mem,
                            const Chooser& choose);

// Guard first (Blocked skips the body; AssertHit still executes the body,
// so the violation state is inspectable), then the body left to right with
// first-fault stop. Error is absorbing.
StepStatus step_sequence(const InstructionSequence& seq, Env& local, Env& global,
                         const RegScope& scope, Memory& mem, const Chooser& choose);

}  // namespace ulmc
