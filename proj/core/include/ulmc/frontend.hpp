#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ulmc/cfa.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Subset-IR (.sir): a textual, register-based, phi-free LLVM-like input.
// Registers are mutable (no SSA discipline); blocks end in br or ret.
// Supported: add sub mul udiv sdiv shl ashr lshr, icmp (eq ne ule sle uge
// sge ult slt ugt sgt), zext sext trunc, load store alloca, getelementptr,
// br, ret, call. Unsupported constructs fail loudly.

struct IrType {
  enum class Kind : uint8_t { Void, Int, Ptr, Array };
  Kind kind = Kind::Void;
  unsigned bits = 0;                // Int
  uint64_t count = 0;               // Array
  std::shared_ptr<IrType> elem;     // Array

  static IrType void_ty() { return {}; }
  static IrType int_ty(unsigned b) { return {Kind::Int, b, 0, nullptr}; }
  static IrType ptr_ty() { return {Kind::Ptr, 0, 0, nullptr}; }
  static IrType array_ty(uint64_t n, IrType e) {
    return {Kind::Array, 0, n, std::make_shared<IrType>(std::move(e))};
  }
  uint64_t byte_size() const;
  bool operator==(const IrType& o) const;
};

struct IrOperand {
  enum class Kind : uint8_t { Reg, Const, Global };
  Kind kind = Kind::Reg;
  std::string name;   // Reg (without %), Global (without @)
  int64_t value = 0;  // Const
};

struct IrInstr {
  enum class Op : uint8_t {
    Add, Sub, Mul, UDiv, SDiv, Shl, AShr, LShr,
    ICmp, ZExt, SExt, TruncOp, Load, Store, Alloca, Gep, Call,
    Br, CondBr, Ret,
  };
  Op op;
  std::string result;           // defined register (may be empty)
  IrType type;                  // operation type (int width, load/store type,
                                // alloca type, gep element type, call result)
  std::string pred;             // icmp condition code
  std::vector<IrOperand> args;  // operands in source order
  std::vector<IrType> arg_types;
  std::string callee;           // Call
  std::string label_a, label_b; // Br / CondBr targets
  uint32_t line = 0;
};

struct IrBlock {
  std::string label;
  std::vector<IrInstr> body;  // last instruction is the terminator
};

struct IrFunction {
  std::string name;
  IrType ret;
  std::vector<std::pair<IrType, std::string>> params;
  std::vector<IrBlock> blocks;  // first block is the entry

  const IrBlock* find_block(std::string_view label) const;
};

struct IrModule {
  struct Global {
    std::string name;
    IrType type;
    int64_t init = 0;
  };
  std::vector<Global> globals;
  std::vector<IrFunction> functions;
  std::vector<std::pair<std::string, IrType>> declarations;  // name, result type

  const IrFunction* find_function(std::string_view name) const;
  bool is_declared(std::string_view name) const;
};

// Throws ParseError (SyntaxError / UnsupportedInstruction / PhiNotSupported).
IrModule parse_subset_ir(const std::string& text);

// Splices every call to a defined function into the caller, with fresh
// register/label names; calls to declared functions remain. Throws
// FrontendError("RecursionDetected: ...") on call cycles.
IrFunction inline_calls(const IrModule& module, const std::string& entry);

// Static frame layout computed while lowering: every alloca gets a fixed
// address from the network-level bump allocator.
struct FrameLayout {
  Memory arena;  // shared bump state across globals and all frames
};

// Lowers one inlined function to a CFA: one location per basic block (plus
// branch/assert split points), conditional br to Assume/NegAssume edge
// pairs, ret to Term, calls to declared value-returning functions to NonDet,
// `assert` calls to an Assert edge into the violation location.
Cfa lower_function(const IrFunction& fn, const Network& globals_env,
                   FrameLayout& frames);

// One CFA per entry (inline_calls + lower_function); module globals become
// memory-backed shared registers with their initializers. The result is
// validated and normalized.
Network build_network(const IrModule& module, const std::vector<std::string>& entries,
                      uint64_t memsize);

}  // namespace ulmc
