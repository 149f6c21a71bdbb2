#include "ulmc/machine.hpp"

#include <cassert>
#include <memory>

namespace ulmc {

Env make_env(std::span<const RegisterInfo> regs) {
  Env env;
  env.reserve(regs.size());
  for (const auto& r : regs) env.push_back(Value::zero_of(r.type));
  return env;
}

std::optional<uint64_t> alloc(Memory& mem, uint64_t nbytes) {
  if (mem.pointer + nbytes > mem.size() || mem.pointer + nbytes < mem.pointer)
    return std::nullopt;
  const uint64_t addr = mem.pointer;
  mem.pointer += nbytes;
  return addr;
}

Chooser zero_chooser() {
  return [](UlType t) { return Value::zero_of(t); };
}

Chooser scripted_chooser(std::vector<uint64_t> values) {
  auto idx = std::make_shared<size_t>(0);
  auto vals = std::make_shared<std::vector<uint64_t>>(std::move(values));
  return [idx, vals](UlType t) {
    assert(*idx < vals->size() && "scripted chooser exhausted");
    const uint64_t raw = (*vals)[(*idx)++];
    if (t == UlType::Bool) return Value::boolean(raw != 0);
    if (t == UlType::Addr) return Value::address(raw);
    return Value::bits(BitVec::of(type_bit_width(t), raw));
  };
}

Value eval_operand(const Operand& op, const Env& local, const Env& global) {
  if (op.kind == OperandKind::Reg)
    return op.reg.global ? global[op.reg.index] : local[op.reg.index];
  const BitVec bv = *encode_const(op);
  return op.ctype == UlType::Addr ? Value::address(bv.bits) : Value::bits(bv);
}

GuardResult check_guard(const Instruction& internal, const Env& local,
                        const Env& global) {
  switch (internal.op) {
    case Opcode::Assume:
      return eval_operand(internal.args[0], local, global).as_bool()
                 ? GuardResult::Enabled
                 : GuardResult::Blocked;
    case Opcode::NegAssume:
      return eval_operand(internal.args[0], local, global).as_bool()
                 ? GuardResult::Blocked
                 : GuardResult::Enabled;
    case Opcode::Assert:
      return GuardResult::AssertHit;
    default:
      assert(false && "check_guard on non-Internal instruction");
      return GuardResult::Enabled;
  }
}

namespace {

void write_dest(ExecCtx& ctx, const RegRef& dest, Value v) {
  (dest.global ? ctx.global : ctx.local)[dest.index] = v;
}

UlType dest_type(const ExecCtx& ctx, const RegRef& dest) {
  return ctx.scope.type_of(dest);
}

StepStatus exec_arith(const Instruction& in, ExecCtx& ctx) {
  const BitVec a = eval_operand(in.args[0], ctx.local, ctx.global).bv;
  const BitVec b = eval_operand(in.args[1], ctx.local, ctx.global).bv;
  std::optional<BitVec> r;
  switch (in.op) {
    case Opcode::Add: r = bv_add(a, b); break;
    case Opcode::Sub: r = bv_sub(a, b); break;
    case Opcode::Mult: r = bv_mult(a, b); break;
    case Opcode::Div: r = bv_div(a, b); break;
    case Opcode::SDiv: r = bv_sdiv(a, b); break;
    case Opcode::LShl: r = bv_lshl(a, b); break;
    case Opcode::LShr: r = bv_lshr(a, b); break;
    case Opcode::AShr: r = bv_ashr(a, b); break;
    default: assert(false);
  }
  if (!r) return StepStatus::Error;
  const UlType dt = dest_type(ctx, *in.dest);
  write_dest(ctx, *in.dest,
             dt == UlType::Addr ? Value::address(r->bits) : Value::bits(*r));
  return StepStatus::Ok;
}

StepStatus exec_cast(const Instruction& in, ExecCtx& ctx) {
  const Value src = eval_operand(in.args[0], ctx.local, ctx.global);
  const unsigned w = type_bit_width(dest_type(ctx, *in.dest));
  BitVec r;
  switch (in.op) {
    case Opcode::SExt: r = bv_sext(src.bv, w); break;
    case Opcode::ZExt: r = bv_zext(src.bv, w); break;
    case Opcode::Trunc: r = bv_trunc(src.bv, w); break;
    case Opcode::BoolSExt:
      r = src.as_bool() ? BitVec::of(w, BitVec::mask(w)) : BitVec::of(w, 0);
      break;
    case Opcode::BoolZExt:
      r = BitVec::of(w, src.as_bool() ? 1 : 0);
      break;
    default: assert(false);
  }
  write_dest(ctx, *in.dest, Value::bits(r));
  return StepStatus::Ok;
}

StepStatus exec_cmp(const Instruction& in, ExecCtx& ctx) {
  const BitVec a = eval_operand(in.args[0], ctx.local, ctx.global).bv;
  const BitVec b = eval_operand(in.args[1], ctx.local, ctx.global).bv;
  bool r = false;
  switch (in.op) {
    case Opcode::LEq: r = bv_leq(a, b); break;
    case Opcode::GEq: r = bv_geq(a, b); break;
    case Opcode::SLEq: r = bv_sleq(a, b); break;
    case Opcode::SGEq: r = bv_sgeq(a, b); break;
    case Opcode::Eq: r = a.bits == b.bits; break;
    case Opcode::NEq: r = a.bits != b.bits; break;
    default: assert(false);
  }
  write_dest(ctx, *in.dest, Value::boolean(r));
  return StepStatus::Ok;
}

// Little-endian multi-byte access. Addresses interpret as unsigned; any
// access reaching past memsize, or starting at or above 2^63, is an error.
StepStatus exec_memory(const Instruction& in, ExecCtx& ctx, Memory& mem) {
  const uint64_t addr = eval_operand(in.args[0], ctx.local, ctx.global).addr();
  if (addr >= (1ull << 63)) return StepStatus::Error;
  if (in.op == Opcode::Load) {
    const UlType dt = dest_type(ctx, *in.dest);
    const unsigned size = type_byte_size(dt);
    if (addr + size > mem.size()) return StepStatus::Error;
    uint64_t raw = 0;
    for (unsigned i = 0; i < size; ++i)
      raw |= static_cast<uint64_t>(mem.bytes[addr + i]) << (8 * i);
    Value v;
    if (dt == UlType::Bool) v = Value::boolean(raw != 0);
    else if (dt == UlType::Addr) v = Value::address(raw);
    else v = Value::bits(BitVec::of(type_bit_width(dt), raw));
    write_dest(ctx, *in.dest, v);
    return StepStatus::Ok;
  }
  // Store; Bool stores as one byte 0x00/0x01.
  const Value v = eval_operand(in.args[1], ctx.local, ctx.global);
  const unsigned size = v.kind == ValueKind::Boolean ? 1 : v.bv.width / 8;
  if (addr + size > mem.size()) return StepStatus::Error;
  const uint64_t raw = v.kind == ValueKind::Boolean ? (v.as_bool() ? 1 : 0) : v.bv.bits;
  for (unsigned i = 0; i < size; ++i)
    mem.bytes[addr + i] = static_cast<uint8_t>(raw >> (8 * i));
  return StepStatus::Ok;
}

StepStatus exec_assign(const Instruction& in, ExecCtx& ctx, const Chooser& choose) {
  switch (in.op) {
    case Opcode::Decl:
      return StepStatus::Ok;  // declaration no-op
    case Opcode::Copy:
      write_dest(ctx, *in.dest, eval_operand(in.args[0], ctx.local, ctx.global));
      return StepStatus::Ok;
    case Opcode::NonDet:
      write_dest(ctx, *in.dest, choose(dest_type(ctx, *in.dest)));
      return StepStatus::Ok;
    default:
      assert(false);
      return StepStatus::Error;
  }
}

}  // namespace

StepStatus exec_instruction(const Instruction& in, ExecCtx ctx, Memory& mem,
                            const Chooser& choose) {
  if (is_arith(in.op)) return exec_arith(in, ctx);
  if (is_cast(in.op)) return exec_cast(in, ctx);
  if (is_cmp(in.op)) return exec_cmp(in, ctx);
  if (is_memory(in.op)) return exec_memory(in, ctx, mem);
  if (is_assign(in.op)) return exec_assign(in, ctx, choose);
  assert(false && "exec_instruction on Internal instruction");
  return StepStatus::Error;
}

StepStatus step_sequence(const InstructionSequence& seq, Env& local, Env& global,
                         const RegScope& scope, Memory& mem, const Chooser& choose) {
  bool assert_hit = false;
  if (seq.guard) {
    switch (check_guard(*seq.guard, local, global)) {
      case GuardResult::Blocked: return StepStatus::Blocked;
      case GuardResult::AssertHit: assert_hit = true; break;
      case GuardResult::Enabled: break;
    }
  }
  ExecCtx ctx{local, global, scope};
  for (const Instruction& in : seq.body) {
    const StepStatus st = exec_instruction(in, ctx, mem, choose);
    if (st == StepStatus::Error) return StepStatus::Error;  // first fault stops
  }
  return assert_hit ? StepStatus::AssertHit : StepStatus::Ok;
}

}  // namespace ulmc
