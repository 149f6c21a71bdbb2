#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "ulmc/errors.hpp"
#include "ulmc/frontend.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Inlining.

namespace {

// Copy a function body with every register and label suffixed; `regs` is the
// set of names owned by the callee (params + results).
IrFunction rename_copy(const IrFunction& fn, const std::string& suffix) {
  std::set<std::string> owned;
  for (const auto& [t, n] : fn.params) owned.insert(n);
  for (const IrBlock& b : fn.blocks)
    for (const IrInstr& in : b.body)
      if (!in.result.empty()) owned.insert(in.result);

  IrFunction out = fn;
  auto fix_reg = [&](std::string& name) {
    if (owned.count(name)) name += suffix;
  };
  for (auto& [t, n] : out.params) n += suffix;
  for (IrBlock& b : out.blocks) {
    b.label += suffix;
    for (IrInstr& in : b.body) {
      fix_reg(in.result);
      for (IrOperand& op : in.args)
        if (op.kind == IrOperand::Kind::Reg) fix_reg(op.name);
      if (!in.label_a.empty()) in.label_a += suffix;
      if (!in.label_b.empty()) in.label_b += suffix;
    }
  }
  return out;
}

// `%dst = <copy> ty %src/const` via add 0 (ints) or a zero-offset gep (ptr).
IrInstr copy_instr(const std::string& dst, const IrType& ty, const IrOperand& src) {
  IrInstr in;
  in.result = dst;
  in.type = ty;
  if (ty.kind == IrType::Kind::Ptr) {
    in.op = IrInstr::Op::Gep;
    in.type = IrType::int_ty(8);
    in.args.push_back(src);
    IrOperand zero;
    zero.kind = IrOperand::Kind::Const;
    zero.value = 0;
    in.arg_types.push_back(IrType::int_ty(64));
    in.args.push_back(zero);
    return in;
  }
  if (ty.kind == IrType::Kind::Int && ty.bits == 1)
    throw FrontendError("i1 values cannot cross call boundaries");
  in.op = IrInstr::Op::Add;
  in.args.push_back(src);
  IrOperand zero;
  zero.kind = IrOperand::Kind::Const;
  zero.value = 0;
  in.args.push_back(zero);
  return in;
}

}  // namespace

IrFunction inline_calls(const IrModule& module, const std::string& entry) {
  std::map<std::string, IrFunction> done;
  std::set<std::string> visiting;
  unsigned counter = 0;

  std::function<const IrFunction&(const std::string&)> get =
      [&](const std::string& name) -> const IrFunction& {
    if (auto it = done.find(name); it != done.end()) return it->second;
    if (visiting.count(name))
      throw FrontendError("RecursionDetected: cycle through @" + name);
    const IrFunction* src = module.find_function(name);
    if (!src) throw FrontendError("unknown function @" + name);
    visiting.insert(name);

    IrFunction fn = *src;
    // Expand calls to defined functions; newly spliced blocks are call-free
    // because callees are fetched fully inlined.
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
      for (size_t ii = 0; ii < fn.blocks[bi].body.size(); ++ii) {
        const IrInstr in = fn.blocks[bi].body[ii];
        if (in.op != IrInstr::Op::Call || !module.find_function(in.callee)) continue;

        const IrFunction callee = rename_copy(get(in.callee),
                                              "__i" + std::to_string(++counter));
        if (callee.params.size() != in.args.size())
          throw FrontendError("call arity mismatch for @" + in.callee);

        IrBlock& host = fn.blocks[bi];
        const std::string cont_label = host.label + "__c" + std::to_string(counter);

        IrBlock cont;
        cont.label = cont_label;
        cont.body.assign(host.body.begin() + ii + 1, host.body.end());
        host.body.erase(host.body.begin() + ii, host.body.end());

        for (size_t p = 0; p < callee.params.size(); ++p)
          host.body.push_back(
              copy_instr(callee.params[p].second, callee.params[p].first, in.args[p]));
        IrInstr enter;
        enter.op = IrInstr::Op::Br;
        enter.label_a = callee.blocks.front().label;
        host.body.push_back(enter);

        std::vector<IrBlock> spliced = callee.blocks;
        for (IrBlock& b : spliced) {
          IrInstr& term = b.body.back();
          if (term.op != IrInstr::Op::Ret) continue;
          std::vector<IrInstr> tail;
          if (!in.result.empty()) {
            if (term.args.empty())
              throw FrontendError("@" + in.callee + " returns void into a register");
            tail.push_back(copy_instr(in.result, term.type, term.args[0]));
          }
          IrInstr jump;
          jump.op = IrInstr::Op::Br;
          jump.label_a = cont_label;
          tail.push_back(jump);
          b.body.pop_back();
          b.body.insert(b.body.end(), tail.begin(), tail.end());
        }

        fn.blocks.insert(fn.blocks.begin() + bi + 1, spliced.begin(), spliced.end());
        fn.blocks.insert(fn.blocks.begin() + bi + 1 + spliced.size(), cont);
        break;  // re-scan: this block is done, continue with the spliced ones
      }
    }

    visiting.erase(name);
    return done.emplace(name, std::move(fn)).first->second;
  };
  return get(entry);
}

// ---------------------------------------------------------------------------
// Lowering.

namespace {

UlType ul_type_of(const IrType& t) {
  if (t.kind == IrType::Kind::Ptr) return UlType::Addr;
  if (t.kind == IrType::Kind::Int) {
    switch (t.bits) {
      case 1: return UlType::Bool;
      case 8: return UlType::Int8;
      case 16: return UlType::Int16;
      case 32: return UlType::Int32;
      case 64: return UlType::Int64;
    }
  }
  throw FrontendError("type has no UL counterpart");
}

// How a .sir register name is currently realized.
struct Binding {
  enum class Kind { UlReg, ConstInt, ConstAddr, NegBool };
  Kind kind = Kind::UlReg;
  RegRef reg;        // UlReg / NegBool (the opposite-comparison register)
  uint64_t pattern = 0;  // ConstInt / ConstAddr
  UlType type = UlType::Int64;
};

class FunctionLowerer {
 public:
  FunctionLowerer(const IrFunction& fn, const Network& net, FrameLayout& frames)
      : fn_(fn), net_(net), frames_(frames) {}

  Cfa lower() {
    cfa_.name = fn_.name;
    count_assignments();

    for (size_t b = 0; b < fn_.blocks.size(); ++b) {
      Location l;
      l.name = fn_.blocks[b].label;
      l.origin = l.name;
      l.is_init = b == 0;
      add_location(std::move(l));
    }
    {
      Location t;
      t.name = unique_loc_name("Term");
      t.origin = t.name;
      t.is_term = true;
      term_ = add_location(std::move(t));
    }

    for (auto& [ty, name] : fn_.params) {
      // Entry parameters have no caller; they start as zero-valued registers.
      Binding b;
      b.kind = Binding::Kind::UlReg;
      b.reg = ul_reg(name, ul_type_of(ty));
      b.type = ul_type_of(ty);
      bind(name, b);
    }

    for (const IrBlock& block : fn_.blocks) {
      cur_ = *cfa_.find_location(block.label);
      body_.clear();
      for (const IrInstr& in : block.body) lower_instr(block, in);
    }
    return std::move(cfa_);
  }

 private:
  // ---- registers and bindings

  void count_assignments() {
    for (const auto& [t, n] : fn_.params) ++def_count_[n];
    for (const IrBlock& b : fn_.blocks)
      for (const IrInstr& in : b.body)
        if (!in.result.empty()) ++def_count_[in.result];
  }
  bool single_assigned(const std::string& name) const {
    auto it = def_count_.find(name);
    return it != def_count_.end() && it->second == 1;
  }

  RegRef ul_reg(const std::string& name, UlType t) {
    for (uint32_t i = 0; i < cfa_.registers.size(); ++i) {
      if (cfa_.registers[i].name == name) {
        if (cfa_.registers[i].type != t)
          throw FrontendError("register %" + name + " is reassigned at a different type");
        return RegRef{i, false, name};
      }
    }
    cfa_.registers.push_back({name, t});
    return RegRef{static_cast<uint32_t>(cfa_.registers.size() - 1), false, name};
  }

  RegRef fresh_reg(UlType t, const char* stem) {
    std::string name;
    do {
      name = std::string(stem) + std::to_string(++tmp_counter_);
    } while ([&] {
      for (const auto& r : cfa_.registers)
        if (r.name == name) return true;
      return false;
    }());
    return ul_reg(name, t);
  }

  void bind(const std::string& name, Binding b) { bindings_[name] = std::move(b); }

  const Binding& binding_of(const std::string& name, uint32_t line) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end())
      throw FrontendError("line " + std::to_string(line) + ": %" + name +
                          " used before assignment");
    return it->second;
  }

  // ---- locations and edges

  uint32_t add_location(Location l) {
    cfa_.locations.push_back(std::move(l));
    return static_cast<uint32_t>(cfa_.locations.size() - 1);
  }

  std::string unique_loc_name(const std::string& base) {
    std::string name = base;
    unsigned k = 0;
    while (cfa_.find_location(name)) name = base + "__" + std::to_string(++k);
    return name;
  }

  uint32_t synthetic_loc(const std::string& origin, const char* tag) {
    Location l;
    l.name = unique_loc_name(origin + "__" + tag + std::to_string(++loc_counter_));
    l.origin = origin;
    l.synthetic = true;
    return add_location(std::move(l));
  }

  void close_to(uint32_t target) {
    Edge e;
    e.from = cur_;
    e.to = target;
    e.seq.body = std::move(body_);
    body_.clear();
    cfa_.edges.push_back(std::move(e));
  }

  void guard_edge(uint32_t from, uint32_t to, Instruction internal) {
    Edge e;
    e.from = from;
    e.to = to;
    e.seq.guard = std::move(internal);
    cfa_.edges.push_back(std::move(e));
  }

  // ---- operand realization

  Operand const_int(uint64_t pattern, UlType t) {
    auto op = Operand::make_uconst(pattern & BitVec::mask(type_bit_width(t)), t);
    assert(op);
    return *op;
  }

  Operand const_addr(uint64_t a) {
    auto op = Operand::make_uconst(a, UlType::Addr);
    assert(op);
    return *op;
  }

  // Materialize an operand of the given IR type. NegBool bindings are
  // resolved into a real Bool register on demand.
  Operand op_of(const IrOperand& o, const IrType& ty, uint32_t line) {
    const UlType t = ul_type_of(ty);
    switch (o.kind) {
      case IrOperand::Kind::Const: {
        if (ty.kind == IrType::Kind::Ptr)
          return const_addr(static_cast<uint64_t>(o.value));
        if (o.value < 0) {
          auto op = Operand::make_sconst(o.value, t);
          if (!op)
            throw FrontendError("line " + std::to_string(line) +
                                ": constant does not fit " + type_name(t));
          return *op;
        }
        auto op = Operand::make_uconst(static_cast<uint64_t>(o.value), t);
        if (!op)
          throw FrontendError("line " + std::to_string(line) +
                              ": constant does not fit " + type_name(t));
        return *op;
      }
      case IrOperand::Kind::Global: {
        auto gi = net_.find_global(o.name);
        if (!gi || !net_.globals[*gi].address)
          throw FrontendError("line " + std::to_string(line) + ": unknown global @" +
                              o.name);
        return const_addr(*net_.globals[*gi].address);
      }
      case IrOperand::Kind::Reg: {
        const Binding& b = binding_of(o.name, line);
        switch (b.kind) {
          case Binding::Kind::UlReg: return Operand::make_reg(b.reg);
          case Binding::Kind::ConstInt: return const_int(b.pattern, b.type);
          case Binding::Kind::ConstAddr: return const_addr(b.pattern);
          case Binding::Kind::NegBool: {
            // dest = !b.reg via BoolZExt + Eq 0.
            const RegRef z = fresh_reg(UlType::Int8, "nz");
            push(Opcode::BoolZExt, z, {Operand::make_reg(b.reg)});
            const RegRef r = fresh_reg(UlType::Bool, "nb");
            push(Opcode::Eq, r, {Operand::make_reg(z), const_int(0, UlType::Int8)});
            return Operand::make_reg(r);
          }
        }
        throw FrontendError("unreachable binding kind");
      }
    }
    throw FrontendError("unreachable operand kind");
  }

  // Constant view of an operand, when it folds.
  std::optional<uint64_t> const_of(const IrOperand& o) const {
    if (o.kind == IrOperand::Kind::Const) return static_cast<uint64_t>(o.value);
    if (o.kind == IrOperand::Kind::Global) {
      auto gi = net_.find_global(o.name);
      if (gi && net_.globals[*gi].address) return *net_.globals[*gi].address;
      return std::nullopt;
    }
    auto it = bindings_.find(o.name);
    if (it == bindings_.end()) return std::nullopt;
    if (it->second.kind == Binding::Kind::ConstInt ||
        it->second.kind == Binding::Kind::ConstAddr)
      return it->second.pattern;
    return std::nullopt;
  }

  void push(Opcode op, std::optional<RegRef> dest, std::vector<Operand> args) {
    Instruction in;
    in.op = op;
    in.dest = std::move(dest);
    in.args = std::move(args);
    body_.push_back(std::move(in));
  }

  // ---- instruction lowering

  void lower_instr(const IrBlock& block, const IrInstr& in) {
    switch (in.op) {
      case IrInstr::Op::Add:
      case IrInstr::Op::Sub:
      case IrInstr::Op::Mul:
      case IrInstr::Op::UDiv:
      case IrInstr::Op::SDiv:
      case IrInstr::Op::Shl:
      case IrInstr::Op::AShr:
      case IrInstr::Op::LShr:
        lower_binop(in);
        return;
      case IrInstr::Op::ICmp:
        lower_icmp(in);
        return;
      case IrInstr::Op::ZExt:
      case IrInstr::Op::SExt:
      case IrInstr::Op::TruncOp:
        lower_cast(in);
        return;
      case IrInstr::Op::Load: {
        const UlType t = ul_type_of(in.type);
        const RegRef dest = def_reg(in.result, t);
        push(Opcode::Load, dest, {op_of(in.args[0], IrType::ptr_ty(), in.line)});
        return;
      }
      case IrInstr::Op::Store: {
        Operand value = op_of(in.args[0], in.type, in.line);
        Operand addr = op_of(in.args[1], IrType::ptr_ty(), in.line);
        if (ul_type_of(in.type) == UlType::Bool)
          throw FrontendError("line " + std::to_string(in.line) +
                              ": storing i1 is not supported; widen it first");
        push(Opcode::Store, std::nullopt, {std::move(addr), std::move(value)});
        return;
      }
      case IrInstr::Op::Alloca:
        lower_alloca(in);
        return;
      case IrInstr::Op::Gep:
        lower_gep(in);
        return;
      case IrInstr::Op::Call:
        lower_call(block, in);
        return;
      case IrInstr::Op::Br:
        close_to(loc_of(in.label_a, in.line));
        return;
      case IrInstr::Op::CondBr:
        lower_condbr(block, in);
        return;
      case IrInstr::Op::Ret:
        close_to(term_);
        return;
    }
  }

  uint32_t loc_of(const std::string& label, uint32_t line) {
    auto l = cfa_.find_location(label);
    if (!l)
      throw FrontendError("line " + std::to_string(line) + ": unknown label %" + label);
    return *l;
  }

  RegRef def_reg(const std::string& name, UlType t) {
    const RegRef r = ul_reg(name, t);
    Binding b;
    b.kind = Binding::Kind::UlReg;
    b.reg = r;
    b.type = t;
    bind(name, b);
    return r;
  }

  void lower_binop(const IrInstr& in) {
    const UlType t = ul_type_of(in.type);
    static constexpr std::pair<IrInstr::Op, Opcode> map[] = {
        {IrInstr::Op::Add, Opcode::Add},   {IrInstr::Op::Sub, Opcode::Sub},
        {IrInstr::Op::Mul, Opcode::Mult},  {IrInstr::Op::UDiv, Opcode::Div},
        {IrInstr::Op::SDiv, Opcode::SDiv}, {IrInstr::Op::Shl, Opcode::LShl},
        {IrInstr::Op::AShr, Opcode::AShr}, {IrInstr::Op::LShr, Opcode::LShr},
    };
    Opcode op = Opcode::Add;
    for (const auto& [io, uo] : map)
      if (io == in.op) op = uo;

    // Single-assignment constant arithmetic folds away (address chains from
    // the frame layout produce these).
    const auto ca = const_of(in.args[0]), cb = const_of(in.args[1]);
    if (ca && cb && single_assigned(in.result) && in.op == IrInstr::Op::Add) {
      Binding b;
      b.kind = Binding::Kind::ConstInt;
      b.pattern = (*ca + *cb) & BitVec::mask(type_bit_width(t));
      b.type = t;
      bind(in.result, b);
      return;
    }
    const RegRef dest = def_reg(in.result, t);
    push(op, dest, {op_of(in.args[0], in.type, in.line), op_of(in.args[1], in.type, in.line)});
  }

  void lower_icmp(const IrInstr& in) {
    struct CC {
      const char* name;
      Opcode direct;
      bool negated;  // via the opposite non-strict comparison
    };
    static constexpr CC table[] = {
        {"eq", Opcode::Eq, false},   {"ne", Opcode::NEq, false},
        {"ule", Opcode::LEq, false}, {"sle", Opcode::SLEq, false},
        {"uge", Opcode::GEq, false}, {"sge", Opcode::SGEq, false},
        {"ult", Opcode::GEq, true},  {"slt", Opcode::SGEq, true},
        {"ugt", Opcode::LEq, true},  {"sgt", Opcode::SLEq, true},
    };
    const CC* cc = nullptr;
    for (const CC& c : table)
      if (in.pred == c.name) cc = &c;
    assert(cc);

    Operand a = op_of(in.args[0], in.type, in.line);
    Operand b = op_of(in.args[1], in.type, in.line);
    if (!cc->negated) {
      const RegRef dest = def_reg(in.result, UlType::Bool);
      push(cc->direct, dest, {std::move(a), std::move(b)});
      return;
    }
    if (single_assigned(in.result)) {
      // Keep the opposite comparison and remember the polarity; a branch on
      // it swaps targets, other uses materialize the negation.
      const RegRef opp = fresh_reg(UlType::Bool, "ng");
      push(cc->direct, opp, {std::move(a), std::move(b)});
      Binding bind_neg;
      bind_neg.kind = Binding::Kind::NegBool;
      bind_neg.reg = opp;
      bind_neg.type = UlType::Bool;
      bind(in.result, bind_neg);
      return;
    }
    const RegRef opp = fresh_reg(UlType::Bool, "ng");
    push(cc->direct, opp, {std::move(a), std::move(b)});
    const RegRef z = fresh_reg(UlType::Int8, "nz");
    push(Opcode::BoolZExt, z, {Operand::make_reg(opp)});
    const RegRef dest = def_reg(in.result, UlType::Bool);
    push(Opcode::Eq, dest, {Operand::make_reg(z), const_int(0, UlType::Int8)});
  }

  void lower_cast(const IrInstr& in) {
    const IrType& src_ty = in.arg_types[0];
    const UlType dst = ul_type_of(in.type);
    if (in.type.kind == IrType::Kind::Int && in.type.bits == 1)
      throw FrontendError("line " + std::to_string(in.line) +
                          ": UnsupportedInstruction: cast to i1");
    Operand src = op_of(in.args[0], src_ty, in.line);
    Opcode op;
    if (src_ty.kind == IrType::Kind::Int && src_ty.bits == 1) {
      if (in.op == IrInstr::Op::TruncOp)
        throw FrontendError("line " + std::to_string(in.line) + ": trunc from i1");
      op = in.op == IrInstr::Op::ZExt ? Opcode::BoolZExt : Opcode::BoolSExt;
    } else {
      op = in.op == IrInstr::Op::ZExt    ? Opcode::ZExt
           : in.op == IrInstr::Op::SExt  ? Opcode::SExt
                                         : Opcode::Trunc;
    }
    const RegRef dest = def_reg(in.result, dst);
    push(op, dest, {std::move(src)});
  }

  void lower_alloca(const IrInstr& in) {
    auto addr = alloc(frames_.arena, in.type.byte_size());
    if (!addr)
      throw FrontendError("FrameOverflow: alloca of " +
                          std::to_string(in.type.byte_size()) +
                          " bytes does not fit the model memory");
    if (!alloca_addr_.emplace(in.line * 1000000 + tmp_counter_, *addr).second) {
    }
    const RegRef dest = def_reg(in.result, UlType::Addr);
    push(Opcode::Decl, dest, {});
    push(Opcode::Copy, dest, {const_addr(*addr)});
  }

  // Byte scale of one step of `gep ty, ptr, i64 idx0 [, i64 idx1 ...]`.
  static std::optional<IrType> gep_elem(const IrType& t, size_t depth) {
    if (depth == 0) return t;
    if (t.kind != IrType::Kind::Array) return std::nullopt;
    return gep_elem(*t.elem, depth - 1);
  }

  void lower_gep(const IrInstr& in) {
    uint64_t const_off = 0;
    std::optional<std::pair<Operand, uint64_t>> dynamic;  // operand, scale
    std::optional<std::pair<const IrOperand*, const IrType*>> dynamic_src;

    for (size_t i = 1; i < in.args.size(); ++i) {
      auto elem = gep_elem(in.type, i - 1);
      if (!elem)
        throw FrontendError("line " + std::to_string(in.line) +
                            ": gep indexes past a scalar");
      const uint64_t scale = elem->byte_size();
      if (auto c = const_of(in.args[i])) {
        const_off += *c * scale;
        continue;
      }
      if (dynamic_src)
        throw FrontendError("line " + std::to_string(in.line) +
                            ": at most one dynamic gep index is supported");
      dynamic_src = {&in.args[i], &in.arg_types[i - 1]};
      dynamic = {Operand{}, scale};
    }

    // Fully constant chain off a constant base folds to an address.
    const auto base_const = const_of(in.args[0]);
    if (!dynamic_src && base_const && single_assigned(in.result)) {
      Binding b;
      b.kind = Binding::Kind::ConstAddr;
      b.pattern = *base_const + const_off;
      b.type = UlType::Addr;
      bind(in.result, b);
      return;
    }

    Operand base = op_of(in.args[0], IrType::ptr_ty(), in.line);
    Operand addr = std::move(base);
    if (const_off != 0 || (!dynamic_src && !single_assigned(in.result))) {
      const RegRef t = def_or_fresh(in.result, !dynamic_src, UlType::Addr);
      push(Opcode::Add, t, {std::move(addr), const_int(const_off, UlType::Int64)});
      addr = Operand::make_reg(t);
      if (!dynamic_src) return;
    }
    if (!dynamic_src) {
      // Zero offset off a register base: alias when possible, Copy otherwise.
      if (single_assigned(in.result) && addr.kind == OperandKind::Reg) {
        Binding b;
        b.kind = Binding::Kind::UlReg;
        b.reg = addr.reg;
        b.type = UlType::Addr;
        bind(in.result, b);
        return;
      }
      const RegRef dest = def_reg(in.result, UlType::Addr);
      push(Opcode::Copy, dest, {std::move(addr)});
      return;
    }

    // One dynamic index: widen to 64 bits, scale, add.
    const auto& [idx_op, idx_ty] = *dynamic_src;
    Operand idx = op_of(*idx_op, *idx_ty, in.line);
    if (idx_ty->bits < 64) {
      const RegRef wide = fresh_reg(UlType::Int64, "gx");
      push(Opcode::SExt, wide, {std::move(idx)});
      idx = Operand::make_reg(wide);
    }
    if (dynamic->second != 1) {
      const RegRef scaled = fresh_reg(UlType::Int64, "gs");
      push(Opcode::Mult, scaled,
           {std::move(idx), const_int(dynamic->second, UlType::Int64)});
      idx = Operand::make_reg(scaled);
    }
    const RegRef dest = def_reg(in.result, UlType::Addr);
    push(Opcode::Add, dest, {std::move(addr), std::move(idx)});
  }

  RegRef def_or_fresh(const std::string& name, bool is_final, UlType t) {
    return is_final ? def_reg(name, t) : fresh_reg(t, "ga");
  }

  void lower_call(const IrBlock& block, const IrInstr& in) {
    if (in.callee == "assert") {
      if (in.args.size() != 1)
        throw FrontendError("assert takes exactly one integer argument");
      Operand e = op_of(in.args[0], in.arg_types[0], in.line);
      const RegRef t = fresh_reg(UlType::Bool, "as");
      push(Opcode::Eq, t,
           {std::move(e), const_int(0, ul_type_of(in.arg_types[0]))});

      const uint32_t chk = synthetic_loc(block.label, "a");
      close_to(chk);
      const uint32_t hit = synthetic_loc(block.label, "h");
      const uint32_t cont = synthetic_loc(block.label, "k");
      Instruction assume;
      assume.op = Opcode::Assume;
      assume.args.push_back(Operand::make_reg(t));
      guard_edge(chk, hit, std::move(assume));
      Instruction neg;
      neg.op = Opcode::NegAssume;
      neg.args.push_back(Operand::make_reg(t));
      guard_edge(chk, cont, std::move(neg));
      Instruction assert_in;
      assert_in.op = Opcode::Assert;
      guard_edge(hit, cont, std::move(assert_in));  // retargeted by normalize
      cur_ = cont;
      return;
    }
    // Remaining calls are to declared externals: an unknown value source.
    if (in.type.kind == IrType::Kind::Void) return;  // no modeled effect
    const RegRef dest = def_reg(in.result, ul_type_of(in.type));
    push(Opcode::NonDet, dest, {});
  }

  void lower_condbr(const IrBlock& block, const IrInstr& in) {
    uint32_t t_loc = loc_of(in.label_a, in.line);
    uint32_t f_loc = loc_of(in.label_b, in.line);

    if (in.args[0].kind == IrOperand::Kind::Const) {
      close_to(in.args[0].value ? t_loc : f_loc);
      return;
    }
    const Binding& b = binding_of(in.args[0].name, in.line);
    RegRef cond;
    if (b.kind == Binding::Kind::NegBool) {
      std::swap(t_loc, f_loc);
      cond = b.reg;
    } else if (b.kind == Binding::Kind::UlReg && b.type == UlType::Bool) {
      cond = b.reg;
    } else {
      throw FrontendError("line " + std::to_string(in.line) +
                          ": branch condition is not a Bool register");
    }

    uint32_t from = cur_;
    if (!body_.empty()) {
      from = synthetic_loc(block.label, "b");
      close_to(from);
    }
    Instruction assume;
    assume.op = Opcode::Assume;
    assume.args.push_back(Operand::make_reg(cond));
    guard_edge(from, t_loc, std::move(assume));
    Instruction neg;
    neg.op = Opcode::NegAssume;
    neg.args.push_back(Operand::make_reg(cond));
    guard_edge(from, f_loc, std::move(neg));
  }

  const IrFunction& fn_;
  const Network& net_;
  FrameLayout& frames_;

  Cfa cfa_;
  std::vector<Instruction> body_;
  uint32_t cur_ = 0;
  uint32_t term_ = 0;
  unsigned tmp_counter_ = 0;
  unsigned loc_counter_ = 0;
  std::map<std::string, unsigned> def_count_;
  std::unordered_map<std::string, Binding> bindings_;
  std::map<uint64_t, uint64_t> alloca_addr_;
};

}  // namespace

Cfa lower_function(const IrFunction& fn, const Network& globals_env,
                   FrameLayout& frames) {
  return FunctionLowerer(fn, globals_env, frames).lower();
}

Network build_network(const IrModule& module, const std::vector<std::string>& entries,
                      uint64_t memsize) {
  Network net;
  net.memsize = memsize;
  FrameLayout frames{Memory::of_size(memsize)};

  for (const IrModule::Global& g : module.globals) {
    const UlType t = ul_type_of(g.type);
    auto addr = alloc(frames.arena, type_byte_size(t));
    if (!addr)
      throw FrontendError("FrameOverflow: globals do not fit in " +
                          std::to_string(memsize) + " bytes");
    GlobalDef def;
    def.reg = {g.name, t};
    def.init_pattern = static_cast<uint64_t>(g.init) & BitVec::mask(type_bit_width(t));
    def.address = *addr;
    net.globals.push_back(std::move(def));
  }
  net.finalize();

  for (const std::string& entry : entries) {
    if (!module.find_function(entry))
      throw FrontendError("unknown entry point @" + entry);
    IrFunction inlined = inline_calls(module, entry);
    net.cfas.push_back(lower_function(inlined, net, frames));
  }
  net.static_bytes = frames.arena.pointer;
  net.finalize();

  auto errs = validate(net);
  if (!errs.empty()) {
    std::string msg = "lowered network is ill-formed:";
    for (const auto& e : errs) msg += "\n  [" + e.kind + "] " + e.message;
    throw FrontendError(msg);
  }
  return normalize(net);
}

}  // namespace ulmc
