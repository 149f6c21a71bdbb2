#include "ulmc/cfa.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <unordered_set>

namespace ulmc {

std::optional<uint32_t> Cfa::find_location(std::string_view name) const {
  for (uint32_t i = 0; i < locations.size(); ++i)
    if (locations[i].name == name) return i;
  return std::nullopt;
}

std::optional<uint32_t> Cfa::init_index() const {
  for (uint32_t i = 0; i < locations.size(); ++i)
    if (locations[i].is_init) return i;
  return std::nullopt;
}

std::vector<std::vector<uint32_t>> Cfa::build_out_index() const {
  std::vector<std::vector<uint32_t>> out(locations.size());
  for (uint32_t e = 0; e < edges.size(); ++e) out[edges[e].from].push_back(e);
  return out;
}

void Network::finalize() {
  plain_globals.clear();
  plain_global_def.clear();
  for (uint32_t i = 0; i < globals.size(); ++i) {
    if (!globals[i].address) {
      plain_globals.push_back(globals[i].reg);
      plain_global_def.push_back(i);
    }
  }
  out_edges.clear();
  for (const Cfa& c : cfas) out_edges.push_back(c.build_out_index());
}

std::optional<uint32_t> Network::find_cfa(std::string_view name) const {
  for (uint32_t i = 0; i < cfas.size(); ++i)
    if (cfas[i].name == name) return i;
  return std::nullopt;
}

std::optional<uint32_t> Network::find_global(std::string_view name) const {
  for (uint32_t i = 0; i < globals.size(); ++i)
    if (globals[i].reg.name == name) return i;
  return std::nullopt;
}

std::string state_key(const DiscreteState& s) {
  std::string key;
  key.reserve(64 + s.mem.bytes.size());
  auto put_u32 = [&](uint32_t v) { key.append(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](uint64_t v) { key.append(reinterpret_cast<const char*>(&v), 8); };
  auto put_env = [&](const Env& e) {
    for (const Value& v : e) {
      key.push_back(static_cast<char>(v.kind));
      key.push_back(static_cast<char>(v.bv.width));
      put_u64(v.bv.bits);
    }
  };
  for (uint32_t l : s.locs) put_u32(l);
  for (const Env& e : s.local) put_env(e);
  put_env(s.global);
  key.append(reinterpret_cast<const char*>(s.mem.bytes.data()), s.mem.bytes.size());
  put_u64(s.mem.pointer);
  key.push_back(s.error_hit ? 1 : 0);
  key.push_back(s.assert_hit ? 1 : 0);
  return key;
}

// ---------------------------------------------------------------------------

std::vector<WellFormednessError> validate(const Network& net) {
  std::vector<WellFormednessError> errs;
  auto err = [&](std::string kind, std::string msg) {
    errs.push_back({std::move(kind), std::move(msg)});
  };

  if (net.static_bytes > net.memsize)
    err("StaticOverflow", "static region exceeds memsize");

  std::unordered_set<std::string> global_names;
  for (const GlobalDef& g : net.globals) {
    if (!global_names.insert(g.reg.name).second)
      err("DuplicateName", "duplicate global " + g.reg.name);
    if (g.address) {
      const uint64_t end = *g.address + type_byte_size(g.reg.type);
      if (end > net.memsize)
        err("GlobalOutOfMemory", "backed global " + g.reg.name + " outside memory");
    }
  }

  std::unordered_set<std::string> cfa_names;
  for (const Cfa& c : net.cfas) {
    if (!cfa_names.insert(c.name).second)
      err("DuplicateName", "duplicate process " + c.name);

    std::unordered_set<std::string> reg_names;
    for (const RegisterInfo& r : c.registers) {
      if (!reg_names.insert(r.name).second)
        err("DuplicateName", c.name + ": duplicate register " + r.name);
      if (global_names.count(r.name))
        err("DuplicateName", c.name + ": register " + r.name + " shadows a global");
    }

    std::unordered_set<std::string> loc_names;
    unsigned inits = 0, terms = 0, violations = 0;
    for (const Location& l : c.locations) {
      if (!loc_names.insert(l.name).second)
        err("DuplicateName", c.name + ": duplicate location " + l.name);
      inits += l.is_init;
      terms += l.is_term;
      violations += l.is_assert_violation;
    }
    if (inits != 1) err("DuplicateInit", c.name + ": needs exactly one init location");
    if (terms > 1) err("DuplicateTerm", c.name + ": more than one term location");
    if (violations > 1)
      err("DuplicateViolation", c.name + ": more than one assertviolation location");

    for (const Edge& e : c.edges) {
      if (e.from >= c.locations.size() || e.to >= c.locations.size()) {
        err("UnknownLocation", c.name + ": edge references missing location");
        continue;
      }
      const Location& from = c.locations[e.from];
      if (from.is_term || from.is_assert_violation)
        err("EdgeFromSink", c.name + ": edge out of sink " + from.name);
      RegScope scope{net.plain_globals, c.registers};
      if (auto te = typecheck_sequence(e.seq, scope))
        err("TypeError", c.name + ": edge " + from.name + " -> " +
                             c.locations[e.to].name + ": " + te->reason);
    }
  }
  return errs;
}

// ---------------------------------------------------------------------------

Cfa split_memory_accesses(const Cfa& cfa) {
  Cfa out;
  out.name = cfa.name;
  out.registers = cfa.registers;
  out.locations = cfa.locations;

  std::unordered_set<std::string> names;
  for (const Location& l : out.locations) names.insert(l.name);

  auto fresh_location = [&](const std::string& from, const std::string& origin) {
    unsigned k = 1;
    std::string name;
    do {
      name = from + "__m" + std::to_string(k++);
    } while (names.count(name));
    names.insert(name);
    Location l;
    l.name = name;
    l.origin = origin;
    l.synthetic = true;
    out.locations.push_back(l);
    return static_cast<uint32_t>(out.locations.size() - 1);
  };

  for (const Edge& e : cfa.edges) {
    // Cut the body after every memory instruction except a trailing one.
    std::vector<std::vector<Instruction>> pieces{{}};
    for (const Instruction& in : e.seq.body) {
      pieces.back().push_back(in);
      if (is_memory(in.op)) pieces.emplace_back();
    }
    if (pieces.size() > 1 && pieces.back().empty()) pieces.pop_back();

    const std::string& from_name = cfa.locations[e.from].name;
    const std::string& origin = cfa.locations[e.from].origin.empty()
                                    ? from_name
                                    : cfa.locations[e.from].origin;
    uint32_t cur = e.from;
    for (size_t i = 0; i < pieces.size(); ++i) {
      Edge piece;
      piece.from = cur;
      piece.seq.body = std::move(pieces[i]);
      if (i == 0) piece.seq.guard = e.seq.guard;
      if (i + 1 == pieces.size()) {
        piece.to = e.to;
      } else {
        piece.to = fresh_location(from_name, origin);
      }
      cur = piece.to;
      out.edges.push_back(std::move(piece));
    }
  }
  return out;
}

namespace {

uint32_t ensure_flagged_location(Cfa& cfa, const std::string& base, bool term,
                                 bool violation) {
  for (uint32_t i = 0; i < cfa.locations.size(); ++i) {
    const Location& l = cfa.locations[i];
    if ((term && l.is_term) || (violation && l.is_assert_violation)) return i;
  }
  std::string name = base;
  unsigned k = 1;
  while (cfa.find_location(name)) name = base + "__" + std::to_string(k++);
  Location l;
  l.name = name;
  l.origin = name;
  l.is_term = term;
  l.is_assert_violation = violation;
  cfa.locations.push_back(l);
  return static_cast<uint32_t>(cfa.locations.size() - 1);
}

}  // namespace

Network normalize(const Network& net) {
  Network out = net;
  for (Cfa& cfa : out.cfas) {
    // A fresh Term absorbs edges into undeclared dead ends.
    const bool had_term = std::any_of(cfa.locations.begin(), cfa.locations.end(),
                                      [](const Location& l) { return l.is_term; });
    const uint32_t term = ensure_flagged_location(cfa, "Term", true, false);
    if (!had_term) {
      auto out_idx = cfa.build_out_index();
      for (Edge& e : cfa.edges) {
        const Location& to = cfa.locations[e.to];
        if (out_idx[e.to].empty() && !to.is_term && !to.is_assert_violation &&
            !to.is_init)
          e.to = term;
      }
    }

    const uint32_t violation =
        ensure_flagged_location(cfa, "AssertViolation", false, true);
    for (Edge& e : cfa.edges)
      if (e.seq.guard && e.seq.guard->op == Opcode::Assert) e.to = violation;

    cfa = split_memory_accesses(cfa);
  }
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<uint32_t, uint32_t>> enabled_edges(const DiscreteState& s,
                                                         const Network& net) {
  std::vector<std::pair<uint32_t, uint32_t>> result;
  if (s.error_hit) return result;  // absorbing
  for (uint32_t c = 0; c < net.cfas.size(); ++c) {
    const Cfa& cfa = net.cfas[c];
    for (uint32_t e : net.out_edges[c][s.locs[c]]) {
      const InstructionSequence& seq = cfa.edges[e].seq;
      if (seq.guard &&
          check_guard(*seq.guard, s.local[c], s.global) == GuardResult::Blocked)
        continue;
      result.emplace_back(c, e);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// Domain size of a NonDet slot; 0 marks 2^64 (never enumerable).
uint64_t domain_size(UlType t) {
  if (t == UlType::Bool) return 2;
  const unsigned w = type_bit_width(t);
  return w >= 64 ? 0 : (1ull << w);
}

}  // namespace

NondetExpansion expand_nondet(const InstructionSequence& seq, const RegScope& scope,
                              uint64_t cap) {
  NondetExpansion x;
  for (const Instruction& in : seq.body)
    if (in.op == Opcode::NonDet) x.slots.push_back(scope.type_of(*in.dest));
  x.count = 1;
  for (UlType t : x.slots) {
    const uint64_t d = domain_size(t);
    if (d == 0 || d > cap || x.count > cap / d) {
      x.refused = true;
      x.count = 0;
      return x;
    }
    x.count *= d;
  }
  return x;
}

std::vector<uint64_t> NondetExpansion::values_of(uint64_t k) const {
  // Mixed-radix decode; the first NonDet varies slowest, values ascend
  // unsigned (false before true).
  std::vector<uint64_t> vals(slots.size());
  for (size_t i = slots.size(); i-- > 0;) {
    const uint64_t d = domain_size(slots[i]);
    vals[i] = k % d;
    k /= d;
  }
  return vals;
}

NondetExpansion::Branch NondetExpansion::run(uint64_t k, const InstructionSequence& seq,
                                             const Env& local, const Env& global,
                                             const RegScope& scope,
                                             const Memory& mem) const {
  Branch b;
  b.values = values_of(k);
  b.local = local;
  b.global = global;
  b.mem = mem;
  b.status = step_sequence(seq, b.local, b.global, scope, b.mem,
                           scripted_chooser(b.values));
  return b;
}

}  // namespace ulmc
