#include "ulmc/timing.hpp"

#include <sstream>

#include "ulmc/errors.hpp"

namespace ulmc {

OmegaConfig load_omega(const std::string& text) {
  OmegaConfig cfg;
  bool have_default = false;
  std::istringstream in(text);
  std::string line;
  uint32_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    uint64_t lo = 0, hi = 0;
    if (!(ls >> lo >> hi))
      throw ParseError("expected `<name> <lo> <hi>`", {lineno, 1});
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens", {lineno, 1});
    if (lo > hi) throw ParseError("InvalidInterval: lo > hi", {lineno, 1});
    if (head == "default") {
      cfg.def = {lo, hi};
      have_default = true;
    } else {
      auto op = opcode_from_name(head);
      if (!op) throw ParseError("unknown opcode " + head, {lineno, 1});
      cfg.per_op[static_cast<size_t>(*op)] = Interval{lo, hi};
    }
  }
  if (!have_default) throw ParseError("MissingDefault: no `default <lo> <hi>` line");
  return cfg;
}

std::string render_omega(const OmegaConfig& omega) {
  std::ostringstream out;
  out << "default " << omega.def.lo << " " << omega.def.hi << "\n";
  for (unsigned i = 0; i < kNumOpcodes; ++i)
    if (omega.per_op[i])
      out << opcode_name(static_cast<Opcode>(i)) << " " << omega.per_op[i]->lo << " "
          << omega.per_op[i]->hi << "\n";
  return out.str();
}

Interval seq_interval(const InstructionSequence& seq, const OmegaConfig& omega) {
  Interval total{0, 0};
  if (seq.guard) total = total + omega.of(seq.guard->op);
  for (const Instruction& in : seq.body) total = total + omega.of(in.op);
  return total;
}

std::optional<uint64_t> location_upper_bound(const Cfa& cfa, uint32_t loc,
                                             const OmegaConfig& omega) {
  std::optional<uint64_t> best;
  for (const Edge& e : cfa.edges) {
    if (e.from != loc) continue;
    const uint64_t hi = seq_interval(e.seq, omega).hi;
    if (!best || hi > *best) best = hi;
  }
  return best;  // nullopt at sinks: time may diverge there
}

TimingView build_timing(const Network& net, const OmegaConfig& omega) {
  TimingView t;
  for (const Cfa& cfa : net.cfas) {
    std::vector<Interval> ivs;
    ivs.reserve(cfa.edges.size());
    for (const Edge& e : cfa.edges) {
      const Interval iv = seq_interval(e.seq, omega);
      t.max_const = std::max(t.max_const, iv.hi);
      ivs.push_back(iv);
    }
    t.edge_iv.push_back(std::move(ivs));

    std::vector<std::optional<uint64_t>> ubs(cfa.locations.size());
    for (uint32_t l = 0; l < cfa.locations.size(); ++l)
      ubs[l] = location_upper_bound(cfa, l, omega);
    t.loc_ub.push_back(std::move(ubs));
  }
  return t;
}

}  // namespace ulmc
