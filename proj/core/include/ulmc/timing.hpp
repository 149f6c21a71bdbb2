#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulmc/cfa.hpp"
#include "ulmc/ul.hpp"

namespace ulmc {

// Closed integer interval of time units, 0 <= lo <= hi.
struct Interval {
  uint64_t lo = 0;
  uint64_t hi = 0;
  bool operator==(const Interval&) const = default;
};

inline Interval operator+(Interval a, Interval b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

// Execution-time bounds per opcode, with a default for unlisted ones.
struct OmegaConfig {
  Interval def{1, 1};
  std::array<std::optional<Interval>, kNumOpcodes> per_op;

  Interval of(Opcode o) const {
    const auto& e = per_op[static_cast<size_t>(o)];
    return e ? *e : def;
  }
};

// .omg format: '#' comments; `default <lo> <hi>`; `<Opcode> <lo> <hi>`.
// Throws ParseError (SyntaxError / InvalidInterval / MissingDefault).
OmegaConfig load_omega(const std::string& text);
std::string render_omega(const OmegaConfig& omega);

// Sum of per-instruction intervals over the guard and body; [0,0] when empty.
Interval seq_interval(const InstructionSequence& seq, const OmegaConfig& omega);

// Invariant bound for delaying at a location: max upper endpoint over its
// outgoing edges; nullopt (unbounded) at sinks.
std::optional<uint64_t> location_upper_bound(const Cfa& cfa, uint32_t loc,
                                             const OmegaConfig& omega);

// Precomputed per-network timing tables used by the engine.
struct TimingView {
  std::vector<std::vector<Interval>> edge_iv;              // [cfa][edge]
  std::vector<std::vector<std::optional<uint64_t>>> loc_ub;  // [cfa][loc]
  uint64_t max_const = 0;  // largest interval endpoint in the model
};

TimingView build_timing(const Network& net, const OmegaConfig& omega);

}  // namespace ulmc
