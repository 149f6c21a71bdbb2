#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ulmc/cfa.hpp"
#include "ulmc/query.hpp"
#include "ulmc/timing.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Timed network state: the discrete part plus one clock per automaton and the
// never-reset global time. All time values are integer units.

struct TimedNetworkState {
  DiscreteState d;
  std::vector<uint64_t> clocks;
  uint64_t global_time = 0;

  bool operator==(const TimedNetworkState&) const = default;
};

// Each CFA at its init location, globals initialized (memory-backed ones
// written into their cells), locals zeroed, memory zeroed, bump pointer past
// the static region. Throws FrontendError("FrameOverflow") if the static
// region does not fit.
TimedNetworkState initial_state(const Network& net);

// ---------------------------------------------------------------------------
// Concrete successors.

struct FireLabel {
  uint32_t cfa = 0;
  uint32_t edge = 0;
  std::vector<uint64_t> nondet;
  StepStatus status = StepStatus::Ok;
};

struct Successor {
  TimedNetworkState state;
  FireLabel label;
};

struct SuccessorError {
  bool refused_expansion = false;
};

// Interleaving semantics: exactly one automaton fires per step. An edge fires
// when its guard is enabled (or is Assert) and lo <= x_i <= hi for its
// sequence interval; the firing automaton's clock resets. Deterministic
// order: (cfa index, edge index, canonical NonDet order).
std::vector<Successor> discrete_successors(const TimedNetworkState& s,
                                           const Network& net,
                                           const TimingView& timing,
                                           uint64_t nondet_cap,
                                           SuccessorError* err = nullptr);

// min over non-sink automata of location bound minus clock; nullopt
// (unbounded) when every automaton sits at a sink.
std::optional<uint64_t> max_delay(const TimedNetworkState& s, const Network& net,
                                  const TimingView& timing);

// Advance every clock and the global time by d; 0 <= d <= max_delay is the
// caller's contract.
TimedNetworkState delay(const TimedNetworkState& s, uint64_t d);

// ---------------------------------------------------------------------------
// Discrete-time reachability oracle: exact BFS at unit delays, valid because
// every timing constant is an integer. Used to cross-validate the zone engine.

struct DigitalLimits {
  uint64_t horizon = 100;          // bound on explored global time
  uint64_t max_states = 2'000'000;
  uint64_t nondet_cap = kDefaultNondetCap;
};

struct DigitalResult {
  bool satisfied = false;
  bool limit_exceeded = false;
  uint64_t visited = 0;
  // min/max global time over visited pred states (when satisfied).
  uint64_t min_time = 0;
  uint64_t max_time = 0;
};

using StatePredFn = std::function<bool(const DiscreteState&)>;

DigitalResult discrete_time_reach(const Network& net, const TimingView& timing,
                                  const StatePredFn& pred,
                                  const DigitalLimits& limits);

}  // namespace ulmc
