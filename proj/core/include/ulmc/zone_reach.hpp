#pragma once

#include <cstdint>
#include <optional>

#include "ulmc/dbm.hpp"
#include "ulmc/engine.hpp"
#include "ulmc/trace.hpp"

namespace ulmc {

struct ReachLimits {
  uint64_t max_states = 1'000'000;  // stored (discrete, zone) pairs
  double max_seconds = 60.0;
  std::optional<uint64_t> horizon;  // prune zones entirely beyond this time
  uint64_t nondet_cap = kDefaultNondetCap;
};

enum class ReachVerdict : uint8_t { Unreachable, Reachable, LimitExceeded };

struct TimeWindow {
  uint64_t lo = 0;
  uint64_t hi = 0;
};

struct ZoneReachOptions {
  // Track exact global-time bounds: the G clock is excluded from
  // extrapolation so its zone bounds stay exact. Required for windows;
  // needs a terminating model or a horizon to stay finite.
  bool track_time = false;
  // Explore exhaustively and aggregate the global-time window over every
  // pred state instead of stopping at the first hit.
  bool collect_window = false;
};

struct ZoneReachResult {
  ReachVerdict verdict = ReachVerdict::Unreachable;
  std::optional<Trace> witness;           // Reachable, shortest by BFS layers
  std::optional<TimeWindow> pred_window;  // collect_window mode
  uint64_t stored_pairs = 0;
  uint64_t discrete_states = 0;
  uint64_t expansions = 0;
};

// Zone-based symbolic reachability: BFS over (discrete state, canonical DBM)
// with inclusion subsumption per discrete state, invariant/guard constraints
// from the timing tables, clock reset on firing, and extrapolation by the
// largest timing constant. Witnesses replay exactly (delays re-concretized
// greedily along the symbolic path).
ZoneReachResult zone_reach(const Network& net, const TimingView& timing,
                           const StatePredFn& pred, const ReachLimits& limits,
                           const ZoneReachOptions& opts = {});

}  // namespace ulmc
