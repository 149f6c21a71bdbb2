#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulmc/engine.hpp"

namespace ulmc {

enum class EndReason : uint8_t { Term, Assert, Error, Deadlock, Bound, None };

const char* end_reason_name(EndReason r);

// Alternating delay and fire steps. Replaying a trace from the initial state
// reproduces its final state exactly.
struct TraceStep {
  bool is_delay = false;
  uint64_t d = 0;
  uint32_t cfa = 0;
  uint32_t edge = 0;                // index into the normalized network
  std::vector<uint64_t> nondet;
};

struct Trace {
  uint64_t model_hash = 0;
  uint64_t omega_hash = 0;
  uint64_t seed = 0;
  std::vector<TraceStep> steps;
  EndReason end = EndReason::None;
  uint64_t end_time = 0;
};

// Text form: `# model <hex>` / `# omega <hex>` / `# seed <n>` header, then
// one step per line (`delay <d>` or `fire <proc> <from> -> <to>
// [nondet: v1,v2,...]`), then `end <reason> time <t>`.
std::string trace_to_text(const Trace& t, const Network& net);
Trace trace_from_text(const std::string& text, const Network& net);

// Applies the steps with scripted NonDet choices; throws std::runtime_error
// if a step is infeasible under the network/timing.
TimedNetworkState replay_trace(const Trace& t, const Network& net,
                               const TimingView& timing);

}  // namespace ulmc
