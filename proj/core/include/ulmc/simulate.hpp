#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ulmc/engine.hpp"
#include "ulmc/query.hpp"
#include "ulmc/trace.hpp"

namespace ulmc {

// Deterministic RNG: mt19937_64 plus rejection sampling, so results do not
// depend on the standard library's distribution implementations.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(uint64_t seed) : eng(seed) {}

  uint64_t next() { return eng(); }
  uint64_t bits(unsigned width) {
    return width >= 64 ? next() : (next() & ((1ull << width) - 1));
  }
  // Uniform in [0, n); n >= 1.
  uint64_t below(uint64_t n);
  // Uniform integer in [lo, hi].
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

  // Per-run seed derivation (splitmix64 of seed + run index); documented so
  // runs can be reproduced and merged independently of scheduling.
  static uint64_t derive(uint64_t seed, uint64_t run);
};

struct SimResult {
  Trace trace;
  EndReason end = EndReason::None;
  uint64_t end_time = 0;
  TimedNetworkState final_state;
};

// Race semantics: every automaton with an enabled edge picks one of its
// fireable edges uniformly, samples an integer firing time uniformly from
// the edge's feasible window [max(x_i, lo), hi], and the smallest additional
// delay wins (uniform tie-break). NonDet values are sampled uniformly from
// the type domain. Stops on error, assert, all-sinks, deadlock, or when the
// global time reaches `time_bound`. Bit-reproducible from the seed.
SimResult simulate_run(const Network& net, const TimingView& timing,
                       uint64_t seed, uint64_t time_bound);

struct EstimateSample {
  int64_t value = 0;  // per-run maximum of the expression
  EndReason end = EndReason::None;
  uint64_t end_time = 0;
};

struct HistogramBin {
  double lo = 0, hi = 0;
  uint64_t count = 0;
};

struct EstimateResult {
  std::vector<EstimateSample> samples;
  int64_t min = 0, max = 0;
  double mean = 0;
  std::vector<HistogramBin> histogram;
};

// `runs` independent simulations with derived seeds; records the maximum of
// `expr` over every visited state of each run and a fixed-width histogram of
// the per-run maxima.
EstimateResult estimate_max(const Network& net, const TimingView& timing,
                            const Expr& expr, uint64_t time_bound, uint64_t runs,
                            uint64_t seed, unsigned bins = 100);

std::string histogram_csv(const EstimateResult& r);

}  // namespace ulmc
