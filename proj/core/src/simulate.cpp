#include "ulmc/simulate.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "ulmc/ul_text.hpp"

namespace ulmc {

uint64_t Rng::below(uint64_t n) {
  assert(n >= 1);
  if (n == 1) return 0;
  // Rejection sampling keeps the draw exactly uniform.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  uint64_t v;
  do {
    v = next();
  } while (v > limit);
  return v % n;
}

uint64_t Rng::derive(uint64_t seed, uint64_t run) {
  // splitmix64 of (seed + run + 1); documented seed-splitting rule.
  uint64_t z = seed + (run + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

Value sample_value(Rng& rng, UlType t) {
  if (t == UlType::Bool) return Value::boolean(rng.below(2) != 0);
  if (t == UlType::Addr) return Value::address(rng.bits(64));
  return Value::bits(BitVec::of(type_bit_width(t), rng.bits(type_bit_width(t))));
}

struct Candidate {
  uint32_t cfa = 0;
  uint32_t edge = 0;
  uint64_t extra_delay = 0;  // beyond the current state
};

}  // namespace

SimResult simulate_run(const Network& net, const TimingView& timing, uint64_t seed,
                       uint64_t time_bound) {
  SimResult res;
  res.trace.model_hash = model_hash(net);
  res.trace.seed = seed;
  Rng rng(seed);

  TimedNetworkState s = initial_state(net);

  auto all_sinks = [&] {
    for (uint32_t c = 0; c < net.cfas.size(); ++c)
      if (!net.out_edges[c][s.d.locs[c]].empty()) return false;
    return true;
  };

  auto finish = [&](EndReason why) {
    res.end = why;
    res.end_time = s.global_time;
    res.trace.end = why;
    res.trace.end_time = s.global_time;
    res.final_state = std::move(s);
    return std::move(res);
  };

  while (true) {
    if (s.d.error_hit) return finish(EndReason::Error);
    if (s.d.assert_hit) return finish(EndReason::Assert);
    if (s.global_time >= time_bound) return finish(EndReason::Bound);
    if (all_sinks()) return finish(EndReason::Term);

    // Each automaton with a fireable edge proposes: pick one of its enabled
    // edges uniformly, then a firing time uniformly from the integer points
    // of the feasible window [max(x, lo), hi].
    std::vector<Candidate> proposals;
    for (uint32_t c = 0; c < net.cfas.size(); ++c) {
      std::vector<uint32_t> fireable;
      for (uint32_t e : net.out_edges[c][s.d.locs[c]]) {
        const InstructionSequence& seq = net.cfas[c].edges[e].seq;
        if (seq.guard && check_guard(*seq.guard, s.d.local[c], s.d.global) ==
                             GuardResult::Blocked)
          continue;
        const Interval iv = timing.edge_iv[c][e];
        if (s.clocks[c] > iv.hi) continue;  // window already closed
        fireable.push_back(e);
      }
      if (fireable.empty()) continue;
      const uint32_t e = fireable[rng.below(fireable.size())];
      const Interval iv = timing.edge_iv[c][e];
      const uint64_t lo = std::max(s.clocks[c], iv.lo);
      const uint64_t fire_at = rng.range(lo, iv.hi);
      proposals.push_back(Candidate{c, e, fire_at - s.clocks[c]});
    }

    if (proposals.empty()) return finish(EndReason::Deadlock);

    uint64_t best = UINT64_MAX;
    std::vector<size_t> winners;
    for (size_t i = 0; i < proposals.size(); ++i) {
      if (proposals[i].extra_delay < best) {
        best = proposals[i].extra_delay;
        winners.assign(1, i);
      } else if (proposals[i].extra_delay == best) {
        winners.push_back(i);
      }
    }
    const Candidate win = proposals[winners[rng.below(winners.size())]];

    // An invariant wall of a non-proposing automaton may come first: the run
    // is stuck there with nothing to fire.
    const auto md = max_delay(s, net, timing);
    if (md && *md < win.extra_delay) {
      const uint64_t d = std::min(*md, time_bound - s.global_time);
      if (d > 0) {
        s = delay(s, d);
        TraceStep ts;
        ts.is_delay = true;
        ts.d = d;
        res.trace.steps.push_back(ts);
      }
      return finish(s.global_time >= time_bound ? EndReason::Bound
                                                : EndReason::Deadlock);
    }

    uint64_t d = win.extra_delay;
    if (s.global_time + d >= time_bound) {
      // The bound falls inside (or exactly at the end of) this delay.
      d = time_bound - s.global_time;
      if (d > 0) {
        s = delay(s, d);
        TraceStep ts;
        ts.is_delay = true;
        ts.d = d;
        res.trace.steps.push_back(ts);
      }
      return finish(EndReason::Bound);
    }
    if (d > 0) {
      s = delay(s, d);
      TraceStep ts;
      ts.is_delay = true;
      ts.d = d;
      res.trace.steps.push_back(ts);
    }

    // Fire, sampling NonDet values uniformly from the type domain.
    const Edge& edge = net.cfas[win.cfa].edges[win.edge];
    const RegScope scope = net.scope_for(win.cfa);
    std::vector<uint64_t> chosen;
    Chooser choose = [&](UlType t) {
      Value v = sample_value(rng, t);
      chosen.push_back(v.bv.bits);
      return v;
    };
    const StepStatus st = step_sequence(edge.seq, s.d.local[win.cfa], s.d.global,
                                        scope, s.d.mem, choose);
    assert(st != StepStatus::Blocked && "guard was checked before proposing");
    s.d.locs[win.cfa] = edge.to;
    s.clocks[win.cfa] = 0;
    if (st == StepStatus::Error) s.d.error_hit = true;
    if (st == StepStatus::AssertHit) s.d.assert_hit = true;

    TraceStep fs;
    fs.cfa = win.cfa;
    fs.edge = win.edge;
    fs.nondet = std::move(chosen);
    res.trace.steps.push_back(fs);
  }
}

EstimateResult estimate_max(const Network& net, const TimingView& timing,
                            const Expr& expr, uint64_t time_bound, uint64_t runs,
                            uint64_t seed, unsigned bins) {
  EstimateResult out;
  out.samples.reserve(runs);

  for (uint64_t r = 0; r < runs; ++r) {
    const uint64_t run_seed = Rng::derive(seed, r);

    // Rerun the simulation while folding the expression over every visited
    // state; replaying the recorded trace gives identical states.
    SimResult sim = simulate_run(net, timing, run_seed, time_bound);

    TimedNetworkState s = initial_state(net);
    int64_t best = eval_expr(expr, net, s.d, s.global_time);
    for (const TraceStep& ts : sim.trace.steps) {
      if (ts.is_delay) {
        s = delay(s, ts.d);
      } else {
        const Edge& edge = net.cfas[ts.cfa].edges[ts.edge];
        const RegScope scope = net.scope_for(ts.cfa);
        const StepStatus st =
            step_sequence(edge.seq, s.d.local[ts.cfa], s.d.global, scope, s.d.mem,
                          scripted_chooser(ts.nondet));
        s.d.locs[ts.cfa] = edge.to;
        s.clocks[ts.cfa] = 0;
        if (st == StepStatus::Error) s.d.error_hit = true;
        if (st == StepStatus::AssertHit) s.d.assert_hit = true;
      }
      best = std::max(best, eval_expr(expr, net, s.d, s.global_time));
    }

    out.samples.push_back(EstimateSample{best, sim.end, sim.end_time});
  }

  if (!out.samples.empty()) {
    out.min = out.samples[0].value;
    out.max = out.samples[0].value;
    double sum = 0;
    for (const EstimateSample& s : out.samples) {
      out.min = std::min(out.min, s.value);
      out.max = std::max(out.max, s.value);
      sum += static_cast<double>(s.value);
    }
    out.mean = sum / static_cast<double>(out.samples.size());

    if (out.max == out.min) {
      out.histogram.push_back(HistogramBin{static_cast<double>(out.min),
                                           static_cast<double>(out.max),
                                           out.samples.size()});
    } else {
      const double lo = static_cast<double>(out.min);
      const double width = (static_cast<double>(out.max) - lo) / bins;
      out.histogram.assign(bins, HistogramBin{});
      for (unsigned b = 0; b < bins; ++b) {
        out.histogram[b].lo = lo + b * width;
        out.histogram[b].hi = lo + (b + 1) * width;
      }
      for (const EstimateSample& s : out.samples) {
        unsigned b = static_cast<unsigned>((static_cast<double>(s.value) - lo) / width);
        if (b >= bins) b = bins - 1;
        ++out.histogram[b].count;
      }
    }
  }
  return out;
}

std::string histogram_csv(const EstimateResult& r) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  char buf[80];
  for (const HistogramBin& b : r.histogram) {
    snprintf(buf, sizeof buf, "%.6f,%.6f,%llu\n", b.lo, b.hi,
             static_cast<unsigned long long>(b.count));
    out << buf;
  }
  return out.str();
}

}  // namespace ulmc
