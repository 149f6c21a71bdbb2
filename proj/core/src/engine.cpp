#include "ulmc/engine.hpp"

#include <cassert>
#include <deque>
#include <unordered_set>

#include "ulmc/errors.hpp"

namespace ulmc {

TimedNetworkState initial_state(const Network& net) {
  TimedNetworkState s;
  s.d.mem = Memory::of_size(net.memsize);
  if (net.static_bytes > net.memsize)
    throw FrontendError("FrameOverflow: static region exceeds memsize");
  s.d.mem.pointer = net.static_bytes;

  s.d.global = make_env(net.plain_globals);
  for (uint32_t p = 0; p < net.plain_globals.size(); ++p) {
    const GlobalDef& g = net.globals[net.plain_global_def[p]];
    const UlType t = g.reg.type;
    if (t == UlType::Bool) s.d.global[p] = Value::boolean(g.init_pattern != 0);
    else if (t == UlType::Addr) s.d.global[p] = Value::address(g.init_pattern);
    else s.d.global[p] = Value::bits(BitVec::of(type_bit_width(t), g.init_pattern));
  }
  for (const GlobalDef& g : net.globals) {
    if (!g.address) continue;
    const unsigned size = type_byte_size(g.reg.type);
    if (*g.address + size > net.memsize)
      throw FrontendError("FrameOverflow: global " + g.reg.name + " outside memory");
    for (unsigned i = 0; i < size; ++i)
      s.d.mem.bytes[*g.address + i] = static_cast<uint8_t>(g.init_pattern >> (8 * i));
  }

  for (const Cfa& cfa : net.cfas) {
    auto init = cfa.init_index();
    assert(init && "validated networks have init locations");
    s.d.locs.push_back(*init);
    s.d.local.push_back(make_env(cfa.registers));
  }
  s.clocks.assign(net.cfas.size(), 0);
  s.global_time = 0;
  return s;
}

std::vector<Successor> discrete_successors(const TimedNetworkState& s,
                                           const Network& net,
                                           const TimingView& timing,
                                           uint64_t nondet_cap,
                                           SuccessorError* err) {
  std::vector<Successor> result;
  for (const auto& [c, e] : enabled_edges(s.d, net)) {
    const Interval iv = timing.edge_iv[c][e];
    if (s.clocks[c] < iv.lo || s.clocks[c] > iv.hi) continue;

    const Cfa& cfa = net.cfas[c];
    const Edge& edge = cfa.edges[e];
    const RegScope scope = net.scope_for(c);
    const NondetExpansion x = expand_nondet(edge.seq, scope, nondet_cap);
    if (x.refused) {
      if (err) err->refused_expansion = true;
      continue;
    }
    for (uint64_t k = 0; k < x.count; ++k) {
      NondetExpansion::Branch b =
          x.run(k, edge.seq, s.d.local[c], s.d.global, scope, s.d.mem);
      if (b.status == StepStatus::Blocked) continue;
      Successor succ;
      succ.state = s;
      succ.state.d.local[c] = std::move(b.local);
      succ.state.d.global = std::move(b.global);
      succ.state.d.mem = std::move(b.mem);
      succ.state.d.locs[c] = edge.to;
      succ.state.clocks[c] = 0;
      if (b.status == StepStatus::Error) succ.state.d.error_hit = true;
      if (b.status == StepStatus::AssertHit) succ.state.d.assert_hit = true;
      succ.label = FireLabel{c, e, std::move(b.values), b.status};
      result.push_back(std::move(succ));
    }
  }
  return result;
}

std::optional<uint64_t> max_delay(const TimedNetworkState& s, const Network& net,
                                  const TimingView& timing) {
  std::optional<uint64_t> best;
  for (uint32_t c = 0; c < net.cfas.size(); ++c) {
    const auto& ub = timing.loc_ub[c][s.d.locs[c]];
    if (!ub) continue;  // sink: no invariant
    const uint64_t slack = *ub >= s.clocks[c] ? *ub - s.clocks[c] : 0;
    if (!best || slack < *best) best = slack;
  }
  return best;
}

TimedNetworkState delay(const TimedNetworkState& s, uint64_t d) {
  TimedNetworkState out = s;
  for (uint64_t& x : out.clocks) x += d;
  out.global_time += d;
  return out;
}

DigitalResult discrete_time_reach(const Network& net, const TimingView& timing,
                                  const StatePredFn& pred,
                                  const DigitalLimits& limits) {
  DigitalResult res;

  auto timed_key = [](const TimedNetworkState& s) {
    std::string k = state_key(s.d);
    for (uint64_t x : s.clocks) k.append(reinterpret_cast<const char*>(&x), 8);
    k.append(reinterpret_cast<const char*>(&s.global_time), 8);
    return k;
  };

  // The pred window is taken over arrivals: the global time at which a
  // pred-satisfying discrete state is entered (initial state or a discrete
  // step). Delaying inside the state does not extend the window; the zone
  // engine measures the same quantity from arrival zones.
  bool first_hit = true;
  auto note = [&](const TimedNetworkState& s) {
    if (!pred(s.d)) return;
    res.satisfied = true;
    if (first_hit || s.global_time < res.min_time) res.min_time = s.global_time;
    if (first_hit || s.global_time > res.max_time) res.max_time = s.global_time;
    first_hit = false;
  };

  std::deque<TimedNetworkState> queue;
  std::unordered_set<std::string> seen;
  TimedNetworkState init = initial_state(net);
  note(init);
  seen.insert(timed_key(init));
  queue.push_back(std::move(init));

  while (!queue.empty()) {
    TimedNetworkState s = std::move(queue.front());
    queue.pop_front();
    ++res.visited;
    if (res.visited > limits.max_states) {
      res.limit_exceeded = true;
      return res;
    }

    auto push = [&](TimedNetworkState&& next, bool arrival) {
      if (arrival) note(next);
      std::string k = timed_key(next);
      if (seen.insert(std::move(k)).second) queue.push_back(std::move(next));
    };

    SuccessorError err;
    for (Successor& succ :
         discrete_successors(s, net, timing, limits.nondet_cap, &err))
      push(std::move(succ.state), true);
    if (err.refused_expansion) res.limit_exceeded = true;

    if (s.global_time < limits.horizon) {
      const auto md = max_delay(s, net, timing);
      if (!md || *md >= 1) push(delay(s, 1), false);
    }
  }
  return res;
}

}  // namespace ulmc
