#include "ulmc/zone_reach.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <deque>
#include <unordered_map>

#include "ulmc/ul_text.hpp"

namespace ulmc {

namespace {

// Clock layout in the DBM: index c+1 = CFA c's clock, index ncfas+1 = G.

struct SymbolicStepper {
  const Network& net;
  const TimingView& timing;
  unsigned nclocks;  // cfa clocks + G

  unsigned gclock() const { return nclocks; }

  bool apply_invariants(const DiscreteState& d, Dbm& z) const {
    for (uint32_t c = 0; c < net.cfas.size(); ++c) {
      const auto& ub = timing.loc_ub[c][d.locs[c]];
      if (ub && !z.constrain(c + 1, 0, DbmBound::le(static_cast<int64_t>(*ub))))
        return false;
    }
    return true;
  }

  // Firing window of an edge of CFA c: lo <= x_c <= hi.
  bool apply_guard(uint32_t c, const Interval& iv, Dbm& z) const {
    if (!z.constrain(c + 1, 0, DbmBound::le(static_cast<int64_t>(iv.hi))))
      return false;
    return z.constrain(0, c + 1, DbmBound::le(-static_cast<int64_t>(iv.lo)));
  }

  // Arrival zone -> delay-closed zone at the same discrete state. Cannot
  // empty a zone that already satisfied the invariants.
  void delay_close(const DiscreteState& d, Dbm& z) const {
    z.up();
    const bool ok = apply_invariants(d, z);
    assert(ok && "arrival zones satisfy their own invariants");
    (void)ok;
  }
};

struct DiscreteNode {
  DiscreteState state;
  std::vector<Dbm> zones;  // delay-closed, extrapolated, canonical
};

struct WorkItem {
  uint32_t node = 0;
  Dbm zone;  // delay-closed zone to expand
  int32_t parent = -1;
  FireLabel label;  // edge that produced this item (root: unused)
};

}  // namespace

ZoneReachResult zone_reach(const Network& net, const TimingView& timing,
                           const StatePredFn& pred, const ReachLimits& limits,
                           const ZoneReachOptions& opts) {
  ZoneReachResult res;
  const unsigned ncfas = static_cast<unsigned>(net.cfas.size());
  SymbolicStepper step{net, timing, ncfas + 1};
  const unsigned G = step.gclock();

  std::vector<int64_t> kext(ncfas + 1, static_cast<int64_t>(timing.max_const));
  if (opts.track_time) kext[ncfas] = -1;  // keep G bounds exact

  const auto t_start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
               .count() > limits.max_seconds;
  };

  std::vector<DiscreteNode> nodes;
  std::unordered_map<std::string, uint32_t> node_index;
  std::vector<WorkItem> items;
  std::deque<uint32_t> queue;

  std::optional<TimeWindow> window;
  auto note_window = [&](const Dbm& arrival) {
    const uint64_t lo = static_cast<uint64_t>(arrival.clock_min(G));
    const int64_t hi_raw = arrival.clock_max(G);
    const uint64_t hi =
        hi_raw >= DbmBound::kInf ? UINT64_MAX : static_cast<uint64_t>(hi_raw);
    if (!window) {
      window = TimeWindow{lo, hi};
    } else {
      window->lo = std::min(window->lo, lo);
      window->hi = std::max(window->hi, hi);
    }
  };

  std::optional<std::vector<FireLabel>> goal_path;
  auto record_goal = [&](int32_t parent, const FireLabel& label) {
    if (goal_path) return;
    res.verdict = ReachVerdict::Reachable;
    std::vector<FireLabel> labels;
    if (parent >= 0) {
      labels.push_back(label);
      for (int32_t i = parent; i >= 0; i = items[i].parent)
        if (items[i].parent >= 0) labels.push_back(items[i].label);
      std::reverse(labels.begin(), labels.end());
    }
    goal_path = std::move(labels);
  };

  // Returns false when the search must stop (first hit in plain mode, or a
  // limit tripped).
  auto enqueue = [&](DiscreteState&& d, Dbm arrival, int32_t parent,
                     const FireLabel& label) {
    if (limits.horizon &&
        arrival.clock_min(G) > static_cast<int64_t>(*limits.horizon))
      return true;  // entirely beyond the horizon
    if (pred(d)) {
      if (opts.collect_window) note_window(arrival);
      record_goal(parent, label);
      if (!opts.collect_window) return false;
    }
    Dbm z = std::move(arrival);
    step.delay_close(d, z);
    z.extrapolate(kext);
    std::string key = state_key(d);
    uint32_t node;
    if (auto it = node_index.find(key); it != node_index.end()) {
      node = it->second;
    } else {
      node = static_cast<uint32_t>(nodes.size());
      nodes.push_back(DiscreteNode{std::move(d), {}});
      node_index.emplace(std::move(key), node);
    }
    for (const Dbm& stored : nodes[node].zones)
      if (stored.includes(z)) return true;  // subsumed
    if (res.stored_pairs >= limits.max_states) {
      res.verdict = ReachVerdict::LimitExceeded;
      return false;
    }
    const uint32_t item_id = static_cast<uint32_t>(items.size());
    items.push_back(WorkItem{node, z, parent, label});
    nodes[node].zones.push_back(std::move(z));
    ++res.stored_pairs;
    queue.push_back(item_id);
    return true;
  };

  bool stop = false;
  {
    TimedNetworkState init = initial_state(net);
    stop = !enqueue(std::move(init.d), Dbm::zero(ncfas + 1), -1, FireLabel{});
  }

  bool refused = false;
  while (!queue.empty() && !stop) {
    if ((res.expansions & 0x3ff) == 0x3ff && out_of_time()) {
      res.verdict = ReachVerdict::LimitExceeded;
      break;
    }
    const uint32_t item_id = queue.front();
    queue.pop_front();
    ++res.expansions;

    // Copy: `items` may reallocate while successors are enqueued.
    const WorkItem item = items[item_id];

    for (const auto& [c, e] : enabled_edges(nodes[item.node].state, net)) {
      Dbm guard_zone = item.zone;
      if (!step.apply_guard(c, timing.edge_iv[c][e], guard_zone)) continue;

      const DiscreteState& d = nodes[item.node].state;
      const Edge& edge = net.cfas[c].edges[e];
      const RegScope scope = net.scope_for(c);
      const NondetExpansion x = expand_nondet(edge.seq, scope, limits.nondet_cap);
      if (x.refused) {
        refused = true;
        continue;
      }
      Dbm fired = guard_zone;
      fired.reset(c + 1);
      for (uint64_t k = 0; k < x.count && !stop; ++k) {
        NondetExpansion::Branch b =
            x.run(k, edge.seq, d.local[c], d.global, scope, d.mem);
        if (b.status == StepStatus::Blocked) continue;
        DiscreteState nd;
        nd.locs = d.locs;
        nd.locs[c] = edge.to;
        nd.local = d.local;
        nd.local[c] = std::move(b.local);
        nd.global = std::move(b.global);
        nd.mem = std::move(b.mem);
        nd.error_hit = d.error_hit || b.status == StepStatus::Error;
        nd.assert_hit = d.assert_hit || b.status == StepStatus::AssertHit;
        FireLabel label{c, e, std::move(b.values), b.status};
        if (!enqueue(std::move(nd), fired, static_cast<int32_t>(item_id), label))
          stop = true;
      }
      if (stop) break;
    }
  }

  res.discrete_states = nodes.size();
  if (refused && res.verdict == ReachVerdict::Unreachable)
    res.verdict = ReachVerdict::LimitExceeded;
  if (window) res.pred_window = *window;

  // -------------------------------------------------------------------------
  // Witness concretization: exact zones (no extrapolation) forward along the
  // label path, suffix-feasibility zones backward, then minimal integer
  // delays forward.
  if (goal_path && res.verdict == ReachVerdict::Reachable) {
    const std::vector<FireLabel>& labels = *goal_path;
    const size_t m = labels.size();

    std::vector<DiscreteState> states(m + 1);
    states[0] = initial_state(net).d;
    for (size_t k = 0; k < m; ++k) {
      const FireLabel& lb = labels[k];
      const Edge& edge = net.cfas[lb.cfa].edges[lb.edge];
      const RegScope scope = net.scope_for(lb.cfa);
      DiscreteState nd = states[k];
      nd.locs[lb.cfa] = edge.to;
      const StepStatus st =
          step_sequence(edge.seq, nd.local[lb.cfa], nd.global, scope, nd.mem,
                        scripted_chooser(lb.nondet));
      if (st == StepStatus::Error) nd.error_hit = true;
      if (st == StepStatus::AssertHit) nd.assert_hit = true;
      states[k + 1] = std::move(nd);
    }

    // pre_fire[k]: what a pre-fire clock point of step k must satisfy for the
    // whole remaining path to be feasible.
    std::vector<Dbm> pre_fire(m);
    Dbm future(ncfas + 1);  // after the last step: clocks nonnegative, free
    for (size_t k = m; k-- > 0;) {
      const FireLabel& lb = labels[k];
      Dbm p = std::move(future);
      // Undo the reset of step k: the post-fire point has x_c = 0.
      const bool at_zero = p.constrain(lb.cfa + 1, 0, DbmBound::le(0));
      assert(at_zero && "suffix zone must admit the reset clock");
      (void)at_zero;
      p.free(lb.cfa + 1);
      const bool g_ok = step.apply_guard(lb.cfa, timing.edge_iv[lb.cfa][lb.edge], p);
      const bool i_ok = step.apply_invariants(states[k], p);
      assert(g_ok && i_ok && "witness path must be feasible");
      (void)g_ok;
      (void)i_ok;
      pre_fire[k] = p;
      p.down();
      future = std::move(p);
    }

    Trace trace;
    trace.model_hash = model_hash(net);
    std::vector<int64_t> v(ncfas + 1, 0);  // concrete clocks, v[ncfas] = G
    for (size_t k = 0; k < m; ++k) {
      const Dbm& p = pre_fire[k];
      int64_t dlo = 0, dhi = DbmBound::kInf;
      for (unsigned i = 1; i <= ncfas + 1; ++i) {
        const int64_t up_b = p.at(i, 0);
        if (up_b < DbmBound::kInf)
          dhi = std::min(dhi, DbmBound::value(up_b) - v[i - 1]);
        dlo = std::max(dlo, -DbmBound::value(p.at(0, i)) - v[i - 1]);
      }
      assert(dlo <= dhi && "witness concretization must stay feasible");
      (void)dhi;
      const int64_t d = std::max<int64_t>(dlo, 0);
      if (d > 0) {
        TraceStep ts;
        ts.is_delay = true;
        ts.d = static_cast<uint64_t>(d);
        trace.steps.push_back(ts);
        for (int64_t& x : v) x += d;
      }
      TraceStep fs;
      fs.cfa = labels[k].cfa;
      fs.edge = labels[k].edge;
      fs.nondet = labels[k].nondet;
      trace.steps.push_back(fs);
      v[labels[k].cfa] = 0;
    }
    trace.end = EndReason::None;
    trace.end_time = static_cast<uint64_t>(v[ncfas]);
    res.witness = std::move(trace);
  }
  return res;
}

}  // namespace ulmc
