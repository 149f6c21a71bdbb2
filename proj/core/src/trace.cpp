#include "ulmc/trace.hpp"

#include <cassert>
#include <sstream>

#include "ulmc/errors.hpp"

namespace ulmc {

const char* end_reason_name(EndReason r) {
  switch (r) {
    case EndReason::Term: return "term";
    case EndReason::Assert: return "assert";
    case EndReason::Error: return "error";
    case EndReason::Deadlock: return "deadlock";
    case EndReason::Bound: return "bound";
    case EndReason::None: return "none";
  }
  return "?";
}

namespace {

std::optional<EndReason> end_reason_from(const std::string& s) {
  for (EndReason r : {EndReason::Term, EndReason::Assert, EndReason::Error,
                      EndReason::Deadlock, EndReason::Bound, EndReason::None})
    if (s == end_reason_name(r)) return r;
  return std::nullopt;
}

std::string hex64(uint64_t v) {
  char buf[20];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string trace_to_text(const Trace& t, const Network& net) {
  std::ostringstream out;
  out << "# model " << hex64(t.model_hash) << "\n";
  out << "# omega " << hex64(t.omega_hash) << "\n";
  out << "# seed " << t.seed << "\n";
  for (const TraceStep& s : t.steps) {
    if (s.is_delay) {
      out << "delay " << s.d << "\n";
      continue;
    }
    const Cfa& cfa = net.cfas[s.cfa];
    const Edge& e = cfa.edges[s.edge];
    out << "fire " << cfa.name << " " << cfa.locations[e.from].name << " -> "
        << cfa.locations[e.to].name;
    // Parallel edges between the same pair need an ordinal to stay
    // replayable.
    unsigned parallel = 0, ordinal = 0;
    for (uint32_t i = 0; i < cfa.edges.size(); ++i) {
      if (cfa.edges[i].from == e.from && cfa.edges[i].to == e.to) {
        if (i == s.edge) ordinal = parallel;
        ++parallel;
      }
    }
    if (parallel > 1) out << " #" << ordinal;
    if (!s.nondet.empty()) {
      out << " nondet:";
      for (size_t i = 0; i < s.nondet.size(); ++i)
        out << (i ? "," : " ") << s.nondet[i];
    }
    out << "\n";
  }
  out << "end " << end_reason_name(t.end) << " time " << t.end_time << "\n";
  return out.str();
}

Trace trace_from_text(const std::string& text, const Network& net) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  uint32_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "#") {
      std::string key, value;
      ls >> key >> value;
      if (key == "model") t.model_hash = std::stoull(value, nullptr, 16);
      else if (key == "omega") t.omega_hash = std::stoull(value, nullptr, 16);
      else if (key == "seed") t.seed = std::stoull(value);
      continue;
    }
    if (head == "delay") {
      TraceStep s;
      s.is_delay = true;
      if (!(ls >> s.d)) throw ParseError("delay needs a duration", {lineno, 1});
      t.steps.push_back(s);
      continue;
    }
    if (head == "fire") {
      std::string proc, from, arrow, to;
      if (!(ls >> proc >> from >> arrow >> to) || arrow != "->")
        throw ParseError("fire <proc> <from> -> <to>", {lineno, 1});
      auto ci = net.find_cfa(proc);
      if (!ci) throw ParseError("unknown process " + proc, {lineno, 1});
      const Cfa& cfa = net.cfas[*ci];
      auto fi = cfa.find_location(from);
      auto ti = cfa.find_location(to);
      if (!fi || !ti) throw ParseError("unknown location in fire", {lineno, 1});
      std::string rest;
      uint32_t want_ordinal = 0;
      bool have_rest = static_cast<bool>(ls >> rest);
      if (have_rest && rest[0] == '#') {
        want_ordinal = static_cast<uint32_t>(std::stoul(rest.substr(1)));
        have_rest = static_cast<bool>(ls >> rest);
      }
      std::optional<uint32_t> edge;
      uint32_t ordinal = 0;
      for (uint32_t e = 0; e < cfa.edges.size(); ++e)
        if (cfa.edges[e].from == *fi && cfa.edges[e].to == *ti) {
          if (ordinal++ == want_ordinal) {
            edge = e;
            break;
          }
        }
      if (!edge) throw ParseError("no edge " + from + " -> " + to, {lineno, 1});
      TraceStep s;
      s.cfa = *ci;
      s.edge = *edge;
      if (have_rest) {
        if (rest.rfind("nondet:", 0) != 0)
          throw ParseError("expected nondet: list", {lineno, 1});
        std::string vals = rest.substr(7);
        std::string more;
        while (ls >> more) vals += more;
        std::istringstream vs(vals);
        std::string item;
        while (std::getline(vs, item, ','))
          if (!item.empty()) s.nondet.push_back(std::stoull(item));
      }
      t.steps.push_back(std::move(s));
      continue;
    }
    if (head == "end") {
      std::string reason, timekw;
      uint64_t tm = 0;
      if (!(ls >> reason >> timekw >> tm) || timekw != "time")
        throw ParseError("end <reason> time <t>", {lineno, 1});
      auto r = end_reason_from(reason);
      if (!r) throw ParseError("unknown end reason " + reason, {lineno, 1});
      t.end = *r;
      t.end_time = tm;
      continue;
    }
    throw ParseError("unknown trace line " + head, {lineno, 1});
  }
  return t;
}

TimedNetworkState replay_trace(const Trace& t, const Network& net,
                               const TimingView& timing) {
  TimedNetworkState s = initial_state(net);
  for (const TraceStep& ts : t.steps) {
    if (ts.is_delay) {
      const auto md = max_delay(s, net, timing);
      if (md && ts.d > *md)
        throw std::runtime_error("trace delay violates a location invariant");
      s = delay(s, ts.d);
      continue;
    }
    const Cfa& cfa = net.cfas[ts.cfa];
    const Edge& e = cfa.edges[ts.edge];
    if (s.d.locs[ts.cfa] != e.from)
      throw std::runtime_error("trace fires an edge from the wrong location");
    const Interval iv = timing.edge_iv[ts.cfa][ts.edge];
    if (s.clocks[ts.cfa] < iv.lo || s.clocks[ts.cfa] > iv.hi)
      throw std::runtime_error("trace fires outside the edge's timing window");
    const RegScope scope = net.scope_for(ts.cfa);
    if (e.seq.guard && check_guard(*e.seq.guard, s.d.local[ts.cfa], s.d.global) ==
                           GuardResult::Blocked)
      throw std::runtime_error("trace fires a blocked edge");
    const StepStatus st =
        step_sequence(e.seq, s.d.local[ts.cfa], s.d.global, scope, s.d.mem,
                      scripted_chooser(ts.nondet));
    s.d.locs[ts.cfa] = e.to;
    s.clocks[ts.cfa] = 0;
    if (st == StepStatus::Error) s.d.error_hit = true;
    if (st == StepStatus::AssertHit) s.d.assert_hit = true;
  }
  return s;
}

}  // namespace ulmc
