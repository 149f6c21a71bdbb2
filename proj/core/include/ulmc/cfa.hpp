#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulmc/machine.hpp"
#include "ulmc/ul.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Control-flow automata and their parallel composition.

struct Location {
  std::string name;
  std::string origin;  // source-level location this one projects to (== name
                       // unless the location was introduced by splitting)
  bool is_init = false;
  bool is_term = false;
  bool is_assert_violation = false;
  bool synthetic = false;
};

struct Edge {
  uint32_t from = 0;
  uint32_t to = 0;
  InstructionSequence seq;
};

struct Cfa {
  std::string name;
  std::vector<RegisterInfo> registers;
  std::vector<Location> locations;
  std::vector<Edge> edges;

  std::optional<uint32_t> find_location(std::string_view name) const;
  std::optional<uint32_t> init_index() const;
  std::vector<std::vector<uint32_t>> build_out_index() const;  // loc -> edge ids
};

// Shared register. Plain globals live in the shared environment and may be
// used as instruction operands. Memory-backed globals (frontend output) live
// at a fixed address in the static region; queries read their cell, but they
// are not legal operands.
struct GlobalDef {
  RegisterInfo reg;
  uint64_t init_pattern = 0;
  std::optional<uint64_t> address;
};

struct Network {
  uint64_t memsize = 0;
  uint64_t static_bytes = 0;  // memory reserved for globals/frames; the bump
                              // pointer starts here
  std::vector<GlobalDef> globals;
  std::vector<Cfa> cfas;

  // Derived (built by finalize):
  std::vector<RegisterInfo> plain_globals;        // operand-addressable subset
  std::vector<uint32_t> plain_global_def;         // plain index -> globals index
  std::vector<std::vector<std::vector<uint32_t>>> out_edges;  // [cfa][loc]

  void finalize();
  RegScope scope_for(uint32_t cfa_index) const {
    return RegScope{plain_globals, cfas[cfa_index].registers};
  }
  std::optional<uint32_t> find_cfa(std::string_view name) const;
  std::optional<uint32_t> find_global(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Discrete network state: per-automaton (location, Env), the shared plain
// globals, memory, and the monotone error/assert flags.

struct DiscreteState {
  std::vector<uint32_t> locs;
  std::vector<Env> local;
  Env global;
  Memory mem;
  bool error_hit = false;
  bool assert_hit = false;

  bool operator==(const DiscreteState&) const = default;
};

// Stable byte serialization, used as the visited-set key.
std::string state_key(const DiscreteState& s);

// ---------------------------------------------------------------------------
// Well-formedness.

struct WellFormednessError {
  std::string kind;  // DuplicateInit, EdgeFromSink, ...
  std::string message;
};

std::vector<WellFormednessError> validate(const Network& net);

// ---------------------------------------------------------------------------
// Normalization pipeline.

// Splits edges so each carries at most one Load/Store and, if present, it is
// the last body instruction. Fresh locations are named "<from>__m<k>", marked
// synthetic, and project to the edge's source location.
Cfa split_memory_accesses(const Cfa& cfa);

// split_memory_accesses on every CFA; guarantees exactly one term and one
// assert-violation location per CFA (rerouting dead-end locations into a
// fresh Term when none was declared) and retargets Assert-guarded edges to
// the violation location. Idempotent.
Network normalize(const Network& net);

// ---------------------------------------------------------------------------
// Enabled-edge computation. Consults locations and guard registers only;
// timing constraints are layered on by the engine. Absorbing error states
// have no enabled edges.
std::vector<std::pair<uint32_t, uint32_t>> enabled_edges(const DiscreteState& s,
                                                         const Network& net);

// ---------------------------------------------------------------------------
// Lazy NonDet expansion: successors of running `seq` for every combination of
// NonDet values, in canonical order (first NonDet varies slowest; unsigned
// ascending, false before true). Branches are random-access by index.

constexpr uint64_t kDefaultNondetCap = 1ull << 16;

struct NondetExpansion {
  bool refused = false;       // total branch count exceeds the cap
  uint64_t count = 0;         // number of branches when not refused
  std::vector<UlType> slots;  // NonDet destination types, in body order

  struct Branch {
    StepStatus status = StepStatus::Ok;
    Env local;
    Env global;
    Memory mem;
    std::vector<uint64_t> values;  // chosen pattern per NonDet slot
  };

  // Branch k of the canonical enumeration; valid for k in [0, count).
  Branch run(uint64_t k, const InstructionSequence& seq, const Env& local,
             const Env& global, const RegScope& scope, const Memory& mem) const;

  // The scripted values of branch k in slot order.
  std::vector<uint64_t> values_of(uint64_t k) const;
};

NondetExpansion expand_nondet(const InstructionSequence& seq, const RegScope& scope,
                              uint64_t cap = kDefaultNondetCap);

}  // namespace ulmc
