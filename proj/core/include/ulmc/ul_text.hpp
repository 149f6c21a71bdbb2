#pragma once

#include <string>

#include "ulmc/cfa.hpp"
#include "ulmc/ul.hpp"

namespace ulmc {

// ---------------------------------------------------------------------------
// Textual UL. Edge labels are written the way the instructions are spelled:
//
//   r1 <- Add r2, [1]^Int8 ; Store r3, [200]^Int16 ; r4
//
// "<-" may also be written as the arrow character. Constants are [n]^IntB
// (unsigned), [z]^IntB_2 (2s-complement) or [n]^Addr. A bare register is a
// declaration no-op. An Internal instruction (Assume r / NegAssume r /
// Assert) may appear only at the head.

// Throws ParseError (SyntaxError, UnknownRegister, MisplacedInternal).
// The result typechecks against `scope` (throws ParseError wrapping the
// TypeError) unless `typecheck` is false.
InstructionSequence parse_sequence(const std::string& text, const RegScope& scope,
                                   bool typecheck = true);

// Canonical printer; parse_sequence(render_sequence(s)) == s.
std::string render_sequence(const InstructionSequence& seq);
std::string render_instruction(const Instruction& in);
std::string render_operand(const Operand& op);

// ---------------------------------------------------------------------------
// Model files (.ul), line-oriented; '#' starts a comment.
//
//   memsize <bytes>
//   static <bytes>
//   global <name> : <type> [= <int>] [@ <addr>]
//   process <pname>
//     register <name> : <type>
//     location <lname> [init] [term] [assertviolation] [origin <name>]
//     edge <from> -> <to> : <sequence text>
//   end
//
// Exactly one init location per process. Globals declared with `@ <addr>`
// are memory-backed: visible to queries, not usable as operands.

Network parse_program(const std::string& text);
std::string render_program(const Network& net);

// FNV-1a over the canonical rendering; stable model identity for trace
// headers and reproducibility checks.
uint64_t model_hash(const Network& net);

}  // namespace ulmc
