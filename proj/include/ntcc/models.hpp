#pragma once

#include <string>
#include <vector>

#include "ntcc/ast.hpp"
#include "ntcc/factor_oracle.hpp"
#include "ntcc/trace.hpp"

namespace ntcc::models {

// Built-in model names: chord, factorial, ccfomi, filters, stress.
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
// Embedded source text (same content as the models/ files).
const std::string& builtin_source(const std::string& name);
// Parsed and validated; throws RuntimeModelError for unknown names.
ast::ModelAst load_builtin(const std::string& name);

struct CheckReport {
  std::string property;
  bool pass = true;
  uint64_t first_violation_unit = 0;
  std::string witness;  // human-readable description of the violation
};

// Filter coordination: per unit, at most one filter busy per object; a filter
// may only be busy after a matching work grant; work grants only happen while
// the object is idle or in its hand-off unit (end told). Works from the trace
// alone (outputs work[j], busy[i], obusy[j]). Throws RuntimeModelError when
// the trace lacks the expected shape (non-contiguous units).
CheckReport check_mutual_exclusion(const Trace& trace);

// Machine improvisation: replays the trace against the oracle built from the
// same player input. Checks (a) learning is gated: the i-th learned symbol is
// added in a unit where go >= i was told; (b) no improvised output before the
// unit where go >= n first held (n from the WAIT call); (c) every improvised
// output from position k is the continuation symbol s_{k+1} or a factor link
// from suffix(k), with the position advancing accordingly.
CheckReport check_improv_consistency(const Trace& trace,
                                     const FactorOracle& fo);

// The oracle a correctly gated learner ends up with: replays the event
// stream, adding note i at the first unit where go >= i (one add per unit).
FactorOracle build_player_oracle(const EventStream& events, uint64_t units);

}  // namespace ntcc::models
