#pragma once

#include <vector>

#include "ntcc/ast.hpp"
#include "ntcc/diag.hpp"

namespace ntcc {

// Static checks over a parsed model:
//   - every cycle in the definition call graph crosses a Next
//     (unless-continuations count as guarded; star and bang do not),
//   - call arity matches, callees exist, definitions and declarations unique,
//   - every name resolves (parameter, local, declared variable/stream/set),
//   - sums have at least one branch,
//   - oracle terms are never told and their index expressions are ground,
//   - definition-call arguments are ground (parameters/literals/oracle terms),
//   - outputs refer to declared variables or streams,
//   - exactly one system process.
// Returns all violations found, in source order.
std::vector<ValidationError> validate(const ast::ModelAst& model);

}  // namespace ntcc
