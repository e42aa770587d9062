#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ntcc/diag.hpp"

// Name-based syntax trees produced by the parser. `sum over` / `par over`
// replication and alias references are already expanded here, so equality and
// printing work on a closed first-order tree. Positions never take part in
// equality: print -> parse must round-trip to the identical tree.

namespace ntcc::ast {

enum class ExprKind {
  Lit,          // integer literal
  Name,         // declared variable, definition parameter, or local
  Cell,         // stream cell  name[index]
  Add,
  Sub,
  Mul,
  OracleSuffix,  // oracle.S[state]
  OracleDelta,   // oracle.delta[state, symbol]
};

struct Expr {
  ExprKind kind = ExprKind::Lit;
  long long lit = 0;
  std::string name;        // Name / Cell
  std::vector<Expr> args;  // Cell: {index}; Add/Sub/Mul: {lhs, rhs};
                           // OracleSuffix: {state}; OracleDelta: {state, sym}
  SourcePos pos;

  bool operator==(const Expr& o) const;
};

Expr lit(long long v);

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

// Reference to a set: a plain set variable, a set-stream cell, or the
// read-only factor-oracle transition alphabet of a state.
struct SetRef {
  bool oracle_from = false;
  std::string name;              // empty when oracle_from
  std::vector<Expr> index;       // 0 or 1 entries (cell index / oracle state)
  bool operator==(const SetRef& o) const;
};

enum class ConstraintKind { True, Rel, Between, Member, Conj };

struct Constraint {
  ConstraintKind kind = ConstraintKind::True;
  RelOp op = RelOp::Eq;             // Rel
  std::vector<Expr> exprs;          // Rel: {lhs, rhs}; Between: {lo, mid, hi};
                                    // Member: {elem}
  SetRef set;                       // Member
  std::vector<Constraint> parts;    // Conj
  SourcePos pos;

  bool operator==(const Constraint& o) const;
};

enum class ProcKind {
  Skip,
  Tell,
  When,
  Unless,
  Par,
  Next,
  Sum,
  Star,
  Bang,
  Local,
  Call,
  OracleAdd,
};

struct Process {
  ProcKind kind = ProcKind::Skip;
  Constraint guard;                     // Tell: the told constraint; When/Unless
  std::vector<Process> children;        // When/Unless/Next/Star/Bang/Local: {body};
                                        // Par: components; Sum: branch bodies
  std::vector<Constraint> branch_guards;  // Sum, parallel to children
  std::string name;                     // Call: definition; Local: variable
  std::vector<Expr> args;               // Call arguments; OracleAdd: {symbol expr}
  long long lo = 0, hi = 0;             // Local declared bounds
  SourcePos pos;

  bool operator==(const Process& o) const;
};

enum class DeclKind { Var, Stream, Set, SetStream };

struct VarDecl {
  DeclKind kind = DeclKind::Var;
  bool persistent = false;
  std::string name;
  long long lo = 0, hi = 0;  // unused for sets
  SourcePos pos;
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  Process body;
  SourcePos pos;
};

struct ModelAst {
  std::vector<VarDecl> decls;
  std::vector<std::string> outputs;
  std::vector<Definition> definitions;
  std::optional<Process> system;
};

// Pretty-printing; parse(print(x)) == x for trees the parser can produce.
std::string print_expr(const Expr& e);
std::string print_constraint(const Constraint& c);
std::string print_process(const Process& p, int indent = 0);
std::string print_model(const ModelAst& m);

// name -> literal substitution (used for replication binders).
Expr subst(const Expr& e, const std::string& name, long long value);
Constraint subst(const Constraint& c, const std::string& name, long long value);
Process subst(const Process& p, const std::string& name, long long value);

}  // namespace ntcc::ast
