#pragma once

#include <stdexcept>
#include <string>

namespace ntcc {

// 1-based source position; line 0 means "unknown".
struct SourcePos {
  int line = 0;
  int col = 0;
};

// First-failure report from the parser.
struct ParseError {
  SourcePos pos;
  std::string expected;
  std::string found;

  std::string message() const {
    return "parse error at " + std::to_string(pos.line) + ":" +
           std::to_string(pos.col) + ": expected " + expected + ", found " +
           found;
  }
};

// Static-check codes. The spelled-out names are the documented contract for
// the negative corpus; keep them stable.
enum class ErrCode {
  RecursionNotGuarded,
  ArityMismatch,
  UndeclaredVariable,
  UnknownDefinition,
  EmptySumRange,
  DuplicateDefinition,
  DuplicateDeclaration,
  DuplicateSystem,
  MissingSystem,
  OracleNotTellable,
  OracleIndexNotGround,
  CallArgNotGround,
  CellIndexNotGround,
};

const char* to_string(ErrCode code);

struct ValidationError {
  ErrCode code;
  std::string message;   // human text, includes the offending name
  std::string def_name;  // enclosing definition, or "system"
  SourcePos pos;
};

// Errors raised while a model is running (bad native-call argument, arithmetic
// overflow, schedule misuse). These abort the run; the CLI maps them to the
// runtime-inconsistency exit code.
class RuntimeModelError : public std::runtime_error {
 public:
  explicit RuntimeModelError(const std::string& what)
      : std::runtime_error(what) {}
};

// Misuse of the store API itself (query on a failed store, conflicting
// persistent facts, inverted domains).
class StoreError : public std::runtime_error {
 public:
  enum class Kind {
    InvalidDomain,
    QueryOnFailedStore,
    PersistentConflict,
    Overflow,
  };
  StoreError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ntcc
