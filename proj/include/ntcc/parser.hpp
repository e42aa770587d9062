#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntcc/ast.hpp"
#include "ntcc/diag.hpp"

namespace ntcc {

struct ParseResult {
  std::optional<ast::ModelAst> model;
  std::optional<ParseError> error;
  bool ok() const { return model.has_value(); }
};

struct ConstraintParseResult {
  std::optional<std::vector<ast::Constraint>> tells;
  std::optional<ParseError> error;
  bool ok() const { return tells.has_value(); }
};

// Whole model source -> AST. Replication (`sum over`, `par over`) and aliases
// are expanded during parsing; the returned tree is closed.
ParseResult parse_model(const std::string& source);

// One line / event-file entry: comma-separated constraint list.
ConstraintParseResult parse_tell_list(const std::string& text);

}  // namespace ntcc
