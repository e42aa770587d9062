#include "ntcc/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ntcc {

const char* to_string(ErrCode code) {
  switch (code) {
    case ErrCode::RecursionNotGuarded: return "RecursionNotGuarded";
    case ErrCode::ArityMismatch: return "ArityMismatch";
    case ErrCode::UndeclaredVariable: return "UndeclaredVariable";
    case ErrCode::UnknownDefinition: return "UnknownDefinition";
    case ErrCode::EmptySumRange: return "EmptySumRange";
    case ErrCode::DuplicateDefinition: return "DuplicateDefinition";
    case ErrCode::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrCode::DuplicateSystem: return "DuplicateSystem";
    case ErrCode::MissingSystem: return "MissingSystem";
    case ErrCode::OracleNotTellable: return "OracleNotTellable";
    case ErrCode::OracleIndexNotGround: return "OracleIndexNotGround";
    case ErrCode::CallArgNotGround: return "CallArgNotGround";
    case ErrCode::CellIndexNotGround: return "CellIndexNotGround";
  }
  return "Unknown";
}

namespace {

using namespace ast;

struct CallEdge {
  std::string from, to;
  bool guarded;  // the call sits under a Next (or unless-continuation)
  SourcePos pos;
};

class Checker {
 public:
  explicit Checker(const ModelAst& m) : model_(m) {}

  std::vector<ValidationError> run() {
    collect_declarations();
    collect_definitions();
    for (const auto& def : model_.definitions) {
      if (def.name == "@duplicate-system") continue;
      current_def_ = def.name;
      params_.clear();
      params_.insert(def.params.begin(), def.params.end());
      locals_.clear();
      check_process(def.body, false);
    }
    current_def_ = "system";
    params_.clear();
    locals_.clear();
    if (model_.system) {
      check_process(*model_.system, false);
    } else {
      report(ErrCode::MissingSystem, "model has no system process", {});
    }
    check_outputs();
    check_guardedness();
    return std::move(errors_);
  }

 private:
  void report(ErrCode code, const std::string& msg, SourcePos pos) {
    // Lead with the stable code name so tooling and people can grep for it.
    std::string text = std::string(to_string(code)) + ": " + msg;
    if (pos.line > 0)
      text += " (at " + std::to_string(pos.line) + ":" +
              std::to_string(pos.col) + ")";
    errors_.push_back(ValidationError{code, text, current_def_, pos});
  }

  void collect_declarations() {
    for (const auto& d : model_.decls) {
      if (decls_.count(d.name)) {
        current_def_ = "declarations";
        report(ErrCode::DuplicateDeclaration,
               "name '" + d.name + "' declared more than once", d.pos);
        continue;
      }
      decls_[d.name] = d.kind;
    }
  }

  void collect_definitions() {
    current_def_ = "definitions";
    for (const auto& def : model_.definitions) {
      if (def.name == "@duplicate-system") {
        report(ErrCode::DuplicateSystem, "more than one system process",
               def.pos);
        continue;
      }
      if (defs_.count(def.name)) {
        report(ErrCode::DuplicateDefinition,
               "definition '" + def.name + "' given more than once", def.pos);
        continue;
      }
      defs_[def.name] = def.params.size();
    }
  }

  void check_outputs() {
    current_def_ = "outputs";
    for (const auto& name : model_.outputs) {
      auto it = decls_.find(name);
      if (it == decls_.end() ||
          (it->second != DeclKind::Var && it->second != DeclKind::Stream)) {
        report(ErrCode::UndeclaredVariable,
               "output '" + name + "' is not a declared variable or stream",
               {});
      }
    }
  }

  bool name_in_scope(const std::string& n) const {
    if (params_.count(n)) return true;
    for (const auto& l : locals_)
      if (l == n) return true;
    auto it = decls_.find(n);
    return it != decls_.end() && it->second == DeclKind::Var;
  }

  // Ground form: literals, parameters, arithmetic over those, oracle queries.
  bool is_ground_form(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Lit:
        return true;
      case ExprKind::Name:
        return params_.count(e.name) > 0;
      case ExprKind::Cell:
        return false;
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
      case ExprKind::OracleSuffix:
      case ExprKind::OracleDelta: {
        for (const auto& a : e.args)
          if (!is_ground_form(a)) return false;
        return true;
      }
    }
    return false;
  }

  bool contains_oracle(const Expr& e) const {
    if (e.kind == ExprKind::OracleSuffix || e.kind == ExprKind::OracleDelta)
      return true;
    for (const auto& a : e.args)
      if (contains_oracle(a)) return true;
    return false;
  }

  bool contains_oracle(const Constraint& c) const {
    for (const auto& e : c.exprs)
      if (contains_oracle(e)) return true;
    if (c.set.oracle_from) return true;
    for (const auto& e : c.set.index)
      if (contains_oracle(e)) return true;
    for (const auto& p : c.parts)
      if (contains_oracle(p)) return true;
    return false;
  }

  void check_expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Lit:
        return;
      case ExprKind::Name:
        if (!name_in_scope(e.name))
          report(ErrCode::UndeclaredVariable,
                 "'" + e.name + "' is not a parameter, local or declared "
                 "variable", e.pos);
        return;
      case ExprKind::Cell: {
        auto it = decls_.find(e.name);
        if (it == decls_.end() || it->second != DeclKind::Stream) {
          report(ErrCode::UndeclaredVariable,
                 "'" + e.name + "' is not a declared stream", e.pos);
        }
        if (!is_ground_form(e.args[0]))
          report(ErrCode::CellIndexNotGround,
                 "index of '" + e.name + "[...]' must be built from "
                 "parameters and literals", e.pos);
        check_ground_leaves(e.args[0]);
        return;
      }
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
        for (const auto& a : e.args) check_expr(a);
        return;
      case ExprKind::OracleSuffix:
      case ExprKind::OracleDelta:
        for (const auto& a : e.args) {
          if (!is_ground_form(a))
            report(ErrCode::OracleIndexNotGround,
                   "oracle index must be built from parameters and literals",
                   e.pos);
          check_ground_leaves(a);
        }
        return;
    }
  }

  // Report unknown names inside a ground-form expression (params only).
  void check_ground_leaves(const Expr& e) {
    if (e.kind == ExprKind::Name && !params_.count(e.name) &&
        !name_in_scope(e.name)) {
      report(ErrCode::UndeclaredVariable,
             "'" + e.name + "' is not a parameter, local or declared variable",
             e.pos);
    }
    for (const auto& a : e.args) check_ground_leaves(a);
  }

  void check_constraint(const Constraint& c) {
    switch (c.kind) {
      case ConstraintKind::True:
        return;
      case ConstraintKind::Rel:
      case ConstraintKind::Between:
        for (const auto& e : c.exprs) check_expr(e);
        return;
      case ConstraintKind::Member: {
        check_expr(c.exprs[0]);
        if (c.set.oracle_from) {
          if (!is_ground_form(c.set.index[0]))
            report(ErrCode::OracleIndexNotGround,
                   "oracle.from index must be built from parameters and "
                   "literals", c.pos);
          check_ground_leaves(c.set.index[0]);
          return;
        }
        auto it = decls_.find(c.set.name);
        bool indexed = !c.set.index.empty();
        DeclKind want = indexed ? DeclKind::SetStream : DeclKind::Set;
        if (it == decls_.end() || it->second != want) {
          report(ErrCode::UndeclaredVariable,
                 "'" + c.set.name + "' is not a declared " +
                     (indexed ? "set stream" : "set"), c.pos);
        }
        if (indexed) {
          if (!is_ground_form(c.set.index[0]))
            report(ErrCode::CellIndexNotGround,
                   "index of '" + c.set.name + "[...]' must be built from "
                   "parameters and literals", c.pos);
          check_ground_leaves(c.set.index[0]);
        }
        return;
      }
      case ConstraintKind::Conj:
        for (const auto& p : c.parts) check_constraint(p);
        return;
    }
  }

  void check_process(const Process& p, bool guarded) {
    switch (p.kind) {
      case ProcKind::Skip:
        return;
      case ProcKind::Tell:
        if (contains_oracle(p.guard))
          report(ErrCode::OracleNotTellable,
                 "oracle terms are read-only and cannot be told", p.pos);
        check_constraint(p.guard);
        return;
      case ProcKind::When:
        check_constraint(p.guard);
        check_process(p.children[0], guarded);
        return;
      case ProcKind::Unless:
        check_constraint(p.guard);
        // the continuation runs in the next unit
        check_process(p.children[0], true);
        return;
      case ProcKind::Next:
        check_process(p.children[0], true);
        return;
      case ProcKind::Star:
        // a star delay of zero keeps the body in this unit
        check_process(p.children[0], guarded);
        return;
      case ProcKind::Bang:
        check_process(p.children[0], guarded);
        return;
      case ProcKind::Par:
        for (const auto& ch : p.children) check_process(ch, guarded);
        return;
      case ProcKind::Local:
        locals_.push_back(p.name);
        check_process(p.children[0], guarded);
        locals_.pop_back();
        return;
      case ProcKind::Sum: {
        if (p.children.empty())
          report(ErrCode::EmptySumRange, "sum has no branches", p.pos);
        for (const auto& g : p.branch_guards) check_constraint(g);
        for (const auto& ch : p.children) check_process(ch, guarded);
        return;
      }
      case ProcKind::OracleAdd:
        // native call; the argument may read the store
        check_expr(p.args[0]);
        return;
      case ProcKind::Call: {
        auto it = defs_.find(p.name);
        if (it == defs_.end()) {
          report(ErrCode::UnknownDefinition,
                 "call to unknown definition '" + p.name + "'", p.pos);
        } else {
          if (it->second != p.args.size())
            report(ErrCode::ArityMismatch,
                   "'" + p.name + "' takes " + std::to_string(it->second) +
                       " argument(s), got " + std::to_string(p.args.size()),
                   p.pos);
          edges_.push_back(CallEdge{current_def_, p.name, guarded, p.pos});
        }
        for (const auto& a : p.args) {
          if (!is_ground_form(a))
            report(ErrCode::CallArgNotGround,
                   "argument of '" + p.name + "' must be built from "
                   "parameters, literals and oracle terms", p.pos);
          check_ground_leaves(a);
        }
        return;
      }
    }
  }

  // A cycle is fine as long as some edge on it crosses a Next. Equivalently:
  // the subgraph of unguarded edges must be acyclic.
  void check_guardedness() {
    current_def_ = "definitions";
    std::map<std::string, std::vector<const CallEdge*>> adj;
    for (const auto& e : edges_)
      if (!e.guarded && e.from != "system") adj[e.from].push_back(&e);

    std::map<std::string, int> color;  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    bool reported = false;

    std::function<void(const std::string&)> dfs = [&](const std::string& v) {
      color[v] = 1;
      stack.push_back(v);
      for (const CallEdge* e : adj[v]) {
        if (reported) return;
        int c = color[e->to];
        if (c == 1) {
          std::string cycle;
          auto it = std::find(stack.begin(), stack.end(), e->to);
          for (; it != stack.end(); ++it) cycle += *it + " -> ";
          cycle += e->to;
          current_def_ = e->from;
          report(ErrCode::RecursionNotGuarded,
                 "call cycle never crosses a next: " + cycle, e->pos);
          reported = true;
          return;
        }
        if (c == 0) dfs(e->to);
      }
      stack.pop_back();
      color[v] = 2;
    };
    for (const auto& [name, _] : adj) {
      (void)_;
      if (!reported && color[name] == 0) dfs(name);
    }
  }

  const ModelAst& model_;
  std::vector<ValidationError> errors_;
  std::map<std::string, DeclKind> decls_;
  std::map<std::string, size_t> defs_;
  std::set<std::string> params_;
  std::vector<std::string> locals_;
  std::string current_def_;
  std::vector<CallEdge> edges_;
};

}  // namespace

std::vector<ValidationError> validate(const ast::ModelAst& model) {
  return Checker(model).run();
}

}  // namespace ntcc
