#include "ntcc/ast.hpp"

#include <sstream>

namespace ntcc::ast {

Expr lit(long long v) {
  Expr e;
  e.kind = ExprKind::Lit;
  e.lit = v;
  return e;
}

bool Expr::operator==(const Expr& o) const {
  return kind == o.kind && lit == o.lit && name == o.name && args == o.args;
}

bool SetRef::operator==(const SetRef& o) const {
  return oracle_from == o.oracle_from && name == o.name && index == o.index;
}

bool Constraint::operator==(const Constraint& o) const {
  return kind == o.kind && op == o.op && exprs == o.exprs && set == o.set &&
         parts == o.parts;
}

bool Process::operator==(const Process& o) const {
  return kind == o.kind && guard == o.guard && children == o.children &&
         branch_guards == o.branch_guards && name == o.name &&
         args == o.args && lo == o.lo && hi == o.hi;
}

namespace {

// Precedence for printing: additive 1, multiplicative 2, atoms 3.
int prec(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
      return 2;
    default:
      return 3;
  }
}

void print_expr_into(const Expr& e, std::ostringstream& out, int parent_prec) {
  int my = prec(e.kind);
  bool parens = my < parent_prec;
  switch (e.kind) {
    case ExprKind::Lit:
      out << e.lit;
      return;
    case ExprKind::Name:
      out << e.name;
      return;
    case ExprKind::Cell:
      out << e.name << "[";
      print_expr_into(e.args[0], out, 0);
      out << "]";
      return;
    case ExprKind::OracleSuffix:
      out << "oracle.S[";
      print_expr_into(e.args[0], out, 0);
      out << "]";
      return;
    case ExprKind::OracleDelta:
      out << "oracle.delta[";
      print_expr_into(e.args[0], out, 0);
      out << ", ";
      print_expr_into(e.args[1], out, 0);
      out << "]";
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      if (parens) out << "(";
      const char* op = e.kind == ExprKind::Add ? " + "
                       : e.kind == ExprKind::Sub ? " - "
                                                 : " * ";
      // Left-associative chain: the left child may share our precedence, the
      // right child must bind tighter.
      print_expr_into(e.args[0], out, my);
      out << op;
      print_expr_into(e.args[1], out, my + 1);
      if (parens) out << ")";
      return;
    }
  }
}

const char* rel_text(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "<>";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

void print_set_ref(const SetRef& s, std::ostringstream& out) {
  if (s.oracle_from) {
    out << "oracle.from[";
    print_expr_into(s.index[0], out, 0);
    out << "]";
    return;
  }
  out << s.name;
  if (!s.index.empty()) {
    out << "[";
    print_expr_into(s.index[0], out, 0);
    out << "]";
  }
}

void print_constraint_into(const Constraint& c, std::ostringstream& out,
                           bool in_conj) {
  switch (c.kind) {
    case ConstraintKind::True:
      out << "true";
      return;
    case ConstraintKind::Rel:
      print_expr_into(c.exprs[0], out, 0);
      out << " " << rel_text(c.op) << " ";
      print_expr_into(c.exprs[1], out, 0);
      return;
    case ConstraintKind::Between:
      print_expr_into(c.exprs[0], out, 0);
      out << " < ";
      print_expr_into(c.exprs[1], out, 0);
      out << " < ";
      print_expr_into(c.exprs[2], out, 0);
      return;
    case ConstraintKind::Member:
      print_expr_into(c.exprs[0], out, 0);
      out << " in ";
      print_set_ref(c.set, out);
      return;
    case ConstraintKind::Conj: {
      if (in_conj) out << "(";
      bool first = true;
      for (const auto& part : c.parts) {
        if (!first) out << " and ";
        first = false;
        print_constraint_into(part, out, true);
      }
      if (in_conj) out << ")";
      return;
    }
  }
}

std::string ind(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

// Children of prefix forms (when/next/...) must be single prefix processes in
// the grammar; a Par child is printed in its braced form so it reparses.
void print_process_into(const Process& p, std::ostringstream& out, int indent,
                        bool prefix_position);

void print_body(const Process& body, std::ostringstream& out, int indent) {
  print_process_into(body, out, indent, true);
}

void print_process_into(const Process& p, std::ostringstream& out, int indent,
                        bool prefix_position) {
  switch (p.kind) {
    case ProcKind::Skip:
      out << "skip";
      return;
    case ProcKind::Tell:
      out << "tell(" << print_constraint(p.guard) << ")";
      return;
    case ProcKind::When:
      out << "when " << print_constraint(p.guard) << " do ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Unless:
      out << "unless " << print_constraint(p.guard) << " next ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Next:
      out << "next ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Star:
      out << "star ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Bang:
      out << "bang ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Local:
      out << "local " << p.name << ": " << p.lo << ".." << p.hi << " in ";
      print_body(p.children[0], out, indent);
      return;
    case ProcKind::Call: {
      out << p.name;
      if (!p.args.empty()) {
        out << "(";
        for (size_t i = 0; i < p.args.size(); ++i) {
          if (i) out << ", ";
          out << print_expr(p.args[i]);
        }
        out << ")";
      }
      return;
    }
    case ProcKind::OracleAdd:
      out << "oracle.add(" << print_expr(p.args[0]) << ")";
      return;
    case ProcKind::Sum: {
      out << "sum {\n";
      for (size_t i = 0; i < p.children.size(); ++i) {
        out << ind(indent + 1) << "when " << print_constraint(p.branch_guards[i])
            << " do ";
        print_process_into(p.children[i], out, indent + 1, true);
        if (i + 1 < p.children.size()) out << " ;";
        out << "\n";
      }
      out << ind(indent) << "}";
      return;
    }
    case ProcKind::Par: {
      if (prefix_position) {
        out << "par {\n" << ind(indent + 1);
        for (size_t i = 0; i < p.children.size(); ++i) {
          if (i) out << "\n" << ind(indent + 1) << "|| ";
          print_process_into(p.children[i], out, indent + 1, true);
        }
        out << "\n" << ind(indent) << "}";
      } else {
        for (size_t i = 0; i < p.children.size(); ++i) {
          if (i) out << " || ";
          print_process_into(p.children[i], out, indent, true);
        }
      }
      return;
    }
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  print_expr_into(e, out, 0);
  return out.str();
}

std::string print_constraint(const Constraint& c) {
  std::ostringstream out;
  print_constraint_into(c, out, false);
  return out.str();
}

std::string print_process(const Process& p, int indent) {
  std::ostringstream out;
  print_process_into(p, out, indent, false);
  return out.str();
}

std::string print_model(const ModelAst& m) {
  std::ostringstream out;
  for (const auto& d : m.decls) {
    switch (d.kind) {
      case DeclKind::Var:
        out << "var " << d.name << ": " << d.lo << ".." << d.hi << ";\n";
        break;
      case DeclKind::Stream:
        out << (d.persistent ? "persistent " : "") << "stream " << d.name
            << ": " << d.lo << ".." << d.hi << ";\n";
        break;
      case DeclKind::Set:
        out << (d.persistent ? "persistent " : "") << "set " << d.name
            << ";\n";
        break;
      case DeclKind::SetStream:
        out << (d.persistent ? "persistent " : "") << "set stream " << d.name
            << ";\n";
        break;
    }
  }
  if (!m.outputs.empty()) {
    out << "outputs ";
    for (size_t i = 0; i < m.outputs.size(); ++i) {
      if (i) out << ", ";
      out << m.outputs[i];
    }
    out << ";\n";
  }
  for (const auto& def : m.definitions) {
    out << "def " << def.name;
    if (!def.params.empty()) {
      out << "(";
      for (size_t i = 0; i < def.params.size(); ++i) {
        if (i) out << ", ";
        out << def.params[i];
      }
      out << ")";
    }
    out << " = " << print_process(def.body, 0) << "\n";
  }
  if (m.system) {
    out << "system = " << print_process(*m.system, 0) << ";\n";
  }
  return out.str();
}

Expr subst(const Expr& e, const std::string& name, long long value) {
  if (e.kind == ExprKind::Name && e.name == name) return lit(value);
  Expr out = e;
  for (auto& a : out.args) a = subst(a, name, value);
  return out;
}

Constraint subst(const Constraint& c, const std::string& name,
                 long long value) {
  Constraint out = c;
  for (auto& e : out.exprs) e = subst(e, name, value);
  for (auto& ix : out.set.index) ix = subst(ix, name, value);
  for (auto& part : out.parts) part = subst(part, name, value);
  return out;
}

Process subst(const Process& p, const std::string& name, long long value) {
  Process out = p;
  // A local with the same name shadows the binder in its body.
  if (p.kind == ProcKind::Local && p.name == name) return out;
  out.guard = subst(p.guard, name, value);
  for (auto& g : out.branch_guards) g = subst(g, name, value);
  for (auto& a : out.args) a = subst(a, name, value);
  for (auto& ch : out.children) ch = subst(ch, name, value);
  return out;
}

}  // namespace ntcc::ast
