#include "ntcc/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

// Hand-rolled lexer + recursive descent. `sum over` / `par over` replication
// is expanded right here (binder substituted with each range value), and
// alias names become literals, so the resulting tree is closed: printing it
// and reparsing yields the identical tree.

namespace ntcc {
namespace {

using namespace ast;

enum class Tok {
  End, Int, Ident,
  // keywords
  KwVar, KwStream, KwSet, KwPersistent, KwAlias, KwOutputs, KwDef, KwSystem,
  KwTell, KwWhen, KwDo, KwUnless, KwNext, KwPar, KwSum, KwOver, KwIn, KwStar,
  KwBang, KwLocal, KwSkip, KwTrue, KwAnd,
  // punctuation
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi, Colon,
  Dot, DotDot, ParBar,  // "||"
  Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, StarOp,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long value = 0;
  SourcePos pos;
};

struct ParseThrow {
  ParseError err;
};

[[noreturn]] void fail_at(SourcePos pos, const std::string& expected,
                          const std::string& found) {
  throw ParseThrow{ParseError{pos, expected, found}};
}

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"var", Tok::KwVar},       {"stream", Tok::KwStream},
      {"set", Tok::KwSet},       {"persistent", Tok::KwPersistent},
      {"alias", Tok::KwAlias},   {"outputs", Tok::KwOutputs},
      {"def", Tok::KwDef},       {"system", Tok::KwSystem},
      {"tell", Tok::KwTell},     {"when", Tok::KwWhen},
      {"do", Tok::KwDo},         {"unless", Tok::KwUnless},
      {"next", Tok::KwNext},     {"par", Tok::KwPar},
      {"sum", Tok::KwSum},       {"over", Tok::KwOver},
      {"in", Tok::KwIn},         {"star", Tok::KwStar},
      {"bang", Tok::KwBang},     {"local", Tok::KwLocal},
      {"skip", Tok::KwSkip},     {"true", Tok::KwTrue},
      {"and", Tok::KwAnd},
  };
  return kw;
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto pos_here = [&]() { return SourcePos{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = pos_here();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (...) {
        fail_at(t.pos, "integer in 64-bit range", t.text);
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      t.text = src.substr(i, j - i);
      auto it = keywords().find(t.text);
      t.kind = it == keywords().end() ? Tok::Ident : it->second;
      advance(j - i);
      out.push_back(t);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two('|', '|')) { t.kind = Tok::ParBar; t.text = "||"; advance(2); }
    else if (two('.', '.')) { t.kind = Tok::DotDot; t.text = ".."; advance(2); }
    else if (two('<', '>')) { t.kind = Tok::Ne; t.text = "<>"; advance(2); }
    else if (two('<', '=')) { t.kind = Tok::Le; t.text = "<="; advance(2); }
    else if (two('>', '=')) { t.kind = Tok::Ge; t.text = ">="; advance(2); }
    else {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case ',': t.kind = Tok::Comma; break;
        case ';': t.kind = Tok::Semi; break;
        case ':': t.kind = Tok::Colon; break;
        case '.': t.kind = Tok::Dot; break;
        case '=': t.kind = Tok::Eq; break;
        case '<': t.kind = Tok::Lt; break;
        case '>': t.kind = Tok::Gt; break;
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::StarOp; break;
        default:
          fail_at(t.pos, "token", std::string(1, c));
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.text = "end of input";
  end.pos = pos_here();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  ModelAst model() {
    ModelAst m;
    while (peek().kind != Tok::End) declaration(m);
    return m;
  }

  std::vector<Constraint> tell_list() {
    std::vector<Constraint> out;
    if (peek().kind == Tok::End) return out;  // empty line: no tells
    out.push_back(constraint());
    while (accept(Tok::Comma)) out.push_back(constraint());
    expect(Tok::End, "end of tell list");
    return out;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t k = at_ + ahead;
    if (k >= toks_.size()) k = toks_.size() - 1;
    return toks_[k];
  }
  const Token& next() { return toks_[at_ < toks_.size() - 1 ? at_++ : at_]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      next();
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail_at(peek().pos, what, peek().text);
    return next();
  }
  std::string ident(const std::string& what) {
    return expect(Tok::Ident, what).text;
  }

  // ---- declarations -------------------------------------------------------

  void declaration(ModelAst& m) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwVar: {
        next();
        VarDecl d;
        d.kind = DeclKind::Var;
        d.pos = t.pos;
        d.name = decl_name();
        expect(Tok::Colon, "':'");
        d.lo = signed_int();
        expect(Tok::DotDot, "'..'");
        d.hi = signed_int();
        expect(Tok::Semi, "';'");
        m.decls.push_back(d);
        return;
      }
      case Tok::KwPersistent:
      case Tok::KwStream:
      case Tok::KwSet: {
        VarDecl d;
        d.pos = t.pos;
        d.persistent = accept(Tok::KwPersistent);
        if (accept(Tok::KwStream)) {
          d.kind = DeclKind::Stream;
          d.name = decl_name();
          expect(Tok::Colon, "':'");
          d.lo = signed_int();
          expect(Tok::DotDot, "'..'");
          d.hi = signed_int();
        } else {
          expect(Tok::KwSet, "'stream' or 'set'");
          if (accept(Tok::KwStream)) {
            d.kind = DeclKind::SetStream;
          } else {
            d.kind = DeclKind::Set;
          }
          d.name = decl_name();
        }
        expect(Tok::Semi, "';'");
        m.decls.push_back(d);
        return;
      }
      case Tok::KwAlias: {
        next();
        std::string name = ident("alias name");
        if (aliases_.count(name) || declared_names_.count(name))
          fail_at(t.pos, "unique alias name", name);
        expect(Tok::Eq, "'='");
        long long v = signed_int();
        expect(Tok::Semi, "';'");
        aliases_[name] = v;
        return;
      }
      case Tok::KwOutputs: {
        next();
        m.outputs.push_back(ident("output name"));
        while (accept(Tok::Comma)) m.outputs.push_back(ident("output name"));
        expect(Tok::Semi, "';'");
        return;
      }
      case Tok::KwDef: {
        next();
        Definition def;
        def.pos = t.pos;
        def.name = ident("definition name");
        if (accept(Tok::LParen)) {
          if (peek().kind != Tok::RParen) {
            def.params.push_back(ident("parameter name"));
            while (accept(Tok::Comma))
              def.params.push_back(ident("parameter name"));
          }
          expect(Tok::RParen, "')'");
        }
        expect(Tok::Eq, "'='");
        for (const auto& p : def.params) binders_.insert(p);
        def.body = process();
        for (const auto& p : def.params) binders_.erase(binders_.find(p));
        accept(Tok::Semi);
        m.definitions.push_back(std::move(def));
        return;
      }
      case Tok::KwSystem: {
        next();
        expect(Tok::Eq, "'='");
        Process p = process();
        accept(Tok::Semi);
        if (m.system) {
          // keep the first; the duplicate is reported by validation
          m.definitions.push_back(
              Definition{"@duplicate-system", {}, std::move(p), t.pos});
        } else {
          m.system = std::move(p);
        }
        return;
      }
      default:
        fail_at(t.pos, "declaration (var/stream/set/alias/outputs/def/system)",
                t.text);
    }
  }

  std::string decl_name() {
    const Token& t = peek();
    std::string name = ident("name");
    if (aliases_.count(name))
      fail_at(t.pos, "name not colliding with an alias", name);
    declared_names_.insert(name);
    return name;
  }

  long long signed_int() {
    bool neg = accept(Tok::Minus);
    const Token& t = expect(Tok::Int, "integer");
    return neg ? -t.value : t.value;
  }

  // ---- processes ----------------------------------------------------------

  Process process() {
    Process first = prefix_process();
    if (peek().kind != Tok::ParBar) return first;
    Process par;
    par.kind = ProcKind::Par;
    par.pos = first.pos;
    par.children.push_back(std::move(first));
    while (accept(Tok::ParBar)) par.children.push_back(prefix_process());
    return par;
  }

  Process prefix_process() {
    const Token& t = peek();
    Process p;
    p.pos = t.pos;
    switch (t.kind) {
      case Tok::KwSkip:
        next();
        p.kind = ProcKind::Skip;
        return p;
      case Tok::KwTell: {
        next();
        expect(Tok::LParen, "'('");
        p.kind = ProcKind::Tell;
        p.guard = constraint();
        expect(Tok::RParen, "')'");
        return p;
      }
      case Tok::KwWhen: {
        next();
        p.kind = ProcKind::When;
        p.guard = constraint();
        expect(Tok::KwDo, "'do'");
        p.children.push_back(prefix_process());
        return p;
      }
      case Tok::KwUnless: {
        next();
        p.kind = ProcKind::Unless;
        p.guard = constraint();
        expect(Tok::KwNext, "'next'");
        p.children.push_back(prefix_process());
        return p;
      }
      case Tok::KwNext: {
        next();
        p.kind = ProcKind::Next;
        p.children.push_back(prefix_process());
        return p;
      }
      case Tok::KwStar: {
        next();
        p.kind = ProcKind::Star;
        p.children.push_back(prefix_process());
        return p;
      }
      case Tok::KwBang: {
        next();
        p.kind = ProcKind::Bang;
        p.children.push_back(prefix_process());
        return p;
      }
      case Tok::KwLocal: {
        next();
        p.kind = ProcKind::Local;
        p.name = ident("local variable name");
        expect(Tok::Colon, "':'");
        p.lo = signed_int();
        expect(Tok::DotDot, "'..'");
        p.hi = signed_int();
        expect(Tok::KwIn, "'in'");
        binders_.insert(p.name);
        p.children.push_back(prefix_process());
        binders_.erase(binders_.find(p.name));
        return p;
      }
      case Tok::KwPar:
        return par_process(t.pos);
      case Tok::KwSum:
        return sum_process(t.pos);
      case Tok::LParen: {
        next();
        Process inner = process();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "oracle") return oracle_add(t.pos);
        next();
        p.kind = ProcKind::Call;
        p.name = t.text;
        if (accept(Tok::LParen)) {
          if (peek().kind != Tok::RParen) {
            p.args.push_back(expr());
            while (accept(Tok::Comma)) p.args.push_back(expr());
          }
          expect(Tok::RParen, "')'");
        }
        return p;
      }
      default:
        fail_at(t.pos, "process", t.text);
    }
  }

  Process oracle_add(SourcePos pos) {
    next();  // oracle
    expect(Tok::Dot, "'.'");
    const Token& what = expect(Tok::Ident, "'add'");
    if (what.text != "add")
      fail_at(what.pos, "'add' (only oracle.add is a process)", what.text);
    expect(Tok::LParen, "'('");
    Process p;
    p.kind = ProcKind::OracleAdd;
    p.pos = pos;
    p.args.push_back(expr());
    expect(Tok::RParen, "')'");
    return p;
  }

  Process par_process(SourcePos pos) {
    next();  // par
    if (accept(Tok::KwOver)) {
      std::string binder = ident("binder name");
      expect(Tok::KwIn, "'in'");
      std::vector<long long> values = range_set();
      expect(Tok::LBrace, "'{'");
      binders_.insert(binder);
      Process body = process();
      binders_.erase(binders_.find(binder));
      expect(Tok::RBrace, "'}'");
      Process par;
      par.kind = ProcKind::Par;
      par.pos = pos;
      for (long long v : values)
        par.children.push_back(subst(body, binder, v));
      if (par.children.size() == 1) return std::move(par.children[0]);
      if (par.children.empty()) {
        Process skip;
        skip.kind = ProcKind::Skip;
        skip.pos = pos;
        return skip;
      }
      return par;
    }
    expect(Tok::LBrace, "'{'");
    Process inner = process();
    expect(Tok::RBrace, "'}'");
    return inner;
  }

  Process sum_process(SourcePos pos) {
    next();  // sum
    Process sum;
    sum.kind = ProcKind::Sum;
    sum.pos = pos;
    if (accept(Tok::KwOver)) {
      std::string binder = ident("binder name");
      expect(Tok::KwIn, "'in'");
      std::vector<long long> values = range_set();
      expect(Tok::LBrace, "'{'");
      expect(Tok::KwWhen, "'when'");
      binders_.insert(binder);
      Constraint guard = constraint();
      expect(Tok::KwDo, "'do'");
      Process body = prefix_process();
      binders_.erase(binders_.find(binder));
      expect(Tok::RBrace, "'}'");
      for (long long v : values) {
        sum.branch_guards.push_back(subst(guard, binder, v));
        sum.children.push_back(subst(body, binder, v));
      }
      return sum;
    }
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace) {
      expect(Tok::KwWhen, "'when'");
      sum.branch_guards.push_back(constraint());
      expect(Tok::KwDo, "'do'");
      sum.children.push_back(prefix_process());
      if (!accept(Tok::Semi)) break;
    }
    expect(Tok::RBrace, "'}'");
    return sum;
  }

  // {1..4, 7, 9..10}; items must be ground (literals/aliases only).
  std::vector<long long> range_set() {
    expect(Tok::LBrace, "'{'");
    std::vector<long long> values;
    if (peek().kind != Tok::RBrace) {
      range_item(values);
      while (accept(Tok::Comma)) range_item(values);
    }
    expect(Tok::RBrace, "'}'");
    return values;
  }

  void range_item(std::vector<long long>& values) {
    SourcePos pos = peek().pos;
    long long a = ground_value(pos);
    if (accept(Tok::DotDot)) {
      long long b = ground_value(pos);
      for (long long v = a; v <= b; ++v) values.push_back(v);
    } else {
      values.push_back(a);
    }
  }

  long long ground_value(SourcePos pos) {
    Expr e = expr();
    std::optional<long long> v = eval_ground_expr(e);
    if (!v) fail_at(pos, "ground range value", print_expr(e));
    return *v;
  }

  static std::optional<long long> eval_ground_expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Lit:
        return e.lit;
      case ExprKind::Add: {
        auto a = eval_ground_expr(e.args[0]), b = eval_ground_expr(e.args[1]);
        if (a && b) return *a + *b;
        return std::nullopt;
      }
      case ExprKind::Sub: {
        auto a = eval_ground_expr(e.args[0]), b = eval_ground_expr(e.args[1]);
        if (a && b) return *a - *b;
        return std::nullopt;
      }
      case ExprKind::Mul: {
        auto a = eval_ground_expr(e.args[0]), b = eval_ground_expr(e.args[1]);
        if (a && b) return *a * *b;
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  // ---- constraints ---------------------------------------------------

  Constraint constraint() {
    Constraint first = constraint_atom();
    if (peek().kind != Tok::KwAnd) return first;
    Constraint conj;
    conj.kind = ConstraintKind::Conj;
    conj.pos = first.pos;
    conj.parts.push_back(std::move(first));
    while (accept(Tok::KwAnd)) conj.parts.push_back(constraint_atom());
    return conj;
  }

  Constraint constraint_atom() {
    const Token& t = peek();
    if (t.kind == Tok::KwTrue) {
      next();
      Constraint c;
      c.kind = ConstraintKind::True;
      c.pos = t.pos;
      return c;
    }
    if (t.kind == Tok::LParen) {
      // Either a parenthesized constraint or a parenthesized expression that
      // starts a relation. Try the constraint reading first and backtrack.
      size_t save = at_;
      next();
      try {
        Constraint inner = constraint();
        expect(Tok::RParen, "')'");
        return inner;
      } catch (const ParseThrow&) {
        at_ = save;
      }
    }
    Expr lhs = expr();
    const Token& op_tok = peek();
    if (op_tok.kind == Tok::KwIn) {
      next();
      Constraint c;
      c.kind = ConstraintKind::Member;
      c.pos = t.pos;
      c.exprs.push_back(std::move(lhs));
      c.set = set_ref();
      return c;
    }
    std::optional<RelOp> op = rel_op();
    if (!op) fail_at(op_tok.pos, "relation ('=', '<>', '<', '<=', '>', '>=', 'in')",
                     op_tok.text);
    Expr mid = expr();
    std::optional<RelOp> op2 =
        peek_rel_op() ? rel_op() : std::optional<RelOp>{};
    if (!op2) {
      Constraint c;
      c.kind = ConstraintKind::Rel;
      c.op = *op;
      c.pos = t.pos;
      c.exprs.push_back(std::move(lhs));
      c.exprs.push_back(std::move(mid));
      return c;
    }
    Expr rhs = expr();
    if (*op == RelOp::Lt && *op2 == RelOp::Lt) {
      Constraint c;
      c.kind = ConstraintKind::Between;
      c.pos = t.pos;
      c.exprs = {std::move(lhs), std::move(mid), std::move(rhs)};
      return c;
    }
    // Mixed chain: conjunction of the two relations, middle duplicated.
    Constraint conj;
    conj.kind = ConstraintKind::Conj;
    conj.pos = t.pos;
    Constraint a, b;
    a.kind = ConstraintKind::Rel;
    a.op = *op;
    a.pos = t.pos;
    a.exprs = {std::move(lhs), mid};
    b.kind = ConstraintKind::Rel;
    b.op = *op2;
    b.pos = t.pos;
    b.exprs = {std::move(mid), std::move(rhs)};
    conj.parts.push_back(std::move(a));
    conj.parts.push_back(std::move(b));
    return conj;
  }

  bool peek_rel_op() const {
    switch (peek().kind) {
      case Tok::Eq: case Tok::Ne: case Tok::Lt:
      case Tok::Le: case Tok::Gt: case Tok::Ge:
        return true;
      default:
        return false;
    }
  }

  std::optional<RelOp> rel_op() {
    switch (peek().kind) {
      case Tok::Eq: next(); return RelOp::Eq;
      case Tok::Ne: next(); return RelOp::Ne;
      case Tok::Lt: next(); return RelOp::Lt;
      case Tok::Le: next(); return RelOp::Le;
      case Tok::Gt: next(); return RelOp::Gt;
      case Tok::Ge: next(); return RelOp::Ge;
      default: return std::nullopt;
    }
  }

  SetRef set_ref() {
    const Token& t = peek();
    SetRef s;
    if (t.kind == Tok::Ident && t.text == "oracle") {
      next();
      expect(Tok::Dot, "'.'");
      const Token& what = expect(Tok::Ident, "'from'");
      if (what.text != "from")
        fail_at(what.pos, "'from' (the only oracle set)", what.text);
      expect(Tok::LBracket, "'['");
      s.oracle_from = true;
      s.index.push_back(expr());
      expect(Tok::RBracket, "']'");
      return s;
    }
    s.name = ident("set name");
    if (accept(Tok::LBracket)) {
      s.index.push_back(expr());
      expect(Tok::RBracket, "']'");
    }
    return s;
  }

  // ---- expressions ------------------------------------------------------

  Expr expr() {
    Expr e = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool plus = next().kind == Tok::Plus;
      Expr rhs = term();
      Expr bin;
      bin.kind = plus ? ExprKind::Add : ExprKind::Sub;
      bin.pos = e.pos;
      bin.args = {std::move(e), std::move(rhs)};
      e = std::move(bin);
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (peek().kind == Tok::StarOp) {
      next();
      Expr rhs = factor();
      Expr bin;
      bin.kind = ExprKind::Mul;
      bin.pos = e.pos;
      bin.args = {std::move(e), std::move(rhs)};
      e = std::move(bin);
    }
    return e;
  }

  Expr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        next();
        Expr e = lit(t.value);
        e.pos = t.pos;
        return e;
      }
      case Tok::Minus: {
        next();
        Expr inner = factor();
        if (inner.kind == ExprKind::Lit) {
          inner.lit = -inner.lit;
          return inner;
        }
        Expr e;
        e.kind = ExprKind::Sub;
        e.pos = t.pos;
        e.args = {lit(0), std::move(inner)};
        return e;
      }
      case Tok::LParen: {
        next();
        Expr inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "oracle") return oracle_expr(t.pos);
        next();
        if (accept(Tok::LBracket)) {
          Expr cell;
          cell.kind = ExprKind::Cell;
          cell.name = t.text;
          cell.pos = t.pos;
          cell.args.push_back(expr());
          expect(Tok::RBracket, "']'");
          return cell;
        }
        if (!binders_.count(t.text)) {
          auto it = aliases_.find(t.text);
          if (it != aliases_.end()) {
            Expr e = lit(it->second);
            e.pos = t.pos;
            return e;
          }
        }
        Expr e;
        e.kind = ExprKind::Name;
        e.name = t.text;
        e.pos = t.pos;
        return e;
      }
      default:
        fail_at(t.pos, "expression", t.text);
    }
  }

  Expr oracle_expr(SourcePos pos) {
    next();  // oracle
    expect(Tok::Dot, "'.'");
    const Token& what = expect(Tok::Ident, "'S' or 'delta'");
    Expr e;
    e.pos = pos;
    if (what.text == "S") {
      e.kind = ExprKind::OracleSuffix;
      expect(Tok::LBracket, "'['");
      e.args.push_back(expr());
      expect(Tok::RBracket, "']'");
      return e;
    }
    if (what.text == "delta") {
      e.kind = ExprKind::OracleDelta;
      expect(Tok::LBracket, "'['");
      e.args.push_back(expr());
      expect(Tok::Comma, "','");
      e.args.push_back(expr());
      expect(Tok::RBracket, "']'");
      return e;
    }
    fail_at(what.pos, "'S' or 'delta' in expression position", what.text);
  }

  std::vector<Token> toks_;
  size_t at_ = 0;
  std::map<std::string, long long> aliases_;
  std::multiset<std::string> binders_;
  std::set<std::string> declared_names_;
};

}  // namespace

ParseResult parse_model(const std::string& source) {
  try {
    Parser p(source);
    ParseResult r;
    r.model = p.model();
    return r;
  } catch (const ParseThrow& t) {
    ParseResult r;
    r.error = t.err;
    return r;
  }
}

ConstraintParseResult parse_tell_list(const std::string& text) {
  try {
    Parser p(text);
    ConstraintParseResult r;
    r.tells = p.tell_list();
    return r;
  } catch (const ParseThrow& t) {
    ConstraintParseResult r;
    r.error = t.err;
    return r;
  }
}

}  // namespace ntcc
