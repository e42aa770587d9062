#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ntcc/ast.hpp"
#include "ntcc/models.hpp"
#include "ntcc/parser.hpp"
#include "ntcc/validate.hpp"

using namespace ntcc;

namespace {

ast::ModelAst must_parse(const std::string& src) {
  ParseResult r = parse_model(src);
  if (!r.ok()) {
    CAPTURE(r.error->message());
    REQUIRE(r.ok());
  }
  return std::move(*r.model);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("every shipped model parses and validates cleanly") {
  for (const std::string& name : models::builtin_names()) {
    CAPTURE(name);
    ParseResult r = parse_model(models::builtin_source(name));
    REQUIRE(r.ok());
    auto errs = validate(*r.model);
    for (const auto& e : errs) CAPTURE(e.message);
    CHECK(errs.empty());
  }
}

TEST_CASE("declarations: every form round-trips into the ast") {
  ast::ModelAst m = must_parse(
      "var pitch : 0..127;\n"
      "stream work : 0..4;\n"
      "persistent stream notes : -2..99;\n"
      "set bag;\n"
      "persistent set keep;\n"
      "set stream wait;\n"
      "alias C = 60;\n"
      "outputs pitch, work;\n"
      "system = tell(pitch = C);\n");
  REQUIRE(m.decls.size() == 6);
  CHECK(m.decls[0].kind == ast::DeclKind::Var);
  CHECK(m.decls[1].kind == ast::DeclKind::Stream);
  CHECK_FALSE(m.decls[1].persistent);
  CHECK(m.decls[2].persistent);
  CHECK(m.decls[2].lo == -2);
  CHECK(m.decls[3].kind == ast::DeclKind::Set);
  CHECK(m.decls[4].persistent);
  CHECK(m.decls[5].kind == ast::DeclKind::SetStream);
  CHECK(m.outputs == std::vector<std::string>{"pitch", "work"});
  // The alias was folded into a literal during parsing.
  REQUIRE(m.system);
  CHECK(m.system->guard.exprs[1].kind == ast::ExprKind::Lit);
  CHECK(m.system->guard.exprs[1].lit == 60);
}

TEST_CASE("definition parameters shadow aliases") {
  ast::ModelAst m = must_parse(
      "alias C = 60;\n"
      "var x : 0..127;\n"
      "def P(C) = tell(x = C);\n"
      "system = P(1);\n");
  // Inside P the name C is the parameter, not the alias literal.
  const ast::Process& tell = m.definitions[0].body;
  CHECK(tell.guard.exprs[1].kind == ast::ExprKind::Name);
  CHECK(tell.guard.exprs[1].name == "C");
}

TEST_CASE("relation chains: two strict less-thans make a between") {
  ast::ModelAst m = must_parse(
      "var x : 0..9;\n"
      "system = when 1 < x < 5 do skip;\n");
  CHECK(m.system->guard.kind == ast::ConstraintKind::Between);
}

TEST_CASE("relation chains: mixed operators make a conjunction") {
  ast::ModelAst m = must_parse(
      "var x : 0..9;\n"
      "system = when 1 < x >= 3 do skip;\n");
  const ast::Constraint& g = m.system->guard;
  REQUIRE(g.kind == ast::ConstraintKind::Conj);
  REQUIRE(g.parts.size() == 2);
  CHECK(g.parts[0].op == ast::RelOp::Lt);
  CHECK(g.parts[1].op == ast::RelOp::Ge);
  // Both parts share the middle expression.
  CHECK(g.parts[0].exprs[1] == g.parts[1].exprs[0]);
}

TEST_CASE("'<>' parses as disequality, 'and' chains flatten") {
  ast::ModelAst m = must_parse(
      "var x : 0..9;\nvar y : 0..9;\n"
      "system = when x <> 3 and y = 1 and x < y do skip;\n");
  const ast::Constraint& g = m.system->guard;
  REQUIRE(g.kind == ast::ConstraintKind::Conj);
  CHECK(g.parts.size() == 3);
  CHECK(g.parts[0].op == ast::RelOp::Ne);
}

TEST_CASE("par over expands at parse time with substituted arguments") {
  ast::ModelAst m = must_parse(
      "def C(i) = skip;\n"
      "system = par over i in {1..3} { C(i * 10) };\n");
  REQUIRE(m.system->kind == ast::ProcKind::Par);
  REQUIRE(m.system->children.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const ast::Process& call = m.system->children[(size_t)k];
    CHECK(call.kind == ast::ProcKind::Call);
    // i was substituted, the arithmetic folds later at resolution time.
    CHECK(call.args[0].args[0].lit == k + 1);
  }
}

TEST_CASE("sum over expands branches, comma lists and ranges mix") {
  ast::ModelAst m = must_parse(
      "var n : 0..9;\n"
      "system = sum over i in {1, 3..4, 7} { when n = i do skip };\n");
  REQUIRE(m.system->kind == ast::ProcKind::Sum);
  REQUIRE(m.system->branch_guards.size() == 4);
  std::vector<long long> seen;
  for (const auto& g : m.system->branch_guards) seen.push_back(g.exprs[1].lit);
  CHECK(seen == std::vector<long long>{1, 3, 4, 7});
}

TEST_CASE("comments and grouping parens are transparent") {
  ast::ModelAst m = must_parse(
      "-- a leading comment\n"
      "var x : 0..9; -- trailing\n"
      "system = (tell(x = 1) || next (skip));\n");
  CHECK(m.system->kind == ast::ProcKind::Par);
}

TEST_CASE("parse errors carry exact positions") {
  ParseResult r = parse_model("var x : 0..5;\nsystem = when x = do skip;\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->pos.line == 2);
  CHECK(r.error->pos.col == 19);
  CHECK(r.error->expected == "expression");
  CHECK(r.error->found == "do");
  CHECK(r.error->message() == "parse error at 2:19: expected expression, found do");

  r = parse_model("var x : 0..5");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->expected == "';'");

  r = parse_model("var x : 0..5;\nsystem = sum { tell(x = 1) };\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->pos.line == 2);
  CHECK(r.error->expected == "'when'");
}

TEST_CASE("tell lists: comma-separated constraints, strict tail") {
  ConstraintParseResult r = parse_tell_list("notes[1] = 60, go = 1");
  REQUIRE(r.ok());
  REQUIRE(r.tells->size() == 2);
  CHECK((*r.tells)[0].kind == ast::ConstraintKind::Rel);
  CHECK((*r.tells)[0].exprs[0].kind == ast::ExprKind::Cell);

  CHECK(parse_tell_list("").ok());
  CHECK(parse_tell_list("x = ").ok() == false);
  CHECK(parse_tell_list("x = 1 y = 2").ok() == false);  // missing comma
  CHECK(parse_tell_list("3 in wait[1]").ok());
}

TEST_CASE("the negative corpus hits each validation code it documents") {
  const std::vector<std::string> files = {
      "recursion_not_guarded.ntcc", "recursion_star_not_guarded.ntcc",
      "arity_mismatch.ntcc",        "undeclared_variable.ntcc",
      "unknown_definition.ntcc",    "empty_sum_range.ntcc",
      "duplicate_definition.ntcc",  "duplicate_declaration.ntcc",
      "duplicate_system.ntcc",      "missing_system.ntcc",
      "oracle_not_tellable.ntcc",   "oracle_index_not_ground.ntcc",
      "call_arg_not_ground.ntcc",   "cell_index_not_ground.ntcc",
  };
  const std::vector<ErrCode> all_codes = {
      ErrCode::RecursionNotGuarded, ErrCode::ArityMismatch,
      ErrCode::UndeclaredVariable,  ErrCode::UnknownDefinition,
      ErrCode::EmptySumRange,       ErrCode::DuplicateDefinition,
      ErrCode::DuplicateDeclaration, ErrCode::DuplicateSystem,
      ErrCode::MissingSystem,       ErrCode::OracleNotTellable,
      ErrCode::OracleIndexNotGround, ErrCode::CallArgNotGround,
      ErrCode::CellIndexNotGround,
  };
  std::set<ErrCode> covered;
  for (const std::string& f : files) {
    CAPTURE(f);
    std::string src =
        read_file(std::string(NTCC_SOURCE_DIR) + "/tests/negative/" + f);
    // Each file documents its expected code on the first line.
    auto tag = src.find("-- expect: ");
    REQUIRE(tag != std::string::npos);
    std::string code_name =
        src.substr(tag + 11, src.find('\n', tag) - tag - 11);
    ast::ModelAst m = must_parse(src);
    auto errs = validate(m);
    REQUIRE_FALSE(errs.empty());
    bool hit = false;
    for (const auto& e : errs) {
      CAPTURE(e.message);
      if (to_string(e.code) == code_name) {
        hit = true;
        covered.insert(e.code);
      }
    }
    CHECK(hit);
  }
  // Together the corpus exercises every stable code.
  for (ErrCode c : all_codes) {
    CAPTURE(to_string(c));
    CHECK(covered.count(c) == 1);
  }
}

TEST_CASE("validation errors carry the definition and position") {
  ParseResult r = parse_model("def A() = A();\nsystem = A();\n");
  REQUIRE(r.ok());
  auto errs = validate(*r.model);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].code == ErrCode::RecursionNotGuarded);
  CHECK(errs[0].def_name == "A");
  CHECK(errs[0].message.find("RecursionNotGuarded") != std::string::npos);
}

TEST_CASE("guardedness: unless and next guard, star and bang do not") {
  auto codes_of = [](const std::string& src) {
    ParseResult r = parse_model(src);
    REQUIRE(r.ok());
    std::set<ErrCode> out;
    for (const auto& e : validate(*r.model)) out.insert(e.code);
    return out;
  };
  CHECK(codes_of("def A() = next A();\nsystem = A();\n").empty());
  CHECK(codes_of("var x : 0..1;\ndef A() = unless x = 1 next A();\nsystem = A();\n")
            .empty());
  CHECK(codes_of("var x : 0..1;\ndef A() = when x = 1 do next A();\nsystem = A();\n")
            .empty());
  CHECK(codes_of("def A() = bang A();\nsystem = A();\n")
            .count(ErrCode::RecursionNotGuarded) == 1);
  CHECK(codes_of("def A() = B();\ndef B() = next A();\nsystem = A();\n").empty());
  CHECK(codes_of("def A() = B();\ndef B() = A();\nsystem = A();\n")
            .count(ErrCode::RecursionNotGuarded) == 1);
}

// ---------------------------------------------------------------------------
// Print/parse round-trip over randomly generated terms.

namespace {

struct Gen {
  std::mt19937_64 g;
  explicit Gen(uint64_t seed) : g(seed) {}
  long long ll(long long lo, long long hi) {
    return lo + static_cast<long long>(g() % (uint64_t)(hi - lo + 1));
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[(size_t)ll(0, (long long)v.size() - 1)];
  }
};

const std::vector<std::string> kVarNames = {"x", "y", "acc", "note", "k2"};
const std::vector<std::string> kCellNames = {"beat", "workq"};
const std::vector<std::string> kSetNames = {"ws", "bag"};
const std::vector<std::string> kCallNames = {"P", "Q", "Improv", "Cell9"};

ast::Expr gen_expr(Gen& g, int depth) {
  ast::Expr e;
  switch (g.ll(0, depth > 0 ? 6 : 2)) {
    case 0:
      e.kind = ast::ExprKind::Lit;
      e.lit = g.ll(-9, 99);
      break;
    case 1:
    case 2:
      e.kind = ast::ExprKind::Name;
      e.name = g.pick(kVarNames);
      break;
    case 3: {
      e.kind = ast::ExprKind::Cell;
      e.name = g.pick(kCellNames);
      e.args.push_back(gen_expr(g, depth - 1));
      break;
    }
    case 4: {
      e.kind = g.ll(0, 2) == 0   ? ast::ExprKind::Mul
               : g.ll(0, 1) == 0 ? ast::ExprKind::Add
                                 : ast::ExprKind::Sub;
      e.args.push_back(gen_expr(g, depth - 1));
      e.args.push_back(gen_expr(g, depth - 1));
      break;
    }
    case 5:
      e.kind = ast::ExprKind::OracleSuffix;
      e.args.push_back(gen_expr(g, depth - 1));
      break;
    default:
      e.kind = ast::ExprKind::OracleDelta;
      e.args.push_back(gen_expr(g, depth - 1));
      e.args.push_back(gen_expr(g, depth - 1));
      break;
  }
  return e;
}

ast::Constraint gen_constraint(Gen& g, int depth) {
  ast::Constraint c;
  switch (g.ll(0, depth > 0 ? 4 : 3)) {
    case 0:
      c.kind = ast::ConstraintKind::True;
      break;
    case 1:
      c.kind = ast::ConstraintKind::Rel;
      c.op = static_cast<ast::RelOp>(g.ll(0, 5));
      c.exprs = {gen_expr(g, depth), gen_expr(g, depth)};
      break;
    case 2:
      c.kind = ast::ConstraintKind::Between;
      c.exprs = {gen_expr(g, depth), gen_expr(g, depth), gen_expr(g, depth)};
      break;
    case 3: {
      c.kind = ast::ConstraintKind::Member;
      c.exprs = {gen_expr(g, depth)};
      if (g.ll(0, 2) == 0) {
        c.set.oracle_from = true;
        c.set.index.push_back(gen_expr(g, depth));
      } else {
        c.set.name = g.pick(kSetNames);
        if (g.ll(0, 1)) c.set.index.push_back(gen_expr(g, depth));
      }
      break;
    }
    default: {
      c.kind = ast::ConstraintKind::Conj;  // flat only: and-chains don't nest
      long long n = g.ll(2, 3);
      for (long long i = 0; i < n; ++i) {
        ast::Constraint part;
        part.kind = ast::ConstraintKind::Rel;
        part.op = static_cast<ast::RelOp>(g.ll(0, 5));
        part.exprs = {gen_expr(g, depth - 1), gen_expr(g, depth - 1)};
        c.parts.push_back(std::move(part));
      }
      break;
    }
  }
  return c;
}

ast::Process gen_proc(Gen& g, int depth) {
  ast::Process p;
  switch (g.ll(0, depth > 0 ? 11 : 2)) {
    case 0:
      p.kind = ast::ProcKind::Skip;
      break;
    case 1:
      p.kind = ast::ProcKind::Tell;
      p.guard = gen_constraint(g, 1);
      break;
    case 2: {
      p.kind = ast::ProcKind::Call;
      p.name = g.pick(kCallNames);
      long long n = g.ll(0, 2);
      for (long long i = 0; i < n; ++i) p.args.push_back(gen_expr(g, 1));
      break;
    }
    case 3:
      p.kind = ast::ProcKind::When;
      p.guard = gen_constraint(g, 1);
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    case 4:
      p.kind = ast::ProcKind::Unless;
      p.guard = gen_constraint(g, 1);
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    case 5:
      p.kind = ast::ProcKind::Next;
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    case 6:
      p.kind = ast::ProcKind::Star;
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    case 7:
      p.kind = ast::ProcKind::Bang;
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    case 8: {
      p.kind = ast::ProcKind::Local;
      p.name = g.pick(kVarNames);
      p.lo = g.ll(-3, 3);
      p.hi = p.lo + g.ll(0, 5);
      p.children.push_back(gen_proc(g, depth - 1));
      break;
    }
    case 9:
      p.kind = ast::ProcKind::OracleAdd;
      p.args.push_back(gen_expr(g, 1));
      break;
    case 10: {
      p.kind = ast::ProcKind::Sum;
      long long n = g.ll(1, 3);
      for (long long i = 0; i < n; ++i) {
        p.branch_guards.push_back(gen_constraint(g, 1));
        p.children.push_back(gen_proc(g, depth - 1));
      }
      break;
    }
    default: {
      p.kind = ast::ProcKind::Par;
      long long n = g.ll(2, 3);
      for (long long i = 0; i < n; ++i)
        p.children.push_back(gen_proc(g, depth - 1));
      break;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("1000 random terms survive print -> parse -> print unchanged") {
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    CAPTURE(seed);
    Gen g(seed);
    ast::ModelAst m;
    if (seed % 3 == 0) {
      ast::Definition d;
      d.name = "D";
      d.params = {"p", "q"};
      d.body = gen_proc(g, 3);
      m.definitions.push_back(std::move(d));
    }
    m.system = gen_proc(g, 3);

    std::string once = ast::print_model(m);
    ParseResult r = parse_model(once);
    if (!r.ok()) {
      CAPTURE(once);
      CAPTURE(r.error->message());
      REQUIRE(r.ok());
    }
    std::string twice = ast::print_model(*r.model);
    if (once != twice) {
      CAPTURE(once);
      CAPTURE(twice);
    }
    CHECK(once == twice);
  }
}
