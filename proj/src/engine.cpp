#include "ntcc/engine.hpp"

#include <algorithm>
#include <sstream>

#include "ntcc/parser.hpp"
#include "ntcc/validate.hpp"

namespace ntcc {

// --- deterministic randomness -------------------------------------------------

size_t Rng::uniform_below(size_t n) {
  if (n <= 1) return 0;
  uint64_t mask = ~0ull;
  uint64_t m = n - 1;
  // Smallest all-ones mask covering n-1.
  mask = m;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  while (true) {
    uint64_t x = raw() & mask;
    if (x < n) return (size_t)x;
  }
}

double Rng::unit_real() {
  // 53 high bits -> [0, 1).
  return (double)(raw() >> 11) * (1.0 / 9007199254740992.0);
}

size_t choose(Rng& rng, const std::vector<int>& enabled) {
  return (size_t)enabled[rng.uniform_below(enabled.size())];
}

std::optional<StarPolicy> parse_star_policy(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string head = text.substr(0, colon);
  std::string tail = text.substr(colon + 1);
  StarPolicy p;
  try {
    if (head == "fixed") {
      p.kind = StarPolicy::Kind::Fixed;
      size_t used = 0;
      p.fixed = std::stoll(tail, &used);
      if (used != tail.size() || p.fixed < 0) return std::nullopt;
    } else if (head == "geometric") {
      p.kind = StarPolicy::Kind::Geometric;
      size_t used = 0;
      p.p = std::stod(tail, &used);
      if (used != tail.size() || !(p.p > 0.0) || p.p > 1.0) return std::nullopt;
    } else if (head == "schedule") {
      p.kind = StarPolicy::Kind::Schedule;
      std::istringstream in(tail);
      std::string item;
      while (std::getline(in, item, ',')) {
        size_t used = 0;
        long long v = std::stoll(item, &used);
        if (used != item.size() || v < 0) return std::nullopt;
        p.schedule.push_back(v);
      }
      if (p.schedule.empty()) return std::nullopt;
    } else {
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return p;
}

long long star_delay(StarPolicy& policy, Rng& rng) {
  switch (policy.kind) {
    case StarPolicy::Kind::Fixed:
      return policy.fixed;
    case StarPolicy::Kind::Geometric: {
      // Failures before the first success at rate p.
      long long d = 0;
      while (rng.unit_real() >= policy.p) ++d;
      return d;
    }
    case StarPolicy::Kind::Schedule: {
      if (policy.schedule.empty()) return 0;
      size_t i = std::min(policy.next_entry, policy.schedule.size() - 1);
      if (policy.next_entry < policy.schedule.size()) ++policy.next_entry;
      return policy.schedule[i];
    }
  }
  return 0;
}

// --- scopes ---------------------------------------------------------------

struct Engine::Scope {
  std::shared_ptr<const Scope> parent;
  std::map<std::string, long long> params;
  std::map<std::string, VarId> locals;
};

// --- engine -----------------------------------------------------------------

Engine::Engine(const ast::ModelAst& model, const EngineOptions& opts)
    : model_(model), opts_(opts), rng_(opts.seed) {
  store_ = std::make_unique<Store>();
  // Wide symbol range: the oracle itself does not restrict alphabets beyond
  // what models feed it.
  oracle_ = std::make_unique<FactorOracle>(-(1ll << 40), 1ll << 40);
  store_->set_oracle(oracle_.get());

  for (const auto& d : model_.decls) {
    switch (d.kind) {
      case ast::DeclKind::Var:
        globals_[d.name] = store_->new_fd_var(d.name, d.lo, d.hi);
        break;
      case ast::DeclKind::Set:
        globals_[d.name] = store_->new_set_var(d.name, d.persistent);
        break;
      case ast::DeclKind::Stream:
        store_->declare_stream(d.name, d.lo, d.hi, d.persistent);
        break;
      case ast::DeclKind::SetStream:
        store_->declare_set_stream(d.name, d.persistent);
        break;
    }
  }
  for (const auto& def : model_.definitions) defs_[def.name] = &def;
  if (model_.system) next_.push_back(Closure{&*model_.system, nullptr});
}

Engine::~Engine() = default;

// --- name resolution ---------------------------------------------------------

long long Engine::eval_ground(const ast::Expr& e,
                              const std::shared_ptr<const Scope>& scope,
                              bool allow_store_reads) {
  switch (e.kind) {
    case ast::ExprKind::Lit:
      return e.lit;
    case ast::ExprKind::Name: {
      for (const Scope* s = scope.get(); s; s = s->parent.get()) {
        auto pit = s->params.find(e.name);
        if (pit != s->params.end()) return pit->second;
        auto lit_ = s->locals.find(e.name);
        if (lit_ != s->locals.end()) {
          if (!allow_store_reads)
            throw RuntimeModelError("'" + e.name +
                                    "' is not a compile-time value here");
          if (auto v = store_->determined(lit_->second)) return *v;
          throw RuntimeModelError("local '" + e.name +
                                  "' is not determined by the store yet");
        }
      }
      auto git = globals_.find(e.name);
      if (git != globals_.end()) {
        if (!allow_store_reads)
          throw RuntimeModelError("'" + e.name +
                                  "' is not a compile-time value here");
        if (auto v = store_->determined(git->second)) return *v;
        throw RuntimeModelError("variable '" + e.name +
                                "' is not determined by the store yet");
      }
      throw RuntimeModelError("unknown name '" + e.name + "'");
    }
    case ast::ExprKind::Cell: {
      if (!allow_store_reads)
        throw RuntimeModelError("stream cell '" + e.name +
                                "[..]' is not a compile-time value here");
      if (!store_->has_stream(e.name))
        throw RuntimeModelError("unknown stream '" + e.name + "'");
      long long idx = eval_ground(e.args[0], scope, allow_store_reads);
      VarId cv = store_->cell(e.name, idx);
      if (auto v = store_->determined(cv)) return *v;
      throw RuntimeModelError("cell '" + e.name + "[" + std::to_string(idx) +
                              "]' is not determined by the store yet");
    }
    case ast::ExprKind::Add:
    case ast::ExprKind::Sub:
    case ast::ExprKind::Mul: {
      long long a = eval_ground(e.args[0], scope, allow_store_reads);
      long long b = eval_ground(e.args[1], scope, allow_store_reads);
      long long r = 0;
      bool ov = false;
      switch (e.kind) {
        case ast::ExprKind::Add: ov = __builtin_add_overflow(a, b, &r); break;
        case ast::ExprKind::Sub: ov = __builtin_sub_overflow(a, b, &r); break;
        default: ov = __builtin_mul_overflow(a, b, &r); break;
      }
      if (ov)
        throw StoreError(StoreError::Kind::Overflow, "arithmetic overflow");
      return r;
    }
    // Oracle reads are allowed in both modes: they are ground forms whose
    // value must be defined by the time they are demanded.
    case ast::ExprKind::OracleSuffix: {
      long long st = eval_ground(e.args[0], scope, allow_store_reads);
      if (!oracle_->has_state(st))
        throw RuntimeModelError("oracle.S[" + std::to_string(st) +
                                "] is not defined yet");
      return oracle_->suffix(st);
    }
    case ast::ExprKind::OracleDelta: {
      long long st = eval_ground(e.args[0], scope, allow_store_reads);
      long long sym = eval_ground(e.args[1], scope, allow_store_reads);
      if (!oracle_->has_state(st))
        throw RuntimeModelError("oracle.delta[" + std::to_string(st) + ", " +
                                std::to_string(sym) + "] is not defined yet");
      long long t = oracle_->delta(st, sym);
      if (t < 0)
        throw RuntimeModelError("oracle.delta[" + std::to_string(st) + ", " +
                                std::to_string(sym) + "] is not defined yet");
      return t;
    }
  }
  throw RuntimeModelError("unsupported expression");
}

RExpr Engine::resolve_expr(const ast::Expr& e,
                           const std::shared_ptr<const Scope>& scope) {
  switch (e.kind) {
    case ast::ExprKind::Lit:
      return r_lit(e.lit);
    case ast::ExprKind::Name: {
      for (const Scope* s = scope.get(); s; s = s->parent.get()) {
        auto pit = s->params.find(e.name);
        if (pit != s->params.end()) return r_lit(pit->second);
        auto lit_ = s->locals.find(e.name);
        if (lit_ != s->locals.end()) return r_var(lit_->second);
      }
      auto git = globals_.find(e.name);
      if (git != globals_.end()) return r_var(git->second);
      throw RuntimeModelError("unknown name '" + e.name + "'");
    }
    case ast::ExprKind::Cell: {
      if (!store_->has_stream(e.name))
        throw RuntimeModelError("unknown stream '" + e.name + "'");
      long long idx = eval_ground(e.args[0], scope, false);
      return r_var(store_->cell(e.name, idx));
    }
    case ast::ExprKind::Add:
    case ast::ExprKind::Sub:
    case ast::ExprKind::Mul: {
      RExpr r;
      r.kind = e.kind == ast::ExprKind::Add   ? RExprKind::Add
               : e.kind == ast::ExprKind::Sub ? RExprKind::Sub
                                              : RExprKind::Mul;
      r.args.push_back(resolve_expr(e.args[0], scope));
      r.args.push_back(resolve_expr(e.args[1], scope));
      // Fold literal arithmetic so resolved guards print compactly.
      if (r.args[0].kind == RExprKind::Lit && r.args[1].kind == RExprKind::Lit) {
        long long a = r.args[0].lit, b = r.args[1].lit, v = 0;
        bool ov = false;
        switch (r.kind) {
          case RExprKind::Add: ov = __builtin_add_overflow(a, b, &v); break;
          case RExprKind::Sub: ov = __builtin_sub_overflow(a, b, &v); break;
          default: ov = __builtin_mul_overflow(a, b, &v); break;
        }
        if (ov)
          throw StoreError(StoreError::Kind::Overflow, "arithmetic overflow");
        return r_lit(v);
      }
      return r;
    }
    // Oracle queries stay symbolic: undefined states/links read as Unknown in
    // guards and only become an error when a value is demanded eagerly.
    case ast::ExprKind::OracleSuffix: {
      RExpr r;
      r.kind = RExprKind::OracleSuffix;
      r.args.push_back(resolve_expr(e.args[0], scope));
      return r;
    }
    case ast::ExprKind::OracleDelta: {
      RExpr r;
      r.kind = RExprKind::OracleDelta;
      r.args.push_back(resolve_expr(e.args[0], scope));
      r.args.push_back(resolve_expr(e.args[1], scope));
      return r;
    }
  }
  throw RuntimeModelError("unsupported expression");
}

RConstraint Engine::resolve_constraint(const ast::Constraint& c,
                                       const std::shared_ptr<const Scope>& scope) {
  RConstraint r;
  switch (c.kind) {
    case ast::ConstraintKind::True:
      r.kind = RConstraintKind::True;
      return r;
    case ast::ConstraintKind::Rel:
      r.kind = RConstraintKind::Rel;
      r.op = (RelKind)(int)c.op;
      r.exprs.push_back(resolve_expr(c.exprs[0], scope));
      r.exprs.push_back(resolve_expr(c.exprs[1], scope));
      return r;
    case ast::ConstraintKind::Between:
      r.kind = RConstraintKind::Between;
      for (const auto& e : c.exprs) r.exprs.push_back(resolve_expr(e, scope));
      return r;
    case ast::ConstraintKind::Member: {
      r.kind = RConstraintKind::Member;
      r.exprs.push_back(resolve_expr(c.exprs[0], scope));
      if (c.set.oracle_from) {
        r.set.oracle_from = true;
        r.set.state.push_back(resolve_expr(c.set.index[0], scope));
      } else if (!c.set.index.empty()) {
        if (!store_->has_stream(c.set.name))
          throw RuntimeModelError("unknown set stream '" + c.set.name + "'");
        long long idx = eval_ground(c.set.index[0], scope, false);
        r.set.set = store_->cell(c.set.name, idx);
      } else {
        auto git = globals_.find(c.set.name);
        if (git == globals_.end())
          throw RuntimeModelError("unknown set '" + c.set.name + "'");
        r.set.set = git->second;
      }
      return r;
    }
    case ast::ConstraintKind::Conj:
      r.kind = RConstraintKind::Conj;
      for (const auto& p : c.parts)
        r.parts.push_back(resolve_constraint(p, scope));
      return r;
  }
  return r;
}

// --- installation -----------------------------------------------------------

void Engine::install(const Closure& cl) {
  ++rec_.processes;
  const ast::Process& p = *cl.proc;
  switch (p.kind) {
    case ast::ProcKind::Skip:
      return;
    case ast::ProcKind::Tell: {
      RConstraint rc = resolve_constraint(p.guard, cl.scope);
      store_->tell(rc);
      return;
    }
    case ast::ProcKind::When: {
      WhenWatcher w;
      w.rc = resolve_constraint(p.guard, cl.scope);
      w.text = store_->print(w.rc);
      w.cont = Closure{&p.children[0], cl.scope};
      whens_.push_back(std::move(w));
      return;
    }
    case ast::ProcKind::Unless: {
      UnlessWatcher u;
      u.rc = resolve_constraint(p.guard, cl.scope);
      u.text = store_->print(u.rc);
      u.cont = Closure{&p.children[0], cl.scope};
      unlesses_.push_back(std::move(u));
      return;
    }
    case ast::ProcKind::Par:
      for (const auto& ch : p.children) install(Closure{&ch, cl.scope});
      return;
    case ast::ProcKind::Next:
      next_.push_back(Closure{&p.children[0], cl.scope});
      return;
    case ast::ProcKind::Sum: {
      SumGroup g;
      for (size_t i = 0; i < p.children.size(); ++i) {
        SumBranch b;
        b.rc = resolve_constraint(p.branch_guards[i], cl.scope);
        b.text = store_->print(b.rc);
        b.cont = Closure{&p.children[i], cl.scope};
        g.branches.push_back(std::move(b));
      }
      if (!g.branches.empty()) sums_.push_back(std::move(g));
      return;
    }
    case ast::ProcKind::Star: {
      long long d = star_delay(opts_.star, rng_);
      if (d == 0) now_.push_back(Closure{&p.children[0], cl.scope});
      else future_[unit_ + (uint64_t)d].push_back(Closure{&p.children[0], cl.scope});
      return;
    }
    case ast::ProcKind::Bang:
      // !P = P now, and !P again next unit.
      install(Closure{&p.children[0], cl.scope});
      next_.push_back(cl);
      return;
    case ast::ProcKind::Local: {
      auto ns = std::make_shared<Scope>();
      ns->parent = cl.scope;
      std::string fresh =
          p.name + "#" + std::to_string(local_counter_++);
      ns->locals[p.name] = store_->new_fd_var(fresh, p.lo, p.hi);
      install(Closure{&p.children[0], std::move(ns)});
      return;
    }
    case ast::ProcKind::Call: {
      auto dit = defs_.find(p.name);
      if (dit == defs_.end())
        throw RuntimeModelError("call to unknown definition '" + p.name + "'");
      const ast::Definition& def = *dit->second;
      if (def.params.size() != p.args.size())
        throw RuntimeModelError("definition '" + p.name + "' expects " +
                                std::to_string(def.params.size()) +
                                " arguments");
      CallEvent ev;
      ev.def = p.name;
      auto ns = std::make_shared<Scope>();
      for (size_t i = 0; i < p.args.size(); ++i) {
        long long v = eval_ground(p.args[i], cl.scope, false);
        ev.args.push_back(v);
        ns->params[def.params[i]] = v;
      }
      rec_.calls.push_back(std::move(ev));
      install(Closure{&def.body, std::move(ns)});
      return;
    }
    case ast::ProcKind::OracleAdd: {
      // The argument must be determined at execution time; this is the
      // model's bridge into the learning structure and cannot be deferred.
      long long v = eval_ground(p.args[0], cl.scope, true);
      oracle_->add_symbol(v);
      rec_.oracle_adds.push_back(v);
      return;
    }
  }
}

void Engine::drain_and_fire() {
  while (!now_.empty() && !store_->failed()) {
    Closure c = std::move(now_.front());
    now_.pop_front();
    install(c);
  }
}

bool Engine::scan_watchers() {
  if (store_->failed()) return false;
  bool fired_any = false;
  auto refresh = [&](RConstraint& rc, Entail3& state) -> bool {
    if (state != Entail3::Unknown) return true;
    try {
      state = store_->entails(rc);
    } catch (const StoreError& e) {
      if (e.kind() == StoreError::Kind::QueryOnFailedStore) return false;
      throw;
    }
    return true;
  };
  for (size_t i = 0; i < whens_.size(); ++i) {
    WhenWatcher& w = whens_[i];
    if (w.done || w.state == Entail3::False) continue;
    if (!refresh(w.rc, w.state)) return false;
    if (w.state == Entail3::True) {
      w.done = true;
      rec_.fired.push_back(FiredGuard{w.text, "when"});
      now_.push_back(w.cont);
      fired_any = true;
    }
  }
  for (size_t gi = 0; gi < sums_.size(); ++gi) {
    SumGroup& g = sums_[gi];
    if (g.done) continue;
    std::vector<int> enabled;
    for (size_t i = 0; i < g.branches.size(); ++i) {
      SumBranch& b = g.branches[i];
      if (b.state == Entail3::Unknown && !refresh(b.rc, b.state)) return false;
      if (b.state == Entail3::True) enabled.push_back((int)i);
    }
    if (!enabled.empty()) {
      size_t pick = choose(rng_, enabled);
      g.done = true;
      rec_.choices.push_back(
          SumChoice{g.branches[pick].text, (int)pick, enabled});
      now_.push_back(g.branches[pick].cont);
      fired_any = true;
    }
  }
  return fired_any;
}

void Engine::resolve_unless() {
  if (store_->failed()) return;
  for (auto& u : unlesses_) {
    if (u.state == Entail3::Unknown) {
      try {
        u.state = store_->entails(u.rc);
      } catch (const StoreError& e) {
        if (e.kind() == StoreError::Kind::QueryOnFailedStore) {
          rec_.status = "failed";
          return;
        }
        throw;
      }
    }
    if (u.state != Entail3::True) {
      rec_.fired.push_back(FiredGuard{u.text, "unless"});
      next_.push_back(u.cont);
    }
  }
}

void Engine::extract_outputs(TraceRecord& rec) {
  if (store_->failed()) return;
  for (const auto& name : model_.outputs) {
    if (store_->has_stream(name)) {
      for (const auto& [idx, vid] : store_->stream_cells(name)) {
        if (store_->kind_of(vid) == VarKind::Set) continue;
        if (auto v = store_->determined(vid))
          rec.outputs[name + "[" + std::to_string(idx) + "]"] = *v;
      }
      continue;
    }
    auto git = globals_.find(name);
    if (git == globals_.end()) continue;
    if (store_->kind_of(git->second) == VarKind::Set) continue;
    if (auto v = store_->determined(git->second)) rec.outputs[name] = *v;
  }
}

// --- the time-unit loop --------------------------------------------------------

const TraceRecord& Engine::run_time_unit(
    const std::vector<ast::Constraint>& env,
    const std::vector<std::string>& env_texts) {
  ++unit_;
  rec_ = TraceRecord{};
  rec_.unit = unit_;
  rec_.env = env_texts;

  now_.clear();
  whens_.clear();
  sums_.clear();
  unlesses_.clear();
  for (auto& c : next_) now_.push_back(std::move(c));
  next_.clear();
  if (auto it = future_.find(unit_); it != future_.end()) {
    for (auto& c : it->second) now_.push_back(std::move(c));
    future_.erase(it);
  }

  // Environment input first, then the agents react up to quiescence.
  for (const auto& c : env) {
    RConstraint rc = resolve_constraint(c, nullptr);
    store_->tell(rc);
  }
  drain_and_fire();
  while (!store_->failed() && scan_watchers()) drain_and_fire();

  if (store_->failed()) rec_.status = "failed";
  resolve_unless();
  extract_outputs(rec_);

  if (rec_.status == "failed" && !opts_.continue_on_fail && !failed_unit_)
    failed_unit_ = unit_;

  store_->reset_for_next_unit();
  trace_.push_back(rec_);
  return trace_.back();
}

const TraceRecord& Engine::run_time_unit_texts(
    const std::vector<std::string>& texts) {
  std::vector<ast::Constraint> env;
  for (const auto& t : texts) {
    ConstraintParseResult r = parse_tell_list(t);
    if (!r.ok())
      throw RuntimeModelError("bad environment tell '" + t +
                              "': " + r.error->message());
    for (auto& c : *r.tells) env.push_back(std::move(c));
  }
  return run_time_unit(env, texts);
}

const Trace& Engine::run(const EventStream& events, uint64_t units) {
  for (uint64_t u = 1; u <= units; ++u) {
    run_time_unit_texts(events.tells_for(u));
    if (failed_unit_) break;
  }
  return trace_;
}

Trace run_model(const ast::ModelAst& model, const EventStream& events,
                uint64_t units, const EngineOptions& opts) {
  auto errors = validate(model);
  if (!errors.empty()) {
    std::string msg = "model does not validate:";
    for (const auto& e : errors) msg += "\n  " + e.message;
    throw RuntimeModelError(msg);
  }
  Engine eng(model, opts);
  return eng.run(events, units);
}

}  // namespace ntcc
