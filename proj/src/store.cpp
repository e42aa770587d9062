#include "ntcc/store.hpp"

#include <algorithm>
#include <climits>

namespace ntcc {

namespace {

// Saturation sentinel for interval arithmetic; wide enough for every declared
// domain, small enough that sums of a few intervals cannot overflow.
constexpr long long kInf = LLONG_MAX / 8;

long long clamp_inf(long long v) { return std::max(-kInf, std::min(kInf, v)); }

long long sat_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) return a > 0 ? kInf : -kInf;
  return clamp_inf(r);
}

long long sat_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) {
    return ((a > 0) == (b > 0)) ? kInf : -kInf;
  }
  return clamp_inf(r);
}

std::optional<long long> checked_arith(RExprKind k, long long a, long long b) {
  long long r = 0;
  bool ov = false;
  switch (k) {
    case RExprKind::Add: ov = __builtin_add_overflow(a, b, &r); break;
    case RExprKind::Sub: ov = __builtin_sub_overflow(a, b, &r); break;
    case RExprKind::Mul: ov = __builtin_mul_overflow(a, b, &r); break;
    default: return std::nullopt;
  }
  if (ov) throw StoreError(StoreError::Kind::Overflow, "arithmetic overflow");
  return r;
}

Entail3 and3(Entail3 a, Entail3 b) {
  if (a == Entail3::False || b == Entail3::False) return Entail3::False;
  if (a == Entail3::True && b == Entail3::True) return Entail3::True;
  return Entail3::Unknown;
}

bool is_single_var(const RExpr& e) { return e.kind == RExprKind::Var; }

}  // namespace

// --- FDDomain --------------------------------------------------------------

long long FDDomain::size() const {
  if (empty()) return 0;
  return (hi - lo + 1) - (long long)holes.size();
}

bool FDDomain::normalize() {
  while (lo <= hi && holes.count(lo)) {
    holes.erase(lo);
    ++lo;
  }
  while (lo <= hi && holes.count(hi)) {
    holes.erase(hi);
    --hi;
  }
  if (lo > hi) {
    make_empty();
    return false;
  }
  // Drop holes that fell outside the bounds.
  for (auto it = holes.begin(); it != holes.end();) {
    if (*it < lo || *it > hi) it = holes.erase(it);
    else ++it;
  }
  return true;
}

bool FDDomain::intersect_bounds(long long nlo, long long nhi) {
  lo = std::max(lo, nlo);
  hi = std::min(hi, nhi);
  return normalize();
}

bool FDDomain::remove(long long v) {
  if (v < lo || v > hi) return !empty();
  holes.insert(v);
  return normalize();
}

bool FDDomain::assign(long long v) {
  if (!contains(v)) {
    make_empty();
    return false;
  }
  lo = hi = v;
  holes.clear();
  return true;
}

std::vector<long long> FDDomain::values() const {
  std::vector<long long> out;
  out.reserve((size_t)std::max(0ll, size()));
  for (long long v = lo; v <= hi; ++v)
    if (!holes.count(v)) out.push_back(v);
  return out;
}

// --- small constructors ------------------------------------------------------

RExpr r_lit(long long v) {
  RExpr e;
  e.kind = RExprKind::Lit;
  e.lit = v;
  return e;
}

RExpr r_var(VarId v) {
  RExpr e;
  e.kind = RExprKind::Var;
  e.var = v;
  return e;
}

// --- Store: variables --------------------------------------------------------

Store::Store() = default;

Store::VarEntry& Store::entry(VarId v) { return vars_.at(v.idx); }
const Store::VarEntry& Store::entry(VarId v) const { return vars_.at(v.idx); }

VarId Store::new_fd_var(const std::string& name, long long lo, long long hi) {
  if (lo > hi)
    throw StoreError(StoreError::Kind::InvalidDomain,
                     "empty declared domain for '" + name + "'");
  VarEntry e;
  e.name = name;
  e.kind = VarKind::Fd;
  e.decl_lo = lo;
  e.decl_hi = hi;
  e.dom.lo = lo;
  e.dom.hi = hi;
  vars_.push_back(std::move(e));
  return VarId{(uint32_t)(vars_.size() - 1)};
}

VarId Store::new_bool_var(const std::string& name) {
  VarEntry e;
  e.name = name;
  e.kind = VarKind::Bool;
  e.decl_lo = 0;
  e.decl_hi = 1;
  e.dom.lo = 0;
  e.dom.hi = 1;
  vars_.push_back(std::move(e));
  return VarId{(uint32_t)(vars_.size() - 1)};
}

VarId Store::new_set_var(const std::string& name, bool persistent) {
  VarEntry e;
  e.name = name;
  e.kind = VarKind::Set;
  e.persistent = persistent;
  vars_.push_back(std::move(e));
  return VarId{(uint32_t)(vars_.size() - 1)};
}

void Store::declare_stream(const std::string& name, long long lo, long long hi,
                           bool persistent) {
  if (lo > hi)
    throw StoreError(StoreError::Kind::InvalidDomain,
                     "empty declared domain for stream '" + name + "'");
  StreamInfo si;
  si.lo = lo;
  si.hi = hi;
  si.persistent = persistent;
  streams_[name] = std::move(si);
}

void Store::declare_set_stream(const std::string& name, bool persistent) {
  StreamInfo si;
  si.persistent = persistent;
  si.set_kind = true;
  streams_[name] = std::move(si);
}

bool Store::has_stream(const std::string& name) const {
  return streams_.count(name) != 0;
}

bool Store::stream_is_persistent(const std::string& name) const {
  return streams_.at(name).persistent;
}

VarId Store::cell(const std::string& stream, long long index) {
  auto& si = streams_.at(stream);
  auto it = si.cells.find(index);
  if (it != si.cells.end()) return it->second;
  std::string nm = stream + "[" + std::to_string(index) + "]";
  VarId v = si.set_kind ? new_set_var(nm, si.persistent)
                        : new_fd_var(nm, si.lo, si.hi);
  entry(v).persistent = si.persistent;
  si.cells[index] = v;
  // A persistent cell touched again after earlier units re-adopts its facts.
  if (si.persistent) {
    if (auto d = facts_.determinations.find(v.idx);
        d != facts_.determinations.end()) {
      entry(v).dom.assign(d->second);
    }
    if (auto m = facts_.members.find(v.idx); m != facts_.members.end()) {
      entry(v).members = m->second;
    }
  }
  return v;
}

const std::string& Store::name_of(VarId v) const { return entry(v).name; }
VarKind Store::kind_of(VarId v) const { return entry(v).kind; }
const FDDomain& Store::domain(VarId v) const { return entry(v).dom; }

const std::set<long long>& Store::set_members(VarId v) const {
  return entry(v).members;
}

std::optional<long long> Store::determined(VarId v) const {
  const auto& e = entry(v);
  if (e.kind == VarKind::Set) return std::nullopt;
  if (e.dom.singleton()) return e.dom.lo;
  return std::nullopt;
}

std::vector<std::pair<long long, VarId>> Store::stream_cells(
    const std::string& stream) const {
  std::vector<std::pair<long long, VarId>> out;
  auto it = streams_.find(stream);
  if (it == streams_.end()) return out;
  for (const auto& [idx, v] : it->second.cells) out.emplace_back(idx, v);
  return out;
}

// --- tell / propagate --------------------------------------------------------

void Store::fail() { status_ = StoreStatus::Failed; }

TellResult Store::tell(const RConstraint& c) {
  if (failed()) return {true, false};
  switch (c.kind) {
    case RConstraintKind::True:
      return {true, !failed()};
    case RConstraintKind::Conj: {
      TellResult r{true, true};
      for (const auto& p : c.parts) {
        TellResult pr = tell(p);
        r.consistent = r.consistent && pr.consistent;
      }
      return r;
    }
    case RConstraintKind::Between: {
      // a < x < b desugars to two strict relations.
      RConstraint lt1, lt2;
      lt1.kind = lt2.kind = RConstraintKind::Rel;
      lt1.op = lt2.op = RelKind::Lt;
      lt1.exprs = {c.exprs[0], c.exprs[1]};
      lt2.exprs = {c.exprs[1], c.exprs[2]};
      RConstraint conj;
      conj.kind = RConstraintKind::Conj;
      conj.parts = {lt1, lt2};
      return tell(conj);
    }
    case RConstraintKind::Rel: {
      // Equality between a persistent cell and a literal is a fact: it
      // outlives the unit.
      if (c.op == RelKind::Eq) {
        const RExpr* var_side = nullptr;
        const RExpr* lit_side = nullptr;
        if (is_single_var(c.exprs[0]) && c.exprs[1].kind == RExprKind::Lit) {
          var_side = &c.exprs[0];
          lit_side = &c.exprs[1];
        } else if (is_single_var(c.exprs[1]) &&
                   c.exprs[0].kind == RExprKind::Lit) {
          var_side = &c.exprs[1];
          lit_side = &c.exprs[0];
        }
        if (var_side && entry(var_side->var).persistent &&
            entry(var_side->var).kind == VarKind::Fd) {
          return assert_fact(var_side->var, lit_side->lit);
        }
      }
      posted_.push_back(c);
      posted_vars_.emplace_back();
      collect_vars(c, posted_vars_.back());
      status_ = status_ == StoreStatus::Failed ? status_ : StoreStatus::Pending;
      return {true, propagate() != StoreStatus::Failed};
    }
    case RConstraintKind::Member: {
      if (c.set.oracle_from)
        throw StoreError(StoreError::Kind::InvalidDomain,
                         "cannot tell membership of an oracle link set");
      // Membership in a persistent set is a fact once the element is known.
      if (c.exprs[0].kind == RExprKind::Lit &&
          entry(c.set.set).persistent) {
        return assert_member_fact(c.set.set, c.exprs[0].lit);
      }
      posted_.push_back(c);
      posted_vars_.emplace_back();
      collect_vars(c, posted_vars_.back());
      status_ = status_ == StoreStatus::Failed ? status_ : StoreStatus::Pending;
      return {true, propagate() != StoreStatus::Failed};
    }
  }
  return {false, !failed()};
}

// One narrowing pass over a single constraint. Returns false when the store
// became inconsistent.
bool Store::narrow(const RConstraint& c, bool& changed) {
  switch (c.kind) {
    case RConstraintKind::True:
      return true;
    case RConstraintKind::Conj:
      for (const auto& p : c.parts)
        if (!narrow(p, changed)) return false;
      return true;
    case RConstraintKind::Member: {
      // Add the element once its value is forced.
      long long elo, ehi;
      expr_interval(c.exprs[0], elo, ehi);
      if (elo == ehi) {
        auto& mem = entry(c.set.set).members;
        if (!mem.count(elo)) {
          mem.insert(elo);
          changed = true;
          if (entry(c.set.set).persistent) facts_.members[c.set.set.idx].insert(elo);
        }
      }
      return true;
    }
    case RConstraintKind::Between: {
      const RExpr& a = c.exprs[0];
      const RExpr& m = c.exprs[1];
      const RExpr& b = c.exprs[2];
      long long alo, ahi, mlo, mhi, blo, bhi;
      expr_interval(a, alo, ahi);
      expr_interval(m, mlo, mhi);
      expr_interval(b, blo, bhi);
      if (is_single_var(m)) {
        FDDomain& d = entry(m.var).dom;
        FDDomain before = d;
        if (!d.intersect_bounds(sat_add(alo, 1), sat_add(bhi, -1))) {
          fail();
          return false;
        }
        if (!(d == before)) changed = true;
      }
      if (is_single_var(a)) {
        FDDomain& d = entry(a.var).dom;
        FDDomain before = d;
        if (!d.intersect_bounds(-kInf, sat_add(mhi, -1))) {
          fail();
          return false;
        }
        if (!(d == before)) changed = true;
      }
      if (is_single_var(b)) {
        FDDomain& d = entry(b.var).dom;
        FDDomain before = d;
        if (!d.intersect_bounds(sat_add(mlo, 1), kInf)) {
          fail();
          return false;
        }
        if (!(d == before)) changed = true;
      }
      if (eval_domains(c) == Entail3::False) {
        fail();
        return false;
      }
      return true;
    }
    case RConstraintKind::Rel: {
      const RExpr& a = c.exprs[0];
      const RExpr& b = c.exprs[1];
      long long alo, ahi, blo, bhi;
      expr_interval(a, alo, ahi);
      expr_interval(b, blo, bhi);
      auto tighten = [&](const RExpr& side, long long nlo,
                         long long nhi) -> bool {
        if (!is_single_var(side)) return true;
        FDDomain& d = entry(side.var).dom;
        FDDomain before = d;
        if (!d.intersect_bounds(nlo, nhi)) {
          fail();
          return false;
        }
        if (!(d == before)) changed = true;
        return true;
      };
      switch (c.op) {
        case RelKind::Eq: {
          if (is_single_var(a) && is_single_var(b) && !(a.var == b.var)) {
            // Exact (hole-aware) mutual intersection.
            FDDomain& da = entry(a.var).dom;
            FDDomain& db = entry(b.var).dom;
            FDDomain na, nb;
            na.make_empty();
            // Intersection of two hole domains, built value-wise; domains in
            // this system are small (decl bounds), but guard anyway.
            long long ilo = std::max(da.lo, db.lo);
            long long ihi = std::min(da.hi, db.hi);
            if (ihi - ilo <= 4096) {
              FDDomain inter;
              inter.lo = ilo;
              inter.hi = ihi;
              for (long long v = ilo; v <= ihi; ++v)
                if (!da.contains(v) || !db.contains(v)) inter.holes.insert(v);
              if (!inter.normalize()) {
                fail();
                return false;
              }
              bool ch = !(da == inter) || !(db == inter);
              da = inter;
              db = inter;
              if (ch) changed = true;
              return true;
            }
          }
          if (!tighten(a, blo, bhi)) return false;
          if (!tighten(b, alo, ahi)) return false;
          // Hole-awareness when one side is a fixed value.
          if (is_single_var(a) && blo == bhi) {
            FDDomain& d = entry(a.var).dom;
            if (!d.contains(blo)) {
              fail();
              return false;
            }
            if (!d.singleton()) {
              d.assign(blo);
              changed = true;
            }
          }
          if (is_single_var(b) && alo == ahi) {
            FDDomain& d = entry(b.var).dom;
            if (!d.contains(alo)) {
              fail();
              return false;
            }
            if (!d.singleton()) {
              d.assign(alo);
              changed = true;
            }
          }
          break;
        }
        case RelKind::Ne: {
          if (is_single_var(a) && blo == bhi) {
            FDDomain& d = entry(a.var).dom;
            if (d.contains(blo)) {
              if (!d.remove(blo)) {
                fail();
                return false;
              }
              changed = true;
            }
          }
          if (is_single_var(b) && alo == ahi) {
            FDDomain& d = entry(b.var).dom;
            if (d.contains(alo)) {
              if (!d.remove(alo)) {
                fail();
                return false;
              }
              changed = true;
            }
          }
          break;
        }
        case RelKind::Lt:
          if (!tighten(a, -kInf, sat_add(bhi, -1))) return false;
          if (!tighten(b, sat_add(alo, 1), kInf)) return false;
          break;
        case RelKind::Le:
          if (!tighten(a, -kInf, bhi)) return false;
          if (!tighten(b, alo, kInf)) return false;
          break;
        case RelKind::Gt:
          if (!tighten(a, sat_add(blo, 1), kInf)) return false;
          if (!tighten(b, -kInf, sat_add(ahi, -1))) return false;
          break;
        case RelKind::Ge:
          if (!tighten(a, blo, kInf)) return false;
          if (!tighten(b, -kInf, ahi)) return false;
          break;
      }
      if (eval_domains(c) == Entail3::False) {
        fail();
        return false;
      }
      return true;
    }
  }
  return true;
}

StoreStatus Store::propagate() {
  if (failed()) return status_;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : posted_) {
      if (!narrow(c, changed)) return status_;
    }
    // Keep reified guards coherent with entailment.
    for (auto& [gc, gv] : guards_) {
      FDDomain& d = entry(gv).dom;
      if (d.singleton()) continue;
      Entail3 r = eval_domains(gc);
      if (r == Entail3::Unknown) r = entails_enumerate(gc);
      if (failed()) return status_;
      if (r == Entail3::True) {
        d.assign(1);
        changed = true;
      } else if (r == Entail3::False) {
        d.assign(0);
        changed = true;
      }
    }
  }
  status_ = StoreStatus::Stable;
  return status_;
}

// --- entailment ----------------------------------------------------------

Entail3 Store::entails(const RConstraint& c) {
  if (failed())
    throw StoreError(StoreError::Kind::QueryOnFailedStore,
                     "entailment query on a failed store");
  if (status_ == StoreStatus::Pending) propagate();
  if (failed())
    throw StoreError(StoreError::Kind::QueryOnFailedStore,
                     "entailment query on a failed store");
  Entail3 r = eval_domains(c);
  if (r != Entail3::Unknown) return r;
  r = entails_enumerate(c);
  if (failed())
    throw StoreError(StoreError::Kind::QueryOnFailedStore,
                     "store discovered inconsistent during entailment query");
  return r;
}

VarId Store::reify(const RConstraint& c) {
  std::string key = print(c);
  auto it = guard_cache_.find(key);
  if (it != guard_cache_.end()) return it->second;
  VarId b = new_bool_var("$guard:" + key);
  guards_.emplace_back(c, b);
  guard_cache_[key] = b;
  // Bring the new guard up to date immediately.
  if (!failed()) {
    Entail3 r = eval_domains(c);
    if (r == Entail3::Unknown) r = entails_enumerate(c);
    if (!failed()) {
      if (r == Entail3::True) entry(b).dom.assign(1);
      else if (r == Entail3::False) entry(b).dom.assign(0);
    }
  }
  return b;
}

// --- facts -----------------------------------------------------------------

TellResult Store::assert_fact(VarId cell_var, long long value) {
  auto it = facts_.determinations.find(cell_var.idx);
  if (it != facts_.determinations.end() && it->second != value) {
    throw StoreError(StoreError::Kind::PersistentConflict,
                     "persistent cell '" + name_of(cell_var) +
                         "' already determined to " +
                         std::to_string(it->second) + ", cannot re-assert " +
                         std::to_string(value));
  }
  VarEntry& e = entry(cell_var);
  if (value < e.decl_lo || value > e.decl_hi) {
    // Outside the declared domain: the unit fails and nothing persists.
    fail();
    return {true, false};
  }
  facts_.determinations[cell_var.idx] = value;
  if (e.dom.singleton() && e.dom.lo == value) return {true, !failed()};
  if (!e.dom.assign(value)) {
    fail();
    return {true, false};
  }
  status_ = status_ == StoreStatus::Failed ? status_ : StoreStatus::Pending;
  return {true, propagate() != StoreStatus::Failed};
}

TellResult Store::assert_member_fact(VarId set_var, long long value) {
  facts_.members[set_var.idx].insert(value);
  auto& mem = entry(set_var).members;
  if (!mem.count(value)) {
    mem.insert(value);
    status_ = status_ == StoreStatus::Failed ? status_ : StoreStatus::Pending;
    return {true, propagate() != StoreStatus::Failed};
  }
  return {true, !failed()};
}

void Store::reset_for_next_unit() {
  posted_.clear();
  posted_vars_.clear();
  guards_.clear();
  guard_cache_.clear();
  for (auto& e : vars_) {
    switch (e.kind) {
      case VarKind::Fd:
      case VarKind::Bool:
        e.dom.lo = e.decl_lo;
        e.dom.hi = e.decl_hi;
        e.dom.holes.clear();
        break;
      case VarKind::Set:
        if (!e.persistent) e.members.clear();
        break;
    }
  }
  // Re-apply persisted determinations as singletons.
  for (const auto& [idx, v] : facts_.determinations) {
    vars_[idx].dom.assign(v);
  }
  for (const auto& [idx, vals] : facts_.members) {
    vars_[idx].members = vals;
  }
  status_ = StoreStatus::Stable;
}

// --- interval + domain evaluation -------------------------------------------

void Store::expr_interval(const RExpr& e, long long& lo, long long& hi) const {
  switch (e.kind) {
    case RExprKind::Lit:
      lo = hi = e.lit;
      return;
    case RExprKind::Var: {
      const auto& d = entry(e.var).dom;
      lo = d.lo;
      hi = d.hi;
      return;
    }
    case RExprKind::Add: {
      long long alo, ahi, blo, bhi;
      expr_interval(e.args[0], alo, ahi);
      expr_interval(e.args[1], blo, bhi);
      lo = sat_add(alo, blo);
      hi = sat_add(ahi, bhi);
      return;
    }
    case RExprKind::Sub: {
      long long alo, ahi, blo, bhi;
      expr_interval(e.args[0], alo, ahi);
      expr_interval(e.args[1], blo, bhi);
      lo = sat_add(alo, -bhi);
      hi = sat_add(ahi, -blo);
      return;
    }
    case RExprKind::Mul: {
      long long alo, ahi, blo, bhi;
      expr_interval(e.args[0], alo, ahi);
      expr_interval(e.args[1], blo, bhi);
      long long p1 = sat_mul(alo, blo), p2 = sat_mul(alo, bhi),
                p3 = sat_mul(ahi, blo), p4 = sat_mul(ahi, bhi);
      lo = std::min({p1, p2, p3, p4});
      hi = std::max({p1, p2, p3, p4});
      return;
    }
    case RExprKind::OracleSuffix:
    case RExprKind::OracleDelta: {
      auto v = eval_oracle_expr(e);
      if (v) {
        lo = hi = *v;
      } else {
        lo = -kInf;
        hi = kInf;
      }
      return;
    }
  }
  lo = -kInf;
  hi = kInf;
}

std::optional<long long> Store::eval_oracle_expr(const RExpr& e) const {
  if (!oracle_) return std::nullopt;
  if (e.kind == RExprKind::OracleSuffix) {
    auto st = eval_expr_assigned(e.args[0], {});
    if (!st || !oracle_->has_state(*st)) return std::nullopt;
    return oracle_->suffix(*st);
  }
  if (e.kind == RExprKind::OracleDelta) {
    auto st = eval_expr_assigned(e.args[0], {});
    auto sym = eval_expr_assigned(e.args[1], {});
    if (!st || !sym || !oracle_->has_state(*st)) return std::nullopt;
    long long t = oracle_->delta(*st, *sym);
    if (t < 0) return std::nullopt;
    return t;
  }
  return std::nullopt;
}

Entail3 Store::eval_rel_domains(RelKind op, const RExpr& a,
                                const RExpr& b) const {
  long long alo, ahi, blo, bhi;
  expr_interval(a, alo, ahi);
  expr_interval(b, blo, bhi);

  // Hole-exact answers when one side is a variable and the other is fixed.
  auto var_vs_value = [&](const RExpr& v, long long val,
                          RelKind o) -> std::optional<Entail3> {
    const FDDomain& d = entry(v.var).dom;
    switch (o) {
      case RelKind::Eq:
        if (!d.contains(val)) return Entail3::False;
        if (d.singleton()) return Entail3::True;
        return Entail3::Unknown;
      case RelKind::Ne:
        if (!d.contains(val)) return Entail3::True;
        if (d.singleton()) return Entail3::False;
        return Entail3::Unknown;
      case RelKind::Lt:
        if (d.hi < val) return Entail3::True;
        if (d.lo >= val) return Entail3::False;
        return Entail3::Unknown;
      case RelKind::Le:
        if (d.hi <= val) return Entail3::True;
        if (d.lo > val) return Entail3::False;
        return Entail3::Unknown;
      case RelKind::Gt:
        if (d.lo > val) return Entail3::True;
        if (d.hi <= val) return Entail3::False;
        return Entail3::Unknown;
      case RelKind::Ge:
        if (d.lo >= val) return Entail3::True;
        if (d.hi < val) return Entail3::False;
        return Entail3::Unknown;
    }
    return std::nullopt;
  };
  auto flip = [](RelKind o) {
    switch (o) {
      case RelKind::Lt: return RelKind::Gt;
      case RelKind::Le: return RelKind::Ge;
      case RelKind::Gt: return RelKind::Lt;
      case RelKind::Ge: return RelKind::Le;
      default: return o;
    }
  };
  if (is_single_var(a) && blo == bhi) {
    if (auto r = var_vs_value(a, blo, op)) return *r;
  }
  if (is_single_var(b) && alo == ahi) {
    if (auto r = var_vs_value(b, alo, flip(op))) return *r;
  }

  switch (op) {
    case RelKind::Eq:
      if (alo == ahi && blo == bhi && alo == blo) return Entail3::True;
      if (ahi < blo || alo > bhi) return Entail3::False;
      return Entail3::Unknown;
    case RelKind::Ne:
      if (ahi < blo || alo > bhi) return Entail3::True;
      if (alo == ahi && blo == bhi && alo == blo) return Entail3::False;
      return Entail3::Unknown;
    case RelKind::Lt:
      if (ahi < blo) return Entail3::True;
      if (alo >= bhi) return Entail3::False;
      return Entail3::Unknown;
    case RelKind::Le:
      if (ahi <= blo) return Entail3::True;
      if (alo > bhi) return Entail3::False;
      return Entail3::Unknown;
    case RelKind::Gt:
      if (alo > bhi) return Entail3::True;
      if (ahi <= blo) return Entail3::False;
      return Entail3::Unknown;
    case RelKind::Ge:
      if (alo >= bhi) return Entail3::True;
      if (ahi < blo) return Entail3::False;
      return Entail3::Unknown;
  }
  return Entail3::Unknown;
}

Entail3 Store::eval_domains(const RConstraint& c) const {
  switch (c.kind) {
    case RConstraintKind::True:
      return Entail3::True;
    case RConstraintKind::Rel:
      return eval_rel_domains(c.op, c.exprs[0], c.exprs[1]);
    case RConstraintKind::Between: {
      Entail3 r1 = eval_rel_domains(RelKind::Lt, c.exprs[0], c.exprs[1]);
      Entail3 r2 = eval_rel_domains(RelKind::Lt, c.exprs[1], c.exprs[2]);
      return and3(r1, r2);
    }
    case RConstraintKind::Member: {
      // Sets carry lower bounds only: membership can become True but never
      // provably False.
      std::set<long long> owned;
      const std::set<long long>* mem = nullptr;
      if (c.set.oracle_from) {
        if (!oracle_) return Entail3::Unknown;
        auto st = eval_expr_assigned(c.set.state[0], {});
        if (!st || !oracle_->has_state(*st)) return Entail3::Unknown;
        owned = oracle_->from_set(*st);
        mem = &owned;
      } else {
        mem = &entry(c.set.set).members;
      }
      const RExpr& e = c.exprs[0];
      if (e.kind == RExprKind::Lit)
        return mem->count(e.lit) ? Entail3::True : Entail3::Unknown;
      if (is_single_var(e)) {
        const FDDomain& d = entry(e.var).dom;
        for (long long v : d.values())
          if (!mem->count(v)) return Entail3::Unknown;
        return Entail3::True;
      }
      long long lo, hi;
      expr_interval(e, lo, hi);
      if (lo == hi) return mem->count(lo) ? Entail3::True : Entail3::Unknown;
      return Entail3::Unknown;
    }
    case RConstraintKind::Conj: {
      Entail3 acc = Entail3::True;
      for (const auto& p : c.parts) acc = and3(acc, eval_domains(p));
      return acc;
    }
  }
  return Entail3::Unknown;
}

// --- assigned evaluation -------------------------------------------------

std::optional<long long> Store::eval_expr_assigned(
    const RExpr& e, const std::map<uint32_t, long long>& asg) const {
  switch (e.kind) {
    case RExprKind::Lit:
      return e.lit;
    case RExprKind::Var: {
      auto it = asg.find(e.var.idx);
      if (it != asg.end()) return it->second;
      if (auto d = determined(e.var)) return *d;
      return std::nullopt;
    }
    case RExprKind::Add:
    case RExprKind::Sub:
    case RExprKind::Mul: {
      auto a = eval_expr_assigned(e.args[0], asg);
      auto b = eval_expr_assigned(e.args[1], asg);
      if (!a || !b) return std::nullopt;
      return checked_arith(e.kind, *a, *b);
    }
    case RExprKind::OracleSuffix:
    case RExprKind::OracleDelta:
      return eval_oracle_expr(e);
  }
  return std::nullopt;
}

Entail3 Store::eval_assigned(const RConstraint& c,
                             const std::map<uint32_t, long long>& asg) const {
  switch (c.kind) {
    case RConstraintKind::True:
      return Entail3::True;
    case RConstraintKind::Rel: {
      auto a = eval_expr_assigned(c.exprs[0], asg);
      auto b = eval_expr_assigned(c.exprs[1], asg);
      if (!a || !b) return Entail3::Unknown;
      bool r = false;
      switch (c.op) {
        case RelKind::Eq: r = *a == *b; break;
        case RelKind::Ne: r = *a != *b; break;
        case RelKind::Lt: r = *a < *b; break;
        case RelKind::Le: r = *a <= *b; break;
        case RelKind::Gt: r = *a > *b; break;
        case RelKind::Ge: r = *a >= *b; break;
      }
      return r ? Entail3::True : Entail3::False;
    }
    case RConstraintKind::Between: {
      auto a = eval_expr_assigned(c.exprs[0], asg);
      auto m = eval_expr_assigned(c.exprs[1], asg);
      auto b = eval_expr_assigned(c.exprs[2], asg);
      if (!a || !m || !b) return Entail3::Unknown;
      return (*a < *m && *m < *b) ? Entail3::True : Entail3::False;
    }
    case RConstraintKind::Member: {
      auto v = eval_expr_assigned(c.exprs[0], asg);
      if (!v) return Entail3::Unknown;
      if (c.set.oracle_from) {
        if (!oracle_) return Entail3::Unknown;
        auto st = eval_expr_assigned(c.set.state[0], asg);
        if (!st || !oracle_->has_state(*st)) return Entail3::Unknown;
        return oracle_->from_set(*st).count(*v) ? Entail3::True
                                                : Entail3::Unknown;
      }
      return entry(c.set.set).members.count(*v) ? Entail3::True
                                                : Entail3::Unknown;
    }
    case RConstraintKind::Conj: {
      Entail3 acc = Entail3::True;
      for (const auto& p : c.parts) acc = and3(acc, eval_assigned(p, asg));
      return acc;
    }
  }
  return Entail3::Unknown;
}

// --- enumeration ------------------------------------------------------------

void Store::collect_vars(const RExpr& e, std::set<uint32_t>& out) const {
  switch (e.kind) {
    case RExprKind::Var:
      if (entry(e.var).kind != VarKind::Set) out.insert(e.var.idx);
      return;
    case RExprKind::Add:
    case RExprKind::Sub:
    case RExprKind::Mul:
      collect_vars(e.args[0], out);
      collect_vars(e.args[1], out);
      return;
    case RExprKind::OracleSuffix:
    case RExprKind::OracleDelta:
      for (const auto& a : e.args) collect_vars(a, out);
      return;
    default:
      return;
  }
}

void Store::collect_vars(const RConstraint& c, std::set<uint32_t>& out) const {
  for (const auto& e : c.exprs) collect_vars(e, out);
  if (c.kind == RConstraintKind::Member && c.set.oracle_from)
    for (const auto& e : c.set.state) collect_vars(e, out);
  for (const auto& p : c.parts) collect_vars(p, out);
}

// Exact check by enumerating every consistent valuation of the query's
// connected component. A valuation is consistent when every variable takes a
// value from its current domain and no posted constraint evaluates to False
// under it. Zero consistent valuations means the store itself is
// unsatisfiable: it is marked failed.
Entail3 Store::entails_enumerate(const RConstraint& c) {
  std::set<uint32_t> comp;
  collect_vars(c, comp);
  if (comp.empty()) return Entail3::Unknown;  // pure oracle/set query

  // Close the component over posted constraints (var sets are cached).
  bool grew = true;
  std::vector<char> in_comp_posted(posted_.size(), 0);
  while (grew) {
    grew = false;
    for (size_t i = 0; i < posted_.size(); ++i) {
      if (in_comp_posted[i]) continue;
      const std::set<uint32_t>& pv = posted_vars_[i];
      bool touches = std::any_of(pv.begin(), pv.end(),
                                 [&](uint32_t v) { return comp.count(v); });
      if (touches) {
        in_comp_posted[i] = 1;
        size_t before = comp.size();
        comp.insert(pv.begin(), pv.end());
        if (comp.size() != before) grew = true;
      }
    }
  }

  std::vector<uint32_t> order(comp.begin(), comp.end());
  std::vector<std::vector<long long>> vals;
  unsigned long long product = 1;
  for (uint32_t idx : order) {
    vals.push_back(vars_[idx].dom.values());
    if (vals.back().empty()) {
      fail();
      return Entail3::Unknown;
    }
    product *= (unsigned long long)vals.back().size();
    if (product > enum_cap_) return Entail3::Unknown;
  }

  std::vector<const RConstraint*> relevant;
  for (size_t i = 0; i < posted_.size(); ++i)
    if (in_comp_posted[i]) relevant.push_back(&posted_[i]);

  std::vector<size_t> cursor(order.size(), 0);
  std::map<uint32_t, long long> asg;
  for (size_t i = 0; i < order.size(); ++i) asg[order[i]] = vals[i][0];
  bool saw_true = false, saw_false = false, saw_unknown = false;
  bool any = false;
  while (true) {
    bool consistent = true;
    for (const RConstraint* p : relevant) {
      if (eval_assigned(*p, asg) == Entail3::False) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      any = true;
      switch (eval_assigned(c, asg)) {
        case Entail3::True: saw_true = true; break;
        case Entail3::False: saw_false = true; break;
        case Entail3::Unknown: saw_unknown = true; break;
      }
      if (saw_true && saw_false) return Entail3::Unknown;
    }
    // Odometer step; refresh only the slots that moved.
    size_t k = 0;
    while (k < cursor.size()) {
      if (++cursor[k] < vals[k].size()) {
        asg[order[k]] = vals[k][cursor[k]];
        break;
      }
      cursor[k] = 0;
      asg[order[k]] = vals[k][0];
      ++k;
    }
    if (k == cursor.size()) break;
  }
  if (!any) {
    // No valuation survives the posted constraints: the store is
    // unsatisfiable even though bounds propagation had not noticed.
    fail();
    return Entail3::Unknown;
  }
  if (saw_unknown) return Entail3::Unknown;
  if (saw_true && !saw_false) return Entail3::True;
  if (saw_false && !saw_true) return Entail3::False;
  return Entail3::Unknown;
}

// --- printing -----------------------------------------------------------------

namespace {
int rexpr_prec(RExprKind k) {
  switch (k) {
    case RExprKind::Add:
    case RExprKind::Sub:
      return 1;
    case RExprKind::Mul:
      return 2;
    default:
      return 3;
  }
}
}  // namespace

std::string Store::print(const RExpr& e) const {
  auto wrap = [&](const RExpr& child, int parent_prec,
                  bool is_right) -> std::string {
    std::string s = print(child);
    int cp = rexpr_prec(child.kind);
    if (cp < parent_prec || (cp == parent_prec && is_right && cp < 3))
      return "(" + s + ")";
    return s;
  };
  switch (e.kind) {
    case RExprKind::Lit:
      return std::to_string(e.lit);
    case RExprKind::Var:
      return name_of(e.var);
    case RExprKind::Add:
      return wrap(e.args[0], 1, false) + " + " + wrap(e.args[1], 1, true);
    case RExprKind::Sub:
      return wrap(e.args[0], 1, false) + " - " + wrap(e.args[1], 1, true);
    case RExprKind::Mul:
      return wrap(e.args[0], 2, false) + " * " + wrap(e.args[1], 2, true);
    case RExprKind::OracleSuffix:
      return "oracle.S[" + print(e.args[0]) + "]";
    case RExprKind::OracleDelta:
      return "oracle.delta[" + print(e.args[0]) + ", " + print(e.args[1]) +
             "]";
  }
  return "?";
}

std::string Store::print(const RConstraint& c) const {
  switch (c.kind) {
    case RConstraintKind::True:
      return "true";
    case RConstraintKind::Rel: {
      const char* ops[] = {"=", "<>", "<", "<=", ">", ">="};
      return print(c.exprs[0]) + " " + ops[(int)c.op] + " " +
             print(c.exprs[1]);
    }
    case RConstraintKind::Between:
      return print(c.exprs[0]) + " < " + print(c.exprs[1]) + " < " +
             print(c.exprs[2]);
    case RConstraintKind::Member: {
      std::string set = c.set.oracle_from
                            ? "oracle.from[" + print(c.set.state[0]) + "]"
                            : name_of(c.set.set);
      return print(c.exprs[0]) + " in " + set;
    }
    case RConstraintKind::Conj: {
      std::string out;
      for (size_t i = 0; i < c.parts.size(); ++i) {
        if (i) out += " and ";
        const auto& p = c.parts[i];
        std::string s = print(p);
        if (p.kind == RConstraintKind::Conj) s = "(" + s + ")";
        out += s;
      }
      return out;
    }
  }
  return "true";
}

}  // namespace ntcc
