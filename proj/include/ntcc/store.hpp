#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ntcc/diag.hpp"
#include "ntcc/factor_oracle.hpp"

// Finite-domain constraint store for one time-unit, plus the persistent fact
// base that survives unit resets. Entailment is three-valued and monotone
// within a unit: once True (or False) it stays that way as the store grows.

namespace ntcc {

struct VarId {
  uint32_t idx = UINT32_MAX;
  bool valid() const { return idx != UINT32_MAX; }
  bool operator==(const VarId& o) const { return idx == o.idx; }
  bool operator<(const VarId& o) const { return idx < o.idx; }
};

enum class VarKind { Fd, Bool, Set };

// Contiguous bounds with interior holes; lo/hi are always members.
struct FDDomain {
  long long lo = 0, hi = -1;  // lo > hi means empty
  std::set<long long> holes;

  bool empty() const { return lo > hi; }
  bool contains(long long v) const {
    return v >= lo && v <= hi && !holes.count(v);
  }
  long long size() const;
  bool singleton() const { return lo == hi; }
  void make_empty() {
    lo = 0;
    hi = -1;
    holes.clear();
  }
  // Re-establish "bounds are members" after narrowing. Returns false if empty.
  bool normalize();
  bool intersect_bounds(long long nlo, long long nhi);  // false if now empty
  bool remove(long long v);                             // false if now empty
  bool assign(long long v);                             // false if v not in dom
  std::vector<long long> values() const;                // ascending
  bool operator==(const FDDomain& o) const {
    return lo == o.lo && hi == o.hi && holes == o.holes;
  }
};

// --- Resolved constraint language ---------------------------------------
// Leaves are VarIds (names and stream indices are resolved at install time);
// oracle queries stay symbolic and are evaluated lazily against the oracle,
// which only grows during a unit.

enum class RExprKind { Lit, Var, Add, Sub, Mul, OracleSuffix, OracleDelta };

struct RExpr {
  RExprKind kind = RExprKind::Lit;
  long long lit = 0;
  VarId var;
  std::vector<RExpr> args;
};

RExpr r_lit(long long v);
RExpr r_var(VarId v);

struct RSetRef {
  bool oracle_from = false;
  VarId set;            // when !oracle_from
  std::vector<RExpr> state;  // when oracle_from: {state expr}
};

enum class RConstraintKind { True, Rel, Between, Member, Conj };
// Same enumerator order as ast::RelOp; the engine casts between them.
enum class RelKind { Eq, Ne, Lt, Le, Gt, Ge };

struct RConstraint {
  RConstraintKind kind = RConstraintKind::True;
  RelKind op = RelKind::Eq;
  std::vector<RExpr> exprs;
  RSetRef set;
  std::vector<RConstraint> parts;
};

enum class Entail3 { True, False, Unknown };
enum class StoreStatus { Stable, Pending, Failed };

struct TellResult {
  bool accepted = false;   // recorded (even if it failed the store)
  bool consistent = true;  // store still satisfiable as far as we know
};

// Facts persist across reset_for_next_unit; everything else is per-unit.
struct FactBase {
  std::map<uint32_t, long long> determinations;       // var idx -> value
  std::map<uint32_t, std::set<long long>> members;    // set var idx -> values
};

class Store {
 public:
  Store();

  // --- variables ---------------------------------------------------------
  VarId new_fd_var(const std::string& name, long long lo, long long hi);
  VarId new_bool_var(const std::string& name);
  VarId new_set_var(const std::string& name, bool persistent = false);

  void declare_stream(const std::string& name, long long lo, long long hi,
                      bool persistent);
  void declare_set_stream(const std::string& name, bool persistent);
  bool has_stream(const std::string& name) const;
  bool stream_is_persistent(const std::string& name) const;
  // Lazily creates the cell on first touch; identity is stable afterwards.
  VarId cell(const std::string& stream, long long index);

  const std::string& name_of(VarId v) const;
  VarKind kind_of(VarId v) const;
  const FDDomain& domain(VarId v) const;
  const std::set<long long>& set_members(VarId v) const;
  std::optional<long long> determined(VarId v) const;
  // All cells of a stream that currently exist, ascending by index.
  std::vector<std::pair<long long, VarId>> stream_cells(
      const std::string& stream) const;

  // --- store operations ----------------------------------------------------
  TellResult tell(const RConstraint& c);
  StoreStatus propagate();
  Entail3 entails(const RConstraint& c);
  // Reified guard: boolean that propagation keeps coherent with entails(c).
  // Idempotent per canonical constraint text.
  VarId reify(const RConstraint& c);

  TellResult assert_fact(VarId cell, long long value);
  TellResult assert_member_fact(VarId set_var, long long value);

  // New unit: domains back to declared bounds, posted constraints and guards
  // dropped, facts re-applied. Variable identities survive.
  void reset_for_next_unit();

  StoreStatus status() const { return status_; }
  bool failed() const { return status_ == StoreStatus::Failed; }
  const FactBase& facts() const { return facts_; }

  void set_oracle(const FactorOracle* fo) { oracle_ = fo; }

  // Exactness cap for the enumeration path (product of component domain
  // sizes). Above it entails may answer Unknown for queries that bounds
  // reasoning alone cannot decide.
  void set_enumeration_cap(unsigned long long cap) { enum_cap_ = cap; }

  std::string print(const RConstraint& c) const;
  std::string print(const RExpr& e) const;

 private:
  struct VarEntry {
    std::string name;
    VarKind kind = VarKind::Fd;
    long long decl_lo = 0, decl_hi = 0;
    FDDomain dom;
    std::set<long long> members;  // Set kind
    bool persistent = false;      // cells of persistent streams / sets
  };
  struct StreamInfo {
    long long lo = 0, hi = 0;
    bool persistent = false;
    bool set_kind = false;
    std::map<long long, VarId> cells;
  };

  VarEntry& entry(VarId v);
  const VarEntry& entry(VarId v) const;

  bool narrow(const RConstraint& c, bool& changed);
  void fail();

  // Interval of an expression under current domains (saturating).
  void expr_interval(const RExpr& e, long long& lo, long long& hi) const;
  // Exact domain-only three-valued check; returns Unknown when bounds/holes
  // cannot decide. Sound in both directions.
  Entail3 eval_domains(const RConstraint& c) const;
  Entail3 eval_rel_domains(RelKind op, const RExpr& a, const RExpr& b) const;
  // Concrete evaluation under an assignment; Unknown only from set atoms and
  // undefined oracle queries.
  Entail3 eval_assigned(const RConstraint& c,
                        const std::map<uint32_t, long long>& asg) const;
  std::optional<long long> eval_expr_assigned(
      const RExpr& e, const std::map<uint32_t, long long>& asg) const;
  std::optional<long long> eval_oracle_expr(const RExpr& e) const;

  void collect_vars(const RExpr& e, std::set<uint32_t>& out) const;
  void collect_vars(const RConstraint& c, std::set<uint32_t>& out) const;
  Entail3 entails_enumerate(const RConstraint& c);

  std::vector<VarEntry> vars_;
  std::map<std::string, StreamInfo> streams_;
  std::vector<RConstraint> posted_;
  std::vector<std::set<uint32_t>> posted_vars_;  // cache, parallel to posted_
  std::vector<std::pair<RConstraint, VarId>> guards_;
  std::map<std::string, VarId> guard_cache_;
  FactBase facts_;
  StoreStatus status_ = StoreStatus::Stable;
  const FactorOracle* oracle_ = nullptr;
  unsigned long long enum_cap_ = 1ull << 16;
};

}  // namespace ntcc
