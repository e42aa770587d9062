#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ntcc/ast.hpp"
#include "ntcc/factor_oracle.hpp"
#include "ntcc/store.hpp"
#include "ntcc/trace.hpp"

namespace ntcc {

// Deterministic RNG wrapper. Raw draws come from mt19937_64; the mappings to
// a bounded index / unit interval are ours, so traces are reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  uint64_t raw() { return gen_(); }
  // Uniform in [0, n); n >= 1. Bitmask rejection, no modulo bias.
  size_t uniform_below(size_t n);
  // Uniform in [0, 1) with 53-bit resolution.
  double unit_real();

 private:
  std::mt19937_64 gen_;
};

// Uniform choice among enabled branch indices.
size_t choose(Rng& rng, const std::vector<int>& enabled);

struct StarPolicy {
  enum class Kind { Fixed, Geometric, Schedule };
  Kind kind = Kind::Geometric;
  long long fixed = 0;
  double p = 0.5;
  std::vector<long long> schedule;
  size_t next_entry = 0;  // consumed position for Schedule
};

// "fixed:3" | "geometric:0.5" | "schedule:1,2,5". Empty option on bad text.
std::optional<StarPolicy> parse_star_policy(const std::string& text);

// Draw a delay d >= 0: Fixed -> k; Geometric -> failures before first success
// at rate p; Schedule -> next entry (last entry repeats once exhausted).
long long star_delay(StarPolicy& policy, Rng& rng);

struct EngineOptions {
  uint64_t seed = 0;
  StarPolicy star;
  bool continue_on_fail = false;
};

// Executes one model over discrete time-units: tells accumulate in the store,
// when/sum watchers fire at stable points, unless resolves at quiescence, and
// next/bang/star feed the following units.
class Engine {
 public:
  Engine(const ast::ModelAst& model, const EngineOptions& opts);
  ~Engine();

  // One unit with the given environment tells (already parsed). Appends the
  // unit's record to the trace and returns it.
  const TraceRecord& run_time_unit(const std::vector<ast::Constraint>& env,
                                   const std::vector<std::string>& env_texts);
  // Parses the texts first; convenience for CLI/REPL.
  const TraceRecord& run_time_unit_texts(const std::vector<std::string>& texts);

  // Runs units 1..n; stops early on failure unless continue_on_fail.
  const Trace& run(const EventStream& events, uint64_t units);

  const Trace& trace() const { return trace_; }
  const Store& store() const { return *store_; }
  const FactorOracle& oracle() const { return *oracle_; }
  uint64_t current_unit() const { return unit_; }
  // Set when a unit failed and continue_on_fail was off.
  std::optional<uint64_t> failed_unit() const { return failed_unit_; }

 private:
  struct Scope;
  struct Closure {
    const ast::Process* proc = nullptr;
    std::shared_ptr<const Scope> scope;
  };
  // Watchers memoize entailment: True and False are absorbing within a unit,
  // so only Unknown guards are re-queried on later scans.
  struct WhenWatcher {
    RConstraint rc;
    std::string text;
    Closure cont;
    Entail3 state = Entail3::Unknown;
    bool done = false;
  };
  struct SumBranch {
    RConstraint rc;
    std::string text;
    Closure cont;
    Entail3 state = Entail3::Unknown;
  };
  struct SumGroup {
    std::vector<SumBranch> branches;
    bool done = false;
  };
  struct UnlessWatcher {
    RConstraint rc;
    std::string text;
    Closure cont;
    Entail3 state = Entail3::Unknown;
  };

  void install(const Closure& c);
  void drain_and_fire();
  bool scan_watchers();  // true if anything fired
  void resolve_unless();
  void extract_outputs(TraceRecord& rec);

  long long eval_ground(const ast::Expr& e,
                        const std::shared_ptr<const Scope>& scope,
                        bool allow_store_reads);
  RExpr resolve_expr(const ast::Expr& e,
                     const std::shared_ptr<const Scope>& scope);
  RConstraint resolve_constraint(const ast::Constraint& c,
                                 const std::shared_ptr<const Scope>& scope);

  const ast::ModelAst& model_;
  EngineOptions opts_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<FactorOracle> oracle_;
  Rng rng_;

  std::map<std::string, const ast::Definition*> defs_;
  std::map<std::string, VarId> globals_;

  uint64_t unit_ = 0;
  std::deque<Closure> now_;
  std::vector<Closure> next_;
  std::map<uint64_t, std::vector<Closure>> future_;  // star arrivals
  std::vector<WhenWatcher> whens_;
  std::vector<SumGroup> sums_;
  std::vector<UnlessWatcher> unlesses_;

  TraceRecord rec_;  // record under construction
  Trace trace_;
  std::optional<uint64_t> failed_unit_;
  uint64_t local_counter_ = 0;
};

// Parse + validate + run in one step (throws RuntimeModelError on validation
// failure); used by tests and the model checkers.
Trace run_model(const ast::ModelAst& model, const EventStream& events,
                uint64_t units, const EngineOptions& opts);

}  // namespace ntcc
