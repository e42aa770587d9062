#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ntcc/diag.hpp"

namespace ntcc {

// Incremental factor oracle over integer symbols. States are 0..n for a
// learned sequence of n symbols; the spine transition delta(i-1, s_i) = i is
// created on every add, extra forward (factor) links are added along the
// suffix-link chain. The automaton accepts at least every factor of the
// learned sequence. Structure only grows; nothing is ever retracted.
class FactorOracle {
 public:
  FactorOracle(long long sym_lo, long long sym_hi);

  // Appends one symbol; creates state n+1. Throws RuntimeModelError if the
  // symbol lies outside the alphabet bounds.
  void add_symbol(long long symbol);

  long long n() const { return static_cast<long long>(sigma_.size()); }
  bool has_state(long long k) const { return k >= 0 && k <= n(); }

  // suffix(0) == -1; suffix(i) < i for all i.
  long long suffix(long long state) const;
  // Labels of outgoing transitions from `state`.
  std::set<long long> from_set(long long state) const;
  // Target of the transition labeled `symbol`, or -1 if absent.
  long long delta(long long state, long long symbol) const;
  // The i-th learned symbol, 1-based.
  long long symbol_at(long long i) const;

  // Walks transitions from state 0.
  bool is_factor(const std::vector<long long>& word) const;

  // Deterministic per-state listing {state, suffix, outgoing}; used for
  // golden comparisons.
  std::string dump_json() const;

  bool operator==(const FactorOracle& o) const {
    return sigma_ == o.sigma_ && suffix_ == o.suffix_ && delta_ == o.delta_;
  }

 private:
  long long sym_lo_, sym_hi_;
  std::vector<long long> sigma_;                     // learned sequence, s_1..s_n
  std::vector<long long> suffix_;                    // suffix_[i] for state i
  std::vector<std::map<long long, long long>> delta_;  // per-state transitions
};

}  // namespace ntcc
