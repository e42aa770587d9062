#include "ntcc/factor_oracle.hpp"

#include <sstream>

namespace ntcc {

FactorOracle::FactorOracle(long long sym_lo, long long sym_hi)
    : sym_lo_(sym_lo), sym_hi_(sym_hi) {
  if (sym_lo > sym_hi)
    throw RuntimeModelError("factor oracle alphabet bounds are inverted");
  suffix_.push_back(-1);  // state 0
  delta_.emplace_back();
}

void FactorOracle::add_symbol(long long symbol) {
  if (symbol < sym_lo_ || symbol > sym_hi_)
    throw RuntimeModelError("symbol " + std::to_string(symbol) +
                            " outside the oracle alphabet");
  long long m = n();  // current last state
  sigma_.push_back(symbol);
  suffix_.push_back(0);
  delta_.emplace_back();
  long long created = m + 1;
  delta_[static_cast<size_t>(m)][symbol] = created;

  // Walk the suffix chain adding forward links until the symbol is known.
  long long k = suffix_[static_cast<size_t>(m)];
  while (k > -1 &&
         !delta_[static_cast<size_t>(k)].count(symbol)) {
    delta_[static_cast<size_t>(k)][symbol] = created;
    k = suffix_[static_cast<size_t>(k)];
  }
  suffix_[static_cast<size_t>(created)] =
      k == -1 ? 0 : delta_[static_cast<size_t>(k)][symbol];
}

long long FactorOracle::suffix(long long state) const {
  if (!has_state(state))
    throw RuntimeModelError("suffix of unknown oracle state " +
                            std::to_string(state));
  return suffix_[static_cast<size_t>(state)];
}

std::set<long long> FactorOracle::from_set(long long state) const {
  if (!has_state(state))
    throw RuntimeModelError("from-set of unknown oracle state " +
                            std::to_string(state));
  std::set<long long> out;
  for (const auto& [sym, _] : delta_[static_cast<size_t>(state)]) {
    (void)_;
    out.insert(sym);
  }
  return out;
}

long long FactorOracle::delta(long long state, long long symbol) const {
  if (!has_state(state))
    throw RuntimeModelError("transition from unknown oracle state " +
                            std::to_string(state));
  const auto& row = delta_[static_cast<size_t>(state)];
  auto it = row.find(symbol);
  return it == row.end() ? -1 : it->second;
}

long long FactorOracle::symbol_at(long long i) const {
  if (i < 1 || i > n())
    throw RuntimeModelError("learned symbol index " + std::to_string(i) +
                            " out of range");
  return sigma_[static_cast<size_t>(i - 1)];
}

bool FactorOracle::is_factor(const std::vector<long long>& word) const {
  long long state = 0;
  for (long long sym : word) {
    long long nxt = delta(state, sym);
    if (nxt < 0) return false;
    state = nxt;
  }
  return true;
}

std::string FactorOracle::dump_json() const {
  std::ostringstream out;
  out << "[";
  for (long long s = 0; s <= n(); ++s) {
    if (s) out << ",";
    out << "{\"state\":" << s << ",\"suffix\":" << suffix_[static_cast<size_t>(s)]
        << ",\"outgoing\":{";
    bool first = true;
    for (const auto& [sym, tgt] : delta_[static_cast<size_t>(s)]) {
      if (!first) out << ",";
      first = false;
      out << "\"" << sym << "\":" << tgt;
    }
    out << "}}";
  }
  out << "]";
  return out.str();
}

}  // namespace ntcc
