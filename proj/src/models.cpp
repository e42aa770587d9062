#include "ntcc/models.hpp"

#include <algorithm>
#include <map>

#include "ntcc/diag.hpp"
#include "ntcc/parser.hpp"
#include "ntcc/validate.hpp"

namespace ntcc::models {

namespace {

// Shipped model sources. The files under models/ carry the same bytes; a test
// keeps them from drifting apart.

const char* kChord = R"NTCC(-- Three-pitch arpeggio: one tell now, the rest scheduled with next.
var pitch : 0..127;
alias C = 60;
alias E = 64;
alias G = 67;
outputs pitch;

system = tell(pitch = C) || next (tell(pitch = E) || next tell(pitch = G));
)NTCC";

const char* kFactorial = R"NTCC(-- Guarded-recursion factorial: one multiplication per time-unit.
-- Provide n in unit 1, e.g.  n = 5;  out appears when the countdown hits 0.
var n : 0..12;
var out : 0..479001600;
outputs out;

def FACT(k, acc) = par {
  when k = 0 do tell(out = acc)
  || when k > 0 do next FACT(k - 1, acc * k)
};

system = sum over i in {0..12} { when n = i do FACT(i, 1) };
)NTCC";

const char* kCcfomi = R"NTCC(-- On-line machine improvisation. The environment plays notes
-- (notes[i] = pitch, go = count heard so far); the learner folds them into
-- the factor oracle one per unit, and once enough notes are in, the
-- improviser walks the oracle: continue with the next recorded note or jump
-- through a suffix link and take any learned transition.
persistent stream notes : 0..127;
var go : 0..1000000;
var out : 0..127;
outputs out;

def SYNC(i) = par {
  when oracle.S[i - 1] >= -1 and go >= i do
    par { oracle.add(notes[i]) || next SYNC(i + 1) }
  || unless oracle.S[i - 1] >= -1 and go >= i next SYNC(i)
};

def IMPROV(k) = par {
  when oracle.S[k] = -1 do
    next (tell(out = notes[k + 1]) || IMPROV(k + 1))
  || when oracle.S[k] >= 0 do
    next sum {
      when true do (tell(out = notes[k + 1]) || IMPROV(k + 1));
      when 60 in oracle.from[oracle.S[k]] do
        (tell(out = 60) || IMPROV(oracle.delta[oracle.S[k], 60]));
      when 62 in oracle.from[oracle.S[k]] do
        (tell(out = 62) || IMPROV(oracle.delta[oracle.S[k], 62]));
      when 64 in oracle.from[oracle.S[k]] do
        (tell(out = 64) || IMPROV(oracle.delta[oracle.S[k], 64]));
      when 65 in oracle.from[oracle.S[k]] do
        (tell(out = 65) || IMPROV(oracle.delta[oracle.S[k], 65]))
    }
  || unless oracle.S[k] >= -1 next IMPROV(k)
};

def WAIT(m) = par {
  when go >= m do IMPROV(0)
  || unless go >= m next WAIT(m)
};

def SYSTEM(n) = SYNC(1) || WAIT(n);

system = SYSTEM(4);
)NTCC";

const char* kFilters = R"NTCC(-- Two objects coordinate four filters. A filter that received input waits on
-- its object; the object grants the work to exactly one waiter (guarded
-- choice), stays busy until the environment tells end, then takes the next
-- waiter. busy/obusy tells make the occupancy observable in the trace.
stream work : 0..4;
stream end : 0..1;
stream input : 0..1;
stream busy : 1..2;
stream obusy : 0..1;
set stream wait;
outputs work, busy, obusy;

def IdleFilter(i, j) = par {
  when input[i] = 1 do next WaitingFilter(i, j)
  || unless input[i] = 1 next IdleFilter(i, j)
};

def WaitingFilter(i, j) = par {
  tell(i in wait[j])
  || when work[j] = i do next BusyFilter(i, j)
  || unless work[j] = i next WaitingFilter(i, j)
};

def BusyFilter(i, j) = par {
  tell(busy[i] = j)
  || when end[j] = 1 do next IdleFilter(i, j)
  || unless end[j] = 1 next BusyFilter(i, j)
};

def IdleObject(j) = par {
  sum over x in {1..4} { when x in wait[j] do (tell(work[j] = x) || next BusyObject(j)) }
  || unless work[j] >= 1 next IdleObject(j)
};

def BusyObject(j) = par {
  tell(obusy[j] = 1)
  || when end[j] = 1 do next IdleObject(j)
  || unless end[j] = 1 next BusyObject(j)
};

system = IdleObject(1) || IdleObject(2)
  || IdleFilter(1, 1) || IdleFilter(2, 2) || IdleFilter(3, 1) || IdleFilter(4, 2);
)NTCC";

const char* kStress = R"NTCC(-- Wide synthetic load: 147 independent cells, six agent installations each
-- per unit, renewed for as long as the run lasts.
stream beat : 0..1;
var never : 0..1;
outputs beat;

def CELL(i) = par {
  tell(beat[i] = 1)
  || when beat[i] = 1 do skip
  || unless never = 1 next CELL(i)
};

system = par over i in {1..147} { CELL(i) };
)NTCC";

const std::map<std::string, const char*>& table() {
  static const std::map<std::string, const char*> t = {
      {"chord", kChord},
      {"factorial", kFactorial},
      {"ccfomi", kCcfomi},
      {"filters", kFilters},
      {"stress", kStress},
  };
  return t;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : table()) out.push_back(name);
  return out;
}

bool is_builtin(const std::string& name) { return table().count(name) != 0; }

const std::string& builtin_source(const std::string& name) {
  auto it = table().find(name);
  if (it == table().end())
    throw RuntimeModelError("unknown built-in model '" + name + "'");
  static std::map<std::string, std::string> cache;
  auto cit = cache.find(name);
  if (cit == cache.end()) cit = cache.emplace(name, it->second).first;
  return cit->second;
}

ast::ModelAst load_builtin(const std::string& name) {
  const std::string& src = builtin_source(name);
  ParseResult r = parse_model(src);
  if (!r.ok())
    throw RuntimeModelError("built-in model '" + name +
                            "' failed to parse: " + r.error->message());
  auto errs = validate(*r.model);
  if (!errs.empty())
    throw RuntimeModelError("built-in model '" + name +
                            "' failed validation: " + errs.front().message);
  return std::move(*r.model);
}

// --- shared env parsing ------------------------------------------------------

namespace {

struct EnvFacts {
  std::optional<long long> go;
  std::map<long long, long long> notes;  // notes[i] = v
  std::map<long long, bool> end_told;    // end[j] = 1
};

EnvFacts parse_env(const std::vector<std::string>& texts) {
  EnvFacts f;
  for (const auto& t : texts) {
    ConstraintParseResult r = parse_tell_list(t);
    if (!r.ok()) continue;  // checkers only mine well-formed tells
    for (const auto& c : *r.tells) {
      if (c.kind != ast::ConstraintKind::Rel || c.op != ast::RelOp::Eq)
        continue;
      const ast::Expr& lhs = c.exprs[0];
      const ast::Expr& rhs = c.exprs[1];
      if (rhs.kind != ast::ExprKind::Lit) continue;
      if (lhs.kind == ast::ExprKind::Name && lhs.name == "go")
        f.go = rhs.lit;
      else if (lhs.kind == ast::ExprKind::Cell &&
               lhs.args[0].kind == ast::ExprKind::Lit) {
        if (lhs.name == "notes") f.notes[lhs.args[0].lit] = rhs.lit;
        if (lhs.name == "end" && rhs.lit == 1) f.end_told[lhs.args[0].lit] = true;
      }
    }
  }
  return f;
}

void require_contiguous(const Trace& trace) {
  for (size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].unit != i + 1)
      throw RuntimeModelError(
          "trace units are not contiguous from 1 (record " +
          std::to_string(i) + " has unit " + std::to_string(trace[i].unit) +
          ")");
  }
}

std::optional<long long> output_of(const TraceRecord& r,
                                   const std::string& key) {
  auto it = r.outputs.find(key);
  if (it == r.outputs.end()) return std::nullopt;
  return it->second;
}

CheckReport violation(CheckReport rep, uint64_t unit, std::string witness) {
  rep.pass = false;
  rep.first_violation_unit = unit;
  rep.witness = std::move(witness);
  return rep;
}

}  // namespace

// --- mutual exclusion ------------------------------------------------------

CheckReport check_mutual_exclusion(const Trace& trace) {
  CheckReport rep;
  rep.property = "filter-mutual-exclusion";
  require_contiguous(trace);

  for (size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    EnvFacts env = parse_env(r.env);

    // At most one filter busy per object in any unit.
    std::map<long long, std::vector<int>> busy_by_obj;
    for (int f = 1; f <= 4; ++f) {
      if (auto j = output_of(r, "busy[" + std::to_string(f) + "]"))
        busy_by_obj[*j].push_back(f);
    }
    for (const auto& [obj, fs] : busy_by_obj) {
      if (fs.size() > 1)
        return violation(rep, r.unit,
                         "filters " + std::to_string(fs[0]) + " and " +
                             std::to_string(fs[1]) + " both busy on object " +
                             std::to_string(obj));
    }

    // A busy stretch must start right after a matching grant.
    for (const auto& [obj, fs] : busy_by_obj) {
      int f = fs[0];
      std::string key = "busy[" + std::to_string(f) + "]";
      bool continued =
          i > 0 && output_of(trace[i - 1], key) == std::optional<long long>(obj);
      if (continued) continue;
      if (i == 0)
        return violation(rep, r.unit,
                         "filter " + std::to_string(f) +
                             " busy in the first unit without a grant");
      auto grant =
          output_of(trace[i - 1], "work[" + std::to_string(obj) + "]");
      if (grant != std::optional<long long>(f))
        return violation(rep, r.unit,
                         "filter " + std::to_string(f) + " busy on object " +
                             std::to_string(obj) +
                             " without work[" + std::to_string(obj) + "] = " +
                             std::to_string(f) + " in the previous unit");
    }

    // No grant while the object is occupied, except in its hand-off unit.
    for (long long obj = 1; obj <= 2; ++obj) {
      bool occupied =
          output_of(r, "obusy[" + std::to_string(obj) + "]").has_value();
      bool granted =
          output_of(r, "work[" + std::to_string(obj) + "]").has_value();
      if (occupied && granted && !env.end_told.count(obj))
        return violation(rep, r.unit,
                         "object " + std::to_string(obj) +
                             " granted work while occupied and not ending");
    }
  }
  return rep;
}

// --- improvisation consistency ----------------------------------------------

CheckReport check_improv_consistency(const Trace& trace,
                                     const FactorOracle& fo) {
  CheckReport rep;
  rep.property = "improv-consistency";
  require_contiguous(trace);

  std::optional<long long> wait_n;
  std::optional<uint64_t> gate_unit;  // first unit where go >= wait_n held
  std::map<long long, long long> notes;
  long long adds_total = 0;
  std::optional<long long> prev_k;

  for (const TraceRecord& r : trace) {
    EnvFacts env = parse_env(r.env);
    for (const auto& [i, v] : env.notes) notes[i] = v;

    for (const CallEvent& c : r.calls) {
      if (c.def == "WAIT" && !wait_n && !c.args.empty()) wait_n = c.args[0];
    }
    if (wait_n && !gate_unit && env.go && *env.go >= *wait_n)
      gate_unit = r.unit;

    // Learning is gated: the i-th symbol needs go >= i in its unit, and must
    // match what the reference oracle learned at that position.
    for (long long sym : r.oracle_adds) {
      ++adds_total;
      if (!env.go || *env.go < adds_total)
        return violation(rep, r.unit,
                         "symbol #" + std::to_string(adds_total) +
                             " learned without go >= " +
                             std::to_string(adds_total));
      if (adds_total > fo.n() || fo.symbol_at(adds_total) != sym)
        return violation(rep, r.unit,
                         "learned symbol #" + std::to_string(adds_total) +
                             " = " + std::to_string(sym) +
                             " differs from the player input");
    }

    std::optional<long long> cur_k;
    int improv_calls = 0;
    for (const CallEvent& c : r.calls) {
      if (c.def == "IMPROV" && !c.args.empty()) {
        ++improv_calls;
        cur_k = c.args[0];
      }
    }
    if (improv_calls > 1)
      return violation(rep, r.unit, "more than one improviser position");

    if (auto out = output_of(r, "out")) {
      if (!gate_unit || r.unit < *gate_unit)
        return violation(rep, r.unit,
                         "output before the player finished the lead-in");
      if (!prev_k)
        return violation(rep, r.unit, "output without an improviser position");
      long long p = *prev_k;
      bool ok = false;
      // Continuation: the next recorded player note, position advances by one.
      auto nit = notes.find(p + 1);
      if (nit != notes.end() && nit->second == *out && cur_k &&
          *cur_k == p + 1)
        ok = true;
      // Recombination: follow the suffix link of p, then one learned
      // transition labelled with the output symbol.
      if (!ok && fo.has_state(p)) {
        long long s = fo.suffix(p);
        if (s >= 0 && fo.from_set(s).count(*out)) {
          long long tgt = fo.delta(s, *out);
          if (cur_k && *cur_k == tgt) ok = true;
        }
      }
      if (!ok)
        return violation(rep, r.unit,
                         "output " + std::to_string(*out) + " from position " +
                             std::to_string(p) +
                             " is neither the continuation nor a learned "
                             "transition from its suffix");
    } else if (prev_k && cur_k && *cur_k != *prev_k && *cur_k != *prev_k + 1) {
      return violation(rep, r.unit,
                       "silent position jump " + std::to_string(*prev_k) +
                           " -> " + std::to_string(*cur_k));
    }

    if (cur_k) prev_k = cur_k;
  }
  return rep;
}

// --- reference oracle ---------------------------------------------------------

FactorOracle build_player_oracle(const EventStream& events, uint64_t units) {
  FactorOracle fo(0, 127);
  std::map<long long, long long> notes;
  long long go = 0;
  long long added = 0;
  for (uint64_t u = 1; u <= units; ++u) {
    EnvFacts env = parse_env(events.tells_for(u));
    if (env.go) go = *env.go;
    for (const auto& [i, v] : env.notes) notes[i] = v;
    // The gated learner folds in at most one symbol per unit.
    if (go >= added + 1) {
      auto it = notes.find(added + 1);
      if (it != notes.end()) {
        fo.add_symbol(it->second);
        ++added;
      }
    }
  }
  return fo;
}

}  // namespace ntcc::models
