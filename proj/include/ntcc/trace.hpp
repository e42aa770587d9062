#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ntcc {

// One record per time-unit. Serialized as JSON Lines with keys in sorted
// order and integer-only values, so identical runs are byte-identical.

struct FiredGuard {
  std::string guard;  // printed constraint, fully instantiated
  std::string kind;   // "when" | "unless"
  bool operator==(const FiredGuard& o) const {
    return guard == o.guard && kind == o.kind;
  }
};

struct SumChoice {
  std::string guard;         // guard of the chosen branch
  int branch = 0;            // chosen index within the sum
  std::vector<int> enabled;  // indices whose guards were entailed
  bool operator==(const SumChoice& o) const {
    return guard == o.guard && branch == o.branch && enabled == o.enabled;
  }
};

struct CallEvent {
  std::string def;
  std::vector<long long> args;
  bool operator==(const CallEvent& o) const {
    return def == o.def && args == o.args;
  }
};

struct TraceRecord {
  uint64_t unit = 0;
  std::vector<std::string> env;  // tells as given by the environment
  std::vector<FiredGuard> fired;
  std::vector<SumChoice> choices;
  std::vector<CallEvent> calls;
  std::vector<long long> oracle_adds;
  std::map<std::string, long long> outputs;  // "pitch" / "work[1]" -> value
  uint64_t processes = 0;                    // agent installations this unit
  std::string status = "ok";                 // "ok" | "failed"

  bool operator==(const TraceRecord& o) const;
};

using Trace = std::vector<TraceRecord>;

std::string to_json_line(const TraceRecord& r);
// Throws RuntimeModelError on malformed input.
TraceRecord trace_record_from_json(const std::string& line);

std::string trace_to_jsonl(const Trace& t);
Trace trace_from_jsonl(const std::string& text);

// --- environment input ----------------------------------------------------
// JSON Lines, one record per unit: {"unit": n, "tells": ["go = 1", ...]}.
// Units must be >= 1 and non-decreasing; absent units mean "no tells".
struct EventRecord {
  uint64_t unit = 0;
  std::vector<std::string> tells;
};

struct EventStream {
  std::vector<EventRecord> records;
  std::vector<std::string> tells_for(uint64_t unit) const;
  uint64_t max_unit() const;
};

std::string event_stream_to_jsonl(const EventStream& s);
// Throws RuntimeModelError with a line number on malformed input.
EventStream event_stream_from_jsonl(const std::string& text);

}  // namespace ntcc
