#include "ntcc/trace.hpp"

#include <sstream>

#include "json.hpp"

#include "ntcc/diag.hpp"

namespace ntcc {

using json = nlohmann::ordered_json;

bool TraceRecord::operator==(const TraceRecord& o) const {
  return unit == o.unit && env == o.env && fired == o.fired &&
         choices == o.choices && calls == o.calls &&
         oracle_adds == o.oracle_adds && outputs == o.outputs &&
         processes == o.processes && status == o.status;
}

std::string to_json_line(const TraceRecord& r) {
  // Keys are emitted in alphabetical order by construction.
  json j;
  json calls = json::array();
  for (const auto& c : r.calls) {
    json e;
    e["args"] = c.args;
    e["def"] = c.def;
    calls.push_back(std::move(e));
  }
  j["calls"] = std::move(calls);
  json choices = json::array();
  for (const auto& c : r.choices) {
    json e;
    e["branch"] = c.branch;
    e["enabled"] = c.enabled;
    e["guard"] = c.guard;
    choices.push_back(std::move(e));
  }
  j["choices"] = std::move(choices);
  j["env"] = r.env;
  json fired = json::array();
  for (const auto& f : r.fired) {
    json e;
    e["guard"] = f.guard;
    e["kind"] = f.kind;
    fired.push_back(std::move(e));
  }
  j["fired"] = std::move(fired);
  j["oracle_adds"] = r.oracle_adds;
  j["outputs"] = json(r.outputs);
  j["processes"] = r.processes;
  j["status"] = r.status;
  j["unit"] = r.unit;
  return j.dump();
}

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw RuntimeModelError("malformed trace record: " + what);
}

}  // namespace

TraceRecord trace_record_from_json(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad("not a JSON object");
  TraceRecord r;
  try {
    r.unit = j.at("unit").get<uint64_t>();
    r.env = j.at("env").get<std::vector<std::string>>();
    for (const auto& e : j.at("fired")) {
      FiredGuard f;
      f.guard = e.at("guard").get<std::string>();
      f.kind = e.at("kind").get<std::string>();
      r.fired.push_back(std::move(f));
    }
    for (const auto& e : j.at("choices")) {
      SumChoice c;
      c.guard = e.at("guard").get<std::string>();
      c.branch = e.at("branch").get<int>();
      c.enabled = e.at("enabled").get<std::vector<int>>();
      r.choices.push_back(std::move(c));
    }
    for (const auto& e : j.at("calls")) {
      CallEvent c;
      c.def = e.at("def").get<std::string>();
      c.args = e.at("args").get<std::vector<long long>>();
      r.calls.push_back(std::move(c));
    }
    r.oracle_adds = j.at("oracle_adds").get<std::vector<long long>>();
    r.outputs = j.at("outputs").get<std::map<std::string, long long>>();
    r.processes = j.at("processes").get<uint64_t>();
    r.status = j.at("status").get<std::string>();
  } catch (const json::exception& e) {
    bad(e.what());
  }
  if (r.status != "ok" && r.status != "failed") bad("bad status value");
  return r;
}

std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  for (const auto& r : t) {
    out += to_json_line(r);
    out += '\n';
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      t.push_back(trace_record_from_json(line));
    } catch (const RuntimeModelError& e) {
      throw RuntimeModelError("line " + std::to_string(lineno) + ": " +
                              e.what());
    }
  }
  return t;
}

// --- event streams ------------------------------------------------------------

std::vector<std::string> EventStream::tells_for(uint64_t unit) const {
  std::vector<std::string> out;
  for (const auto& r : records)
    if (r.unit == unit)
      out.insert(out.end(), r.tells.begin(), r.tells.end());
  return out;
}

uint64_t EventStream::max_unit() const {
  uint64_t m = 0;
  for (const auto& r : records) m = std::max(m, r.unit);
  return m;
}

std::string event_stream_to_jsonl(const EventStream& s) {
  std::string out;
  for (const auto& r : s.records) {
    json j;
    j["tells"] = r.tells;
    j["unit"] = r.unit;
    out += j.dump();
    out += '\n';
  }
  return out;
}

EventStream event_stream_from_jsonl(const std::string& text) {
  EventStream s;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  uint64_t prev = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Tolerate blank lines and full-line # comments in hand-written inputs.
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw RuntimeModelError("events line " + std::to_string(lineno) +
                              ": not a JSON object");
    EventRecord r;
    try {
      r.unit = j.at("unit").get<uint64_t>();
      r.tells = j.at("tells").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw RuntimeModelError("events line " + std::to_string(lineno) + ": " +
                              e.what());
    }
    if (r.unit < 1)
      throw RuntimeModelError("events line " + std::to_string(lineno) +
                              ": unit must be >= 1");
    if (r.unit < prev)
      throw RuntimeModelError("events line " + std::to_string(lineno) +
                              ": units must be non-decreasing");
    prev = r.unit;
    s.records.push_back(std::move(r));
  }
  return s;
}

}  // namespace ntcc
