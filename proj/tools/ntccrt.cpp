#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ntcc/diag.hpp"
#include "ntcc/engine.hpp"
#include "ntcc/models.hpp"
#include "ntcc/parser.hpp"
#include "ntcc/validate.hpp"

namespace {

// Exit codes: 0 success, 1 static error (usage, parse, validation, I/O),
// 2 runtime inconsistency or failed check, 3 benchmark over budget.
constexpr int kOk = 0;
constexpr int kStaticError = 1;
constexpr int kRuntimeError = 2;
constexpr int kOverBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A model argument is either a built-in name or a path to a source file.
ntcc::ast::ModelAst load_model(const std::string& arg) {
  if (ntcc::models::is_builtin(arg)) return ntcc::models::load_builtin(arg);
  std::string src = read_file(arg);
  ntcc::ParseResult r = ntcc::parse_model(src);
  if (!r.ok()) throw std::runtime_error(arg + ": " + r.error->message());
  auto errs = ntcc::validate(*r.model);
  if (!errs.empty()) {
    std::ostringstream ss;
    for (size_t i = 0; i < errs.size(); ++i) {
      if (i) ss << "\n";
      ss << arg << ": " << errs[i].message;
    }
    throw std::runtime_error(ss.str());
  }
  return std::move(*r.model);
}

ntcc::EventStream load_events(const std::string& path) {
  if (path.empty()) return {};
  try {
    return ntcc::event_stream_from_jsonl(read_file(path));
  } catch (const ntcc::RuntimeModelError& e) {
    // Malformed input files are static errors, not runtime failures.
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct RunFlags {
  std::string model;
  std::string events_path;
  std::string output_path;
  uint64_t units = 0;  // 0 = events span, or 10 without events
  uint64_t seed = 0;
  std::string star = "geometric:0.5";
  bool continue_on_fail = false;
};

void add_engine_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("model", f.model, "built-in name or path to a source file")
      ->required();
  cmd->add_option("--events", f.events_path,
                  "JSONL event stream with per-unit environment tells");
  cmd->add_option("--seed", f.seed, "RNG seed")->envname("NTCCRT_SEED");
  cmd->add_option("--star", f.star,
                  "star delay policy: fixed:K | geometric:P | schedule:A,B,..")
      ->capture_default_str();
  cmd->add_flag("--continue-on-fail", f.continue_on_fail,
                "keep running after an inconsistent unit");
}

ntcc::EngineOptions make_options(const RunFlags& f) {
  ntcc::EngineOptions opts;
  opts.seed = f.seed;
  auto star = ntcc::parse_star_policy(f.star);
  if (!star) throw std::runtime_error("bad star policy '" + f.star + "'");
  opts.star = *star;
  opts.continue_on_fail = f.continue_on_fail;
  return opts;
}

uint64_t effective_units(const RunFlags& f, const ntcc::EventStream& events) {
  if (f.units > 0) return f.units;
  if (events.max_unit() > 0) return events.max_unit();
  return 10;
}

int cmd_run(const RunFlags& f) {
  ntcc::ast::ModelAst model = load_model(f.model);
  ntcc::EventStream events = load_events(f.events_path);
  ntcc::Engine engine(model, make_options(f));
  engine.run(events, effective_units(f, events));

  std::string jsonl = ntcc::trace_to_jsonl(engine.trace());
  if (f.output_path.empty()) {
    std::cout << jsonl;
  } else {
    std::ofstream out(f.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + f.output_path + "'");
    out << jsonl;
  }

  for (const auto& rec : engine.trace()) {
    if (rec.status == "failed") {
      std::cerr << "unit " << rec.unit << ": store inconsistent\n";
      return kRuntimeError;
    }
  }
  return kOk;
}

int cmd_repl(const RunFlags& f) {
  ntcc::ast::ModelAst model = load_model(f.model);
  ntcc::Engine engine(model, make_options(f));
  std::cerr << "one line of tells per unit (e.g. `pitch = 60, go = 1`); "
               "empty line for none; .oracle dumps the oracle; .quit exits\n";
  std::string line;
  bool failed = false;
  while (true) {
    std::cerr << "[unit " << (engine.current_unit() + 1) << "] " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == ".quit" || line == ".q") break;
    if (line == ".oracle") {
      std::cout << engine.oracle().dump_json() << "\n";
      continue;
    }
    std::vector<std::string> tells;
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      tells.push_back(line);
    try {
      const ntcc::TraceRecord& rec = engine.run_time_unit_texts(tells);
      std::cout << ntcc::to_json_line(rec) << "\n";
      if (rec.status == "failed") {
        failed = true;
        if (!f.continue_on_fail) break;
      }
    } catch (const ntcc::RuntimeModelError& e) {
      std::cerr << "error: " << e.what() << "\n";
    }
  }
  return failed ? kRuntimeError : kOk;
}

int cmd_bench(const RunFlags& f, double budget_ms) {
  ntcc::ast::ModelAst model = load_model(f.model);
  ntcc::EventStream events = load_events(f.events_path);
  uint64_t units = f.units > 0 ? f.units : 300;

  // Parse the per-unit tells up front so the loop times execution only.
  std::vector<std::vector<ntcc::ast::Constraint>> parsed(units + 1);
  std::vector<std::vector<std::string>> texts(units + 1);
  for (uint64_t u = 1; u <= units; ++u) {
    texts[u] = events.tells_for(u);
    for (const auto& t : texts[u]) {
      ntcc::ConstraintParseResult r = ntcc::parse_tell_list(t);
      if (!r.ok())
        throw std::runtime_error("bad tell '" + t + "': " + r.error->message());
      for (auto& c : *r.tells) parsed[u].push_back(std::move(c));
    }
  }

  ntcc::Engine engine(model, make_options(f));
  double total_ms = 0, max_ms = 0;
  uint64_t max_unit = 0, processes = 0;
  for (uint64_t u = 1; u <= units; ++u) {
    auto t0 = std::chrono::steady_clock::now();
    const ntcc::TraceRecord& rec = engine.run_time_unit(parsed[u], texts[u]);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    total_ms += ms;
    if (ms > max_ms) {
      max_ms = ms;
      max_unit = u;
    }
    processes = rec.processes;
    if (rec.status == "failed" && !f.continue_on_fail) {
      std::cerr << "unit " << u << ": store inconsistent\n";
      return kRuntimeError;
    }
  }
  double mean_ms = total_ms / static_cast<double>(units);
  bool pass = mean_ms < budget_ms;
  std::cout << "units=" << units << " processes_last=" << processes
            << " mean_ms=" << mean_ms << " max_ms=" << max_ms << " (unit "
            << max_unit << ")"
            << " budget_ms=" << budget_ms << " -> "
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kOverBudget;
}

int cmd_check(const std::string& property, const std::string& trace_path,
              const std::string& events_path, bool as_json) {
  ntcc::Trace trace;
  try {
    trace = ntcc::trace_from_jsonl(read_file(trace_path));
  } catch (const ntcc::RuntimeModelError& e) {
    throw std::runtime_error(trace_path + ": " + e.what());
  }
  ntcc::models::CheckReport rep;
  if (property == "mutex") {
    rep = ntcc::models::check_mutual_exclusion(trace);
  } else if (property == "improv") {
    if (events_path.empty())
      throw std::runtime_error("improv check needs --events (player input)");
    ntcc::EventStream events = load_events(events_path);
    ntcc::FactorOracle oracle =
        ntcc::models::build_player_oracle(events, trace.size());
    rep = ntcc::models::check_improv_consistency(trace, oracle);
  } else {
    throw std::runtime_error("unknown property '" + property +
                             "' (expected mutex or improv)");
  }

  if (as_json) {
    nlohmann::ordered_json j;
    j["property"] = rep.property;
    j["pass"] = rep.pass;
    if (!rep.pass) {
      j["first_violation_unit"] = rep.first_violation_unit;
      j["witness"] = rep.witness;
    }
    std::cout << j.dump() << "\n";
  } else if (rep.pass) {
    std::cout << rep.property << ": PASS\n";
  } else {
    std::cout << rep.property << ": FAIL at unit " << rep.first_violation_unit
              << ": " << rep.witness << "\n";
  }
  return rep.pass ? kOk : kRuntimeError;
}

int cmd_validate(const std::string& arg) {
  load_model(arg);  // throws on any problem
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ntccrt — timed concurrent constraint runtime"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run a model, JSONL trace out");
  add_engine_flags(run, run_flags);
  run->add_option("--units", run_flags.units,
                  "time-units to run (default: event span, else 10)");
  run->add_option("-o,--output", run_flags.output_path,
                  "write the trace here instead of stdout");

  RunFlags repl_flags;
  CLI::App* repl =
      app.add_subcommand("repl", "interactive: one unit per input line");
  add_engine_flags(repl, repl_flags);

  RunFlags bench_flags;
  double budget_ms = 30.0;
  CLI::App* bench =
      app.add_subcommand("bench", "time per-unit execution against a budget");
  add_engine_flags(bench, bench_flags);
  bench->add_option("--units", bench_flags.units, "time-units (default 300)");
  bench->add_option("--budget-ms", budget_ms, "per-unit mean budget")
      ->capture_default_str();

  std::string check_property, check_trace, check_events;
  bool check_json = false;
  CLI::App* check =
      app.add_subcommand("check", "verify a trace: mutex | improv");
  check->add_option("property", check_property, "mutex | improv")->required();
  check->add_option("--trace", check_trace, "JSONL trace file")->required();
  check->add_option("--events", check_events,
                    "JSONL event stream the trace was produced with");
  check->add_flag("--json", check_json, "machine-readable report");

  std::string validate_arg;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "parse and validate a model");
  validate_cmd->add_option("model", validate_arg, "built-in name or file path")
      ->required();

  CLI::App* models_cmd =
      app.add_subcommand("models", "list built-in model names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kStaticError;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (repl->parsed()) return cmd_repl(repl_flags);
    if (bench->parsed()) return cmd_bench(bench_flags, budget_ms);
    if (check->parsed())
      return cmd_check(check_property, check_trace, check_events, check_json);
    if (validate_cmd->parsed()) return cmd_validate(validate_arg);
    if (models_cmd->parsed()) {
      for (const auto& n : ntcc::models::builtin_names())
        std::cout << n << "\n";
      return kOk;
    }
  } catch (const ntcc::StoreError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const ntcc::RuntimeModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStaticError;
  }
  return kOk;
}
