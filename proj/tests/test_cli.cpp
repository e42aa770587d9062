#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ntcc/trace.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() /
                 ("ntcc_cli_" + std::to_string((long)getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string write_temp(const std::string& name, const std::string& content) {
  fs::path p = work_dir() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

CmdResult run_cli(const std::string& args, const std::string& stdin_data = "",
                  const std::string& env_prefix = "") {
  static int counter = 0;
  int id = counter++;
  fs::path outp = work_dir() / ("out" + std::to_string(id));
  fs::path errp = work_dir() / ("err" + std::to_string(id));
  std::string cmd = env_prefix + std::string(NTCCRT_BIN) + " " + args + " >" +
                    outp.string() + " 2>" + errp.string();
  if (!stdin_data.empty()) {
    cmd += " <" + write_temp("in" + std::to_string(id), stdin_data);
  } else {
    cmd += " </dev/null";
  }
  int rc = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(outp.string());
  r.err = slurp(errp.string());
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::string lead_in_events_file() {
  static std::string path = [] {
    ntcc::EventStream es;
    es.records = {{1, {"notes[1] = 60", "go = 1"}},
                  {2, {"notes[2] = 62", "go = 2"}},
                  {3, {"notes[3] = 64", "go = 3"}},
                  {4, {"notes[4] = 60", "go = 4"}}};
    return write_temp("lead_in.jsonl", ntcc::event_stream_to_jsonl(es));
  }();
  return path;
}

}  // namespace

TEST_CASE("models lists the built-ins, one per line") {
  CmdResult r = run_cli("models");
  CHECK(r.code == 0);
  CHECK(r.out == "ccfomi\nchord\nfactorial\nfilters\nstress\n");
}

TEST_CASE("validate accepts every built-in and flags bad sources") {
  for (const std::string name :
       {"ccfomi", "chord", "factorial", "filters", "stress"}) {
    CmdResult r = run_cli("validate " + name);
    CHECK(r.code == 0);
    CHECK(r.out == "ok\n");
  }

  CmdResult bad = run_cli("validate " + std::string(NTCC_SOURCE_DIR) +
                          "/tests/negative/recursion_not_guarded.ntcc");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("RecursionNotGuarded") != std::string::npos);

  CmdResult missing = run_cli("validate nope");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("run emits the trace as JSON lines") {
  CmdResult r = run_cli("run chord --units 4");
  CHECK(r.code == 0);
  std::string golden =
      slurp(std::string(NTCC_SOURCE_DIR) + "/tests/golden/chord_trace.jsonl");
  CHECK(r.out == golden);

  // The same model given as a file path behaves identically.
  CmdResult from_file = run_cli(
      "run " + std::string(NTCC_SOURCE_DIR) + "/models/chord.ntcc --units 4");
  CHECK(from_file.code == 0);
  CHECK(from_file.out == golden);
}

TEST_CASE("run -o writes the trace to a file instead of stdout") {
  std::string out_path = (work_dir() / "chord_out.jsonl").string();
  CmdResult r = run_cli("run chord --units 4 -o " + out_path);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(out_path) ==
        slurp(std::string(NTCC_SOURCE_DIR) + "/tests/golden/chord_trace.jsonl"));
}

TEST_CASE("an inconsistent unit exits 2 and says so") {
  std::string model = write_temp(
      "clash.ntcc",
      "var x : 0..9;\noutputs x;\nsystem = tell(x = 1) || tell(x = 2);\n");
  CmdResult r = run_cli("run " + model + " --units 3");
  CHECK(r.code == 2);
  CHECK(r.err.find("store inconsistent") != std::string::npos);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 1);  // stopped at the failure
  CHECK(ls[0].find("\"status\":\"failed\"") != std::string::npos);

  CmdResult kept = run_cli("run " + model + " --units 3 --continue-on-fail");
  CHECK(kept.code == 2);  // still reported, but the run finished
  CHECK(lines_of(kept.out).size() == 3);
}

TEST_CASE("seeded runs are byte-identical; the env variable is an alias") {
  std::string args = "run ccfomi --events " + lead_in_events_file() +
                     " --units 12 --seed 9";
  CmdResult a = run_cli(args);
  CmdResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  CmdResult via_env = run_cli(
      "run ccfomi --events " + lead_in_events_file() + " --units 12",
      "", "NTCCRT_SEED=9 ");
  CHECK(via_env.out == a.out);

  CmdResult other = run_cli("run ccfomi --events " + lead_in_events_file() +
                            " --units 30 --seed 10");
  CmdResult other2 = run_cli("run ccfomi --events " + lead_in_events_file() +
                             " --units 30 --seed 11");
  CHECK(other.out != other2.out);
}

TEST_CASE("the star policy flag steers star delays") {
  std::string model = write_temp(
      "star.ntcc", "var x : 0..9;\noutputs x;\nsystem = star tell(x = 1);\n");
  CmdResult delayed = run_cli("run " + model + " --units 4 --star fixed:2");
  auto ls = lines_of(delayed.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].find("\"x\":1") == std::string::npos);
  CHECK(ls[2].find("\"x\":1") != std::string::npos);

  CmdResult now = run_cli("run " + model + " --units 1 --star fixed:0");
  CHECK(lines_of(now.out)[0].find("\"x\":1") != std::string::npos);

  CmdResult bad = run_cli("run " + model + " --star never");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bad star policy") != std::string::npos);
}

TEST_CASE("bench reports per-unit timing against the budget") {
  CmdResult r = run_cli("bench stress --units 5 --budget-ms 10000");
  CHECK(r.code == 0);
  CHECK(r.out.find("units=5") != std::string::npos);
  CHECK(r.out.find("processes_last=882") != std::string::npos);
  CHECK(r.out.find("-> PASS") != std::string::npos);

  // A zero budget can never be met.
  CmdResult over = run_cli("bench chord --units 3 --budget-ms 0");
  CHECK(over.code == 3);
  CHECK(over.out.find("-> FAIL") != std::string::npos);
}

TEST_CASE("check mutex judges recorded traces") {
  std::string events = write_temp(
      "filters_events.jsonl",
      "{\"tells\":[\"input[1] = 1\",\"input[2] = 1\"],\"unit\":1}\n"
      "{\"tells\":[\"end[1] = 1\",\"end[2] = 1\"],\"unit\":5}\n");
  std::string trace_path = (work_dir() / "filters_trace.jsonl").string();
  CmdResult run = run_cli("run filters --events " + events +
                          " --units 7 -o " + trace_path);
  REQUIRE(run.code == 0);

  CmdResult ok = run_cli("check mutex --trace " + trace_path);
  CHECK(ok.code == 0);
  CHECK(ok.out == "filter-mutual-exclusion: PASS\n");

  // A forged trace with a filter busy out of nowhere.
  ntcc::Trace forged(2);
  forged[0].unit = 1;
  forged[1].unit = 2;
  forged[1].outputs["busy[2]"] = 2;
  std::string bad_path =
      write_temp("forged_trace.jsonl", ntcc::trace_to_jsonl(forged));
  CmdResult bad = run_cli("check mutex --trace " + bad_path);
  CHECK(bad.code == 2);
  CHECK(bad.out.find("FAIL at unit 2") != std::string::npos);

  CmdResult as_json = run_cli("check mutex --json --trace " + bad_path);
  CHECK(as_json.code == 2);
  nlohmann::json j = nlohmann::json::parse(as_json.out);
  CHECK(j["property"] == "filter-mutual-exclusion");
  CHECK(j["pass"] == false);
  CHECK(j["first_violation_unit"] == 2);
  CHECK(j["witness"].get<std::string>().find("without work[2] = 2") !=
        std::string::npos);
}

TEST_CASE("check improv replays a run against the player input") {
  std::string trace_path = (work_dir() / "ccfomi_trace.jsonl").string();
  CmdResult run = run_cli("run ccfomi --events " + lead_in_events_file() +
                          " --units 12 --seed 5 -o " + trace_path);
  REQUIRE(run.code == 0);

  CmdResult ok = run_cli("check improv --trace " + trace_path + " --events " +
                         lead_in_events_file());
  CHECK(ok.code == 0);
  CHECK(ok.out == "improv-consistency: PASS\n");

  CmdResult no_events = run_cli("check improv --trace " + trace_path);
  CHECK(no_events.code == 1);
  CHECK(no_events.err.find("needs --events") != std::string::npos);

  CmdResult bad_prop = run_cli("check liveness --trace " + trace_path);
  CHECK(bad_prop.code == 1);
  CHECK(bad_prop.err.find("unknown property") != std::string::npos);
}

TEST_CASE("the repl runs one unit per line") {
  std::string script =
      "notes[1] = 60, go = 1\n"
      ".oracle\n"
      "\n"
      ".quit\n";
  CmdResult r = run_cli("repl ccfomi --seed 1", script);
  CHECK(r.code == 0);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 3);  // unit 1, oracle dump, unit 2
  CHECK(ls[0].find("\"oracle_adds\":[60]") != std::string::npos);
  CHECK(ls[1].rfind("[{", 0) == 0);  // the oracle table
  CHECK(ls[2].find("\"unit\":2") != std::string::npos);
  CHECK(r.err.find("[unit 1]") != std::string::npos);  // the prompt

  // A tell conflicting with the model fails the unit and ends the session.
  CmdResult clash = run_cli("repl chord", "pitch = 61\npitch = 60\n.quit\n");
  CHECK(clash.code == 2);
  auto cl = lines_of(clash.out);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].find("\"status\":\"failed\"") != std::string::npos);
}

TEST_CASE("malformed input files are static errors") {
  std::string bad_events = write_temp("bad_events.jsonl", "{\"unit\": -3}\n");
  CmdResult r = run_cli("run chord --events " + bad_events);
  CHECK(r.code == 1);
  CHECK(r.err.find("bad_events.jsonl") != std::string::npos);

  std::string bad_trace = write_temp("bad_trace.jsonl", "not json\n");
  CmdResult c = run_cli("check mutex --trace " + bad_trace);
  CHECK(c.code == 1);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(run_cli("").code == 1);           // a subcommand is required
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("run").code == 1);        // missing the model argument
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("run --help").code == 0);
}
