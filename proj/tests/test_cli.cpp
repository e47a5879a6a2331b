#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpdy/cli.hpp"
#include "json.hpp"

using namespace cpdy;

namespace {

std::string scenario(const std::string& name)
{
  return std::string(CPDY_SOURCE_DIR) + "/scenarios/" + name + ".cpdy";
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(RunConfig c)
{
  std::ostringstream out, err;
  int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(const std::string& name, Profile p)
{
  RunConfig c;
  c.spec_path = scenario(name);
  c.profile = p;
  return c;
}

}  // namespace

TEST_CASE("check network under dy exits 1 with an interception")
{
  RunConfig c = config("network", Profile::dy_only);
  c.format = OutputFormat::json;
  Result r = invoke(c);
  CHECK(r.code == exit_attack);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "attack");
  bool intercepted = false;
  for (const auto& st : j["steps"]) intercepted = intercepted || st["kind"] == "NetIntercept";
  CHECK(intercepted);
}

TEST_CASE("check manual under dy exits 0")
{
  RunConfig c = config("manual", Profile::dy_only);
  c.bound = 50;
  Result r = invoke(c);
  CHECK(r.code == exit_safe);
  CHECK(r.out.find("SAFE up to bound 50") != std::string::npos);
}

TEST_CASE("compare prints the verdict matrix")
{
  RunConfig c = config("manual", Profile::cpdy);
  c.compare = true;
  Result r = invoke(c);
  CHECK(r.code == exit_attack);
  std::istringstream lines(r.out);
  std::string header, dy, cp;
  std::getline(lines, header);
  std::getline(lines, dy);
  std::getline(lines, cp);
  CHECK(dy.rfind("dy_only", 0) == 0);
  CHECK(dy.find("not found") != std::string::npos);
  CHECK(cp.rfind("cpdy", 0) == 0);
  CHECK(cp.find("not found") == std::string::npos);
  CHECK(cp.find("found") != std::string::npos);
  CHECK(cp.find(" ms") != std::string::npos);
}

TEST_CASE("JSON output has the documented field order")
{
  RunConfig c = config("heating", Profile::cpdy);
  c.format = OutputFormat::json;
  auto j = nlohmann::ordered_json::parse(invoke(c).out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"verdict", "goal", "profile", "bound", "initial", "steps",
                                         "states_explored"});
  for (const auto& st : j["steps"]) {
    std::vector<std::string> sk;
    for (const auto& [k, v] : st.items()) sk.push_back(k);
    CHECK(sk == std::vector<std::string>{"kind", "detail", "state"});
  }
}

TEST_CASE("stats go to stderr")
{
  RunConfig c = config("heating", Profile::cpdy);
  c.stats = true;
  c.format = OutputFormat::json;
  Result r = invoke(c);
  CHECK(r.err.find("states explored") != std::string::npos);
  CHECK(r.err.find("analysis time") != std::string::npos);
  CHECK(nlohmann::json::parse(r.out).is_object());
}

TEST_CASE("exit codes for diagnostics and I/O")
{
  RunConfig missing = config("does_not_exist", Profile::cpdy);
  CHECK(invoke(missing).code == exit_io);

  std::string bad = std::string(CPDY_BINARY_DIR) + "/bad_spec.cpdy";
  std::ofstream(bad) << "component Tank\ngoal g : always not Boiler(level,overT)\n";
  RunConfig c;
  c.spec_path = bad;
  Result r = invoke(c);
  CHECK(r.code == exit_diagnostics);
  CHECK(r.err.find("undeclared") != std::string::npos);

  std::ofstream(bad) << "component\n";
  CHECK(invoke(c).code == exit_diagnostics);

  c.command = "validate";
  c.spec_path = scenario("network");
  Result v = invoke(c);
  CHECK(v.code == exit_safe);
  CHECK(v.out.find("ok") != std::string::npos);
}

TEST_CASE("replay subcommand")
{
  RunConfig c = config("manual", Profile::cpdy);
  c.format = OutputFormat::json;
  std::string trace = std::string(CPDY_BINARY_DIR) + "/manual_trace.json";
  std::ofstream(trace) << invoke(c).out;

  RunConfig rp = config("manual", Profile::cpdy);
  rp.command = "replay";
  rp.trace_path = trace;
  Result ok = invoke(rp);
  CHECK(ok.code == exit_safe);
  CHECK(ok.out.find("replay ok") != std::string::npos);

  auto j = nlohmann::ordered_json::parse(std::ifstream(trace));
  j["steps"][1]["state"]["facts"][0][2] = "tampered";
  std::ofstream(trace) << j.dump(2);
  Result bad = invoke(rp);
  CHECK(bad.code == exit_attack);
  CHECK(bad.out.find("step 1") != std::string::npos);

  rp.trace_path = std::string(CPDY_BINARY_DIR) + "/no_such_trace.json";
  CHECK(invoke(rp).code == exit_io);
}

TEST_CASE("exit codes depend only on the verdict")
{
  for (int i = 0; i < 3; ++i) {
    CHECK(invoke(config("network", Profile::dy_only)).code == exit_attack);
    CHECK(invoke(config("heating", Profile::dy_only)).code == exit_safe);
  }
}
