#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "cpdy/search.hpp"
#include "oracles.hpp"

using namespace cpdy;

namespace {

SystemSpec load(const std::string& name)
{
  return parse_file(std::string(CPDY_SOURCE_DIR) + "/scenarios/" + name + ".cpdy");
}

bool has_transition(const std::vector<std::pair<Transition, SysState>>& succ, Transition::Kind k,
                    const std::string& rule = "")
{
  for (const auto& [t, s] : succ)
    if (t.kind == k && (rule.empty() || t.rule == rule)) return true;
  return false;
}

std::vector<std::string> rules_in(const AttackTrace& t)
{
  std::vector<std::string> out;
  for (const auto& st : t.steps)
    if (!st.transition.rule.empty()) out.push_back(st.transition.rule);
  return out;
}

}  // namespace

TEST_CASE("successors: intercept of the overT report")
{
  SystemSpec net = load("network");
  SysState s = initial_state(net);
  // raise, tank notices overT, tank sends
  for (int i = 0; i < 3; ++i) {
    auto succ = successors(s, net, Profile::dy_only);
    REQUIRE_FALSE(succ.empty());
    s = succ.front().second;
  }
  REQUIRE(s.network_pending());
  auto succ = successors(s, net, Profile::dy_only);
  REQUIRE(has_transition(succ, Transition::Kind::net_intercept));
  const auto& [t, after] = succ.front();
  CHECK(t.kind == Transition::Kind::net_intercept);
  CHECK(t.message->payload.text() == "overT");
  CHECK(after.knowledge().contains(Term::atom("overT")));
  CHECK_FALSE(after.network_pending());
  CHECK(has_transition(succ, Transition::Kind::net_deliver));
}

TEST_CASE("successors: manual scenario under dy has no attacker moves")
{
  SystemSpec man = load("manual");
  std::vector<SysState> todo{initial_state(man)};
  std::set<std::string> seen;
  while (!todo.empty()) {
    SysState s = todo.back();
    todo.pop_back();
    if (!seen.insert(s.canonical()).second) continue;
    for (auto& [t, n] : successors(s, man, Profile::dy_only)) {
      CHECK(t.kind != Transition::Kind::attacker_rule);
      CHECK(t.kind != Transition::Kind::net_intercept);
      CHECK(t.kind != Transition::Kind::net_inject);
      todo.push_back(n);
    }
  }
  CHECK(seen.size() > 3);
}

TEST_CASE("successors: manual scenario under cpdy offers manualClose_DY")
{
  SystemSpec man = load("manual");
  auto succ = successors(initial_state(man), man, Profile::cpdy);
  bool found = false;
  for (const auto& [t, s] : succ)
    found = found || (t.kind == Transition::Kind::attacker_rule && t.rule == "manualClose_DY" &&
                      t.binding.at("C") == "ManualValve");
  CHECK(found);
}

TEST_CASE("injections are derivable and restricted to receivable terms")
{
  SystemSpec net = load("network");
  auto basis = injection_candidates(net);
  CHECK(std::find(basis.begin(), basis.end(), Term::atom("overT")) != basis.end());
  SysState s = initial_state(net);
  for (const auto& [t, n] : successors(s, net, Profile::dy_only))
    if (t.kind == Transition::Kind::net_inject) CHECK(derivable(s.knowledge(), t.message->payload));
  // overT is not known initially, so SCADA cannot be fooled yet
  CHECK_FALSE(has_transition(successors(s, net, Profile::dy_only), Transition::Kind::net_inject));
}

TEST_CASE("check: network attack under dy")
{
  Verdict v = check(load("network"), Profile::dy_only, 64);
  REQUIRE(v.attack);
  const AttackTrace& t = *v.trace;
  bool intercepted = false;
  for (const auto& st : t.steps)
    intercepted = intercepted || (st.transition.kind == Transition::Kind::net_intercept &&
                                  st.transition.message->payload.text() == "overT");
  CHECK(intercepted);
  const SysState& last = t.final_state();
  CHECK(last.has_fact({"InflowValve", "status", "open"}));
  CHECK(last.has_fact({"Tank", "level", "overT"}));
  CHECK(last.has_fact({"Pump", "status", "off"}));
}

TEST_CASE("check: manual is safe under dy, attacked under cpdy")
{
  SystemSpec man = load("manual");
  Verdict dy = check(man, Profile::dy_only, 50);
  CHECK_FALSE(dy.attack);
  CHECK(dy.states_explored > 0);
  Verdict cp = check(man, Profile::cpdy, 64);
  REQUIRE(cp.attack);
  auto rules = rules_in(*cp.trace);
  CHECK(std::find(rules.begin(), rules.end(), "manualClose_DY") != rules.end());
  CHECK(std::find(rules.begin(), rules.end(), "manualOpen_DY") != rules.end());
  CHECK(rules.back() == "raise_2");
}

TEST_CASE("check: heating needs heat_DY then heat_2")
{
  SystemSpec heat = load("heating");
  CHECK_FALSE(check(heat, Profile::dy_only, 64).attack);
  Verdict v = check(heat, Profile::cpdy, 64);
  REQUIRE(v.attack);
  CHECK(rules_in(*v.trace) == std::vector<std::string>{"heat_DY", "heat_2"});
  CHECK(v.trace->steps[0].transition.binding.at("C") == "Tank");
  CHECK(v.trace->final_state().has_fact({"Tank", "pressure", "overT"}));
}

TEST_CASE("check: zero-step attack when the initial state violates a goal")
{
  SystemSpec s = parse("component A\nproperty p values { x y }\ninit { A(p,x) }\ngoal g : always A(p,y)\n");
  Verdict v = check(s, Profile::dy_only, 5);
  REQUIRE(v.attack);
  CHECK(v.trace->steps.empty());
  CHECK(replay(*v.trace, s, Profile::dy_only));
}

TEST_CASE("check: resource limit")
{
  CheckOptions o;
  o.max_states = 3;
  CHECK_THROWS_AS(check(load("heating"), Profile::cpdy, o), ResourceError);
  CHECK_THROWS_AS(check(load("heating"), Profile::cpdy, 0), std::invalid_argument);
}

TEST_CASE("replay accepts produced traces and rejects tampering")
{
  for (const char* n : {"network", "manual", "heating"}) {
    CAPTURE(n);
    SystemSpec spec = load(n);
    Verdict v = check(spec, Profile::cpdy, 64);
    REQUIRE(v.attack);
    CHECK(replay(*v.trace, spec, Profile::cpdy));
    auto j = verdict_to_json(v);
    CHECK(replay(j, spec));
    for (std::size_t i = 0; i < j["steps"].size(); ++i) {
      auto bad = j;
      bad["steps"][i]["state"]["facts"].push_back({"Tank", "level", "tampered"});
      try {
        replay(bad, spec);
        FAIL("tampered trace accepted");
      } catch (const ReplayMismatch& e) {
        CHECK(e.index() == i);
      }
    }
    auto shortened = j;
    shortened["steps"].erase(shortened["steps"].size() - 1);
    CHECK_THROWS_AS(replay(shortened, spec), ReplayMismatch);
  }
}

TEST_CASE("golden manual trace")
{
  SystemSpec man = load("manual");
  std::ifstream in(std::string(CPDY_SOURCE_DIR) + "/tests/golden/manual_cpdy.json");
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  auto golden = nlohmann::ordered_json::parse(buf.str());
  CHECK(replay(golden, man));
  CHECK(verdict_to_json(check(man, Profile::cpdy, 64)).dump(2) + "\n" == buf.str());
}

TEST_CASE("dy traces replay under cpdy")
{
  for (const char* n : {"network"}) {
    SystemSpec spec = load(n);
    Verdict dy = check(spec, Profile::dy_only, 64);
    REQUIRE(dy.attack);
    auto j = verdict_to_json(dy);
    j["profile"] = "cpdy";
    CHECK(replay(j, spec));
  }
}

TEST_CASE("profile monotonicity and knowledge monotonicity")
{
  for (const char* n : {"network", "manual", "heating"}) {
    SystemSpec spec = load(n);
    Verdict dy = check(spec, Profile::dy_only, 30);
    Verdict cp = check(spec, Profile::cpdy, 30);
    if (dy.attack) CHECK(cp.attack);
    for (const Verdict* v : {&dy, &cp}) {
      if (!v->attack) continue;
      const SysState* prev = &v->trace->initial;
      for (const auto& st : v->trace->steps) {
        CHECK(prev->knowledge().subset_of(st.state.knowledge()));
        prev = &st.state;
      }
    }
  }
}

TEST_CASE("minimality against iterative deepening")
{
  for (const char* n : {"network", "manual", "heating"})
    for (Profile p : {Profile::dy_only, Profile::cpdy}) {
      CAPTURE(n);
      SystemSpec spec = load(n);
      REQUIRE(oracle::reachable_states(spec, p, 10000) <= 10000);
      Verdict v = check(spec, p, 64);
      std::size_t limit = v.attack ? v.trace->steps.size() : 12;
      auto best = oracle::shortest_violation(spec, p, limit);
      if (v.attack) {
        REQUIRE(best.has_value());
        CHECK(*best == v.trace->steps.size());
      } else {
        CHECK_FALSE(best.has_value());
      }
    }
}

TEST_CASE("random small plants: BFS agrees with the oracle")
{
  std::mt19937 rng(2024);
  int attacks = 0;
  for (int round = 0; round < 60; ++round) {
    std::ostringstream src;
    src << "component A\ncomponent B\nproperty x ordered { v0 < v1 < v2 < v3 }\n"
           "property s values { on off }\n";
    const char* comps[] = {"A", "B"};
    const char* vals[] = {"v0", "v1", "v2", "v3"};
    int n_rules = 2 + static_cast<int>(rng() % 4);
    for (int r = 0; r < n_rules; ++r) {
      const char* c = comps[rng() % 2];
      const char* d = comps[rng() % 2];
      src << "rule r" << r << " actor " << (rng() % 3 == 0 ? "attacker" : "system") << " {\n  "
          << c << "(s," << (rng() % 2 ? "on" : "off") << ") " << d << "(x,?V) -> " << d << "(x,"
          << (rng() % 3 == 0 ? "pred" : "succ") << ")";
      if (rng() % 2) src << " " << comps[rng() % 2] << "(s," << (rng() % 2 ? "on" : "off") << ")";
      src << "\n}\n";
    }
    src << "init { A(x,v0) B(x,v0) A(s,on) B(s,off) }\n";
    src << "goal g : always not (A(x," << vals[1 + rng() % 3] << ") and B(x," << vals[rng() % 4]
        << "))\n";
    SystemSpec spec = parse(src.str());
    for (Profile p : {Profile::dy_only, Profile::cpdy}) {
      Verdict v = check(spec, p, 20);
      auto best = oracle::shortest_violation(spec, p, v.attack ? v.trace->steps.size() : 8);
      CHECK(v.attack == best.has_value());
      if (v.attack) {
        ++attacks;
        CHECK(*best == v.trace->steps.size());
        CHECK(replay(*v.trace, spec, p));
      }
    }
  }
  CHECK(attacks > 10);
}

TEST_CASE("determinism across runs and worker counts")
{
  for (const char* n : {"network", "manual", "heating"})
    for (Profile p : {Profile::dy_only, Profile::cpdy}) {
      SystemSpec spec = load(n);
      std::string one = verdict_to_json(check(spec, p, 64)).dump();
      CheckOptions o;
      o.workers = 4;
      CHECK(verdict_to_json(check(spec, p, 64)).dump() == one);
      CHECK(verdict_to_json(check(spec, p, o)).dump() == one);
    }
}

TEST_CASE("text rendering uses attack vocabulary")
{
  SystemSpec man = load("manual");
  Verdict v = check(man, Profile::cpdy, 64);
  std::string text = render_text(v, man, false);
  CHECK(text.find("manually closes ManualValve") != std::string::npos);
  CHECK(text.find("manually opens InflowValve") != std::string::npos);
  CHECK(text.find("\x1b[") == std::string::npos);
  CHECK(render_text(v, man, true).find("\x1b[") != std::string::npos);
  SystemSpec net = load("network");
  CHECK(render_text(check(net, Profile::dy_only, 64), net, false).find("intercepts overT") !=
        std::string::npos);
}
