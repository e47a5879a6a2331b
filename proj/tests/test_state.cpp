#include "doctest.h"

#include <algorithm>
#include <random>

#include "cpdy/state.hpp"

using namespace cpdy;

namespace {

std::shared_ptr<Signature> tank_signature()
{
  auto sig = std::make_shared<Signature>();
  sig->components = {"Tank", "InflowValve", "Pump"};
  sig->properties["level"] = PropertyDecl{true, {"underT", "overT"}};
  sig->properties["status"] = PropertyDecl{false, {"open", "close", "on", "off"}};
  return sig;
}

}  // namespace

TEST_CASE("get_fact")
{
  SysState s = SysState(tank_signature()).set_fact({"Tank", "level", "underT"});
  CHECK(s.get_fact("Tank", "level") == std::optional<std::string>("underT"));
  CHECK_FALSE(s.get_fact("Pump", "status").has_value());
  CHECK_THROWS_AS(s.get_fact("Boiler", "level"), UndeclaredSymbol);
  CHECK_THROWS_AS(s.get_fact("Tank", "colour"), UndeclaredSymbol);
}

TEST_CASE("set_fact replaces the value of its pair")
{
  SysState s0(tank_signature());
  SysState s1 = set_fact(s0, {"Tank", "level", "underT"});
  CHECK(s1.fact_count() == 1);
  SysState s2 = set_fact(s1, {"Tank", "level", "overT"});
  CHECK(s2.facts() == std::vector<Fact>{{"Tank", "level", "overT"}});
  CHECK(set_fact(s2, {"Tank", "level", "overT"}) == s2);
  CHECK_THROWS_AS(set_fact(s0, {"Tank", "level", "boiling"}), UndeclaredSymbol);
  CHECK_THROWS_AS(set_fact(s0, {"Boiler", "level", "overT"}), UndeclaredSymbol);
}

TEST_CASE("value_less")
{
  SysState s(tank_signature());
  CHECK(value_less(s, "level", "underT", "overT"));
  CHECK_FALSE(value_less(s, "level", "overT", "overT"));
  CHECK_FALSE(value_less(s, "level", "overT", "underT"));
  CHECK_THROWS_AS(value_less(s, "status", "open", "close"), UnorderedValue);
}

TEST_CASE("functional facts under random update sequences")
{
  auto sig = tank_signature();
  std::mt19937 rng(1);
  const std::vector<Fact> pool = {
      {"Tank", "level", "underT"},  {"Tank", "level", "overT"},   {"Pump", "status", "on"},
      {"Pump", "status", "off"},    {"InflowValve", "status", "open"},
      {"InflowValve", "status", "close"}, {"Tank", "status", "open"}};
  for (int run = 0; run < 200; ++run) {
    SysState s(sig);
    std::vector<Fact> seq;
    for (int i = 0; i < 12; ++i) seq.push_back(pool[rng() % pool.size()]);
    for (const auto& f : seq) {
      s = s.set_fact(f);
      CHECK(s.has_fact(f));
      std::set<std::pair<std::string, std::string>> keys;
      for (const auto& g : s.facts()) CHECK(keys.insert({g.component, g.property}).second);
    }
    // last write per pair wins, whatever the order of the others
    std::map<std::pair<std::string, std::string>, std::string> last;
    for (const auto& f : seq) last[{f.component, f.property}] = f.value;
    SysState t(sig);
    std::vector<std::pair<std::pair<std::string, std::string>, std::string>> items(last.begin(),
                                                                                  last.end());
    std::shuffle(items.begin(), items.end(), rng);
    for (const auto& [cp, v] : items) t = t.set_fact({cp.first, cp.second, v});
    CHECK(t == s);
    CHECK(t.canonical() == s.canonical());
    CHECK(std::hash<SysState>{}(t) == std::hash<SysState>{}(s));
  }
}

TEST_CASE("channels: network buffers sorted, physical FIFO")
{
  SysState s(tank_signature());
  s = s.with_channel("net", {ChannelKind::network, {}}).with_channel("wire", {ChannelKind::physical, {}});
  Term b = Term::atom("b"), a = Term::atom("a");
  s = s.enqueue("net", {"X", "Y", b}).enqueue("net", {"X", "Y", a});
  s = s.enqueue("wire", {"X", "Y", b}).enqueue("wire", {"X", "Y", a});
  CHECK(s.channels().at("net").pending.front().payload == a);
  CHECK(s.channels().at("wire").pending.front().payload == b);
  CHECK(s.network_pending());
  s = s.dequeue("net", 0).dequeue("net", 0);
  CHECK_FALSE(s.network_pending());
}

TEST_CASE("knowledge stays analyzed")
{
  SysState s(tank_signature());
  Term k = Term::atom("k", Sort::symkey), m = Term::atom("m");
  s = s.learn(Term::scrypt(m, k)).learn(k);
  CHECK(s.knowledge().saturated());
  CHECK(s.knowledge().contains(m));
}

TEST_CASE("canonical JSON is byte-stable and ordered")
{
  SysState s(tank_signature());
  s = s.set_fact({"Pump", "status", "off"}).set_fact({"Tank", "level", "underT"});
  s = s.with_attacker_props({{"distance", "remote"}});
  std::string j = s.canonical();
  CHECK(j ==
        R"({"facts":[["Pump","status","off"],["Tank","level","underT"]],"attacker_props":[["distance","remote"]],"knowledge":[],"channels":[],"agents":[]})");
  CHECK(SysState(s).canonical() == j);
}
