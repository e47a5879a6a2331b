#include <algorithm>
#include <sstream>

#include "cpdy/search.hpp"

namespace cpdy {

namespace {

std::string changed_facts(const SysState& before, const SysState& after)
{
  std::string s;
  for (const auto& f : after.facts()) {
    if (before.has_fact(f)) continue;
    if (!s.empty()) s += ", ";
    s += to_string(f);
  }
  return s;
}

std::string with_facts(std::string line, const SysState& before, const SysState& after)
{
  std::string d = changed_facts(before, after);
  if (!d.empty()) line += " => " + d;
  return line;
}

std::string target(const Binding& b)
{
  auto it = b.find("C");
  if (it != b.end()) return it->second;
  return b.empty() ? std::string() : b.begin()->second;
}

// Physical attacker actions in the vocabulary of the case studies.
std::string attacker_phrase(const Transition& t)
{
  const std::string c = target(t.binding);
  if (t.rule == "manualClose_DY") return "attacker manually closes " + c;
  if (t.rule == "manualOpen_DY") return "attacker manually opens " + c;
  if (t.rule == "heat_DY") return "attacker heats " + c;
  if (t.rule == "damage_DY") return "attacker damages " + c;
  std::string s = "attacker applies " + t.rule;
  if (!t.binding.empty()) {
    s += " [";
    bool first = true;
    for (const auto& [k, v] : t.binding) {
      s += (first ? "" : ", ") + k + "=" + v;
      first = false;
    }
    s += "]";
  }
  return s;
}

const Message* new_message(const SysState& before, const SysState& after, std::string& channel)
{
  for (const auto& [name, buf] : after.channels()) {
    const auto& old = before.channels().at(name).pending;
    if (buf.pending.size() <= old.size()) continue;
    for (const auto& m : buf.pending)
      if (std::count(buf.pending.begin(), buf.pending.end(), m) >
          std::count(old.begin(), old.end(), m)) {
        channel = name;
        return &m;
      }
  }
  return nullptr;
}

}  // namespace

std::string describe(const Transition& t, const SysState& before, const SysState& after)
{
  switch (t.kind) {
    case Transition::Kind::agent_step: {
      if (!t.rule.empty())
        return with_facts(t.agent + " reacts (step " + std::to_string(t.step) + ")", before, after);
      if (t.message)
        return t.agent + " receives " + t.message->payload.text() + " from " + t.message->sender +
               " on " + t.channel;
      std::string ch;
      if (const Message* m = new_message(before, after, ch))
        return t.agent + " sends " + m->payload.text() + " to " + m->receiver + " on " + ch;
      return t.agent + " loops to step " + std::to_string(after.agents().at(t.agent).pc);
    }
    case Transition::Kind::physics_rule:
      return with_facts("physics: " + t.rule, before, after);
    case Transition::Kind::attacker_rule:
      return with_facts(attacker_phrase(t), before, after);
    case Transition::Kind::net_intercept:
      return "attacker intercepts " + t.message->payload.text() + " from " + t.message->sender +
             " to " + t.message->receiver + " on " + t.channel;
    case Transition::Kind::net_deliver:
      return t.channel + " delivers " + t.message->payload.text() + " from " + t.message->sender +
             " to " + t.message->receiver;
    case Transition::Kind::net_inject:
      return "attacker injects " + t.message->payload.text() + " to " + t.message->receiver +
             " on " + t.channel + " posing as " + t.message->sender;
  }
  return {};
}

std::string render_text(const Verdict& v, const SystemSpec& spec, bool color)
{
  auto paint = [&](const char* code, const std::string& s) {
    return color ? std::string("\x1b[") + code + "m" + s + "\x1b[0m" : s;
  };
  std::ostringstream o;
  if (!v.attack) {
    o << paint("1;32", "SAFE") << " up to bound " << v.bound << " (profile "
      << to_string(v.profile) << ", " << v.states_explored << " states explored)\n";
    return o.str();
  }
  const AttackTrace& t = *v.trace;
  o << paint("1;31", "ATTACK") << " on goal '" << t.violated_goal << "' (profile "
    << to_string(v.profile) << ", " << t.steps.size() << " steps, " << v.states_explored
    << " states explored)\n";
  const SysState* prev = &t.initial;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& st = t.steps[i];
    std::string line = describe(st.transition, *prev, st.state);
    bool hostile = st.transition.kind == Transition::Kind::attacker_rule ||
                   st.transition.kind == Transition::Kind::net_intercept ||
                   st.transition.kind == Transition::Kind::net_inject;
    o << "  " << (i + 1) << ". " << (hostile ? paint("33", line) : line) << "\n";
    prev = &st.state;
  }
  const Goal* g = spec.goal(t.violated_goal);
  if (g) {
    std::string why = render_goal_violation(*g, t.final_state());
    std::istringstream lines(why);
    for (std::string l; std::getline(lines, l);) o << "  " << l << "\n";
  }
  return o.str();
}

}  // namespace cpdy
