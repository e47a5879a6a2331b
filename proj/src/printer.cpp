#include <algorithm>
#include <sstream>

#include "cpdy/spec.hpp"

namespace cpdy {

namespace {

std::string effect_text(const FactEffect& e) { return e.text(); }

// Body of a rule or guarded update: items, arrow, effects.
std::string body_text(const std::vector<std::vector<FactPattern>>& groups,
                      const std::vector<std::string>& component_vars,
                      const std::vector<Guard>& guards, const std::vector<FactEffect>& effects)
{
  std::string s;
  auto item = [&](const std::string& t) {
    if (!s.empty()) s += " ";
    s += t;
  };
  for (const auto& v : component_vars) item("component(?" + v + ")");
  for (const auto& g : groups) {
    std::string alts;
    for (std::size_t i = 0; i < g.size(); ++i) alts += (i ? " | " : "") + g[i].text();
    item(alts);
  }
  for (const auto& g : guards) item(g.text());
  item("->");
  for (const auto& e : effects) item(effect_text(e));
  return s;
}

// Recovers the disjunctive groups from consecutive expanded variants.
std::vector<std::vector<FactPattern>> fold(const std::vector<const HornRule*>& variants)
{
  std::vector<std::vector<FactPattern>> groups(variants.front()->preconditions.size());
  for (const auto* r : variants)
    for (std::size_t i = 0; i < r->preconditions.size() && i < groups.size(); ++i) {
      auto& g = groups[i];
      if (std::find(g.begin(), g.end(), r->preconditions[i]) == g.end())
        g.push_back(r->preconditions[i]);
    }
  return groups;
}

std::string rule_text(const std::vector<const HornRule*>& variants)
{
  const HornRule& r = *variants.front();
  return "rule " + r.name + " actor " + std::string(to_string(r.actor)) + " {\n  " +
         body_text(fold(variants), r.component_vars, r.guards, r.effects) + "\n}\n";
}

// Splits a flat rule list into runs of variants of one source rule.
std::vector<std::vector<const HornRule*>> runs(const std::vector<HornRule>& rules)
{
  std::vector<std::vector<const HornRule*>> out;
  for (const auto& r : rules) {
    bool cont = !out.empty() && r.variant > 0 && out.back().front()->name == r.name &&
                static_cast<int>(out.back().size()) < out.back().front()->variant_count;
    if (cont) {
      out.back().push_back(&r);
    } else {
      out.push_back({&r});
    }
  }
  return out;
}

std::string step_text(const Step& s)
{
  switch (s.kind) {
    case Step::Kind::send: return "send " + s.channel + " to " + s.peer.text() + " " + s.term.text();
    case Step::Kind::receive:
      return "recv " + s.channel + (s.has_peer ? " from " + s.peer.text() : "") + " " +
             s.term.text();
    case Step::Kind::update: {
      std::vector<const HornRule*> vs;
      for (const auto& r : s.update) vs.push_back(&r);
      if (vs.empty()) return "when ->";
      const HornRule& r = s.update.front();
      return "when " + body_text(fold(vs), r.component_vars, r.guards, r.effects);
    }
    case Step::Kind::jump: return "goto " + std::to_string(s.target);
  }
  return {};
}

}  // namespace

std::string print_rule(const HornRule& r) { return rule_text({&r}); }

std::string print_rules(const std::vector<HornRule>& rules)
{
  std::string out;
  for (const auto& run : runs(rules)) {
    if (!out.empty()) out += "\n";
    out += rule_text(run);
  }
  return out;
}

std::string print_spec(const SystemSpec& s)
{
  std::ostringstream o;
  for (const auto& c : s.signature.components) o << "component " << c << "\n";
  for (const auto& [name, d] : s.signature.properties) {
    o << "property " << name;
    if (d.ordered) {
      o << " ordered {";
      for (std::size_t i = 0; i < d.values.size(); ++i) o << (i ? " < " : " ") << d.values[i];
      o << " }";
    } else if (!d.values.empty()) {
      o << " values {";
      for (const auto& v : d.values) o << " " << v;
      o << " }";
    }
    o << "\n";
  }
  for (const auto& d : s.dimensions) o << "dimension " << d << "\n";
  for (const auto& [name, k] : s.channels) o << "channel " << name << " : " << to_string(k) << "\n";
  for (const auto& [name, sort] : s.signature.atoms) {
    if (sort == Sort::agent && s.agent(name)) continue;
    o << "atom " << name << " : " << to_string(sort) << "\n";
  }
  for (const auto& a : s.agents) {
    o << "\nagent " << a.name << " {\n";
    for (const auto& st : a.steps) o << "  " << step_text(st) << "\n";
    o << "}\n";
  }
  if (!s.rules.empty()) o << "\n" << print_rules(s.rules);
  if (!s.attacker_props.empty()) {
    o << "\nattacker {\n";
    for (const auto& p : s.attacker_props) o << "  prop " << p.dimension << " = " << p.value << "\n";
    o << "}\n";
  }
  if (!s.initial_facts.empty()) {
    o << "\ninit {\n";
    for (const auto& f : s.initial_facts) o << "  " << to_string(f) << "\n";
    o << "}\n";
  }
  if (!s.initial_knowledge.empty()) {
    o << "\nknows {\n";
    for (const auto& t : s.initial_knowledge) o << "  " << t.text() << "\n";
    o << "}\n";
  }
  for (const auto& g : s.goals) o << "\ngoal " << g.name << " : always " << g.body.text() << "\n";
  return o.str();
}

}  // namespace cpdy
