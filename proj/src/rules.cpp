#include "cpdy/rules.hpp"

#include <algorithm>
#include <set>

namespace cpdy {

std::string_view to_string(Profile p) { return p == Profile::dy_only ? "dy_only" : "cpdy"; }

Profile profile_from_string(std::string_view s)
{
  if (s == "dy" || s == "dy_only") return Profile::dy_only;
  if (s == "cpdy") return Profile::cpdy;
  throw std::invalid_argument("unknown profile '" + std::string(s) + "' (expected dy or cpdy)");
}

std::string_view to_string(Actor a) { return a == Actor::system ? "system" : "attacker"; }

bool operator==(const Disjunction& a, const Disjunction& b) { return a.alternatives == b.alternatives; }

std::string FactPattern::text() const
{
  return component.text() + "(" + property + "," + value.text() + ")";
}

std::string FactEffect::text() const
{
  std::string v;
  switch (kind) {
    case EffectValue::literal: v = value; break;
    case EffectValue::var: v = "?" + value; break;
    case EffectValue::succ: v = "succ"; break;
    case EffectValue::pred: v = "pred"; break;
  }
  return component.text() + "(" + property + "," + v + ")";
}

namespace {

std::string_view rel_text(Relation r)
{
  switch (r) {
    case Relation::less: return "<";
    case Relation::greater: return ">";
    case Relation::equal: return "=";
  }
  return "=";
}

}  // namespace

std::string Guard::text() const
{
  struct V {
    std::string operator()(const OrderGuard& o) const
    {
      return "order(" + o.property + ", " + o.lhs.text() + " " + std::string(rel_text(o.rel)) +
             " " + o.rhs.text() + ")";
    }
    std::string operator()(const PropGuard& p) const
    {
      return "prop(" + p.dimension + "," + p.value + ")";
    }
    std::string operator()(const KnowledgeGuard& k) const { return "knows(" + k.term.text() + ")"; }
    std::string operator()(const Disjunction& d) const
    {
      std::string s = "any {";
      for (const auto& a : d.alternatives) s += " " + a.text();
      return s + " }";
    }
  };
  return std::visit(V{}, g);
}

namespace {

const std::string* lookup(const Binding& b, const Slot& s)
{
  if (!s.is_var) return &s.name;
  auto it = b.find(s.name);
  return it == b.end() ? nullptr : &it->second;
}

bool unify(const Slot& s, const std::string& v, Binding& b)
{
  if (!s.is_var) return s.name == v;
  auto [it, fresh] = b.emplace(s.name, v);
  return fresh || it->second == v;
}

// Value an effect writes, resolved against the pre-state. nullopt when a
// succ/pred marker has no neighbour in the chain.
std::optional<Fact> resolve_effect(const SysState& s, const FactEffect& e, const Binding& b)
{
  const std::string* comp = lookup(b, e.component);
  if (!comp) return std::nullopt;
  switch (e.kind) {
    case EffectValue::literal: return Fact{*comp, e.property, e.value};
    case EffectValue::var: {
      auto it = b.find(e.value);
      if (it == b.end()) return std::nullopt;
      return Fact{*comp, e.property, it->second};
    }
    case EffectValue::succ:
    case EffectValue::pred: {
      const auto& decl = s.signature().property(e.property);
      auto cur = s.get_fact(*comp, e.property);
      if (!cur) return std::nullopt;
      auto r = decl.rank(*cur);
      if (!r) return std::nullopt;
      if (e.kind == EffectValue::succ) {
        if (*r + 1 >= decl.values.size()) return std::nullopt;
        return Fact{*comp, e.property, decl.values[*r + 1]};
      }
      if (*r == 0) return std::nullopt;
      return Fact{*comp, e.property, decl.values[*r - 1]};
    }
  }
  return std::nullopt;
}

class Matcher {
 public:
  Matcher(const SysState& s, const HornRule& r) : s_(s), r_(r), facts_(s.facts()) {}

  std::vector<Binding> run()
  {
    Binding b;
    pre(0, b);
    return {found_.begin(), found_.end()};
  }

 private:
  void pre(std::size_t i, Binding& b)
  {
    if (i == r_.preconditions.size()) {
      domain(0, b);
      return;
    }
    const auto& p = r_.preconditions[i];
    for (const auto& f : facts_) {
      if (f.property != p.property) continue;
      Binding next = b;
      if (unify(p.component, f.component, next) && unify(p.value, f.value, next)) pre(i + 1, next);
    }
  }

  void domain(std::size_t i, Binding& b)
  {
    if (i == r_.component_vars.size()) {
      finish(b);
      return;
    }
    const auto& v = r_.component_vars[i];
    if (b.count(v)) {
      if (s_.signature().components.count(b.at(v))) domain(i + 1, b);
      return;
    }
    for (const auto& c : s_.signature().components) {
      Binding next = b;
      next[v] = c;
      domain(i + 1, next);
    }
  }

  void finish(const Binding& b)
  {
    for (const auto& g : r_.guards)
      if (!eval_guard(s_, g, b)) return;
    for (const auto& e : r_.effects)
      if (!resolve_effect(s_, e, b)) return;
    found_.insert(b);
  }

  const SysState& s_;
  const HornRule& r_;
  std::vector<Fact> facts_;
  std::set<Binding> found_;
};

}  // namespace

bool eval_guard(const SysState& s, const Guard& g, const Binding& b)
{
  if (const auto* o = std::get_if<OrderGuard>(&g.g)) {
    const std::string* l = lookup(b, o->lhs);
    const std::string* r = lookup(b, o->rhs);
    if (!l || !r) return false;
    switch (o->rel) {
      case Relation::equal: return *l == *r;
      case Relation::less: return s.value_less(o->property, *l, *r);
      case Relation::greater: return s.value_less(o->property, *r, *l);
    }
    return false;
  }
  if (const auto* p = std::get_if<PropGuard>(&g.g))
    return s.attacker_props().count(DYProp{p->dimension, p->value}) != 0;
  if (const auto* k = std::get_if<KnowledgeGuard>(&g.g)) {
    std::set<std::string> vars;
    k->term.collect_vars(vars);
    TermEnv env;
    for (const auto& v : vars) {
      auto it = b.find(v);
      if (it == b.end()) return false;
      env.emplace(v, Term::atom(it->second, s.signature().atom_sort(it->second)));
    }
    return derivable(s.knowledge(), k->term.instantiate(env));
  }
  const auto& d = std::get<Disjunction>(g.g);
  return std::any_of(d.alternatives.begin(), d.alternatives.end(),
                     [&](const Guard& a) { return eval_guard(s, a, b); });
}

std::vector<Binding> match_rule(const SysState& s, const HornRule& r) { return Matcher(s, r).run(); }

SysState apply_rule(const SysState& s, const HornRule& r, const Binding& b)
{
  auto ok = match_rule(s, r);
  if (std::find(ok.begin(), ok.end(), b) == ok.end())
    throw PreconditionViolation("binding does not enable rule '" + r.name + "'");
  std::vector<Fact> writes;
  for (const auto& e : r.effects) writes.push_back(*resolve_effect(s, e, b));
  SysState out = s;
  for (const auto& f : writes) out = out.set_fact(f);
  return out;
}

std::vector<HornRule> expand_rule(const std::string& name, Actor actor,
                                  const std::vector<std::vector<FactPattern>>& groups,
                                  const std::vector<std::string>& component_vars,
                                  const std::vector<Guard>& guards,
                                  const std::vector<FactEffect>& effects)
{
  std::vector<std::vector<FactPattern>> combos{{}};
  for (const auto& g : groups) {
    std::vector<std::vector<FactPattern>> next;
    for (const auto& c : combos)
      for (const auto& alt : g) {
        auto ext = c;
        ext.push_back(alt);
        next.push_back(std::move(ext));
      }
    combos = std::move(next);
  }
  std::vector<HornRule> out;
  int i = 0;
  for (auto& c : combos) {
    HornRule r;
    r.name = name;
    r.actor = actor;
    r.preconditions = std::move(c);
    r.component_vars = component_vars;
    r.guards = guards;
    r.effects = effects;
    r.variant = i++;
    r.variant_count = static_cast<int>(combos.size());
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

FactPattern fp(Slot c, std::string p, Slot v) { return {std::move(c), std::move(p), std::move(v)}; }
Slot L(std::string s) { return Slot::lit(std::move(s)); }
Slot V(std::string s) { return Slot::var(std::move(s)); }
FactEffect set(Slot c, std::string p, std::string v)
{
  return {std::move(c), std::move(p), EffectValue::literal, std::move(v)};
}
FactEffect step(Slot c, std::string p, EffectValue k) { return {std::move(c), std::move(p), k, ""}; }
Guard prop(std::string d, std::string v) { return Guard{PropGuard{std::move(d), std::move(v)}}; }

void add(std::vector<HornRule>& out, std::vector<HornRule> rs)
{
  for (auto& r : rs) out.push_back(std::move(r));
}

}  // namespace

std::vector<HornRule> builtin_ruleset(Profile profile)
{
  using G = std::vector<std::vector<FactPattern>>;
  std::vector<HornRule> out;
  const Actor sys = Actor::system;

  add(out, expand_rule("raise_1", sys,
                       G{{fp(L("Tank"), "level", V("V"))},
                         {fp(L("Pump"), "status", L("off"))},
                         {fp(L("InflowValve"), "status", L("open"))}},
                       {}, {}, {step(L("Tank"), "level", EffectValue::succ)}));
  add(out, expand_rule("raise_2", sys,
                       G{{fp(L("Tank"), "level", V("V"))},
                         {fp(L("ManualValve"), "status", L("close"))},
                         {fp(L("InflowValve"), "status", L("open"))}},
                       {}, {}, {step(L("Tank"), "level", EffectValue::succ)}));
  add(out, expand_rule("damaged", sys,
                       G{{fp(V("C"), "status", L("damaged"))},
                         {fp(V("C"), "contains", L("water"))},
                         {fp(V("C"), "level", V("V"))}},
                       {}, {}, {step(V("C"), "level", EffectValue::pred)}));
  const G manual_toggle{{fp(V("C"), "operate", L("manual"))},
                        {fp(V("C"), "status", L("open")), fp(V("C"), "status", L("close"))}};
  add(out, expand_rule("close", sys, manual_toggle, {}, {}, {set(V("C"), "status", "close")}));
  add(out, expand_rule("open", sys, manual_toggle, {}, {}, {set(V("C"), "status", "open")}));

  const auto heated = [](std::string p, std::string var) {
    return G{{fp(V("C"), "status", L("heating"))},
             {fp(V("C"), "contains", L("water"))},
             {fp(V("C"), std::move(p), V(std::move(var)))}};
  };
  add(out, expand_rule("heat_1", sys, heated("temperature", "L"), {}, {},
                       {step(V("C"), "temperature", EffectValue::succ)}));
  add(out, expand_rule("heat_2", sys, heated("pressure", "L"), {}, {},
                       {step(V("C"), "pressure", EffectValue::succ)}));
  add(out, expand_rule("heat_3", sys,
                       G{{fp(V("C"), "status", L("heating"))},
                         {fp(V("C"), "contains", L("water"))},
                         {fp(V("C"), "temperature", V("T"))},
                         {fp(V("C"), "pressure", V("P"))}},
                       {}, {},
                       {step(V("C"), "temperature", EffectValue::succ),
                        step(V("C"), "pressure", EffectValue::succ)}));

  if (profile == Profile::dy_only) return out;

  const Actor att = Actor::attacker;
  add(out, expand_rule("damage_DY", att, {}, {"C"},
                       {prop("distance", "physical_access"), prop("tool", "damage")},
                       {set(V("C"), "status", "damaged")}));
  add(out, expand_rule("manualClose_DY", att,
                       G{{fp(V("C"), "operate", L("manual"))}, {fp(V("C"), "status", L("open"))}},
                       {}, {prop("distance", "physical_access")},
                       {set(V("C"), "status", "close")}));
  add(out, expand_rule("manualOpen_DY", att,
                       G{{fp(V("C"), "operate", L("manual"))}, {fp(V("C"), "status", L("close"))}},
                       {}, {prop("distance", "physical_access")},
                       {set(V("C"), "status", "open")}));
  add(out, expand_rule("heat_DY", att, {}, {"C"},
                       {prop("distance", "physical_access"), prop("tool", "heating")},
                       {set(V("C"), "status", "heating")}));
  return out;
}

namespace {

void subst(Slot& s, const TermEnv& env)
{
  if (!s.is_var) return;
  auto it = env.find(s.name);
  if (it != env.end() && it->second.is_atom()) s = Slot::lit(it->second.name());
}

TermPattern subst(const TermPattern& p, const TermEnv& env)
{
  if (p.kind() == TermPattern::Kind::var) {
    auto it = env.find(p.name());
    return it == env.end() ? p : TermPattern::lit(it->second);
  }
  if (p.kind() == TermPattern::Kind::atom) return p;
  std::vector<TermPattern> kids;
  for (const auto& k : p.kids()) kids.push_back(subst(k, env));
  return TermPattern::node(p.kind(), std::move(kids));
}

void subst(Guard& g, const TermEnv& env)
{
  if (auto* k = std::get_if<KnowledgeGuard>(&g.g)) {
    k->term = subst(k->term, env);
  } else if (auto* o = std::get_if<OrderGuard>(&g.g)) {
    subst(o->lhs, env);
    subst(o->rhs, env);
  } else if (auto* d = std::get_if<Disjunction>(&g.g)) {
    for (auto& a : d->alternatives) subst(a, env);
  }
}

}  // namespace

HornRule substitute(const HornRule& r, const TermEnv& env)
{
  if (env.empty()) return r;
  HornRule out = r;
  for (auto& p : out.preconditions) {
    subst(p.component, env);
    subst(p.value, env);
  }
  for (auto& g : out.guards) subst(g, env);
  for (auto& e : out.effects) {
    subst(e.component, env);
    if (e.kind == EffectValue::var) {
      auto it = env.find(e.value);
      if (it != env.end() && it->second.is_atom()) {
        e.kind = EffectValue::literal;
        e.value = it->second.name();
      }
    }
  }
  return out;
}

}  // namespace cpdy
