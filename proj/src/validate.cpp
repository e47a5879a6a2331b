#include <set>

#include "cpdy/spec.hpp"

namespace cpdy {

namespace {

const std::set<std::string>& standard_dimensions()
{
  static const std::set<std::string> d = {"distance", "tool", "knowledge", "finance", "stealth"};
  return d;
}

class Validator {
 public:
  explicit Validator(const SystemSpec& s) : s_(s) {}

  std::vector<Diagnostic> run()
  {
    initial_facts();
    attacker();
    for (const auto& r : s_.rules) rule(r, line("rule:" + r.name), {}, r.name);
    for (const auto& a : s_.agents) agent(a);
    for (const auto& g : s_.goals) goal(g);
    unused();
    return std::move(out_);
  }

 private:
  int line(const std::string& key) const
  {
    auto it = s_.lines.find(key);
    return it == s_.lines.end() ? 0 : it->second;
  }

  void error(Diagnostic::Kind k, int ln, std::string msg)
  {
    out_.push_back({Diagnostic::Severity::error, k, ln, 0, std::move(msg)});
  }

  void warning(Diagnostic::Kind k, int ln, std::string msg)
  {
    out_.push_back({Diagnostic::Severity::warning, k, ln, 0, std::move(msg)});
  }

  bool component_ok(const std::string& c, int ln, const std::string& where)
  {
    used_components_.insert(c);
    if (s_.signature.components.count(c)) return true;
    error(Diagnostic::Kind::undeclared_symbol, ln, where + ": undeclared component '" + c + "'");
    return false;
  }

  const PropertyDecl* property_ok(const std::string& p, int ln, const std::string& where)
  {
    used_properties_.insert(p);
    auto it = s_.signature.properties.find(p);
    if (it != s_.signature.properties.end()) return &it->second;
    error(Diagnostic::Kind::undeclared_symbol, ln, where + ": undeclared property '" + p + "'");
    return nullptr;
  }

  void value_ok(const PropertyDecl* d, const std::string& p, const std::string& v, int ln,
                const std::string& where)
  {
    if (d && !d->admits(v))
      error(Diagnostic::Kind::undeclared_symbol, ln,
            where + ": '" + v + "' is not a declared value of property '" + p + "'");
  }

  void fact_ok(const Fact& f, int ln, const std::string& where)
  {
    component_ok(f.component, ln, where);
    const PropertyDecl* d = property_ok(f.property, ln, where);
    value_ok(d, f.property, f.value, ln, where);
  }

  void initial_facts()
  {
    std::map<std::pair<std::string, std::string>, std::string> seen;
    for (std::size_t i = 0; i < s_.initial_facts.size(); ++i) {
      const auto& f = s_.initial_facts[i];
      int ln = line("init:" + std::to_string(i));
      fact_ok(f, ln, "init");
      auto [it, fresh] = seen.emplace(std::make_pair(f.component, f.property), f.value);
      if (!fresh && it->second != f.value)
        error(Diagnostic::Kind::non_functional, ln,
              "init: " + f.component + "(" + f.property + ",...) is given both '" + it->second +
                  "' and '" + f.value + "'");
    }
  }

  bool dimension_ok(const std::string& d, int ln, const std::string& where)
  {
    used_dimensions_.insert(d);
    if (standard_dimensions().count(d) || s_.dimensions.count(d)) return true;
    error(Diagnostic::Kind::undeclared_symbol, ln, where + ": undeclared dimension '" + d + "'");
    return false;
  }

  void attacker()
  {
    for (const auto& p : s_.attacker_props) dimension_ok(p.dimension, 0, "attacker");
  }

  void guard(const Guard& g, const HornRule& r, const std::set<std::string>& bound, int ln,
             const std::string& where)
  {
    auto need = [&](const Slot& sl) {
      if (sl.is_var && !bound.count(sl.name))
        error(Diagnostic::Kind::unbound_variable, ln,
              where + ": variable ?" + sl.name + " is not bound by a precondition");
    };
    if (const auto* o = std::get_if<OrderGuard>(&g.g)) {
      const PropertyDecl* d = property_ok(o->property, ln, where);
      if (d && !d->ordered)
        error(Diagnostic::Kind::unordered_successor, ln,
              where + ": order() on unordered property '" + o->property + "'");
      need(o->lhs);
      need(o->rhs);
      if (!o->lhs.is_var) value_ok(d, o->property, o->lhs.name, ln, where);
      if (!o->rhs.is_var) value_ok(d, o->property, o->rhs.name, ln, where);
    } else if (const auto* p = std::get_if<PropGuard>(&g.g)) {
      dimension_ok(p->dimension, ln, where);
      if (r.actor == Actor::system)
        error(Diagnostic::Kind::invalid_reference, ln,
              where + ": system rules may not test attacker properties");
    } else if (const auto* k = std::get_if<KnowledgeGuard>(&g.g)) {
      std::set<std::string> vars;
      k->term.collect_vars(vars);
      for (const auto& v : vars) need(Slot::var(v));
      k->term.collect_atoms(used_atoms_);
    } else {
      for (const auto& a : std::get<Disjunction>(g.g).alternatives) guard(a, r, bound, ln, where);
    }
  }

  // `outer` holds variables bound outside the rule (receive bindings).
  void rule(const HornRule& r, int ln, const std::set<std::string>& outer,
            const std::string& where)
  {
    // variants share guards and effects; diagnose them once
    if (r.variant > 0) {
      for (const auto& p : r.preconditions) precondition(p, ln, where);
      return;
    }
    std::set<std::string> bound = outer;
    for (const auto& v : r.component_vars) bound.insert(v);
    for (const auto& p : r.preconditions) {
      precondition(p, ln, where);
      if (p.component.is_var) bound.insert(p.component.name);
      if (p.value.is_var) bound.insert(p.value.name);
    }
    if (!r.component_vars.empty()) used_components_.insert(s_.signature.components.begin(),
                                                           s_.signature.components.end());
    for (const auto& g : r.guards) guard(g, r, bound, ln, where);
    for (const auto& e : r.effects) {
      if (e.component.is_var) {
        if (!bound.count(e.component.name))
          error(Diagnostic::Kind::unbound_variable, ln,
                where + ": effect variable ?" + e.component.name + " is not bound");
      } else {
        component_ok(e.component.name, ln, where);
      }
      const PropertyDecl* d = property_ok(e.property, ln, where);
      switch (e.kind) {
        case EffectValue::literal: value_ok(d, e.property, e.value, ln, where); break;
        case EffectValue::var:
          if (!bound.count(e.value))
            error(Diagnostic::Kind::unbound_variable, ln,
                  where + ": effect variable ?" + e.value + " is not bound");
          break;
        case EffectValue::succ:
        case EffectValue::pred:
          if (d && !d->ordered)
            error(Diagnostic::Kind::unordered_successor, ln,
                  where + ": succ/pred on unordered property '" + e.property + "'");
          break;
      }
    }
  }

  void precondition(const FactPattern& p, int ln, const std::string& where)
  {
    if (!p.component.is_var) component_ok(p.component.name, ln, where);
    const PropertyDecl* d = property_ok(p.property, ln, where);
    if (!p.value.is_var) value_ok(d, p.property, p.value.name, ln, where);
  }

  void agent(const Agent& a)
  {
    std::set<std::string> bound;
    std::vector<bool> reach(a.steps.size(), false);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      const Step& st = a.steps[i];
      int ln = line(a.name + "#" + std::to_string(i));
      std::string where = "agent " + a.name + " step " + std::to_string(i);
      switch (st.kind) {
        case Step::Kind::send:
        case Step::Kind::receive: {
          used_channels_.insert(st.channel);
          if (!s_.channels.count(st.channel))
            error(Diagnostic::Kind::undeclared_symbol, ln,
                  where + ": undeclared channel '" + st.channel + "'");
          if (st.has_peer && !st.peer.is_var && !s_.agent(st.peer.name))
            error(Diagnostic::Kind::invalid_reference, ln,
                  where + ": '" + st.peer.name + "' is not an agent");
          st.term.collect_atoms(used_atoms_);
          std::set<std::string> vars;
          st.term.collect_vars(vars);
          if (st.kind == Step::Kind::send) {
            for (const auto& v : vars)
              if (!bound.count(v))
                error(Diagnostic::Kind::unbound_variable, ln,
                      where + ": ?" + v + " is not bound by an earlier receive");
          } else {
            bound.insert(vars.begin(), vars.end());
            if (st.has_peer && st.peer.is_var) bound.insert(st.peer.name);
          }
          break;
        }
        case Step::Kind::update:
          for (const auto& r : st.update) rule(r, ln, bound, where);
          break;
        case Step::Kind::jump:
          if (st.target >= a.steps.size())
            error(Diagnostic::Kind::invalid_reference, ln,
                  where + ": goto " + std::to_string(st.target) + " is out of range");
          break;
      }
    }
    // reachability from step 0 along fall-through and jumps
    std::vector<std::size_t> todo;
    if (!a.steps.empty()) todo.push_back(0);
    while (!todo.empty()) {
      std::size_t i = todo.back();
      todo.pop_back();
      if (i >= a.steps.size() || reach[i]) continue;
      reach[i] = true;
      if (a.steps[i].kind == Step::Kind::jump) {
        todo.push_back(a.steps[i].target);
      } else {
        todo.push_back(i + 1);
      }
    }
    for (std::size_t i = 0; i < a.steps.size(); ++i)
      if (!reach[i])
        warning(Diagnostic::Kind::unreachable_step, line(a.name + "#" + std::to_string(i)),
                "agent " + a.name + " step " + std::to_string(i) + " is unreachable");
  }

  void goal(const Goal& g)
  {
    std::vector<Fact> facts;
    g.body.collect_facts(facts);
    for (const auto& f : facts) fact_ok(f, line("goal:" + g.name), "goal " + g.name);
  }

  void unused()
  {
    for (const auto& k : s_.initial_knowledge) collect(k);
    for (const auto& c : s_.signature.components)
      if (!used_components_.count(c))
        warning(Diagnostic::Kind::unused_declaration, line("component:" + c),
                "component '" + c + "' is never used");
    for (const auto& [p, d] : s_.signature.properties)
      if (!used_properties_.count(p))
        warning(Diagnostic::Kind::unused_declaration, line("property:" + p),
                "property '" + p + "' is never used");
    for (const auto& [c, k] : s_.channels)
      if (!used_channels_.count(c))
        warning(Diagnostic::Kind::unused_declaration, line("channel:" + c),
                "channel '" + c + "' is never used");
    for (const auto& d : s_.dimensions)
      if (!used_dimensions_.count(d))
        warning(Diagnostic::Kind::unused_declaration, line("dimension:" + d),
                "dimension '" + d + "' is never used");
    for (const auto& [a, sort] : s_.signature.atoms) {
      if (s_.agent(a)) continue;
      if (!used_atoms_.count(a))
        warning(Diagnostic::Kind::unused_declaration, line("atom:" + a),
                "atom '" + a + "' is never used");
    }
  }

  void collect(const Term& t)
  {
    if (t.is_atom()) {
      used_atoms_.insert(t.name());
      return;
    }
    collect(t.left());
    if (t.kind() != TermKind::inv) collect(t.right());
  }

  const SystemSpec& s_;
  std::vector<Diagnostic> out_;
  std::set<std::string> used_components_, used_properties_, used_channels_, used_dimensions_,
      used_atoms_;
};

}  // namespace

std::vector<Diagnostic> validate(const SystemSpec& spec)
{
  return Validator(spec).run();
}

}  // namespace cpdy
