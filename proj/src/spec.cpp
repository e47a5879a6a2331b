#include "cpdy/spec.hpp"

#include <algorithm>

namespace cpdy {

Formula Formula::lit(Fact f)
{
  Formula r;
  r.op = Op::fact;
  r.fact = std::move(f);
  return r;
}

Formula Formula::neg(Formula f)
{
  Formula r;
  r.op = Op::negation;
  r.kids.push_back(std::move(f));
  return r;
}

Formula Formula::all(std::vector<Formula> fs)
{
  if (fs.size() == 1) return std::move(fs.front());
  Formula r;
  r.op = Op::conjunction;
  r.kids = std::move(fs);
  return r;
}

Formula Formula::any(std::vector<Formula> fs)
{
  if (fs.size() == 1) return std::move(fs.front());
  Formula r;
  r.op = Op::disjunction;
  r.kids = std::move(fs);
  return r;
}

Formula Formula::implies(Formula a, Formula b)
{
  Formula r;
  r.op = Op::implication;
  r.kids.push_back(std::move(a));
  r.kids.push_back(std::move(b));
  return r;
}

bool Formula::eval(const SysState& s) const
{
  switch (op) {
    case Op::fact: return s.has_fact(fact);
    case Op::negation: return !kids[0].eval(s);
    case Op::conjunction:
      return std::all_of(kids.begin(), kids.end(), [&](const Formula& k) { return k.eval(s); });
    case Op::disjunction:
      return std::any_of(kids.begin(), kids.end(), [&](const Formula& k) { return k.eval(s); });
    case Op::implication: return !kids[0].eval(s) || kids[1].eval(s);
  }
  return false;
}

void Formula::collect_facts(std::vector<Fact>& out) const
{
  if (op == Op::fact) out.push_back(fact);
  for (const auto& k : kids) k.collect_facts(out);
}

std::string Formula::text() const
{
  auto join = [&](std::string_view sep) {
    std::string s = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += sep;
      s += kids[i].text();
    }
    return s + ")";
  };
  switch (op) {
    case Op::fact: return to_string(fact);
    case Op::negation: return "not " + kids[0].text();
    case Op::conjunction: return join(" and ");
    case Op::disjunction: return join(" or ");
    case Op::implication: return join(" => ");
  }
  return {};
}

const Agent* SystemSpec::agent(const std::string& name) const
{
  for (const auto& a : agents)
    if (a.name == name) return &a;
  return nullptr;
}

const Goal* SystemSpec::goal(const std::string& name) const
{
  for (const auto& g : goals)
    if (g.name == name) return &g;
  return nullptr;
}

bool operator==(const SystemSpec& a, const SystemSpec& b)
{
  return a.signature == b.signature && a.dimensions == b.dimensions && a.channels == b.channels &&
         a.agents == b.agents && a.rules == b.rules && a.attacker_props == b.attacker_props &&
         a.initial_facts == b.initial_facts && a.initial_knowledge == b.initial_knowledge &&
         a.goals == b.goals;
}

std::string_view to_string(Diagnostic::Kind k)
{
  switch (k) {
    case Diagnostic::Kind::syntax: return "syntax";
    case Diagnostic::Kind::duplicate_declaration: return "duplicate-declaration";
    case Diagnostic::Kind::undeclared_symbol: return "undeclared-symbol";
    case Diagnostic::Kind::unbound_variable: return "unbound-variable";
    case Diagnostic::Kind::non_functional: return "non-functional";
    case Diagnostic::Kind::unordered_successor: return "unordered-successor";
    case Diagnostic::Kind::invalid_reference: return "invalid-reference";
    case Diagnostic::Kind::unused_declaration: return "unused-declaration";
    case Diagnostic::Kind::unreachable_step: return "unreachable-step";
  }
  return "syntax";
}

std::string Diagnostic::text() const
{
  std::string s;
  if (line > 0) {
    s += std::to_string(line);
    if (column > 0) s += ":" + std::to_string(column);
    s += ": ";
  }
  s += severity == Severity::error ? "error" : "warning";
  s += " [" + std::string(to_string(kind)) + "] " + message;
  return s;
}

namespace {

std::string join_diags(const std::vector<Diagnostic>& d)
{
  std::string s;
  for (const auto& x : d) {
    if (!s.empty()) s += "\n";
    s += x.text();
  }
  return s;
}

}  // namespace

SpecError::SpecError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_diags(diags)), diags_(std::move(diags))
{
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::error;
  });
}

SystemSpec parse(std::string_view source)
{
  SystemSpec spec = parse_unchecked(source);
  auto diags = validate(spec);
  if (has_errors(diags)) {
    std::vector<Diagnostic> errors;
    for (auto& d : diags)
      if (d.severity == Diagnostic::Severity::error) errors.push_back(std::move(d));
    throw SpecError(std::move(errors));
  }
  return spec;
}

namespace {

// Explains why `f` evaluates to `want` in `s`, one clause per literal.
void explain(const Formula& f, const SysState& s, bool want, std::vector<std::string>& out)
{
  switch (f.op) {
    case Formula::Op::fact: {
      if (want) {
        out.push_back(to_string(f.fact) + " holds");
        return;
      }
      std::string line = to_string(f.fact) + " does not hold";
      auto it = s.signature().components.count(f.fact.component)
                    ? s.get_fact(f.fact.component, f.fact.property)
                    : std::nullopt;
      if (it) line += " (" + to_string(Fact{f.fact.component, f.fact.property, *it}) + " holds)";
      out.push_back(std::move(line));
      return;
    }
    case Formula::Op::negation: explain(f.kids[0], s, !want, out); return;
    case Formula::Op::conjunction:
    case Formula::Op::disjunction: {
      bool is_and = f.op == Formula::Op::conjunction;
      // and/true and or/false need every operand; otherwise one witness suffices
      bool every = (is_and == want);
      for (const auto& k : f.kids) {
        if (k.eval(s) != want) continue;
        explain(k, s, want, out);
        if (!every) return;
      }
      return;
    }
    case Formula::Op::implication:
      if (!want) {
        explain(f.kids[0], s, true, out);
        explain(f.kids[1], s, false, out);
      } else if (!f.kids[0].eval(s)) {
        explain(f.kids[0], s, false, out);
      } else {
        explain(f.kids[1], s, true, out);
      }
      return;
  }
}

}  // namespace

std::string render_goal_violation(const Goal& g, const SysState& s)
{
  if (g.body.eval(s)) throw NotViolating("state satisfies goal '" + g.name + "'");
  std::vector<std::string> why;
  explain(g.body, s, false, why);
  std::string out = "goal '" + g.name + "' violated: always " + g.body.text() + " fails because";
  for (const auto& w : why) out += "\n  - " + w;
  return out;
}

SysState initial_state(const SystemSpec& spec)
{
  auto sig = std::make_shared<Signature>(spec.signature);
  SysState s(sig);
  for (const auto& f : spec.initial_facts) s = s.set_fact(f);
  s = s.with_attacker_props(spec.attacker_props);
  std::set<Term> know = spec.initial_knowledge;
  for (const auto& a : spec.agents) know.insert(Term::atom(a.name, Sort::agent));
  s = s.with_knowledge(KnowledgeSet(std::move(know)));
  for (const auto& [name, kind] : spec.channels) s = s.with_channel(name, ChannelBuffer{kind, {}});
  for (const auto& a : spec.agents) s = s.with_agent(a.name, AgentState{});
  return s;
}

}  // namespace cpdy
