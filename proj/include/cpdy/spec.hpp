#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpdy/pattern.hpp"
#include "cpdy/rules.hpp"
#include "cpdy/state.hpp"

namespace cpdy {

/// One instruction of an agent's behavior program.
struct Step {
  enum class Kind { send, receive, update, jump };

  Kind kind = Kind::update;
  std::string channel;
  /// send: receiver; receive: optional sender constraint.
  Slot peer;
  bool has_peer = false;
  /// send: template; receive: pattern.
  TermPattern term;
  /// update: the guarded update as expanded anonymous system rules.
  std::vector<HornRule> update;
  /// jump target.
  std::size_t target = 0;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Agent {
  std::string name;
  std::vector<Step> steps;

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// Boolean combination of fact-presence literals.
struct Formula {
  enum class Op { fact, negation, conjunction, disjunction, implication };

  Op op = Op::fact;
  Fact fact;
  std::vector<Formula> kids;

  static Formula lit(Fact f);
  static Formula neg(Formula f);
  static Formula all(std::vector<Formula> fs);
  static Formula any(std::vector<Formula> fs);
  static Formula implies(Formula a, Formula b);

  bool eval(const SysState& s) const;
  void collect_facts(std::vector<Fact>& out) const;
  std::string text() const;

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// `always body`.
struct Goal {
  std::string name;
  Formula body;

  friend bool operator==(const Goal&, const Goal&) = default;
};

struct SystemSpec {
  Signature signature;
  std::set<std::string> dimensions;
  std::map<std::string, ChannelKind> channels;
  std::vector<Agent> agents;
  std::vector<HornRule> rules;
  std::set<DYProp> attacker_props;
  std::vector<Fact> initial_facts;
  std::set<Term> initial_knowledge;
  std::vector<Goal> goals;
  /// Declaration lines for diagnostics; not part of equality.
  std::map<std::string, int> lines;

  const Agent* agent(const std::string& name) const;
  const Goal* goal(const std::string& name) const;

  friend bool operator==(const SystemSpec& a, const SystemSpec& b);
};

struct Diagnostic {
  enum class Severity { error, warning };
  enum class Kind {
    syntax,
    duplicate_declaration,
    undeclared_symbol,
    unbound_variable,
    non_functional,
    unordered_successor,
    invalid_reference,
    unused_declaration,
    unreachable_step,
  };

  Severity severity = Severity::error;
  Kind kind = Kind::syntax;
  int line = 0;
  int column = 0;
  std::string message;

  std::string text() const;
};

std::string_view to_string(Diagnostic::Kind k);

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Syntax and duplicate declarations only. Throws SpecError.
SystemSpec parse_unchecked(std::string_view source);
/// parse_unchecked() followed by validate(); any error diagnostic throws.
SystemSpec parse(std::string_view source);
SystemSpec parse_file(const std::string& path);

std::vector<Diagnostic> validate(const SystemSpec& spec);
bool has_errors(const std::vector<Diagnostic>& diags);

/// Re-parseable rendering; parse(print_spec(s)) == s.
std::string print_spec(const SystemSpec& spec);
std::string print_rule(const HornRule& r);
/// Folds expanded variants back into one DSL rule each.
std::string print_rules(const std::vector<HornRule>& rules);

class NotViolating : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names the literals that make the goal body false in `s`.
std::string render_goal_violation(const Goal& g, const SysState& s);

/// Facts, attacker properties, initial knowledge (plus agent names), empty
/// channel buffers and agents at step 0.
SysState initial_state(const SystemSpec& spec);

}  // namespace cpdy
