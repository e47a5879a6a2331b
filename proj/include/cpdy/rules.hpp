#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cpdy/pattern.hpp"
#include "cpdy/state.hpp"

namespace cpdy {

class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Profile { dy_only, cpdy };

std::string_view to_string(Profile p);
/// Accepts `dy`, `dy_only` and `cpdy`.
Profile profile_from_string(std::string_view s);

/// Identifier or `?variable` in a fact position.
struct Slot {
  bool is_var = false;
  std::string name;

  static Slot lit(std::string n) { return {false, std::move(n)}; }
  static Slot var(std::string n) { return {true, std::move(n)}; }
  std::string text() const { return is_var ? "?" + name : name; }

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

struct FactPattern {
  Slot component;
  std::string property;
  Slot value;

  std::string text() const;
  friend auto operator<=>(const FactPattern&, const FactPattern&) = default;
};

enum class Relation { less, greater, equal };

struct OrderGuard {
  std::string property;
  Slot lhs;
  Relation rel = Relation::less;
  Slot rhs;

  friend bool operator==(const OrderGuard&, const OrderGuard&) = default;
};

struct PropGuard {
  std::string dimension;
  std::string value;

  friend bool operator==(const PropGuard&, const PropGuard&) = default;
};

struct KnowledgeGuard {
  TermPattern term;

  friend bool operator==(const KnowledgeGuard&, const KnowledgeGuard&) = default;
};

struct Guard;

struct Disjunction {
  std::vector<Guard> alternatives;

  friend bool operator==(const Disjunction&, const Disjunction&);
};

struct Guard {
  std::variant<OrderGuard, PropGuard, KnowledgeGuard, Disjunction> g;

  std::string text() const;
  friend bool operator==(const Guard&, const Guard&) = default;
};

/// `succ`/`pred` resolve against the current value of the same
/// (component, property) pair.
enum class EffectValue { literal, var, succ, pred };

struct FactEffect {
  Slot component;
  std::string property;
  EffectValue kind = EffectValue::literal;
  std::string value;

  std::string text() const;
  friend bool operator==(const FactEffect&, const FactEffect&) = default;
};

enum class Actor { system, attacker };

std::string_view to_string(Actor a);

/// Guarded rewrite on the fact database. Disjunctive preconditions are
/// expanded before a rule reaches this form; `variant`/`variant_count`
/// number the expansions of one source rule.
struct HornRule {
  std::string name;
  Actor actor = Actor::system;
  std::vector<FactPattern> preconditions;
  /// Variables ranging over every declared component.
  std::vector<std::string> component_vars;
  std::vector<Guard> guards;
  std::vector<FactEffect> effects;
  int variant = 0;
  int variant_count = 1;

  friend bool operator==(const HornRule&, const HornRule&) = default;
};

/// Variable -> symbol. Ordered maps give the lexicographic binding order.
using Binding = std::map<std::string, std::string>;

std::vector<Binding> match_rule(const SysState& s, const HornRule& r);
SysState apply_rule(const SysState& s, const HornRule& r, const Binding& b);

bool eval_guard(const SysState& s, const Guard& g, const Binding& b);

/// Cartesian expansion of precondition disjunctions. Each inner vector of
/// `groups` is one precondition with its alternatives.
std::vector<HornRule> expand_rule(const std::string& name, Actor actor,
                                  const std::vector<std::vector<FactPattern>>& groups,
                                  const std::vector<std::string>& component_vars,
                                  const std::vector<Guard>& guards,
                                  const std::vector<FactEffect>& effects);

/// Tank and valve physics plus, under cpdy, the physical attacker
/// capabilities (damage, manual valve operation, heating).
std::vector<HornRule> builtin_ruleset(Profile profile);

/// Replaces variables bound in `env` to atoms by their names.
HornRule substitute(const HornRule& r, const TermEnv& env);

}  // namespace cpdy
