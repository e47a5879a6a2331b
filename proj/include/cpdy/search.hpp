#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cpdy/rules.hpp"
#include "cpdy/spec.hpp"
#include "cpdy/state.hpp"

namespace cpdy {

struct Transition {
  enum class Kind { agent_step, physics_rule, attacker_rule, net_intercept, net_deliver, net_inject };

  Kind kind = Kind::agent_step;
  /// agent_step: the acting agent.
  std::string agent;
  std::size_t step = 0;
  /// Rules, and agent update steps (variant of the guarded update).
  std::string rule;
  int variant = 0;
  Binding binding;
  /// Network transitions. For injections, `message.sender` is the claimed sender.
  std::string channel;
  std::optional<Message> message;

  nlohmann::ordered_json detail() const;
  /// {"kind": ..., "detail": ...}
  nlohmann::ordered_json to_json() const;

  friend bool operator==(const Transition&, const Transition&) = default;
};

std::string_view to_string(Transition::Kind k);

struct TraceStep {
  Transition transition;
  SysState state;
};

struct AttackTrace {
  SysState initial;
  std::vector<TraceStep> steps;
  std::string violated_goal;

  const SysState& final_state() const { return steps.empty() ? initial : steps.back().state; }
};

struct Verdict {
  bool attack = false;
  std::optional<AttackTrace> trace;
  Profile profile = Profile::cpdy;
  std::size_t bound = 0;
  std::size_t states_explored = 0;
};

class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t explored)
      : std::runtime_error(what), explored_(explored)
  {
  }
  std::size_t states_explored() const { return explored_; }

 private:
  std::size_t explored_;
};

class ReplayMismatch : public std::runtime_error {
 public:
  ReplayMismatch(std::size_t index, const std::string& what)
      : std::runtime_error("step " + std::to_string(index) + ": " + what), index_(index)
  {
  }
  /// Index into the trace's steps; steps.size() for a final-state failure.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct CheckOptions {
  std::size_t bound = 64;
  unsigned workers = 1;
  /// Visited-set cap; exceeding it raises ResourceError.
  std::size_t max_states = 5'000'000;
};

/// Every enabled transition in deterministic order. Classes are prioritized:
/// pending network messages leave only network actions; otherwise enabled
/// agent steps run before physics, attacker rules and injections.
std::vector<std::pair<Transition, SysState>> successors(const SysState& s, const SystemSpec& spec,
                                                        Profile profile);

/// No network message in flight and no agent step enabled. Goals are only
/// observed at settled states.
bool settled(const SysState& s, const SystemSpec& spec);

/// Name of the first goal whose body is false in `s`, if `s` is settled.
std::optional<std::string> violated_goal(const SysState& s, const SystemSpec& spec);

/// Terms NetInject draws from, before the derivability filter.
std::vector<Term> injection_candidates(const SystemSpec& spec);

Verdict check(const SystemSpec& spec, Profile profile, const CheckOptions& opts = {});
inline Verdict check(const SystemSpec& spec, Profile profile, std::size_t bound)
{
  CheckOptions o;
  o.bound = bound;
  return check(spec, profile, o);
}

/// Re-executes the trace. Throws ReplayMismatch at the first divergence.
bool replay(const AttackTrace& trace, const SystemSpec& spec, Profile profile);
/// Same, for a trace in its JSON form (as written by verdict_to_json).
bool replay(const nlohmann::ordered_json& trace, const SystemSpec& spec);

nlohmann::ordered_json verdict_to_json(const Verdict& v);

/// Indented human-readable report.
std::string render_text(const Verdict& v, const SystemSpec& spec, bool color);
/// One line per transition in attack vocabulary.
std::string describe(const Transition& t, const SysState& before, const SysState& after);

}  // namespace cpdy
