#include "cpdy/search.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

namespace cpdy {

using nlohmann::ordered_json;

std::string_view to_string(Transition::Kind k)
{
  switch (k) {
    case Transition::Kind::agent_step: return "AgentStep";
    case Transition::Kind::physics_rule: return "PhysicsRule";
    case Transition::Kind::attacker_rule: return "AttackerRule";
    case Transition::Kind::net_intercept: return "NetIntercept";
    case Transition::Kind::net_deliver: return "NetDeliver";
    case Transition::Kind::net_inject: return "NetInject";
  }
  return "AgentStep";
}

namespace {

ordered_json binding_json(const Binding& b)
{
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : b) j[k] = v;
  return j;
}

ordered_json message_json(const Message& m)
{
  ordered_json j;
  j["sender"] = m.sender;
  j["receiver"] = m.receiver;
  j["payload"] = m.payload.text();
  return j;
}

}  // namespace

ordered_json Transition::detail() const
{
  ordered_json d;
  switch (kind) {
    case Kind::agent_step:
      d["agent"] = agent;
      d["step"] = step;
      if (!rule.empty()) {
        d["variant"] = variant;
        d["binding"] = binding_json(binding);
      }
      break;
    case Kind::physics_rule:
    case Kind::attacker_rule:
      d["rule"] = rule;
      d["variant"] = variant;
      d["binding"] = binding_json(binding);
      break;
    case Kind::net_intercept:
    case Kind::net_deliver:
      d["channel"] = channel;
      d["message"] = message_json(*message);
      break;
    case Kind::net_inject:
      d["channel"] = channel;
      d["term"] = message->payload.text();
      d["claimed_sender"] = message->sender;
      d["receiver"] = message->receiver;
      break;
  }
  return d;
}

ordered_json Transition::to_json() const
{
  ordered_json j;
  j["kind"] = std::string(to_string(kind));
  j["detail"] = detail();
  return j;
}

namespace {

bool is_network(const SystemSpec& spec, const std::string& ch)
{
  auto it = spec.channels.find(ch);
  return it != spec.channels.end() && it->second == ChannelKind::network;
}

// Accepts `payload` from `sender` at a receive step; returns the new env.
std::optional<std::map<std::string, Term>> accept(const Step& st, const AgentState& a,
                                                  const std::string& sender, const Term& payload)
{
  TermEnv env = a.env;
  if (st.has_peer) {
    if (st.peer.is_var) {
      auto it = env.find(st.peer.name);
      Term who = Term::atom(sender, Sort::agent);
      if (it != env.end() && !(it->second == who)) return std::nullopt;
      env.insert_or_assign(st.peer.name, who);
    } else if (st.peer.name != sender) {
      return std::nullopt;
    }
  }
  if (!st.term.match(payload, env)) return std::nullopt;
  return env;
}

SysState advance(const SysState& s, const std::string& agent, std::size_t pc,
                 std::map<std::string, Term> env)
{
  return s.with_agent(agent, AgentState{pc, std::move(env)});
}

class Engine {
 public:
  Engine(const SystemSpec& spec, Profile profile) : spec_(spec), profile_(profile)
  {
    basis_ = injection_candidates(spec);
  }

  std::vector<std::pair<Transition, SysState>> run(const SysState& s) const
  {
    std::vector<std::pair<Transition, SysState>> out;
    if (s.network_pending()) {
      network(s, out);
      inject(s, out);
      return out;
    }
    agent_steps(s, out);
    if (!out.empty()) return out;
    rules(s, out);
    inject(s, out);
    return out;
  }

  bool any_agent_step(const SysState& s) const
  {
    std::vector<std::pair<Transition, SysState>> out;
    agent_steps(s, out, true);
    return !out.empty();
  }

  void agent_steps(const SysState& s, std::vector<std::pair<Transition, SysState>>& out,
                   bool first_only = false) const
  {
    for (const auto& ag : spec_.agents) {
      const AgentState& a = s.agents().at(ag.name);
      if (a.pc >= ag.steps.size()) continue;
      const Step& st = ag.steps[a.pc];
      Transition t;
      t.kind = Transition::Kind::agent_step;
      t.agent = ag.name;
      t.step = a.pc;
      switch (st.kind) {
        case Step::Kind::send: {
          Term payload = st.term.instantiate(a.env);
          SysState n = s.enqueue(st.channel, Message{ag.name, st.peer.name, payload});
          if (is_network(spec_, st.channel)) n = n.learn(payload);
          out.emplace_back(t, advance(n, ag.name, a.pc + 1, a.env));
          break;
        }
        case Step::Kind::receive: {
          if (is_network(spec_, st.channel)) break;
          const auto& pending = s.channels().at(st.channel).pending;
          // FIFO: the oldest message addressed to this agent
          for (std::size_t i = 0; i < pending.size(); ++i) {
            if (pending[i].receiver != ag.name) continue;
            if (auto env = accept(st, a, pending[i].sender, pending[i].payload)) {
              Transition r = t;
              r.channel = st.channel;
              r.message = pending[i];
              out.emplace_back(r, advance(s.dequeue(st.channel, i), ag.name, a.pc + 1, *env));
            }
            break;
          }
          break;
        }
        case Step::Kind::update:
          for (const auto& rule : st.update) {
            HornRule r = substitute(rule, a.env);
            for (const auto& b : match_rule(s, r)) {
              Transition u = t;
              u.rule = rule.name;
              u.variant = rule.variant;
              u.binding = b;
              out.emplace_back(u, advance(apply_rule(s, r, b), ag.name, a.pc + 1, a.env));
              if (first_only) return;
            }
          }
          break;
        case Step::Kind::jump:
          out.emplace_back(t, advance(s, ag.name, st.target, a.env));
          break;
      }
      if (first_only && !out.empty()) return;
    }
  }

  void rules(const SysState& s, std::vector<std::pair<Transition, SysState>>& out) const
  {
    for (Actor actor : {Actor::system, Actor::attacker}) {
      if (actor == Actor::attacker && profile_ == Profile::dy_only) break;
      for (const auto& r : spec_.rules) {
        if (r.actor != actor) continue;
        for (const auto& b : match_rule(s, r)) {
          Transition t;
          t.kind = actor == Actor::system ? Transition::Kind::physics_rule
                                          : Transition::Kind::attacker_rule;
          t.rule = r.name;
          t.variant = r.variant;
          t.binding = b;
          out.emplace_back(std::move(t), apply_rule(s, r, b));
        }
      }
    }
  }

  void network(const SysState& s, std::vector<std::pair<Transition, SysState>>& out) const
  {
    for (const auto& [ch, buf] : s.channels()) {
      if (buf.kind != ChannelKind::network) continue;
      for (std::size_t i = 0; i < buf.pending.size(); ++i) {
        if (i > 0 && buf.pending[i] == buf.pending[i - 1]) continue;
        Transition t;
        t.kind = Transition::Kind::net_intercept;
        t.channel = ch;
        t.message = buf.pending[i];
        out.emplace_back(t, s.dequeue(ch, i).learn(buf.pending[i].payload));
      }
      for (std::size_t i = 0; i < buf.pending.size(); ++i) {
        if (i > 0 && buf.pending[i] == buf.pending[i - 1]) continue;
        const Message& m = buf.pending[i];
        const Agent* ag = spec_.agent(m.receiver);
        if (!ag) continue;
        const AgentState& a = s.agents().at(ag->name);
        if (a.pc >= ag->steps.size()) continue;
        const Step& st = ag->steps[a.pc];
        if (st.kind != Step::Kind::receive || st.channel != ch) continue;
        if (auto env = accept(st, a, m.sender, m.payload)) {
          Transition t;
          t.kind = Transition::Kind::net_deliver;
          t.channel = ch;
          t.message = m;
          out.emplace_back(t, advance(s.dequeue(ch, i), ag->name, a.pc + 1, *env));
        }
      }
    }
  }

  void inject(const SysState& s, std::vector<std::pair<Transition, SysState>>& out) const
  {
    for (const auto& ag : spec_.agents) {
      const AgentState& a = s.agents().at(ag.name);
      if (a.pc >= ag.steps.size()) continue;
      const Step& st = ag.steps[a.pc];
      if (st.kind != Step::Kind::receive || !is_network(spec_, st.channel)) continue;
      std::string sender = st.has_peer && !st.peer.is_var ? st.peer.name : "i";
      if (st.has_peer && st.peer.is_var) {
        auto it = a.env.find(st.peer.name);
        if (it != a.env.end()) sender = it->second.name();
      }
      for (const auto& term : basis_) {
        TermEnv probe = a.env;
        if (!st.term.match(term, probe)) continue;
        if (!derivable(s.knowledge(), term)) continue;
        auto env = accept(st, a, sender, term);
        if (!env) continue;
        Transition t;
        t.kind = Transition::Kind::net_inject;
        t.channel = st.channel;
        t.message = Message{sender, ag.name, term};
        out.emplace_back(t, advance(s, ag.name, a.pc + 1, *env));
      }
    }
  }

 private:
  const SystemSpec& spec_;
  Profile profile_;
  std::vector<Term> basis_;
};

}  // namespace

std::vector<Term> injection_candidates(const SystemSpec& spec)
{
  std::set<std::string> atom_names;
  std::set<TermPattern::Kind> ctors;
  std::size_t depth = 0;
  std::function<void(const TermPattern&)> ctor_walk = [&](const TermPattern& p) {
    if (p.kind() != TermPattern::Kind::var && p.kind() != TermPattern::Kind::atom)
      ctors.insert(p.kind());
    for (const auto& k : p.kids()) ctor_walk(k);
  };
  bool any_receive = false;
  for (const auto& a : spec.agents) {
    atom_names.insert(a.name);
    for (const auto& st : a.steps) {
      if (st.kind == Step::Kind::send) st.term.collect_atoms(atom_names);
      if (st.kind != Step::Kind::receive || !is_network(spec, st.channel)) continue;
      any_receive = true;
      st.term.collect_atoms(atom_names);
      ctor_walk(st.term);
      depth = std::max(depth, st.term.depth());
    }
  }
  if (!any_receive) return {};

  std::set<Term> level;
  for (const auto& n : atom_names) {
    Sort sort = spec.signature.atom_sort(n);
    level.insert(Term::atom(n, sort));
  }
  std::set<Term> all = level;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Term> cur(all.begin(), all.end());
    std::set<Term> next;
    for (const auto& l : cur)
      for (const auto& r : cur) {
        if (ctors.count(TermPattern::Kind::pair)) next.insert(Term::pair(l, r));
        if (ctors.count(TermPattern::Kind::scrypt)) next.insert(Term::scrypt(l, r));
        if (ctors.count(TermPattern::Kind::acrypt)) next.insert(Term::acrypt(l, r));
      }
    if (ctors.count(TermPattern::Kind::inv))
      for (const auto& k : cur)
        if (k.is_atom() && k.sort() == Sort::pubkey) next.insert(Term::inv(k));
    all.insert(next.begin(), next.end());
  }
  return {all.begin(), all.end()};
}

std::vector<std::pair<Transition, SysState>> successors(const SysState& s, const SystemSpec& spec,
                                                        Profile profile)
{
  return Engine(spec, profile).run(s);
}

bool settled(const SysState& s, const SystemSpec& spec)
{
  if (s.network_pending()) return false;
  return !Engine(spec, Profile::dy_only).any_agent_step(s);
}

namespace {

std::optional<std::string> violated(const SysState& s, const SystemSpec& spec, const Engine& e)
{
  if (s.network_pending() || e.any_agent_step(s)) return std::nullopt;
  for (const auto& g : spec.goals)
    if (!g.body.eval(s)) return g.name;
  return std::nullopt;
}

struct Node {
  SysState state;
  std::size_t parent;
  std::optional<Transition> via;
};

}  // namespace

std::optional<std::string> violated_goal(const SysState& s, const SystemSpec& spec)
{
  return violated(s, spec, Engine(spec, Profile::dy_only));
}

Verdict check(const SystemSpec& spec, Profile profile, const CheckOptions& opts)
{
  if (opts.bound < 1) throw std::invalid_argument("bound must be at least 1");
  Engine engine(spec, profile);
  Verdict v;
  v.profile = profile;
  v.bound = opts.bound;

  std::vector<Node> nodes;
  // canonical text -> node ids sharing it; full comparison settles collisions
  std::unordered_map<std::string, std::vector<std::size_t>> visited;
  SysState init = initial_state(spec);
  nodes.push_back({init, 0, std::nullopt});
  visited[init.canonical()].push_back(0);

  auto build = [&](std::size_t id, const std::string& goal) {
    AttackTrace t;
    t.initial = nodes[0].state;
    t.violated_goal = goal;
    std::vector<std::size_t> path;
    for (std::size_t i = id; i != 0; i = nodes[i].parent) path.push_back(i);
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      t.steps.push_back({*nodes[*it].via, nodes[*it].state});
    return t;
  };

  struct Expanded {
    std::vector<std::pair<Transition, SysState>> succ;
    std::vector<std::string> keys;
  };

  std::vector<std::size_t> level{0};
  for (std::size_t depth = 0;; ++depth) {
    for (std::size_t id : level) {
      ++v.states_explored;
      if (auto g = violated(nodes[id].state, spec, engine)) {
        v.attack = true;
        v.trace = build(id, *g);
        return v;
      }
    }
    if (depth == opts.bound || level.empty()) break;

    std::vector<Expanded> ex(level.size());
    auto work = [&](std::size_t i) {
      ex[i].succ = engine.run(nodes[level[i]].state);
      for (const auto& [t, s] : ex[i].succ) ex[i].keys.push_back(s.canonical());
    };
    unsigned workers = std::max(1u, opts.workers);
    if (workers == 1 || level.size() < 2) {
      for (std::size_t i = 0; i < level.size(); ++i) work(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, level.size()); ++w)
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < level.size();) work(i);
        });
      for (auto& th : pool) th.join();
    }

    // deterministic merge in parent order, then successor order
    std::vector<std::size_t> next_level;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = 0; j < ex[i].succ.size(); ++j) {
        auto& bucket = visited[ex[i].keys[j]];
        const SysState& s = ex[i].succ[j].second;
        bool seen = std::any_of(bucket.begin(), bucket.end(),
                                [&](std::size_t k) { return nodes[k].state == s; });
        if (seen) continue;
        bucket.push_back(nodes.size());
        next_level.push_back(nodes.size());
        nodes.push_back({s, level[i], ex[i].succ[j].first});
        if (nodes.size() > opts.max_states)
          throw ResourceError("state limit of " + std::to_string(opts.max_states) +
                                  " exceeded after exploring " +
                                  std::to_string(v.states_explored) + " states",
                              v.states_explored);
      }
    }
    level = std::move(next_level);
  }
  return v;
}

nlohmann::ordered_json verdict_to_json(const Verdict& v)
{
  ordered_json j;
  j["verdict"] = v.attack ? "attack" : "safe";
  j["goal"] = v.attack ? ordered_json(v.trace->violated_goal) : ordered_json(nullptr);
  j["profile"] = std::string(to_string(v.profile));
  j["bound"] = v.bound;
  if (v.attack) {
    j["initial"] = v.trace->initial.to_json();
    ordered_json steps = ordered_json::array();
    for (const auto& st : v.trace->steps) {
      ordered_json s = st.transition.to_json();
      s["state"] = st.state.to_json();
      steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
  } else {
    j["initial"] = nullptr;
    j["steps"] = ordered_json::array();
  }
  j["states_explored"] = v.states_explored;
  return j;
}

bool replay(const nlohmann::ordered_json& trace, const SystemSpec& spec)
{
  if (!trace.contains("steps") || !trace.contains("profile"))
    throw ReplayMismatch(0, "not a trace document");
  Profile profile = profile_from_string(trace.at("profile").get<std::string>());
  Engine engine(spec, profile);
  SysState s = initial_state(spec);
  if (trace.contains("initial") && !trace.at("initial").is_null() && trace.at("initial") != s.to_json())
    throw ReplayMismatch(0, "initial state differs from the specification's");
  const auto& steps = trace.at("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    if (violated(s, spec, engine))
      throw ReplayMismatch(i, "goal already violated before this step");
    bool found = false;
    bool transition_found = false;
    for (auto& [t, next] : engine.run(s)) {
      ordered_json tj = t.to_json();
      if (tj.at("kind") != st.at("kind") || tj.at("detail") != st.at("detail")) continue;
      transition_found = true;
      if (next.to_json() != st.at("state")) continue;
      s = std::move(next);
      found = true;
      break;
    }
    if (!found)
      throw ReplayMismatch(i, transition_found
                                  ? "successor state does not match"
                                  : "transition " + st.at("kind").get<std::string>() +
                                        " is not enabled");
  }
  auto g = violated(s, spec, engine);
  if (!g) throw ReplayMismatch(steps.size(), "final state does not violate any goal");
  if (trace.contains("goal") && trace.at("goal").is_string() && trace.at("goal") != *g)
    throw ReplayMismatch(steps.size(), "final state violates '" + *g + "', not '" +
                                           trace.at("goal").get<std::string>() + "'");
  return true;
}

bool replay(const AttackTrace& trace, const SystemSpec& spec, Profile profile)
{
  Verdict v;
  v.attack = true;
  v.trace = trace;
  v.profile = profile;
  return replay(verdict_to_json(v), spec);
}

}  // namespace cpdy
