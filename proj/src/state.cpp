#include "cpdy/state.hpp"

#include <algorithm>

namespace cpdy {

bool PropertyDecl::admits(const std::string& v) const
{
  return values.empty() || std::find(values.begin(), values.end(), v) != values.end();
}

std::optional<std::size_t> PropertyDecl::rank(const std::string& v) const
{
  if (!ordered) return std::nullopt;
  auto it = std::find(values.begin(), values.end(), v);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

Sort Signature::atom_sort(const std::string& name) const
{
  auto it = atoms.find(name);
  return it == atoms.end() ? Sort::payload : it->second;
}

const PropertyDecl& Signature::property(const std::string& p) const
{
  auto it = properties.find(p);
  if (it == properties.end()) throw UndeclaredSymbol("undeclared property '" + p + "'");
  return it->second;
}

void Signature::check_fact(const std::string& c, const std::string& p, const std::string& v) const
{
  if (!components.count(c)) throw UndeclaredSymbol("undeclared component '" + c + "'");
  const auto& decl = property(p);
  if (!v.empty() && !decl.admits(v))
    throw UndeclaredSymbol("value '" + v + "' is not declared for property '" + p + "'");
}

std::string to_string(const Fact& f)
{
  return f.component + "(" + f.property + "," + f.value + ")";
}

std::string_view to_string(ChannelKind k)
{
  return k == ChannelKind::network ? "network" : "physical";
}

std::optional<std::string> SysState::get_fact(const std::string& component,
                                              const std::string& property) const
{
  sig_->check_fact(component, property, "");
  auto it = facts_.find({component, property});
  if (it == facts_.end()) return std::nullopt;
  return it->second;
}

SysState SysState::set_fact(const Fact& f) const
{
  sig_->check_fact(f.component, f.property, f.value);
  SysState out = *this;
  out.facts_[{f.component, f.property}] = f.value;
  return out;
}

bool SysState::has_fact(const Fact& f) const
{
  auto it = facts_.find({f.component, f.property});
  return it != facts_.end() && it->second == f.value;
}

std::vector<Fact> SysState::facts() const
{
  std::vector<Fact> out;
  out.reserve(facts_.size());
  for (const auto& [cp, v] : facts_) out.push_back({cp.first, cp.second, v});
  return out;
}

bool SysState::value_less(const std::string& property, const std::string& a,
                          const std::string& b) const
{
  const auto& decl = sig_->property(property);
  if (!decl.ordered) throw UnorderedValue("property '" + property + "' has no declared order");
  auto ra = decl.rank(a);
  auto rb = decl.rank(b);
  if (!ra || !rb)
    throw UnorderedValue("value not in the order of '" + property + "': " + (ra ? b : a));
  return *ra < *rb;
}

SysState SysState::with_attacker_props(std::set<DYProp> props) const
{
  SysState out = *this;
  out.props_ = std::move(props);
  return out;
}

SysState SysState::learn(const Term& t) const
{
  SysState out = *this;
  out.knowledge_ = cpdy::learn(knowledge_, t);
  return out;
}

SysState SysState::with_knowledge(const KnowledgeSet& k) const
{
  SysState out = *this;
  out.knowledge_ = analyze(k);
  return out;
}

SysState SysState::with_channel(const std::string& name, ChannelBuffer buf) const
{
  SysState out = *this;
  if (buf.kind == ChannelKind::network) std::sort(buf.pending.begin(), buf.pending.end());
  out.channels_[name] = std::move(buf);
  return out;
}

SysState SysState::enqueue(const std::string& channel, Message m) const
{
  SysState out = *this;
  auto& buf = out.channels_.at(channel);
  if (buf.kind == ChannelKind::network) {
    auto pos = std::upper_bound(buf.pending.begin(), buf.pending.end(), m);
    buf.pending.insert(pos, std::move(m));
  } else {
    buf.pending.push_back(std::move(m));
  }
  return out;
}

SysState SysState::dequeue(const std::string& channel, std::size_t index) const
{
  SysState out = *this;
  auto& buf = out.channels_.at(channel);
  buf.pending.erase(buf.pending.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

bool SysState::network_pending() const
{
  return std::any_of(channels_.begin(), channels_.end(), [](const auto& kv) {
    return kv.second.kind == ChannelKind::network && !kv.second.pending.empty();
  });
}

SysState SysState::with_agent(const std::string& name, AgentState a) const
{
  SysState out = *this;
  out.agents_[name] = std::move(a);
  return out;
}

nlohmann::ordered_json SysState::to_json() const
{
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json facts = ordered_json::array();
  for (const auto& [cp, v] : facts_) facts.push_back({cp.first, cp.second, v});
  j["facts"] = std::move(facts);

  ordered_json props = ordered_json::array();
  for (const auto& p : props_) props.push_back({p.dimension, p.value});
  j["attacker_props"] = std::move(props);

  ordered_json know = ordered_json::array();
  for (const auto& t : knowledge_.terms()) know.push_back(t.text());
  j["knowledge"] = std::move(know);

  ordered_json chans = ordered_json::array();
  for (const auto& [name, buf] : channels_) {
    ordered_json c;
    c["name"] = name;
    c["kind"] = std::string(to_string(buf.kind));
    ordered_json pending = ordered_json::array();
    for (const auto& m : buf.pending) pending.push_back({m.sender, m.receiver, m.payload.text()});
    c["pending"] = std::move(pending);
    chans.push_back(std::move(c));
  }
  j["channels"] = std::move(chans);

  ordered_json agents = ordered_json::array();
  for (const auto& [name, a] : agents_) {
    ordered_json o;
    o["name"] = name;
    o["pc"] = a.pc;
    ordered_json env = ordered_json::object();
    for (const auto& [var, t] : a.env) env[var] = t.text();
    o["env"] = std::move(env);
    agents.push_back(std::move(o));
  }
  j["agents"] = std::move(agents);
  return j;
}

bool operator==(const SysState& a, const SysState& b)
{
  return a.facts_ == b.facts_ && a.props_ == b.props_ && a.knowledge_ == b.knowledge_ &&
         a.channels_ == b.channels_ && a.agents_ == b.agents_;
}

std::optional<std::string> get_fact(const SysState& s, const std::string& component,
                                    const std::string& property)
{
  return s.get_fact(component, property);
}

SysState set_fact(const SysState& s, const Fact& f) { return s.set_fact(f); }

bool value_less(const SysState& s, const std::string& property, const std::string& a,
                const std::string& b)
{
  return s.value_less(property, a, b);
}

}  // namespace cpdy
