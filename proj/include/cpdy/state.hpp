#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cpdy/knowledge.hpp"
#include "cpdy/term.hpp"

namespace cpdy {

class UndeclaredSymbol : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnorderedValue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value domain of one property: an ascending chain when ordered, a plain
/// set of admissible symbols otherwise.
struct PropertyDecl {
  bool ordered = false;
  std::vector<std::string> values;

  /// An empty value list leaves the domain open.
  bool admits(const std::string& v) const;
  /// Position in the chain; nullopt for unordered properties or unknown values.
  std::optional<std::size_t> rank(const std::string& v) const;

  friend bool operator==(const PropertyDecl&, const PropertyDecl&) = default;
};

/// Symbols a state is checked against.
struct Signature {
  std::set<std::string> components;
  std::map<std::string, PropertyDecl> properties;
  /// Sorts of symbols that can appear as message atoms.
  std::map<std::string, Sort> atoms;

  Sort atom_sort(const std::string& name) const;
  const PropertyDecl& property(const std::string& p) const;
  void check_fact(const std::string& c, const std::string& p, const std::string& v) const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

struct Fact {
  std::string component;
  std::string property;
  std::string value;

  friend auto operator<=>(const Fact&, const Fact&) = default;
};

std::string to_string(const Fact& f);

struct DYProp {
  std::string dimension;
  std::string value;

  friend auto operator<=>(const DYProp&, const DYProp&) = default;
};

enum class ChannelKind { network, physical };

std::string_view to_string(ChannelKind k);

struct Message {
  std::string sender;
  std::string receiver;
  Term payload;

  friend bool operator==(const Message&, const Message&) = default;
  friend std::strong_ordering operator<=>(const Message& a, const Message& b)
  {
    if (auto c = a.sender <=> b.sender; c != 0) return c;
    if (auto c = a.receiver <=> b.receiver; c != 0) return c;
    return a.payload <=> b.payload;
  }
};

/// Network buffers are kept sorted (the intruder reorders at will);
/// physical buffers are FIFO.
struct ChannelBuffer {
  ChannelKind kind = ChannelKind::network;
  std::vector<Message> pending;

  friend bool operator==(const ChannelBuffer&, const ChannelBuffer&) = default;
};

struct AgentState {
  std::size_t pc = 0;
  std::map<std::string, Term> env;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Snapshot of the shared fact database, attacker, channels and agents.
///
/// (component, property) is functional and attacker knowledge is kept
/// analyzed. Equality ignores the signature pointer.
class SysState {
 public:
  SysState() : sig_(std::make_shared<Signature>()) {}
  explicit SysState(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {}

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  std::optional<std::string> get_fact(const std::string& component,
                                      const std::string& property) const;
  SysState set_fact(const Fact& f) const;
  bool has_fact(const Fact& f) const;
  std::vector<Fact> facts() const;
  std::size_t fact_count() const { return facts_.size(); }

  bool value_less(const std::string& property, const std::string& a, const std::string& b) const;

  const std::set<DYProp>& attacker_props() const { return props_; }
  SysState with_attacker_props(std::set<DYProp> props) const;

  const KnowledgeSet& knowledge() const { return knowledge_; }
  SysState learn(const Term& t) const;
  SysState with_knowledge(const KnowledgeSet& k) const;

  const std::map<std::string, ChannelBuffer>& channels() const { return channels_; }
  SysState with_channel(const std::string& name, ChannelBuffer buf) const;
  SysState enqueue(const std::string& channel, Message m) const;
  /// Removes the message at `index` of the channel's pending list.
  SysState dequeue(const std::string& channel, std::size_t index) const;
  bool network_pending() const;

  const std::map<std::string, AgentState>& agents() const { return agents_; }
  SysState with_agent(const std::string& name, AgentState a) const;

  nlohmann::ordered_json to_json() const;
  /// Compact dump of to_json(); used for hashing and visited sets.
  std::string canonical() const { return to_json().dump(); }

  friend bool operator==(const SysState& a, const SysState& b);

 private:
  std::shared_ptr<const Signature> sig_;
  std::map<std::pair<std::string, std::string>, std::string> facts_;
  std::set<DYProp> props_;
  KnowledgeSet knowledge_ = analyze(KnowledgeSet{});
  std::map<std::string, ChannelBuffer> channels_;
  std::map<std::string, AgentState> agents_;
};

std::optional<std::string> get_fact(const SysState& s, const std::string& component,
                                    const std::string& property);
SysState set_fact(const SysState& s, const Fact& f);
bool value_less(const SysState& s, const std::string& property, const std::string& a,
                const std::string& b);

}  // namespace cpdy

template <>
struct std::hash<cpdy::SysState> {
  std::size_t operator()(const cpdy::SysState& s) const noexcept
  {
    return std::hash<std::string>{}(s.canonical());
  }
};
