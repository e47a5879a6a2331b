#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cpdy/spec.hpp"

namespace cpdy {

namespace {

struct Token {
  enum class Type { ident, var, number, punct, end };
  Type type = Type::end;
  std::string text;
  int line = 0;
  int col = 0;
};

const std::set<std::string>& reserved()
{
  static const std::set<std::string> words = {
      "component", "property", "channel", "atom",   "dimension", "agent",  "rule",   "attacker",
      "init",      "knows",    "goal",    "always", "actor",     "system", "ordered", "values",
      "network",   "physical", "prop",    "order",  "any",       "send",   "recv",   "when",
      "goto",      "to",       "from",    "succ",   "pred",      "and",    "or",     "not",
      "pair",      "scrypt",   "acrypt",  "inv"};
  return words;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Token::Type::ident;
        t.text = word();
      } else if (c == '?') {
        advance();
        t.type = Token::Type::var;
        t.text = word();
        if (t.text.empty()) fail(t, "expected variable name after '?'");
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.type = Token::Type::number;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          t.text += advance();
      } else {
        t.type = Token::Type::punct;
        std::string_view rest = src_.substr(pos_);
        if (rest.starts_with("->") || rest.starts_with("=>")) {
          t.text = std::string(rest.substr(0, 2));
          advance();
          advance();
        } else if (std::string_view("{}(),:<>=|;").find(c) != std::string_view::npos) {
          t.text = std::string(1, advance());
        } else {
          fail(t, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] static void fail(const Token& at, const std::string& msg)
  {
    throw SpecError({Diagnostic{Diagnostic::Severity::error, Diagnostic::Kind::syntax, at.line,
                                at.col, msg}});
  }

  char advance()
  {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip()
  {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || src_.substr(pos_).starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string word()
  {
    std::string w;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      w += advance();
    return w;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct RuleBody {
  std::vector<std::vector<FactPattern>> groups;
  std::vector<std::string> component_vars;
  std::vector<Guard> guards;
  std::vector<FactEffect> effects;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  SystemSpec run()
  {
    if (peek().type == Token::Type::end) fail(peek(), "empty specification");
    while (peek().type != Token::Type::end) decl();
    resolve_terms();
    if (!dups_.empty()) throw SpecError(dups_);
    return std::move(spec_);
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const
  {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const
  {
    throw SpecError({Diagnostic{Diagnostic::Severity::error, Diagnostic::Kind::syntax, at.line,
                                at.col, msg}});
  }

  bool is_punct(const char* p, std::size_t ahead = 0) const
  {
    const auto& t = peek(ahead);
    return t.type == Token::Type::punct && t.text == p;
  }

  bool is_word(const char* w, std::size_t ahead = 0) const
  {
    const auto& t = peek(ahead);
    return t.type == Token::Type::ident && t.text == w;
  }

  void expect_punct(const char* p)
  {
    if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "', found '" + shown(peek()) + "'");
    next();
  }

  void expect_word(const char* w)
  {
    if (!is_word(w)) fail(peek(), std::string("expected '") + w + "', found '" + shown(peek()) + "'");
    next();
  }

  static std::string shown(const Token& t)
  {
    if (t.type == Token::Type::end) return "end of input";
    if (t.type == Token::Type::var) return "?" + t.text;
    return t.text;
  }

  std::string ident(const char* what)
  {
    const auto& t = peek();
    if (t.type != Token::Type::ident || reserved().count(t.text))
      fail(t, std::string("expected ") + what + ", found '" + shown(t) + "'");
    return next().text;
  }

  Slot slot(const char* what)
  {
    if (peek().type == Token::Type::var) return Slot::var(next().text);
    return Slot::lit(ident(what));
  }

  void declare(std::set<std::string>& seen, const std::string& kind, const std::string& name,
               const Token& at)
  {
    if (!seen.insert(name).second)
      dups_.push_back({Diagnostic::Severity::error, Diagnostic::Kind::duplicate_declaration,
                       at.line, at.col, kind + " '" + name + "' is declared more than once"});
    spec_.lines.emplace(kind + ":" + name, at.line);
  }

  // --- declarations --------------------------------------------------------

  void decl()
  {
    const Token& t = peek();
    if (t.type != Token::Type::ident) fail(t, "expected a declaration, found '" + shown(t) + "'");
    if (t.text == "component") return component_decl();
    if (t.text == "property") return property_decl();
    if (t.text == "channel") return channel_decl();
    if (t.text == "atom") return atom_decl();
    if (t.text == "dimension") return dimension_decl();
    if (t.text == "agent") return agent_decl();
    if (t.text == "rule") return rule_decl();
    if (t.text == "attacker") return attacker_decl();
    if (t.text == "init") return init_decl();
    if (t.text == "knows") return knows_decl();
    if (t.text == "goal") return goal_decl();
    fail(t, "expected a declaration, found '" + t.text + "'");
  }

  void component_decl()
  {
    next();
    do {
      const Token& at = peek();
      std::string name = ident("component name");
      declare(seen_components_, "component", name, at);
      spec_.signature.components.insert(name);
    } while (peek().type == Token::Type::ident && !reserved().count(peek().text) &&
             !is_punct("(", 1));
  }

  void property_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("property name");
    declare(seen_properties_, "property", name, at);
    PropertyDecl d;
    if (is_word("ordered")) {
      next();
      d.ordered = true;
      expect_punct("{");
      d.values.push_back(ident("value"));
      while (is_punct("<")) {
        next();
        d.values.push_back(ident("value"));
      }
      expect_punct("}");
    } else if (is_word("values")) {
      next();
      expect_punct("{");
      while (!is_punct("}")) d.values.push_back(ident("value"));
      expect_punct("}");
    }
    std::set<std::string> uniq(d.values.begin(), d.values.end());
    if (uniq.size() != d.values.size())
      dups_.push_back({Diagnostic::Severity::error, Diagnostic::Kind::duplicate_declaration,
                       at.line, at.col, "property '" + name + "' lists a value twice"});
    spec_.signature.properties[name] = std::move(d);
  }

  void channel_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("channel name");
    declare(seen_channels_, "channel", name, at);
    expect_punct(":");
    if (is_word("network")) {
      spec_.channels[name] = ChannelKind::network;
    } else if (is_word("physical")) {
      spec_.channels[name] = ChannelKind::physical;
    } else {
      fail(peek(), "expected 'network' or 'physical'");
    }
    next();
  }

  void atom_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("atom name");
    declare(seen_atoms_, "atom", name, at);
    expect_punct(":");
    const Token& st = peek();
    std::string sort = next().text;
    try {
      spec_.signature.atoms[name] = sort_from_string(sort);
    } catch (const TermError& e) {
      fail(st, e.what());
    }
  }

  void dimension_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("dimension name");
    declare(seen_dimensions_, "dimension", name, at);
    spec_.dimensions.insert(name);
  }

  void attacker_decl()
  {
    next();
    expect_punct("{");
    while (!is_punct("}")) {
      expect_word("prop");
      std::string dim = ident("dimension");
      expect_punct("=");
      std::string val = ident("value");
      spec_.attacker_props.insert({dim, val});
    }
    expect_punct("}");
  }

  void init_decl()
  {
    next();
    expect_punct("{");
    while (!is_punct("}")) {
      spec_.lines.emplace("init:" + std::to_string(spec_.initial_facts.size()), peek().line);
      spec_.initial_facts.push_back(ground_fact());
    }
    expect_punct("}");
  }

  void knows_decl()
  {
    next();
    expect_punct("{");
    while (!is_punct("}")) {
      knows_.push_back({peek(), term_pattern()});
    }
    expect_punct("}");
  }

  Fact ground_fact()
  {
    Fact f;
    f.component = ident("component");
    expect_punct("(");
    f.property = ident("property");
    expect_punct(",");
    f.value = ident("value");
    expect_punct(")");
    return f;
  }

  void goal_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("goal name");
    declare(seen_goals_, "goal", name, at);
    expect_punct(":");
    expect_word("always");
    spec_.goals.push_back({name, formula()});
  }

  Formula formula()
  {
    Formula lhs = disjunction();
    if (is_punct("=>")) {
      next();
      return Formula::implies(std::move(lhs), formula());
    }
    return lhs;
  }

  Formula disjunction()
  {
    std::vector<Formula> fs{conjunction()};
    while (is_word("or")) {
      next();
      fs.push_back(conjunction());
    }
    return Formula::any(std::move(fs));
  }

  Formula conjunction()
  {
    std::vector<Formula> fs{unary()};
    while (is_word("and")) {
      next();
      fs.push_back(unary());
    }
    return Formula::all(std::move(fs));
  }

  Formula unary()
  {
    if (is_word("not")) {
      next();
      return Formula::neg(unary());
    }
    if (is_punct("(")) {
      next();
      Formula f = formula();
      expect_punct(")");
      return f;
    }
    if (peek().type == Token::Type::var) fail(peek(), "goals must be closed; found variable");
    return Formula::lit(ground_fact());
  }

  // --- rules ---------------------------------------------------------------

  FactPattern fact_pattern()
  {
    FactPattern p;
    p.component = slot("component");
    expect_punct("(");
    p.property = ident("property");
    expect_punct(",");
    p.value = slot("value");
    expect_punct(")");
    return p;
  }

  Guard guard()
  {
    const Token& t = next();
    if (t.text == "prop") {
      expect_punct("(");
      PropGuard g;
      g.dimension = ident("dimension");
      expect_punct(",");
      g.value = ident("value");
      expect_punct(")");
      return Guard{g};
    }
    if (t.text == "knows") {
      expect_punct("(");
      const Token& at = peek();
      KnowledgeGuard g{term_pattern()};
      expect_punct(")");
      guard_terms_.push_back(at);
      return Guard{std::move(g)};
    }
    if (t.text == "order") {
      expect_punct("(");
      OrderGuard g;
      g.property = ident("property");
      expect_punct(",");
      g.lhs = slot("value");
      if (is_punct("<")) {
        g.rel = Relation::less;
      } else if (is_punct(">")) {
        g.rel = Relation::greater;
      } else if (is_punct("=")) {
        g.rel = Relation::equal;
      } else {
        fail(peek(), "expected '<', '>' or '='");
      }
      next();
      g.rhs = slot("value");
      expect_punct(")");
      return Guard{g};
    }
    // any { ... }
    expect_punct("{");
    Disjunction d;
    while (!is_punct("}")) {
      if (!is_guard_start()) fail(peek(), "expected a guard inside 'any'");
      d.alternatives.push_back(guard());
    }
    expect_punct("}");
    if (d.alternatives.empty()) fail(t, "'any' needs at least one guard");
    return Guard{std::move(d)};
  }

  bool is_guard_start() const
  {
    return (is_word("prop") || is_word("knows") || is_word("order")) ? is_punct("(", 1)
                                                                      : is_word("any") && is_punct("{", 1);
  }

  RuleBody rule_body(bool in_agent)
  {
    RuleBody b;
    while (!is_punct("->")) {
      if (peek().type == Token::Type::end || is_punct("}")) fail(peek(), "expected '->' in rule body");
      if (is_word("component") && is_punct("(", 1)) {
        next();
        next();
        if (peek().type != Token::Type::var) fail(peek(), "component(...) binds a variable");
        b.component_vars.push_back(next().text);
        expect_punct(")");
      } else if (is_guard_start()) {
        b.guards.push_back(guard());
      } else {
        std::vector<FactPattern> alts{fact_pattern()};
        while (is_punct("|")) {
          next();
          alts.push_back(fact_pattern());
        }
        b.groups.push_back(std::move(alts));
      }
    }
    next();
    auto at_effect = [&] {
      if (in_agent && (is_word("send") || is_word("recv") || is_word("when") || is_word("goto")))
        return false;
      return peek().type == Token::Type::var ||
             (peek().type == Token::Type::ident && is_punct("(", 1));
    };
    while (at_effect()) b.effects.push_back(effect());
    return b;
  }

  FactEffect effect()
  {
    FactEffect e;
    e.component = slot("component");
    expect_punct("(");
    e.property = ident("property");
    expect_punct(",");
    if (is_word("succ")) {
      next();
      e.kind = EffectValue::succ;
    } else if (is_word("pred")) {
      next();
      e.kind = EffectValue::pred;
    } else if (peek().type == Token::Type::var) {
      e.kind = EffectValue::var;
      e.value = next().text;
    } else {
      e.kind = EffectValue::literal;
      e.value = ident("value");
    }
    expect_punct(")");
    return e;
  }

  void rule_decl()
  {
    next();
    const Token& at = peek();
    std::string name = ident("rule name");
    declare(seen_rules_, "rule", name, at);
    expect_word("actor");
    Actor actor;
    if (is_word("system")) {
      actor = Actor::system;
    } else if (is_word("attacker")) {
      actor = Actor::attacker;
    } else {
      fail(peek(), "expected 'system' or 'attacker'");
    }
    next();
    expect_punct("{");
    RuleBody b = rule_body(false);
    expect_punct("}");
    for (auto& r : expand_rule(name, actor, b.groups, b.component_vars, b.guards, b.effects))
      spec_.rules.push_back(std::move(r));
  }

  // --- agents --------------------------------------------------------------

  void agent_decl()
  {
    next();
    const Token& at = peek();
    Agent a;
    a.name = ident("agent name");
    declare(seen_agents_, "agent", a.name, at);
    expect_punct("{");
    while (!is_punct("}")) {
      const Token& st = peek();
      spec_.lines.emplace(a.name + "#" + std::to_string(a.steps.size()), st.line);
      a.steps.push_back(step(a.name, a.steps.size()));
    }
    expect_punct("}");
    spec_.agents.push_back(std::move(a));
  }

  Step step(const std::string& agent, std::size_t index)
  {
    Step s;
    const Token& t = peek();
    if (is_word("send")) {
      next();
      s.kind = Step::Kind::send;
      s.channel = ident("channel");
      expect_word("to");
      s.peer = Slot::lit(ident("receiver"));
      s.has_peer = true;
      s.term = term_pattern();
    } else if (is_word("recv")) {
      next();
      s.kind = Step::Kind::receive;
      s.channel = ident("channel");
      if (is_word("from")) {
        next();
        s.peer = slot("sender");
        s.has_peer = true;
      }
      s.term = term_pattern();
    } else if (is_word("when")) {
      next();
      s.kind = Step::Kind::update;
      RuleBody b = rule_body(true);
      s.update = expand_rule(agent + "#" + std::to_string(index), Actor::system, b.groups,
                             b.component_vars, b.guards, b.effects);
    } else if (is_word("goto")) {
      next();
      s.kind = Step::Kind::jump;
      if (peek().type != Token::Type::number) fail(peek(), "expected a step index after 'goto'");
      s.target = std::stoul(next().text);
    } else {
      fail(t, "expected 'send', 'recv', 'when' or 'goto', found '" + shown(t) + "'");
    }
    return s;
  }

  // --- terms ---------------------------------------------------------------

  TermPattern term_pattern()
  {
    if (peek().type == Token::Type::var) return TermPattern::var(next().text);
    const Token& t = peek();
    if (t.type != Token::Type::ident) fail(t, "expected a term, found '" + shown(t) + "'");
    std::string id = next().text;
    using K = TermPattern::Kind;
    if (id == "inv") {
      expect_punct("(");
      TermPattern k = term_pattern();
      expect_punct(")");
      return TermPattern::node(K::inv, {std::move(k)});
    }
    if (id == "pair" || id == "scrypt" || id == "acrypt") {
      expect_punct("(");
      TermPattern a = term_pattern();
      expect_punct(",");
      TermPattern b = term_pattern();
      expect_punct(")");
      K k = id == "pair" ? K::pair : id == "scrypt" ? K::scrypt : K::acrypt;
      return TermPattern::node(k, {std::move(a), std::move(b)});
    }
    if (reserved().count(id)) fail(t, "'" + id + "' is a keyword, not a term");
    return TermPattern::atom(id);
  }

  void resolve(TermPattern& p, bool under_inv, const Token& at)
  {
    if (p.kind() == TermPattern::Kind::atom) {
      auto it = spec_.signature.atoms.find(p.name());
      if (it != spec_.signature.atoms.end()) {
        p.set_sort(it->second);
      } else {
        p.set_sort(under_inv ? Sort::pubkey : Sort::payload);
      }
      if (under_inv && p.sort() != Sort::pubkey)
        fail(at, "inv() applies only to public keys; '" + p.name() + "' is " +
                     std::string(to_string(p.sort())));
    }
    bool inv = p.kind() == TermPattern::Kind::inv;
    for (auto& k : p.kids()) resolve(k, inv, at);
  }

  void resolve_terms()
  {
    for (const auto& a : spec_.agents) spec_.signature.atoms.emplace(a.name, Sort::agent);
    Token none;
    for (auto& a : spec_.agents)
      for (auto& s : a.steps)
        if (s.kind == Step::Kind::send || s.kind == Step::Kind::receive) resolve(s.term, false, none);
    for (auto& r : spec_.rules)
      for (auto& g : r.guards) resolve_guard(g);
    for (auto& a : spec_.agents)
      for (auto& s : a.steps)
        for (auto& r : s.update)
          for (auto& g : r.guards) resolve_guard(g);
    for (auto& [at, p] : knows_) {
      resolve(p, false, at);
      std::set<std::string> vars;
      p.collect_vars(vars);
      if (!vars.empty()) fail(at, "initial knowledge must be ground; found ?" + *vars.begin());
      spec_.initial_knowledge.insert(p.instantiate({}));
    }
  }

  void resolve_guard(Guard& g)
  {
    Token none;
    if (auto* k = std::get_if<KnowledgeGuard>(&g.g)) resolve(k->term, false, none);
    if (auto* d = std::get_if<Disjunction>(&g.g))
      for (auto& a : d->alternatives) resolve_guard(a);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SystemSpec spec_;
  std::vector<Diagnostic> dups_;
  std::vector<std::pair<Token, TermPattern>> knows_;
  std::vector<Token> guard_terms_;
  std::set<std::string> seen_components_, seen_properties_, seen_channels_, seen_atoms_,
      seen_dimensions_, seen_agents_, seen_rules_, seen_goals_;
};

}  // namespace

SystemSpec parse_unchecked(std::string_view source) { return Parser(source).run(); }

SystemSpec parse_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace cpdy
