#include "cpdy/pattern.hpp"

#include <algorithm>

namespace cpdy {

TermPattern TermPattern::var(std::string name)
{
  TermPattern p;
  p.kind_ = Kind::var;
  p.name_ = std::move(name);
  return p;
}

TermPattern TermPattern::atom(std::string name, Sort sort)
{
  TermPattern p;
  p.kind_ = Kind::atom;
  p.name_ = std::move(name);
  p.sort_ = sort;
  return p;
}

TermPattern TermPattern::lit(const Term& t)
{
  switch (t.kind()) {
    case TermKind::atom: return atom(t.name(), t.sort());
    case TermKind::pair: return node(Kind::pair, {lit(t.left()), lit(t.right())});
    case TermKind::scrypt: return node(Kind::scrypt, {lit(t.left()), lit(t.right())});
    case TermKind::acrypt: return node(Kind::acrypt, {lit(t.left()), lit(t.right())});
    case TermKind::inv: return node(Kind::inv, {lit(t.left())});
  }
  return atom(t.name());
}

TermPattern TermPattern::node(Kind k, std::vector<TermPattern> kids)
{
  TermPattern p;
  p.kind_ = k;
  p.kids_ = std::move(kids);
  return p;
}

Term TermPattern::instantiate(const TermEnv& env) const
{
  switch (kind_) {
    case Kind::var: {
      auto it = env.find(name_);
      if (it == env.end()) throw TermError("unbound variable ?" + name_);
      return it->second;
    }
    case Kind::atom: return Term::atom(name_, sort_);
    case Kind::pair: return Term::pair(kids_[0].instantiate(env), kids_[1].instantiate(env));
    case Kind::scrypt: return Term::scrypt(kids_[0].instantiate(env), kids_[1].instantiate(env));
    case Kind::acrypt: return Term::acrypt(kids_[0].instantiate(env), kids_[1].instantiate(env));
    case Kind::inv: return Term::inv(kids_[0].instantiate(env));
  }
  throw TermError("bad pattern");
}

bool TermPattern::match(const Term& t, TermEnv& env) const
{
  TermEnv trial = env;
  if (!match_into(t, trial)) return false;
  env = std::move(trial);
  return true;
}

bool TermPattern::match_into(const Term& t, TermEnv& env) const
{
  switch (kind_) {
    case Kind::var: {
      auto [it, fresh] = env.emplace(name_, t);
      return fresh || it->second == t;
    }
    case Kind::atom: return t.is_atom() && t.name() == name_ && t.sort() == sort_;
    case Kind::pair:
      return t.kind() == TermKind::pair && kids_[0].match_into(t.left(), env) &&
             kids_[1].match_into(t.right(), env);
    case Kind::scrypt:
      return t.kind() == TermKind::scrypt && kids_[0].match_into(t.left(), env) &&
             kids_[1].match_into(t.right(), env);
    case Kind::acrypt:
      return t.kind() == TermKind::acrypt && kids_[0].match_into(t.left(), env) &&
             kids_[1].match_into(t.right(), env);
    case Kind::inv: return t.kind() == TermKind::inv && kids_[0].match_into(t.left(), env);
  }
  return false;
}

void TermPattern::collect_vars(std::set<std::string>& out) const
{
  if (kind_ == Kind::var) out.insert(name_);
  for (const auto& k : kids_) k.collect_vars(out);
}

void TermPattern::collect_atoms(std::set<std::string>& out) const
{
  if (kind_ == Kind::atom) out.insert(name_);
  for (const auto& k : kids_) k.collect_atoms(out);
}

std::size_t TermPattern::depth() const
{
  std::size_t d = 0;
  for (const auto& k : kids_) d = std::max(d, k.depth() + 1);
  return d;
}

std::string TermPattern::text() const
{
  switch (kind_) {
    case Kind::var: return "?" + name_;
    case Kind::atom: return name_;
    case Kind::pair: return "pair(" + kids_[0].text() + "," + kids_[1].text() + ")";
    case Kind::scrypt: return "scrypt(" + kids_[0].text() + "," + kids_[1].text() + ")";
    case Kind::acrypt: return "acrypt(" + kids_[0].text() + "," + kids_[1].text() + ")";
    case Kind::inv: return "inv(" + kids_[0].text() + ")";
  }
  return name_;
}

}  // namespace cpdy
