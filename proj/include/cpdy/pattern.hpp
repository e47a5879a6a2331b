#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cpdy/term.hpp"

namespace cpdy {

using TermEnv = std::map<std::string, Term>;

/// A term with `?x` holes. Used for receive patterns, send templates and
/// knowledge guards.
class TermPattern {
 public:
  enum class Kind { var, atom, pair, scrypt, acrypt, inv };

  static TermPattern var(std::string name);
  static TermPattern atom(std::string name, Sort sort = Sort::payload);
  static TermPattern lit(const Term& t);
  static TermPattern node(Kind k, std::vector<TermPattern> kids);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  Sort sort() const { return sort_; }
  void set_sort(Sort s) { sort_ = s; }
  const std::vector<TermPattern>& kids() const { return kids_; }
  std::vector<TermPattern>& kids() { return kids_; }

  /// Throws TermError on an unbound variable.
  Term instantiate(const TermEnv& env) const;
  /// Extends `env` on success; leaves it untouched on failure.
  bool match(const Term& t, TermEnv& env) const;

  void collect_vars(std::set<std::string>& out) const;
  void collect_atoms(std::set<std::string>& out) const;
  std::size_t depth() const;
  std::string text() const;

  friend bool operator==(const TermPattern&, const TermPattern&) = default;

 private:
  bool match_into(const Term& t, TermEnv& env) const;

  Kind kind_ = Kind::atom;
  std::string name_;
  Sort sort_ = Sort::payload;
  std::vector<TermPattern> kids_;
};

}  // namespace cpdy
