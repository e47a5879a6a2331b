#pragma once

#include <cstddef>
#include <initializer_list>
#include <set>
#include <vector>

#include "cpdy/term.hpp"

namespace cpdy {

/// The intruder's knowledge: a finite set of terms, optionally saturated
/// under the decomposition rules.
class KnowledgeSet {
 public:
  KnowledgeSet() = default;
  KnowledgeSet(std::initializer_list<Term> terms) : terms_(terms) {}
  explicit KnowledgeSet(std::set<Term> terms) : terms_(std::move(terms)) {}

  const std::set<Term>& terms() const { return terms_; }
  bool contains(const Term& t) const { return terms_.count(t) != 0; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  bool saturated() const { return saturated_; }

  /// Subset on the underlying term sets; the saturation flag is ignored.
  bool subset_of(const KnowledgeSet& other) const;

  friend bool operator==(const KnowledgeSet& a, const KnowledgeSet& b)
  {
    return a.terms_ == b.terms_;
  }

 private:
  friend KnowledgeSet analyze(const KnowledgeSet& k);

  std::set<Term> terms_;
  bool saturated_ = false;
};

/// Least superset of `k` closed under pair projection and decryption with
/// derivable keys. Key derivability allows composition, so analysis and
/// composition are interleaved until nothing new is learned.
KnowledgeSet analyze(const KnowledgeSet& k);

/// G-closure membership of `t` over the analyzed knowledge.
bool derivable(const KnowledgeSet& k, const Term& t);

/// analyze(k ∪ {t}).
KnowledgeSet learn(const KnowledgeSet& k, const Term& t);

/// Composition-only check against a set that is already analyzed.
bool composable(const std::set<Term>& analyzed, const Term& t);

}  // namespace cpdy
