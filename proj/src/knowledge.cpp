#include "cpdy/knowledge.hpp"

#include <algorithm>
#include <deque>

namespace cpdy {

bool KnowledgeSet::subset_of(const KnowledgeSet& other) const
{
  return std::includes(other.terms_.begin(), other.terms_.end(), terms_.begin(), terms_.end());
}

bool composable(const std::set<Term>& analyzed, const Term& t)
{
  if (analyzed.count(t)) return true;
  switch (t.kind()) {
    case TermKind::pair:
    case TermKind::scrypt:
    case TermKind::acrypt:
      return composable(analyzed, t.left()) && composable(analyzed, t.right());
    case TermKind::atom:
    case TermKind::inv:
      return false;
  }
  return false;
}

namespace {

// What a term yields under one analysis step, given the current set.
// Returns false when the step is blocked on a key that is not yet derivable.
bool decompose(const std::set<Term>& known, const Term& t, std::vector<Term>& out)
{
  switch (t.kind()) {
    case TermKind::pair:
      out.push_back(t.left());
      out.push_back(t.right());
      return true;
    case TermKind::scrypt:
      if (!composable(known, t.right())) return false;
      out.push_back(t.left());
      return true;
    case TermKind::acrypt: {
      auto dec = inverse_key(t.right());
      if (!dec || !composable(known, *dec)) return false;
      out.push_back(t.left());
      return true;
    }
    case TermKind::atom:
    case TermKind::inv:
      return true;
  }
  return true;
}

}  // namespace

KnowledgeSet analyze(const KnowledgeSet& k)
{
  if (k.saturated()) return k;

  std::set<Term> known = k.terms();
  std::deque<Term> work(known.begin(), known.end());
  // encryptions whose key was not derivable when last examined
  std::vector<Term> blocked;

  bool progress = true;
  while (progress) {
    progress = false;
    while (!work.empty()) {
      Term t = work.front();
      work.pop_front();
      std::vector<Term> parts;
      if (!decompose(known, t, parts)) {
        blocked.push_back(t);
        continue;
      }
      for (auto& p : parts) {
        if (known.insert(p).second) {
          work.push_back(p);
          progress = true;
        }
      }
    }
    // new terms may unlock blocked keys; retry them once per round
    if (progress && !blocked.empty()) {
      for (auto& b : blocked) work.push_back(b);
      blocked.clear();
    }
  }

  KnowledgeSet out(std::move(known));
  out.saturated_ = true;
  return out;
}

bool derivable(const KnowledgeSet& k, const Term& t)
{
  if (k.saturated()) return composable(k.terms(), t);
  return composable(analyze(k).terms(), t);
}

KnowledgeSet learn(const KnowledgeSet& k, const Term& t)
{
  if (k.saturated() && k.contains(t)) return k;
  std::set<Term> terms = k.terms();
  terms.insert(t);
  return analyze(KnowledgeSet(std::move(terms)));
}

}  // namespace cpdy
