#include "doctest.h"

#include "cpdy/knowledge.hpp"
#include "oracles.hpp"

using namespace cpdy;

namespace {

const Term m = Term::atom("m");
const Term s = Term::atom("s");
const Term k = Term::atom("k", Sort::symkey);
const Term pk = Term::atom("pk", Sort::pubkey);

}  // namespace

TEST_CASE("analyze: symmetric decryption with a known key")
{
  KnowledgeSet r = analyze({Term::scrypt(m, k), k});
  CHECK(r.contains(m));
  CHECK(r.size() == 3);
  CHECK(r.saturated());
}

TEST_CASE("analyze: empty set is its own fixpoint")
{
  KnowledgeSet r = analyze({});
  CHECK(r.empty());
  CHECK(r.saturated());
}

TEST_CASE("analyze: perfect cryptography without the private key")
{
  KnowledgeSet r = analyze({Term::acrypt(m, pk)});
  CHECK(r == KnowledgeSet{Term::acrypt(m, pk)});
  CHECK(analyze({Term::acrypt(m, pk), Term::inv(pk)}).contains(m));
  CHECK(analyze({Term::acrypt(m, Term::inv(pk)), pk}).contains(m));
}

TEST_CASE("analyze: composed decryption keys")
{
  // key is a pair whose parts arrive separately and late
  Term a = Term::atom("a");
  Term b = Term::atom("b");
  KnowledgeSet r = analyze({Term::scrypt(m, Term::pair(a, b)), Term::scrypt(b, a), a});
  CHECK(r.contains(b));
  CHECK(r.contains(m));
}

TEST_CASE("derivable")
{
  Term m1 = Term::atom("m1"), m2 = Term::atom("m2");
  CHECK(derivable({m1, m2}, Term::pair(m1, m2)));
  CHECK(derivable({Term::pair(m1, m2)}, Term::pair(m1, m2)));
  CHECK_FALSE(derivable({Term::acrypt(m, pk), pk}, m));
  CHECK(oracle::derivable({Term::acrypt(m, pk), pk}, m) == false);
  CHECK_FALSE(derivable({m1}, m2));
  CHECK_FALSE(derivable({pk}, Term::inv(pk)));
}

TEST_CASE("learn")
{
  CHECK(learn({k}, Term::scrypt(s, k)).contains(s));
  CHECK(learn({}, m) == KnowledgeSet{m});
  KnowledgeSet sat = analyze({Term::pair(m, s)});
  CHECK(learn(sat, m) == sat);
}

TEST_CASE("closure laws on random sets")
{
  oracle::TermSampler gen(3);
  for (int i = 0; i < 1500; ++i) {
    KnowledgeSet a(gen.knowledge(4, 3));
    KnowledgeSet extra(gen.knowledge(2, 3));
    std::set<Term> bigger = a.terms();
    bigger.insert(extra.terms().begin(), extra.terms().end());
    KnowledgeSet ra = analyze(a);
    CHECK(a.subset_of(ra));
    CHECK(analyze(ra) == ra);
    CHECK(ra.subset_of(analyze(KnowledgeSet(bigger))));
    Term t = gen.target(a.terms(), 3);
    CHECK(derivable(a, t) == derivable(ra, t));
  }
}

TEST_CASE("perfect cryptography: unknown keys keep secrets")
{
  oracle::TermSampler gen(5);
  int exercised = 0;
  for (int i = 0; i < 1500; ++i) {
    KnowledgeSet kn(gen.knowledge(3, 3));
    Term key = gen.key();
    Term secret = gen.term(2);
    if (kn.contains(key) || derivable(kn, key) || derivable(kn, secret)) continue;
    ++exercised;
    CHECK_FALSE(derivable(learn(kn, Term::scrypt(secret, key)), secret));
  }
  CHECK(exercised > 100);
}

TEST_CASE("agreement with the derivation-tree oracle")
{
  oracle::TermSampler gen(42);
  int positives = 0;
  for (int i = 0; i < 5000; ++i) {
    auto kn = gen.knowledge(4, 3);
    Term t = gen.target(kn, 3);
    bool want = oracle::derivable(kn, t);
    positives += want;
    INFO("k size " << kn.size() << ", t = " << t.text());
    CHECK(derivable(KnowledgeSet(kn), t) == want);
  }
  CHECK(positives > 500);
}
