#include "doctest.h"

#include "cpdy/term.hpp"
#include "oracles.hpp"

using namespace cpdy;

TEST_CASE("constructors and canonical text")
{
  Term m = Term::atom("m");
  Term k = Term::atom("k", Sort::symkey);
  Term pk = Term::atom("pk", Sort::pubkey);
  CHECK(Term::pair(m, k).text() == "pair(m,k)");
  CHECK(Term::scrypt(m, k).text() == "scrypt(m,k)");
  CHECK(Term::acrypt(m, Term::inv(pk)).text() == "acrypt(m,inv(pk))");
  CHECK(Term::pair(m, Term::pair(m, k)).depth() == 2);
  CHECK(m.depth() == 0);
  CHECK(Term::inv(pk).depth() == 1);
}

TEST_CASE("inv is an involution on public keys only")
{
  Term pk = Term::atom("pk", Sort::pubkey);
  CHECK(Term::inv(Term::inv(pk)) == pk);
  CHECK(Term::inv(pk) != pk);
  CHECK_THROWS_AS(Term::inv(Term::atom("k", Sort::symkey)), TermError);
  CHECK_THROWS_AS(Term::inv(Term::pair(pk, pk)), TermError);
  CHECK(inverse_key(pk) == Term::inv(pk));
  CHECK(inverse_key(Term::inv(pk)) == pk);
  CHECK_FALSE(inverse_key(Term::atom("k", Sort::symkey)).has_value());
}

TEST_CASE("atoms are identified by name and sort")
{
  CHECK(Term::atom("x", Sort::nonce) != Term::atom("x", Sort::payload));
  CHECK(Term::atom("x", Sort::nonce) == Term::atom("x", Sort::nonce));
  CHECK_THROWS_AS(Term::atom("pair"), TermError);
  CHECK_THROWS_AS(Term::atom("1x"), TermError);
}

TEST_CASE("structural equality, ordering and hashing agree")
{
  oracle::TermSampler gen(7);
  for (int i = 0; i < 2000; ++i) {
    Term a = gen.term(3);
    Term b = gen.term(3);
    CHECK((a == b) == (a.text() == b.text() && (a <=> b) == 0));
    if (a == b) CHECK(std::hash<Term>{}(a) == std::hash<Term>{}(b));
    CHECK(((a <=> b) < 0) == ((b <=> a) > 0));
  }
}

TEST_CASE("parse and print round-trip on canonical forms")
{
  oracle::TermSampler gen(11);
  for (int i = 0; i < 2000; ++i) {
    Term t = gen.term(3);
    auto resolver = [&](std::string_view name, bool) {
      for (const auto& a : gen.atoms)
        if (a.name() == name) return a.sort();
      return Sort::payload;
    };
    Term back = parse_term(t.text(), resolver);
    CHECK(back == t);
    CHECK(back.text() == t.text());
  }
  CHECK(parse_term(" pair( a , scrypt(b,k) ) ").text() == "pair(a,scrypt(b,k))");
  CHECK(parse_term("inv(inv(pk))") == Term::atom("pk", Sort::pubkey));
}

TEST_CASE("parse errors")
{
  CHECK_THROWS_AS(parse_term(""), TermError);
  CHECK_THROWS_AS(parse_term("pair(a)"), TermError);
  CHECK_THROWS_AS(parse_term("pair(a,b"), TermError);
  CHECK_THROWS_AS(parse_term("a b"), TermError);
  CHECK_THROWS_AS(parse_term("inv(pair(a,b))"), TermError);
}
