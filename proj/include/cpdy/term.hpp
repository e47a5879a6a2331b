#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpdy {

enum class Sort : unsigned char { agent, nonce, payload, pubkey, symkey };

enum class TermKind : unsigned char { atom, pair, scrypt, acrypt, inv };

std::string_view to_string(Sort s);
std::string_view to_string(TermKind k);
Sort sort_from_string(std::string_view s);

class TermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable message term. Copies share structure.
///
/// Identity is structural: two terms compare equal iff their trees are equal,
/// atoms being identified by (name, sort). `inv(inv(k))` collapses to `k` at
/// construction and `inv` only accepts public-key atoms.
class Term {
 public:
  static Term atom(std::string name, Sort sort = Sort::payload);
  static Term pair(const Term& left, const Term& right);
  static Term scrypt(const Term& payload, const Term& key);
  static Term acrypt(const Term& payload, const Term& key);
  static Term inv(const Term& key);

  TermKind kind() const;
  bool is_atom() const { return kind() == TermKind::atom; }
  /// Atom name; empty for compound terms.
  const std::string& name() const;
  /// Sort of an atom; compound terms report payload.
  Sort sort() const;

  /// First child: pair left, encryption payload, or the key under inv.
  const Term& left() const;
  /// Second child: pair right or encryption key.
  const Term& right() const;

  std::size_t depth() const;
  /// Canonical text: `a`, `pair(t1,t2)`, `scrypt(t1,t2)`, `acrypt(t1,t2)`, `inv(t)`.
  const std::string& text() const;
  std::size_t hash() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(TermKind kind, const Term* l, const Term* r);

  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  TermKind kind;
  Sort sort;
  std::string name;
  std::unique_ptr<Term> l;
  std::unique_ptr<Term> r;
  std::size_t depth;
  std::string text;
  // text plus the atom sorts in preorder; total order key
  std::string key;
  std::size_t hash;
};

inline TermKind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline Sort Term::sort() const { return node_->sort; }
inline std::size_t Term::depth() const { return node_->depth; }
inline const std::string& Term::text() const { return node_->text; }
inline std::size_t Term::hash() const { return node_->hash; }

/// Inverse key for asymmetric decryption: inv(pk) for a pubkey atom, k for
/// inv(k); nullopt when the term has no inverse.
std::optional<Term> inverse_key(const Term& key);

/// Resolves atom names to sorts while parsing. `under_inv` is true for an
/// atom that appears directly inside `inv(...)`.
using SortResolver = std::function<Sort(std::string_view name, bool under_inv)>;

/// Default resolver: pubkey under inv, payload otherwise.
Sort default_sort(std::string_view name, bool under_inv);

/// Parses canonical term syntax. Throws TermError with a column on bad input.
Term parse_term(std::string_view text, const SortResolver& resolve = default_sort);

bool is_identifier(std::string_view s);
bool is_term_keyword(std::string_view s);

}  // namespace cpdy

template <>
struct std::hash<cpdy::Term> {
  std::size_t operator()(const cpdy::Term& t) const noexcept { return t.hash(); }
};
