#include "cpdy/term.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace cpdy {

std::string_view to_string(Sort s)
{
  switch (s) {
    case Sort::agent: return "agent";
    case Sort::nonce: return "nonce";
    case Sort::payload: return "payload";
    case Sort::pubkey: return "pubkey";
    case Sort::symkey: return "symkey";
  }
  return "payload";
}

std::string_view to_string(TermKind k)
{
  switch (k) {
    case TermKind::atom: return "atom";
    case TermKind::pair: return "pair";
    case TermKind::scrypt: return "scrypt";
    case TermKind::acrypt: return "acrypt";
    case TermKind::inv: return "inv";
  }
  return "atom";
}

Sort sort_from_string(std::string_view s)
{
  if (s == "agent") return Sort::agent;
  if (s == "nonce") return Sort::nonce;
  if (s == "payload") return Sort::payload;
  if (s == "pubkey") return Sort::pubkey;
  if (s == "symkey") return Sort::symkey;
  throw TermError("unknown sort '" + std::string(s) + "'");
}

namespace {

char sort_code(Sort s) { return static_cast<char>('0' + static_cast<int>(s)); }

std::size_t mix(std::size_t h, std::size_t v)
{
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term Term::atom(std::string name, Sort sort)
{
  if (!is_identifier(name) || is_term_keyword(name))
    throw TermError("invalid atom name '" + name + "'");
  auto n = std::make_shared<Node>();
  n->kind = TermKind::atom;
  n->sort = sort;
  n->name = std::move(name);
  n->depth = 0;
  n->text = n->name;
  n->key = n->text;
  n->key += '\x1f';
  n->key += sort_code(sort);
  n->hash = mix(std::hash<std::string>{}(n->text), static_cast<std::size_t>(sort));
  return Term(std::move(n));
}

Term Term::make(TermKind kind, const Term* l, const Term* r)
{
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->sort = Sort::payload;
  n->l = std::make_unique<Term>(*l);
  if (r) n->r = std::make_unique<Term>(*r);
  n->depth = 1 + std::max(l->depth(), r ? r->depth() : 0);
  n->text = std::string(to_string(kind)) + "(" + l->text();
  if (r) n->text += "," + r->text();
  n->text += ")";
  // sort codes follow the text so that equal texts with different atom sorts differ
  std::string sorts = l->node_->key.substr(l->node_->key.find('\x1f') + 1);
  if (r) sorts += r->node_->key.substr(r->node_->key.find('\x1f') + 1);
  n->key = n->text + '\x1f' + sorts;
  n->hash = mix(mix(static_cast<std::size_t>(kind) + 1, l->hash()), r ? r->hash() : 0);
  return Term(std::move(n));
}

Term Term::pair(const Term& left, const Term& right) { return make(TermKind::pair, &left, &right); }

Term Term::scrypt(const Term& payload, const Term& key)
{
  return make(TermKind::scrypt, &payload, &key);
}

Term Term::acrypt(const Term& payload, const Term& key)
{
  return make(TermKind::acrypt, &payload, &key);
}

Term Term::inv(const Term& key)
{
  if (key.kind() == TermKind::inv) return key.left();
  if (key.kind() != TermKind::atom || key.sort() != Sort::pubkey)
    throw TermError("inv() applies only to public-key atoms, got '" + key.text() + "'");
  return make(TermKind::inv, &key, nullptr);
}

const Term& Term::left() const
{
  if (!node_->l) throw TermError("atom '" + name() + "' has no subterms");
  return *node_->l;
}

const Term& Term::right() const
{
  if (!node_->r) throw TermError("'" + text() + "' has no second subterm");
  return *node_->r;
}

bool operator==(const Term& a, const Term& b)
{
  return a.node_ == b.node_ || (a.hash() == b.hash() && a.node_->key == b.node_->key);
}

std::strong_ordering operator<=>(const Term& a, const Term& b)
{
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  int c = a.node_->key.compare(b.node_->key);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::optional<Term> inverse_key(const Term& key)
{
  if (key.kind() == TermKind::inv) return key.left();
  if (key.kind() == TermKind::atom && key.sort() == Sort::pubkey) return Term::inv(key);
  return std::nullopt;
}

Sort default_sort(std::string_view, bool under_inv) { return under_inv ? Sort::pubkey : Sort::payload; }

bool is_identifier(std::string_view s)
{
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool is_term_keyword(std::string_view s)
{
  return s == "pair" || s == "scrypt" || s == "acrypt" || s == "inv";
}

namespace {

class TermParser {
 public:
  TermParser(std::string_view src, const SortResolver& resolve) : src_(src), resolve_(resolve) {}

  Term parse()
  {
    Term t = term(false);
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const
  {
    throw TermError("term syntax error at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws()
  {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void expect(char c)
  {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident()
  {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string id(src_.substr(start, pos_ - start));
    if (!is_identifier(id)) {
      pos_ = start;
      fail("expected identifier");
    }
    return id;
  }

  Term term(bool under_inv)
  {
    std::string id = ident();
    if (!is_term_keyword(id)) return Term::atom(id, resolve_(id, under_inv));
    expect('(');
    if (id == "inv") {
      Term k = term(true);
      expect(')');
      return Term::inv(k);
    }
    Term a = term(false);
    expect(',');
    Term b = term(false);
    expect(')');
    if (id == "pair") return Term::pair(a, b);
    if (id == "scrypt") return Term::scrypt(a, b);
    return Term::acrypt(a, b);
  }

  std::string_view src_;
  const SortResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text, const SortResolver& resolve)
{
  return TermParser(text, resolve).parse();
}

}  // namespace cpdy
