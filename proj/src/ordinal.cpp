#include "schreier/ordinal.hpp"

#include <cctype>
#include <functional>
#include <limits>

#include "schreier/error.hpp"

namespace schreier {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw OverflowError("ordinal coefficient overflow in addition");
  }
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw OverflowError("ordinal coefficient overflow in multiplication");
  }
  return r;
}

// Recursive-descent parser for
//   ord  := "0" | sum
//   sum  := term ("+" term)*
//   term := base ("*" nat)*
//   base := nat | "w" | "w^" atom
//   atom := nat | "w" | "(" ord ")"
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Ordinal parse() {
    Ordinal result = parse_ord();
    skip_ws();
    if (pos_ != text_.size()) {
      fail("unexpected trailing input");
    }
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("ordinal syntax error at position " + std::to_string(pos_) + " in \"" +
                     std::string(text_) + "\": " + what +
                     " (grammar: ord := 0 | term(+term)*, term := nat | w | w^atom | term*nat, "
                     "atom := nat | w | (ord))");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_digit() {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::uint64_t parse_nat() {
    if (!at_digit()) {
      fail("expected a natural number");
    }
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = checked_add(checked_mul(value, 10), static_cast<std::uint64_t>(text_[pos_] - '0'));
      ++pos_;
    }
    return value;
  }

  Ordinal parse_ord() {
    std::vector<OrdinalTerm> terms;
    terms.push_back(parse_term());
    const bool bare_zero = last_bare_zero_;
    while (accept('+')) {
      terms.push_back(parse_term());
    }
    if (terms.size() == 1 && bare_zero) {
      return Ordinal{};  // the literal 0
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coefficient == 0) {
        fail("zero coefficient inside a sum");
      }
      if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent)) {
        fail("exponents must strictly descend (non-canonical form)");
      }
    }
    return Ordinal::from_terms(std::move(terms));
  }

  OrdinalTerm parse_term() {
    OrdinalTerm term;
    last_bare_zero_ = false;
    if (at_digit()) {
      term.exponent = Ordinal{};
      term.coefficient = parse_nat();
      last_bare_zero_ = term.coefficient == 0 && !peek('*');
    } else if (accept('w')) {
      if (accept('^')) {
        term.exponent = parse_atom();
      } else {
        term.exponent = Ordinal::nat(1);
      }
      term.coefficient = 1;
    } else {
      fail("expected a natural number or 'w'");
    }
    while (accept('*')) {
      term.coefficient = checked_mul(term.coefficient, parse_nat());
    }
    return term;
  }

  Ordinal parse_atom() {
    if (at_digit()) {
      return Ordinal::nat(parse_nat());
    }
    if (accept('w')) {
      return Ordinal::omega();
    }
    if (accept('(')) {
      Ordinal inner = parse_ord();
      if (!accept(')')) {
        fail("expected ')'");
      }
      return inner;
    }
    fail("expected an exponent atom: nat, w or (ord)");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool last_bare_zero_ = false;
};

std::string format_atom(const Ordinal& e) {
  if (e.is_finite()) {
    return std::to_string(e.finite_value());
  }
  if (e == Ordinal::omega()) {
    return "w";
  }
  return "(" + format_ordinal(e) + ")";
}

}  // namespace

Ordinal Ordinal::nat(std::uint64_t n) {
  Ordinal r;
  if (n > 0) {
    r.terms_.push_back(OrdinalTerm{Ordinal{}, n});
  }
  return r;
}

Ordinal Ordinal::omega() {
  Ordinal r;
  r.terms_.push_back(OrdinalTerm{Ordinal::nat(1), 1});
  return r;
}

Ordinal Ordinal::from_terms(std::vector<OrdinalTerm> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0) {
      throw PreconditionError("ordinal term with zero coefficient");
    }
    if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent)) {
      throw PreconditionError("ordinal exponents must strictly descend");
    }
  }
  Ordinal r;
  r.terms_ = std::move(terms);
  return r;
}

bool Ordinal::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

bool Ordinal::is_successor() const { return !terms_.empty() && terms_.back().exponent.is_zero(); }

bool Ordinal::is_limit() const { return !terms_.empty() && !terms_.back().exponent.is_zero(); }

std::uint64_t Ordinal::finite_value() const {
  if (!is_finite()) {
    throw PreconditionError("ordinal " + to_string() + " is not finite");
  }
  return terms_.empty() ? 0 : terms_[0].coefficient;
}

std::string Ordinal::to_string() const { return format_ordinal(*this); }

bool operator==(const Ordinal& a, const Ordinal& b) { return a.terms_ == b.terms_; }

std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a.terms_[i];
    const auto& y = b.terms_[i];
    if (auto c = x.exponent <=> y.exponent; c != 0) {
      return c;
    }
    if (auto c = x.coefficient <=> y.coefficient; c != 0) {
      return c;
    }
  }
  return a.terms_.size() <=> b.terms_.size();
}

Ordinal parse_ordinal(std::string_view text) { return Parser(text).parse(); }

std::string format_ordinal(const Ordinal& a) {
  if (a.is_zero()) {
    return "0";
  }
  std::string out;
  for (const auto& t : a.terms()) {
    if (!out.empty()) {
      out += "+";
    }
    if (t.exponent.is_zero()) {
      out += std::to_string(t.coefficient);
      continue;
    }
    if (t.exponent == Ordinal::nat(1)) {
      out += "w";
    } else {
      out += "w^" + format_atom(t.exponent);
    }
    if (t.coefficient > 1) {
      out += "*" + std::to_string(t.coefficient);
    }
  }
  return out;
}

std::strong_ordering compare(const Ordinal& a, const Ordinal& b) { return a <=> b; }

Classification classify(const Ordinal& a) {
  if (a.is_zero()) {
    return {OrdinalKind::zero, Ordinal{}};
  }
  if (!a.is_successor()) {
    return {OrdinalKind::limit, Ordinal{}};
  }
  std::vector<OrdinalTerm> terms = a.terms();
  if (--terms.back().coefficient == 0) {
    terms.pop_back();
  }
  return {OrdinalKind::successor, Ordinal::from_terms(std::move(terms))};
}

Ordinal fundamental(const Ordinal& a, std::uint64_t n) {
  if (!a.is_limit()) {
    throw PreconditionError("fundamental sequence requested for non-limit ordinal " +
                            a.to_string());
  }
  if (n == 0) {
    throw PreconditionError("fundamental sequence index must be >= 1");
  }
  std::vector<OrdinalTerm> terms = a.terms();
  const OrdinalTerm last = terms.back();
  if (--terms.back().coefficient == 0) {
    terms.pop_back();
  }
  const Classification ce = classify(last.exponent);
  if (ce.kind == OrdinalKind::successor) {
    // w^(b+1)[n] = w^b * n
    terms.push_back(OrdinalTerm{ce.predecessor, n});
  } else {
    // w^l[n] = w^(l[n])
    terms.push_back(OrdinalTerm{fundamental(last.exponent, n), 1});
  }
  return Ordinal::from_terms(std::move(terms));
}

Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) {
    return a;
  }
  const Ordinal& lead = b.terms().front().exponent;
  std::vector<OrdinalTerm> terms;
  for (const auto& t : a.terms()) {
    if (t.exponent > lead) {
      terms.push_back(t);
    } else if (t.exponent == lead) {
      OrdinalTerm merged{lead, checked_add(t.coefficient, b.terms().front().coefficient)};
      terms.push_back(std::move(merged));
      terms.insert(terms.end(), b.terms().begin() + 1, b.terms().end());
      return Ordinal::from_terms(std::move(terms));
    } else {
      break;
    }
  }
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return Ordinal::from_terms(std::move(terms));
}

Ordinal omega_power(const Ordinal& a) { return Ordinal::from_terms({OrdinalTerm{a, 1}}); }

Ordinal nat_mul(const Ordinal& a, std::uint64_t k) {
  if (k == 0 || a.is_zero()) {
    return Ordinal{};
  }
  std::vector<OrdinalTerm> terms = a.terms();
  terms.front().coefficient = checked_mul(terms.front().coefficient, k);
  return Ordinal::from_terms(std::move(terms));
}

Ordinal successor(const Ordinal& a) { return add(a, Ordinal::nat(1)); }

std::uint64_t coefficient_at(const Ordinal& a, const Ordinal& e) {
  for (const auto& t : a.terms()) {
    if (t.exponent == e) {
      return t.coefficient;
    }
  }
  return 0;
}

Ordinal terms_above(const Ordinal& a, const Ordinal& e) {
  std::vector<OrdinalTerm> terms;
  for (const auto& t : a.terms()) {
    if (t.exponent > e) {
      terms.push_back(t);
    }
  }
  return Ordinal::from_terms(std::move(terms));
}

std::size_t OrdinalHash::operator()(const Ordinal& a) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& t : a.terms()) {
    h ^= (*this)(t.exponent) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::uint64_t>{}(t.coefficient) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace schreier
