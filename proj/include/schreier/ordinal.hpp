#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace schreier {

struct OrdinalTerm;

// An ordinal below epsilon_0 in Cantor normal form:
//   w^e1 * c1 + w^e2 * c2 + ... + w^ek * ck,  e1 > e2 > ... > ek,  ci >= 1.
// The empty term list is 0. Values are immutable once built; every
// constructor path canonicalizes, so equal ordinals have equal term lists.
class Ordinal {
 public:
  Ordinal() = default;

  static Ordinal nat(std::uint64_t n);
  static Ordinal omega();
  // Builds from terms, validating the CNF invariants.
  static Ordinal from_terms(std::vector<OrdinalTerm> terms);

  const std::vector<OrdinalTerm>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  bool is_successor() const;
  bool is_limit() const;
  // Throws PreconditionError when the ordinal is infinite.
  std::uint64_t finite_value() const;

  std::string to_string() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b);
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

 private:
  std::vector<OrdinalTerm> terms_;
};

struct OrdinalTerm {
  Ordinal exponent;
  std::uint64_t coefficient = 1;

  friend bool operator==(const OrdinalTerm&, const OrdinalTerm&) = default;
};

enum class OrdinalKind { zero, successor, limit };

struct Classification {
  OrdinalKind kind = OrdinalKind::zero;
  Ordinal predecessor;  // meaningful for successors only
};

Ordinal parse_ordinal(std::string_view text);
std::string format_ordinal(const Ordinal& a);

std::strong_ordering compare(const Ordinal& a, const Ordinal& b);
Classification classify(const Ordinal& a);

// The n-th term (n >= 1) of the fixed fundamental sequence of a limit:
//   (g + l)[n]   = g + l[n]  for l the last term,
//   w^(b+1)[n]   = w^b * n,
//   w^l[n]       = w^(l[n])  for limit l.
Ordinal fundamental(const Ordinal& a, std::uint64_t n);

Ordinal add(const Ordinal& a, const Ordinal& b);
Ordinal omega_power(const Ordinal& a);
Ordinal nat_mul(const Ordinal& a, std::uint64_t k);
Ordinal successor(const Ordinal& a);

// Coefficient of w^e in a (0 if absent).
std::uint64_t coefficient_at(const Ordinal& a, const Ordinal& e);
// The terms of a whose exponent is strictly greater than e.
Ordinal terms_above(const Ordinal& a, const Ordinal& e);

struct OrdinalHash {
  std::size_t operator()(const Ordinal& a) const noexcept;
};

}  // namespace schreier
