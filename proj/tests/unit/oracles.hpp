#pragma once

// Test-side reference implementations, written from the definitions and
// sharing no code with the library beyond FinSet and the ordinal type.

#include <cstdint>
#include <map>
#include <vector>

#include "schreier/finset.hpp"
#include "schreier/ordinal.hpp"

namespace oracle {

using schreier::FinSet;
using schreier::Nat;
using schreier::Ordinal;

inline std::vector<Nat> slice(const std::vector<Nat>& v, std::size_t a, std::size_t b) {
  return std::vector<Nat>(v.begin() + static_cast<std::ptrdiff_t>(a),
                          v.begin() + static_cast<std::ptrdiff_t>(b));
}

// Fundamental sequences written out for the ordinals the tests use:
// w[n] = n, (w*k+j)... are handled generically below through the CNF terms.
inline Ordinal fund(const Ordinal& a, Nat n) {
  const auto& t = a.terms();
  std::vector<schreier::OrdinalTerm> head(t.begin(), t.end() - 1);
  schreier::OrdinalTerm last = t.back();
  Ordinal rest;
  if (last.coefficient > 1) {
    head.push_back({last.exponent, last.coefficient - 1});
  }
  const Ordinal& e = last.exponent;
  if (e.is_successor()) {
    // w^(b+1)[n] = w^b * n
    Ordinal b = schreier::classify(e).predecessor;
    rest = schreier::nat_mul(schreier::omega_power(b), n);
  } else {
    rest = schreier::omega_power(fund(e, n));
  }
  return schreier::add(Ordinal::from_terms(head), rest);
}

// E in S_alpha straight from the definition.
inline bool schreier_member(const Ordinal& alpha, const std::vector<Nat>& e) {
  if (e.empty()) {
    return true;
  }
  if (alpha.is_zero()) {
    return e.size() == 1;
  }
  if (alpha.is_successor()) {
    const Ordinal beta = schreier::classify(alpha).predecessor;
    const std::size_t n = e.size();
    // fewest consecutive blocks in S_beta covering e[0..i)
    std::vector<std::size_t> best(n + 1, SIZE_MAX);
    best[0] = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (best[j] != SIZE_MAX && schreier_member(beta, slice(e, j, i))) {
          best[i] = std::min(best[i], best[j] + 1);
        }
      }
    }
    return best[n] <= e.front();
  }
  for (Nat n = 1; n <= e.front(); ++n) {
    if (schreier_member(fund(alpha, n), e)) {
      return true;
    }
  }
  return false;
}

inline bool schreier_member(const Ordinal& alpha, const FinSet& e) {
  return schreier_member(alpha, e.elements());
}

// E = F1 u ... u Fr, F1 < ... < Fr, Fi in S_ai (empty blocks allowed).
inline bool tuple_member(const std::vector<Ordinal>& spec, const std::vector<Nat>& e,
                         std::size_t from = 0, std::size_t k = 0) {
  if (k == spec.size()) {
    return from == e.size();
  }
  for (std::size_t to = from; to <= e.size(); ++to) {
    if (schreier_member(spec[k], slice(e, from, to)) && tuple_member(spec, e, to, k + 1)) {
      return true;
    }
  }
  return false;
}

// All subsets of [1, n] as FinSets, mask order.
inline std::vector<FinSet> all_subsets(Nat n) {
  std::vector<FinSet> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::vector<Nat> v;
    for (Nat i = 0; i < n; ++i) {
      if (m >> i & 1) {
        v.push_back(i + 1);
      }
    }
    out.push_back(FinSet(v));
  }
  return out;
}

// Exact strong Cantor-Bendixson rank for a family given as a predicate on
// subsets of [1, n]: iterate the derivative {A : A u {l} in D for some
// l > max A with l <= n} and record how many rounds each set survives.
// Only meaningful when n is large enough for every chain to close inside it.
template <class Member>
std::map<FinSet, Nat> derivative_ranks(Member in, Nat n) {
  std::vector<FinSet> current;
  for (const auto& e : all_subsets(n)) {
    if (in(e)) {
      current.push_back(e);
    }
  }
  std::map<FinSet, Nat> rank;
  for (Nat round = 0; !current.empty(); ++round) {
    std::map<FinSet, bool> alive;
    for (const auto& e : current) {
      rank[e] = round;
      alive[e] = true;
    }
    std::vector<FinSet> next;
    for (const auto& e : current) {
      const Nat from = e.empty() ? 1 : e.max() + 1;
      for (Nat l = from; l <= n; ++l) {
        if (alive.count(e.extended(l))) {
          next.push_back(e);
          break;
        }
      }
    }
    current = std::move(next);
  }
  return rank;
}

}  // namespace oracle

#ifdef DOCTEST_LIBRARY_INCLUDED
namespace doctest {
template <>
struct StringMaker<schreier::Ordinal> {
  static String convert(const schreier::Ordinal& a) { return a.to_string().c_str(); }
};
template <>
struct StringMaker<schreier::FinSet> {
  static String convert(const schreier::FinSet& e) { return e.to_string().c_str(); }
};
}  // namespace doctest
#endif
