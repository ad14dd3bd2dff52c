#include "doctest.h"
#include "oracles.hpp"
#include "schreier/error.hpp"
#include "schreier/ordinal.hpp"

using namespace schreier;

namespace {
Ordinal O(const char* s) { return parse_ordinal(s); }
}  // namespace

TEST_CASE("parse and format round trip") {
  for (const char* s : {"0", "1", "17", "w", "w+1", "w*2+3", "w^2", "w^2*3+w*2+1", "w^w",
                        "w^(w+1)+w", "w^(w^w)", "w^(w*2)*4+w^5+7"}) {
    CAPTURE(s);
    CHECK(format_ordinal(O(s)) == s);
    CHECK(O(format_ordinal(O(s)).c_str()) == O(s));
  }
  CHECK(O(" w + 1 ") == O("w+1"));
  CHECK(O("w^1") == O("w"));
  CHECK(O("w^0") == O("1"));
  CHECK(O("w*1") == O("w"));
}

TEST_CASE("malformed ordinals are rejected") {
  for (const char* s : {"", "x", "w+", "w^", "w**2", "(w", "1 2", "w*0", "-1", "w^(w"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse_ordinal(s), ParseError);
  }
}

TEST_CASE("ordering") {
  CHECK(O("0") < O("1"));
  CHECK(O("1000") < O("w"));
  CHECK(O("w*5+9") < O("w^2"));
  CHECK(O("w^2") < O("w^2+1"));
  CHECK(O("w^w") > O("w^100*9"));
  CHECK(O("w^(w+1)") > O("w^w*3"));
  CHECK(compare(O("w*2"), add(O("w"), O("w"))) == std::strong_ordering::equal);
  CHECK_THROWS_AS(O("w+w"), ParseError);
  CHECK_THROWS_AS(O("1+w"), ParseError);
}

TEST_CASE("arithmetic is non-commutative and absorbs") {
  CHECK(add(O("1"), O("w")) == O("w"));
  CHECK(add(O("w"), O("1")) == O("w+1"));
  CHECK(add(O("w+3"), O("w^2")) == O("w^2"));
  CHECK(add(O("w^2+w"), O("w*2+1")) == O("w^2+w*3+1"));
  CHECK(nat_mul(O("w^2+w"), 3) == O("w^2*3+w"));
  CHECK(nat_mul(O("w"), 0) == O("0"));
  CHECK(successor(O("w*2")) == O("w*2+1"));
  CHECK(omega_power(O("2")) == O("w^2"));
  CHECK(coefficient_at(O("w^2*3+w+4"), O("1")) == 1);
  CHECK(coefficient_at(O("w^2*3+w+4"), O("0")) == 4);
  CHECK(coefficient_at(O("w^2*3+w+4"), O("5")) == 0);
  CHECK(terms_above(O("w^2*3+w+4"), O("1")) == O("w^2*3"));
  CHECK_THROWS_AS(nat_mul(O("w*3"), std::uint64_t{1} << 63), OverflowError);
  CHECK_THROWS_AS(add(O("18446744073709551615"), O("1")), OverflowError);
}

TEST_CASE("classification") {
  CHECK(classify(O("0")).kind == OrdinalKind::zero);
  CHECK(classify(O("5")).kind == OrdinalKind::successor);
  CHECK(classify(O("5")).predecessor == O("4"));
  CHECK(classify(O("w^2+1")).predecessor == O("w^2"));
  CHECK(classify(O("w*3")).kind == OrdinalKind::limit);
  CHECK(O("w^w").is_limit());
  CHECK(O("7").finite_value() == 7);
  CHECK_THROWS_AS(O("w").finite_value(), PreconditionError);
}

TEST_CASE("fundamental sequences") {
  CHECK(fundamental(O("w"), 5) == O("5"));
  CHECK(fundamental(O("w*2"), 3) == O("w+3"));
  CHECK(fundamental(O("w^2"), 3) == O("w*3"));
  CHECK(fundamental(O("w^2+w"), 4) == O("w^2+4"));
  CHECK(fundamental(O("w^3*2"), 2) == O("w^3+w^2*2"));
  CHECK(fundamental(O("w^w"), 3) == O("w^3"));
  CHECK(fundamental(O("w^(w*2)"), 2) == O("w^(w+2)"));
  CHECK_THROWS_AS(fundamental(O("w+1"), 2), PreconditionError);
  CHECK_THROWS_AS(fundamental(O("w"), 0), PreconditionError);
}

TEST_CASE("fundamental sequences agree with the test-side oracle and increase") {
  for (const char* s : {"w", "w*3", "w^2", "w^2*2+w", "w^w", "w^(w+1)", "w^(w^w)", "w^(w*2)+w^3"}) {
    CAPTURE(s);
    const Ordinal a = O(s);
    Ordinal prev;
    for (Nat n = 1; n <= 6; ++n) {
      const Ordinal f = fundamental(a, n);
      CHECK(f == oracle::fund(a, n));
      CHECK(f < a);
      if (n > 1) {
        CHECK(prev < f);
      }
      prev = f;
    }
  }
}
