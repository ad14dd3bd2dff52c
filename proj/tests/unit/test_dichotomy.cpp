#include "doctest.h"
#include "oracles.hpp"
#include "schreier/dichotomy.hpp"
#include "schreier/error.hpp"

using namespace schreier;
using namespace schreier::dichotomy;

namespace {

// every E of the tuple family on [1, |M|] maps into fam
bool inclusion_holds(const FamilyOracle& fam, const std::vector<Ordinal>& spec, const SeqView& m) {
  for (const auto& e : oracle::all_subsets(m.size())) {
    if (oracle::tuple_member(spec, e.elements()) && !fam.contains(m.image(e))) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("inclusion search against brute force") {
  const std::vector<Ordinal> s1{Ordinal::nat(1)};
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    const SetFamily fam = random_hereditary_family(8, seed);
    const auto oracle_fam = FamilyOracle::explicit_family(fam);
    const SeqView ground = SeqView::identity(8);
    for (Nat min_len : {2, 3, 4}) {
      CAPTURE(min_len);
      bool exists = false;
      for (const auto& sub : oracle::all_subsets(8)) {
        if (sub.size() >= min_len && inclusion_holds(oracle_fam, s1, SeqView(sub.elements(), 8))) {
          exists = true;
          break;
        }
      }
      const auto ser = inclusion_search(oracle_fam, TupleSpec::parse("1"), ground, min_len,
                                        1'000'000, Exec::serial);
      const auto par = inclusion_search(oracle_fam, TupleSpec::parse("1"), ground, min_len,
                                        1'000'000, Exec::parallel);
      CHECK(!ser.truncated);
      CHECK(ser.m.has_value() == exists);
      CHECK(ser.m == par.m);
      if (ser.m) {
        CHECK(ser.m->size() >= min_len);
        CHECK(inclusion_holds(oracle_fam, s1, *ser.m));
        CHECK(!first_inclusion_failure(oracle_fam, TupleSpec::parse("1"), *ser.m));
      }
    }
  }
}

TEST_CASE("inclusion into S_2 and its failure for short families") {
  const auto s2 = schreier_oracle(Ordinal::nat(2));
  const auto r = inclusion_search(s2, TupleSpec::parse("1"), SeqView::identity(12), 6, 1'000'000);
  REQUIRE(r.m);
  CHECK(r.m->prefix() == std::vector<Nat>{1, 2, 3, 4, 5, 6});
  std::uint64_t checked = 0;
  const auto s0 = schreier_oracle(Ordinal::nat(0));
  const auto fail =
      first_inclusion_failure(s0, TupleSpec::parse("1"), SeqView::identity(5), &checked);
  REQUIRE(fail);
  CHECK(!s0.contains(*fail));
  CHECK(checked >= 1);
  const auto capped = inclusion_search(s0, TupleSpec::parse("1"), SeqView::identity(12), 6, 3);
  CHECK(capped.truncated);
}

TEST_CASE("random families are seeded and hereditary") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SetFamily a = random_hereditary_family(12, seed);
    CHECK(is_hereditary(a));
    CHECK(a == random_hereditary_family(12, seed));
    CHECK(a.contains(FinSet{}));
  }
  CHECK(random_hereditary_family(12, 1) != random_hereditary_family(12, 2));
}

TEST_CASE("dichotomy runs end in verified certificates") {
  std::size_t decided = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const SetFamily fam = random_hereditary_family(10, seed);
    SearchParams ser;
    ser.exec = Exec::serial;
    ser.seed = seed;
    SearchParams par = ser;
    par.exec = Exec::parallel;
    const auto a = dichotomy_search(fam, TupleSpec::parse("1"), 10, ser);
    const auto b = dichotomy_search(fam, TupleSpec::parse("1"), 10, par);
    const auto ja = to_json(a);
    const auto jb = to_json(b);
    CHECK(ja.dump() == jb.dump());
    if (a.outcome != Outcome::undecided_at_truncation) {
      ++decided;
      const auto rv = reverify(to_json(a), fam);
      CHECK(rv.ok);
    }
    if (a.outcome == Outcome::inclusion) {
      CHECK(inclusion_holds(FamilyOracle::explicit_family(fam), {Ordinal::nat(1)}, a.m));
    }
    if (a.outcome == Outcome::embedding) {
      REQUIRE(a.embedding);
      CHECK(a.embedding->accepted());
      for (const auto& e : restrict(fam, a.m).members()) {
        CHECK(oracle::schreier_member(Ordinal::nat(1), a.embedding->map.image(e)));
      }
    }
  }
  CHECK(decided > 0);
}

TEST_CASE("reverification rejects the wrong family") {
  const SetFamily fam = hereditary_closure(SetFamily(8, {FinSet{1, 2}, FinSet{3, 4}}));
  const auto c = dichotomy_search(fam, TupleSpec::parse("1"), 8);
  REQUIRE(c.outcome != Outcome::undecided_at_truncation);
  CHECK(reverify(to_json(c), fam).ok);
  const SetFamily other = hereditary_closure(SetFamily(8, {FinSet{1, 2, 3}}));
  CHECK(!reverify(to_json(c), other).ok);
}

TEST_CASE("non-hereditary input is refused") {
  CHECK_THROWS_AS(dichotomy_search(SetFamily(4, {FinSet{1, 2}}), TupleSpec::parse("1"), 4),
                  PreconditionError);
}

TEST_CASE("diagonalization coloring on S_1") {
  const auto d =
      diagonalize_first_lemma(schreier_oracle(Ordinal::nat(1)), TupleSpec::parse("0"), 10, 3);
  REQUIRE(!d.coloring.positions.empty());
  CHECK(d.coloring.positions.front().m == 1);
  CHECK(d.coloring.positions.front().color == Color::blue);
  for (std::size_t i = 1; i < d.coloring.positions.size(); ++i) {
    CHECK(d.coloring.positions[i].color == Color::red);
  }
  CHECK(d.red_side);
  CHECK(to_json(d).dump() == to_json(diagonalize_first_lemma(schreier_oracle(Ordinal::nat(1)),
                                                             TupleSpec::parse("0"), 10, 3))
                                 .dump());
  CHECK_THROWS_AS(
      diagonalize_first_lemma(schreier_oracle(Ordinal::nat(1)), TupleSpec::parse("0"), 4, 5),
      PreconditionError);
}

TEST_CASE("the counterexample family") {
  CHECK(example_block(1) == FinSet{3});
  CHECK(example_block(3) == FinSet{9, 10, 11});
  for (Nat k = 1; k <= 4; ++k) {
    CAPTURE(k);
    const SetFamily f = example_family(k);
    CHECK(is_hereditary(f));
    const Nat u = f.universe_bound();
    CHECK(u == (Nat{1} << k) + k);
    // agrees with the untruncated rule on [1, u]
    for (const auto& e : oracle::all_subsets(u)) {
      CHECK(f.contains(e) == example_member(e));
    }
  }
  // members never meet two blocks; every F_k with 1 prepended is a member
  CHECK(!example_member(FinSet{3, 5}));
  CHECK(example_member(FinSet{1, 17, 18, 19, 20}));
  CHECK(!example_member(FinSet{2}));
  CHECK_THROWS_AS(example_family(0), PreconditionError);
  CHECK_THROWS_AS(example_family(21), PreconditionError);
}

TEST_CASE("both non-inclusions of the example") {
  const auto c = check_example_noninclusions(3, SeqView::identity(11));
  CHECK(c.status == ExampleCheck::Status::ok);
  REQUIRE(c.both());
  CHECK(*c.f_witness == FinSet{1, 3});
  CHECK(!oracle::schreier_member(Ordinal::nat(1), *c.f_witness));
  CHECK(*c.s1_witness == FinSet{2});
  CHECK(oracle::schreier_member(Ordinal::nat(1), *c.s1_preimage));
  CHECK(!example_member(*c.s1_witness));

  const SeqView evens({2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24}, 24);
  const auto e = check_example_noninclusions(4, evens);
  REQUIRE(e.both());
  CHECK(*e.f_witness == FinSet{2, 10, 12});
  CHECK(e.f_witness->size() > e.f_witness->min());

  const auto shortm =
      check_example_noninclusions(4, SeqView({3, 5, 7, 9, 11, 13, 15, 17, 19, 21}, 40));
  CHECK(shortm.status == ExampleCheck::Status::insufficient_prefix);
  CHECK(shortm.required_length == 11);
  CHECK(!shortm.f_witness);
}
