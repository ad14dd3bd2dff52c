#include <sstream>

#include "doctest.h"
#include "schreier/error.hpp"
#include "schreier/family.hpp"
#include "schreier/finset.hpp"

using namespace schreier;

TEST_CASE("finset basics") {
  FinSet e{2, 5, 9};
  CHECK(e.size() == 3);
  CHECK(e.min() == 2);
  CHECK(e.max() == 9);
  CHECK(e.contains(5));
  CHECK(!e.contains(4));
  CHECK(e.with(4) == FinSet{2, 4, 5, 9});
  CHECK(e.with(5) == e);
  CHECK(e.extended(10) == FinSet{2, 5, 9, 10});
  CHECK(e.without_min() == FinSet{5, 9});
  CHECK(e.prefix(2) == FinSet{2, 5});
  CHECK(e.to_string() == "{2,5,9}");
  CHECK(e.to_csv() == "2,5,9");
  CHECK(FinSet{}.to_csv() == "{}");
  CHECK(FinSet::parse("{2,5,9}") == e);
  CHECK(FinSet::parse(" 2, 5,9 ") == e);
  CHECK(FinSet::parse("{}").empty());
  CHECK(FinSet{1, 3}.is_subset_of(FinSet{1, 2, 3}));
  CHECK(!FinSet{1, 4}.is_subset_of(FinSet{1, 2, 3}));
  CHECK_THROWS_AS(FinSet({3, 2}), PreconditionError);
  CHECK_THROWS_AS(FinSet({0, 2}), PreconditionError);
  CHECK_THROWS_AS(FinSet({2, 2}), PreconditionError);
  CHECK_THROWS_AS(FinSet::parse("1,x"), ParseError);
  CHECK_THROWS(e.extended(9));
}

TEST_CASE("block order and masks") {
  CHECK(precedes(FinSet{1, 2}, FinSet{3}));
  CHECK(!precedes(FinSet{1, 3}, FinSet{3}));
  CHECK(precedes(FinSet{}, FinSet{1}));
  CHECK(precedes(FinSet{4}, FinSet{}));
  std::vector<FinSet> blocks{FinSet{1}, FinSet{}, FinSet{2, 3}};
  CHECK(concat_blocks(blocks) == FinSet{1, 2, 3});
  for (std::uint64_t m = 0; m < 256; ++m) {
    CHECK(mask_of(finset_from_mask(m)) == m);
  }
  CHECK(finset_from_mask(0b1010) == FinSet{2, 4});
}

TEST_CASE("sequence views") {
  SeqView m({2, 4, 6, 8, 10}, 10);
  CHECK(m.at(1) == 2);
  CHECK(m.image(FinSet{1, 3, 5}) == FinSet{2, 6, 10});
  CHECK_THROWS_AS(m.image(FinSet{6}), PreconditionError);
  CHECK(m.preimage(FinSet{4, 8}) == FinSet{2, 4});
  CHECK(!m.preimage(FinSet{3}));
  CHECK(m.index_of(6) == 3u);
  CHECK(m.tail_from(3).prefix() == std::vector<Nat>{6, 8, 10});
  CHECK(SeqView::identity(3).prefix() == std::vector<Nat>{1, 2, 3});
  CHECK(SeqView::parse("1,5,7", 9) == SeqView({1, 5, 7}, 9));
  CHECK_THROWS(SeqView({3, 2}, 9));
}

TEST_CASE("set family trie") {
  SetFamily f(6);
  CHECK(f.insert(FinSet{}));
  CHECK(f.insert(FinSet{1, 3}));
  CHECK(f.insert(FinSet{1}));
  CHECK(!f.insert(FinSet{1, 3}));
  CHECK(f.insert(FinSet{2}));
  CHECK(f.size() == 4);
  CHECK(f.contains(FinSet{1, 3}));
  CHECK(!f.contains(FinSet{3}));
  CHECK(f.has_strict_superset(FinSet{1}));
  CHECK(f.has_strict_superset(FinSet{3}));
  CHECK(!f.has_strict_superset(FinSet{1, 3}));
  CHECK(f.max_member_size() == 2);
  CHECK(f.members() == std::vector<FinSet>{FinSet{}, FinSet{1}, FinSet{1, 3}, FinSet{2}});
  CHECK_THROWS(f.insert(FinSet{7}));
}

TEST_CASE("hereditary closure, restriction, pushforward, link") {
  SetFamily g(4, {FinSet{1, 2}, FinSet{3, 4}});
  CHECK(!is_hereditary(g));
  SetFamily h = hereditary_closure(g);
  CHECK(is_hereditary(h));
  CHECK(h.size() == 7);
  SeqView n({1, 3, 4}, 4);
  SetFamily r = restrict(h, n);
  CHECK(r.members() ==
        std::vector<FinSet>{FinSet{}, FinSet{1}, FinSet{3}, FinSet{3, 4}, FinSet{4}});
  SetFamily p = pushforward(SetFamily(2, {FinSet{}, FinSet{1, 2}}), n);
  CHECK(p.contains(FinSet{1, 3}));
  CHECK_THROWS_AS(pushforward(SetFamily(4, {FinSet{4}}), n), PreconditionError);
  SetFamily l = link(h, 3);
  CHECK(l.members() == std::vector<FinSet>{FinSet{}, FinSet{4}});
}

TEST_CASE("family files") {
  std::istringstream in("# comment\n{}\n1\n1,2\n3\n");
  SetFamily f = read_family(in);
  CHECK(f.size() == 4);
  std::ostringstream out;
  write_family(out, f);
  std::istringstream back(out.str());
  CHECK(read_family(back) == f);
  std::istringstream blank("1\n\n2\n");
  CHECK_THROWS_AS(read_family(blank), ParseError);
  std::istringstream bad("2,1\n");
  CHECK_THROWS(read_family(bad));
}

TEST_CASE("oracle combinators") {
  SetFamily gens(5, {FinSet{2, 3}});
  auto sc = FamilyOracle::spread_closure(gens);
  CHECK(sc.contains(FinSet{2, 3}));
  CHECK(sc.contains(FinSet{5, 9}));
  CHECK(sc.contains(FinSet{7}));
  CHECK(!sc.contains(FinSet{1, 9}));
  CHECK(!sc.contains(FinSet{3, 4, 5}));
  CHECK(sc.known_spreading());
  CHECK(is_spreading_within(sc, 10, Exec::serial));
  CHECK(is_hereditary_within(sc, 10, Exec::serial));

  auto b = FamilyOracle::bar(sc);
  CHECK(b.contains(FinSet{1, 2, 3}));
  CHECK(b.contains(FinSet{2, 3, 4}));
  CHECK(!b.contains(FinSet{1, 2, 3, 4}));

  auto ex = FamilyOracle::explicit_family(hereditary_closure(SetFamily(4, {FinSet{1, 4}})));
  CHECK(ex.support_bound() == 4u);
  CHECK(!is_spreading_within(ex, 6, Exec::serial));
  CHECK(materialize(ex, 6, Exec::serial) == materialize(ex, 6, Exec::parallel));

  auto lk = FamilyOracle::link(sc, 2);
  CHECK(lk.contains(FinSet{3}));
  CHECK(!lk.contains(FinSet{1}));
  CHECK(!lk.contains(FinSet{3, 4}));

  auto rs = FamilyOracle::restrict(sc, SeqView({2, 4, 6}, 6));
  CHECK(rs.contains(FinSet{4, 6}));
  CHECK(!rs.contains(FinSet{3}));
}

TEST_CASE("stabilization points") {
  auto sc = FamilyOracle::spread_closure(SetFamily(5, {FinSet{1, 5}}));
  // {1} u {l} is in only once l >= 5
  REQUIRE(sc.stable_from(FinSet{1}));
  const Nat l0 = *sc.stable_from(FinSet{1});
  CHECK(l0 >= 5);
  for (Nat l = l0; l < l0 + 5; ++l) {
    CHECK(sc.contains(FinSet{1, l}));
  }
}
