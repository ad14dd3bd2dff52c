#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "schreier/cbindex.hpp"
#include "schreier/error.hpp"

using namespace schreier;
using namespace schreier::cb;

namespace {
Ordinal O(const char* s) { return parse_ordinal(s); }
}  // namespace

TEST_CASE("finite ranks of spread closures match iterated derivatives") {
  // generators inside [1,5]; all chains close inside [1,11]
  const std::vector<std::vector<FinSet>> gens{
      {FinSet{1, 2}},
      {FinSet{2, 3, 4}},
      {FinSet{1, 5}},
      {FinSet{1}, FinSet{3, 4}},
      {FinSet{2, 5}, FinSet{4}},
      {FinSet{1, 2, 3}, FinSet{4, 5}},
  };
  for (const auto& g : gens) {
    const SetFamily sg(5, g);
    const auto fam = FamilyOracle::spread_closure(sg);
    CAPTURE(fam.describe());
    const auto ranks =
        oracle::derivative_ranks([&](const FinSet& e) { return fam.contains(e); }, 11);
    std::size_t bad = 0;
    for (const auto& [e, r] : ranks) {
      if (!e.empty() && e.max() > 5) {
        continue;
      }
      bad += finite_rank(fam, e) != r;
      RankEngine eng(fam);
      const auto rr = eng.rank(e);
      bad += !rr.ok() || rr.rank != Ordinal::nat(r);
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("S_1 ranks of singletons") {
  RankEngine eng(schreier_oracle(O("1")));
  CHECK(eng.rank(FinSet{}).rank == O("w"));
  for (Nat n = 1; n <= 7; ++n) {
    CHECK(eng.rank(FinSet{n}).rank == Ordinal::nat(n - 1));
  }
  CHECK(eng.rank(FinSet{3, 4}).rank == O("1"));
  const auto out = eng.rank(FinSet{2, 3, 4});
  CHECK(out.outcome == RankResult::Outcome::not_in_family);
}

TEST_CASE("finite-order ranks agree with the derivative oracle where it is exact") {
  // the truncated derivative is exact once max E + (min E - |E|) <= 12
  const auto s1 = schreier_oracle(O("1"));
  const auto ranks = oracle::derivative_ranks(
      [](const FinSet& e) { return oracle::schreier_member(Ordinal::nat(1), e); }, 12);
  RankEngine eng(s1);
  for (const auto& [e, r] : ranks) {
    if (e.empty() || e.size() > e.min() || e.max() + (e.min() - e.size()) > 12) {
      continue;
    }
    CHECK(eng.rank(e).rank == Ordinal::nat(r));
  }
}

TEST_CASE("index headline") {
  struct Row {
    const char* alpha;
    const char* index;
  };
  for (const Row& r : {Row{"0", "2"}, Row{"1", "w+1"}, Row{"2", "w^2+1"}}) {
    CAPTURE(r.alpha);
    RankEngine eng(schreier_oracle(O(r.alpha)));
    const auto idx = eng.index();
    REQUIRE(idx.ok());
    CHECK(idx.rank == O(r.index));
    CHECK(idx.rank.is_successor());
  }
  RankEngine s2(schreier_oracle(O("2")));
  for (Nat n = 2; n <= 5; ++n) {
    CHECK(s2.rank(FinSet{n}).rank == add(nat_mul(O("w"), n - 1), Ordinal::nat(n - 1)));
  }
}

TEST_CASE("serial and parallel engines agree") {
  RankOptions ser;
  ser.exec = Exec::serial;
  RankEngine a(schreier_oracle(O("2")), ser);
  RankEngine b(schreier_oracle(O("2")));
  for (Nat n = 1; n <= 5; ++n) {
    CHECK(a.rank(FinSet{n}).rank == b.rank(FinSet{n}).rank);
  }
  CHECK(a.index().rank == b.index().rank);
}

TEST_CASE("the node cap is reported") {
  RankOptions tiny;
  tiny.node_cap = 50;
  RankEngine eng(schreier_oracle(O("2")), tiny);
  CHECK_THROWS_AS(eng.index(), CapExceeded);
}

TEST_CASE("derivative membership") {
  const auto s1 = schreier_oracle(O("1"));
  CHECK(in_derivative(s1, FinSet{2}));
  CHECK(!in_derivative(s1, FinSet{3, 4, 5}));
  CHECK(in_derivative(s1, FinSet{}));
  CHECK_THROWS_AS(in_derivative(s1, FinSet{1, 2}), PreconditionError);
  const auto notspread =
      FamilyOracle::explicit_family(hereditary_closure(SetFamily(4, {FinSet{1, 4}})));
  CHECK_THROWS_AS(in_derivative(notspread, FinSet{1}), PreconditionError);
  // {1} only extends once l >= 5
  const auto late = FamilyOracle::spread_closure(SetFamily(5, {FinSet{1, 5}}));
  CHECK(in_derivative(late, FinSet{1}));
}

TEST_CASE("the derivative of a spreading family is spreading") {
  const std::vector<std::vector<FinSet>> gens{{FinSet{1, 2}},
                                              {FinSet{2, 3, 4}},
                                              {FinSet{1, 5}},
                                              {FinSet{1}, FinSet{3, 4}},
                                              {FinSet{2, 5}, FinSet{4}}};
  for (const auto& g : gens) {
    const auto fam = FamilyOracle::spread_closure(SetFamily(5, g));
    const auto d = FamilyOracle::predicate(
        "d", [&](const FinSet& e) { return fam.contains(e) && in_derivative(fam, e); });
    CHECK(is_spreading_within(d, 9, Exec::serial));
    CHECK(is_hereditary_within(d, 9, Exec::serial));
  }
}

TEST_CASE("bar lift and transfer") {
  const auto gens = small_generator_families(5, 2, 2);
  CHECK(!gens.empty());
  const auto ser = bar_lift_batch(gens, 6, Exec::serial);
  const auto par = bar_lift_batch(gens, 6, Exec::parallel);
  CHECK(ser.failures == 0);
  CHECK(ser.checks == par.checks);
  CHECK(ser.families == gens.size());
  for (const auto& n :
       {SeqView::identity(16),
        SeqView({2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30, 32}, 32)}) {
    const auto t = rank_transfer_check(SetFamily(5, {FinSet{1, 3}, FinSet{4}}), n, 6);
    CHECK(t.ok);
    CHECK(t.checked > 0);
  }
}

TEST_CASE("bar raises ranks by the lifted element") {
  const auto fam = FamilyOracle::spread_closure(SetFamily(4, {FinSet{2, 3}}));
  const auto b = bar(fam);
  for (const auto& a : {FinSet{2}, FinSet{3}, FinSet{2, 3}, FinSet{4, 9}}) {
    for (Nat l = 1; l < a.min(); ++l) {
      CHECK(finite_rank(b, a.with(l)) >= finite_rank(fam, a));
    }
  }
}

TEST_CASE("rank cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "schreier-rank-cache-test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "s2.tsv").string();
  RankEngine a(schreier_oracle(O("2")));
  const auto want = a.index();
  a.save(path);
  RankEngine b(schreier_oracle(O("2")));
  b.load(path);
  CHECK(b.memo_size() == a.memo_size());
  CHECK(b.index().rank == want.rank);
  RankEngine c(schreier_oracle(O("1")));
  c.load(path);  // another family's cache is ignored
  CHECK(c.memo_size() == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rank json") {
  RankEngine eng(schreier_oracle(O("1")));
  const auto r = eng.rank(FinSet{3});
  const auto j = to_json(r, eng.family(), FinSet{3});
  CHECK(j["kind"] == "rank");
  CHECK(
      j.dump() ==
      to_json(RankEngine(schreier_oracle(O("1"))).rank(FinSet{3}), eng.family(), FinSet{3}).dump());
}
