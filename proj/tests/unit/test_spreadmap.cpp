#include "doctest.h"
#include "oracles.hpp"
#include "schreier/error.hpp"
#include "schreier/policy.hpp"
#include "schreier/spreadmap.hpp"

using namespace schreier;
using namespace schreier::games;

namespace {

struct Case {
  const char* name;
  GameSpec game;
};

std::vector<Case> cases() {
  return {
      {"0", {TupleSpec::parse("0"), constant_policy(1)}},
      {"1, l=3", {TupleSpec::parse("1"), constant_policy(3)}},
      {"2, seq", {TupleSpec::parse("2"), sequence_policy({2, 1, 2, 1, 2, 1, 2})}},
      {"2, l=2", {TupleSpec::parse("2"), constant_policy(2)}},
      {"w, l=2", {TupleSpec::parse("w"), constant_policy(2)}},
      {"(0,1)", {TupleSpec::parse("0,1"), constant_policy(2)}},
      {"(1,1), minlast", {TupleSpec::parse("1,1"), min_last_policy(1)}},
  };
}

}  // namespace

TEST_CASE("every minimal-play image lands in the tuple family") {
  const Nat T = 8;
  for (const auto& c : cases()) {
    CAPTURE(c.name);
    const auto f = spreadmap::build(c.game, T);
    REQUIRE(f.table.size() == T);
    for (Nat t = 1; t <= T; ++t) {
      CHECK(f.at(t) >= t);
      if (t > 1) {
        CHECK(f.at(t) > f.at(t - 1));
      }
    }
    std::size_t bad = 0;
    const auto plays = minimal_plays(c.game, T);
    for (const auto& p : plays) {
      bad += !oracle::tuple_member(c.game.tuple.ordinals, f.image(result_set(p)).elements());
    }
    CHECK(bad == 0);
    const auto ser = spreadmap::verify(f, c.game, T, Exec::serial);
    const auto par = spreadmap::verify(f, c.game, T, Exec::parallel);
    CHECK(ser.ok);
    CHECK(par.ok);
    CHECK(ser.plays == plays.size());
    CHECK(par.plays == ser.plays);
  }
}

TEST_CASE("closed forms") {
  const auto id = spreadmap::build({TupleSpec::parse("0"), constant_policy(1)}, 6);
  CHECK(id.table == std::vector<Nat>{1, 2, 3, 4, 5, 6});
  for (Nat l = 1; l <= 4; ++l) {
    const auto f = spreadmap::build({TupleSpec::parse("1"), constant_policy(l)}, 6);
    for (Nat t = 1; t <= 6; ++t) {
      CHECK(f.at(t) == l + l * t);
    }
  }
}

TEST_CASE("a shorter budget gives a prefix") {
  for (const auto& c : cases()) {
    CAPTURE(c.name);
    const auto a = spreadmap::build(c.game, 6);
    const auto b = spreadmap::build(c.game, 8);
    CHECK(spreadmap::is_prefix_of(a, b));
  }
}

TEST_CASE("a wrong table is caught") {
  const GameSpec g{TupleSpec::parse("1"), constant_policy(3)};
  const auto f = spreadmap::from_table({1, 2, 3, 4, 5, 6, 7, 8});
  const auto v = spreadmap::verify(f, g, 8);
  CHECK(!v.ok);
  REQUIRE(v.counterexample);
  CHECK(!oracle::schreier_member(Ordinal::nat(1), v.counterexample->second));
}

TEST_CASE("table helpers") {
  const auto f = spreadmap::from_table({2, 4, 7});
  CHECK(f.image(FinSet{1, 3}) == FinSet{2, 7});
  CHECK_THROWS_AS(f.at(4), PreconditionError);
  CHECK_THROWS_AS(f.at(0), PreconditionError);
  CHECK(spreadmap::image_is_spreading_dominated(spreadmap::from_table({3, 5, 9}), f));
  CHECK(!spreadmap::image_is_spreading_dominated(spreadmap::from_table({1, 5, 9}), f));
  CHECK_THROWS_AS(spreadmap::image_is_spreading_dominated(spreadmap::from_table({3}), f),
                  PreconditionError);
  CHECK(spreadmap::is_prefix_of(spreadmap::from_table({2, 4}), f));
  CHECK(!spreadmap::is_prefix_of(spreadmap::from_table({2, 5}), f));
}

TEST_CASE("json round trip") {
  const GameSpec g{TupleSpec::parse("w"), constant_policy(2)};
  const auto f = spreadmap::build(g, 8);
  const auto j = spreadmap::to_json(f, g);
  const auto back = spreadmap::map_from_json(j);
  CHECK(back.table == f.table);
  CHECK(back.budget == f.budget);
  CHECK(j.dump() == spreadmap::to_json(spreadmap::build(g, 8), g).dump());
}
