#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "schreier/dichotomy.hpp"
#include "schreier/error.hpp"
#include "schreier/games.hpp"
#include "schreier/policy.hpp"
#include "schreier/strategy.hpp"

using namespace schreier;
using namespace schreier::games;

namespace {

Ordinal O(const char* s) { return parse_ordinal(s); }

// Test-side minimax for tuple games of finite ordinals: pending items are
// games (k) or blocks (size, exact); N wins when S is stuck or the result
// leaves fam.
struct Minimax {
  std::function<bool(const FinSet&)> in;
  Nat universe;
  Nat budget;

  struct Item {
    bool block;
    Nat k;  // game order, or block size
    bool exact;
  };

  bool n_wins(std::vector<Item> pending, const std::vector<Nat>& acc) const {
    if (pending.empty()) {
      return !in(FinSet(acc));
    }
    const Item it = pending.back();
    pending.pop_back();
    if (!it.block) {
      if (it.k == 0) {
        pending.push_back({true, 1, true});
        return n_wins(pending, acc);
      }
      for (Nat l = 1; l <= budget; ++l) {
        auto next = pending;
        if (it.k == 1) {
          next.push_back({true, l, false});
        } else {
          for (Nat i = 0; i < l; ++i) {
            next.push_back({false, it.k - 1, false});
          }
        }
        if (n_wins(next, acc)) {
          return true;
        }
      }
      return false;
    }
    const Nat lo = acc.empty() ? 1 : acc.back() + 1;
    if (lo > universe) {
      return true;
    }
    const Nat width = universe - lo + 1;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << width); ++mask) {
      const auto n = static_cast<Nat>(std::popcount(mask));
      if (it.exact ? n != 1 : n < it.k) {
        continue;
      }
      auto next = acc;
      for (Nat i = 0; i < width; ++i) {
        if (mask >> i & 1) {
          next.push_back(lo + i);
        }
      }
      if (!n_wins(pending, next)) {
        return false;
      }
    }
    return true;
  }

  bool n_wins(const std::vector<Nat>& spec) const {
    std::vector<Item> pending;
    for (auto it = spec.rbegin(); it != spec.rend(); ++it) {
      pending.push_back({false, *it, false});
    }
    return n_wins(pending, {});
  }
};

}  // namespace

TEST_CASE("machine unfolds the games") {
  Machine m(TupleSpec::parse("1"));
  CHECK(m.turn() == Turn::n_picks);
  m.play_n(2);
  CHECK(m.obligation().min_size == 2);
  CHECK_THROWS_AS(m.play_s(FinSet{3}), IllegalMove);
  m.play_s(FinSet{3, 7});
  CHECK(m.done());
  CHECK(m.result() == FinSet{3, 7});

  Machine z(TupleSpec::parse("0"));
  CHECK(z.turn() == Turn::s_picks);
  CHECK(z.obligation().exact);
  CHECK_THROWS_AS(z.play_s(FinSet{1, 2}), IllegalMove);
  CHECK_THROWS_AS(z.play_n(1), IllegalMove);
  z.play_s(FinSet{4});
  CHECK(z.done());

  Machine two(TupleSpec::parse("2"));
  two.play_n(2);
  two.play_n(1);
  two.play_s(FinSet{1});
  CHECK(two.turn() == Turn::n_picks);
  two.play_n(3);
  CHECK_THROWS_AS(two.play_s(FinSet{1, 2, 3}), IllegalMove);  // must lie above {1}
  two.play_s(FinSet{2, 3, 4});
  CHECK(two.done());
  CHECK(two.result() == FinSet{1, 2, 3, 4});

  Machine lim(TupleSpec::parse("w"));
  lim.play_n(1);  // w[1] = 1
  CHECK(lim.obligation().game == O("1"));
  lim.play_n(4);
  lim.play_s(FinSet{5, 6, 7, 8});
  CHECK(lim.done());

  Machine tup(TupleSpec::parse("0,1"));
  tup.play_s(FinSet{2});
  tup.play_n(1);
  tup.play_s(FinSet{3});
  CHECK(tup.done());
  CHECK_THROWS_AS(tup.play_n(1), IllegalMove);
}

TEST_CASE("replay reports the offending move") {
  const TupleSpec spec = TupleSpec::parse("1,1");
  const Transcript t =
      replay(spec, {Move::n(1), Move::s(FinSet{2}), Move::n(2), Move::s(FinSet{3, 4})});
  CHECK(t.status == Status::complete);
  CHECK(result_set(t) == FinSet{2, 3, 4});
  CHECK(t.blocks().size() == 2);
  try {
    replay(spec, {Move::n(1), Move::s(FinSet{2}), Move::n(2), Move::s(FinSet{3})});
    FAIL("expected IllegalMove");
  } catch (const IllegalMove& e) {
    CHECK(e.index() == 3u);
  }
  const Transcript partial = replay(spec, {Move::n(1)});
  CHECK(partial.status == Status::in_progress);
  CHECK(prefix_key({Move::n(1), Move::s(FinSet{2, 3})}, 2) == "N1;S2,3;");
  CHECK(prefix_hash({Move::n(1)}, 1).size() == 16);
  CHECK(transcript_from_json(to_json(t)).moves == t.moves);
}

TEST_CASE("minimal plays of a bound 1-game are the l-subsets") {
  // C(budget, l) plays, each with a block of exactly l elements
  const std::uint64_t binom[] = {0, 7, 21, 35, 35};
  for (Nat l = 1; l <= 4; ++l) {
    GameSpec g{TupleSpec::parse("1"), constant_policy(l)};
    const auto plays = minimal_plays(g, 7);
    CHECK(plays.size() == binom[l]);
    for (const auto& p : plays) {
      CHECK(result_set(p).size() == l);
    }
  }
  GameSpec z{TupleSpec::parse("0"), constant_policy(1)};
  CHECK(minimal_plays(z, 5).size() == 5);
}

TEST_CASE("policies") {
  const std::vector<Move> none;
  const Ordinal one = O("1");
  DecisionContext ctx{none, one, 0};
  CHECK(constant_policy(3)->choose(ctx) == 3u);
  CHECK(sequence_policy({4, 5})->choose(ctx) == 4u);
  CHECK(!sequence_policy({})->choose(ctx));
  CHECK(min_last_policy(2)->choose(ctx) == 2u);
  const std::vector<Move> some{Move::n(1), Move::s(FinSet{5, 6})};
  DecisionContext after{some, one, 1};
  CHECK(min_last_policy()->choose(after) == 5u);
  auto pg = parse_policy("game:w=2;1=3;default=7");
  const Ordinal w = O("w");
  CHECK(pg->choose(DecisionContext{none, w, 0}) == 2u);
  CHECK(pg->choose(DecisionContext{none, one, 1}) == 3u);
  CHECK(parse_policy("const:4")->describe() == "const:4");
  CHECK(parse_policy("minlast")->describe() == "minlast");
  CHECK(parse_policy("seq:1,2,3")->choose(DecisionContext{none, one, 2}) == 3u);
  CHECK_THROWS_AS(parse_policy("bogus"), ParseError);
  CHECK_THROWS_AS(parse_policy("const:0"), ParseError);
}

TEST_CASE("the min-first strategy wins the (1,1)-game on S_1") {
  const auto fam = schreier_oracle(O("1"));
  const auto pol = min_last_policy(1);
  const VerifyResult ser = verify_strategy(TupleSpec::parse("1,1"), *pol, fam, 8, Exec::serial);
  const VerifyResult par = verify_strategy(TupleSpec::parse("1,1"), *pol, fam, 8, Exec::parallel);
  CHECK(ser.wins);
  CHECK(!ser.truncation_win);
  CHECK(ser.plays == par.plays);
  CHECK(ser.plays > 0);
  CHECK(par.wins);

  // a constant l = 1 loses: S answers {2} then {3,4}
  const VerifyResult lose = verify_strategy(TupleSpec::parse("1,1"), *constant_policy(1), fam, 8);
  CHECK(!lose.wins);
  REQUIRE(lose.counterexample);
  CHECK(fam.contains(result_set(*lose.counterexample)));
}

TEST_CASE("solver agrees with the test-side minimax") {
  struct Case {
    const char* spec;
    std::vector<Nat> orders;
  };
  const std::vector<Case> cases{
      {"1", {1}}, {"0,1", {0, 1}}, {"1,1", {1, 1}}, {"2", {2}}, {"0,0", {0, 0}}};
  std::vector<std::pair<std::string, FamilyOracle>> fams{{"S0", schreier_oracle(O("0"))},
                                                         {"S1", schreier_oracle(O("1"))},
                                                         {"S2", schreier_oracle(O("2"))}};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    fams.emplace_back("rand" + std::to_string(seed),
                      FamilyOracle::explicit_family(dichotomy::random_hereditary_family(6, seed)));
  }
  const Nat universe = 6;
  const Nat budget = 3;
  for (const auto& c : cases) {
    for (const auto& [name, fam] : fams) {
      CAPTURE(c.spec);
      CAPTURE(name);
      Minimax mm{[&fam](const FinSet& e) { return fam.contains(e); }, universe, budget};
      const bool want = mm.n_wins(c.orders);
      SolveOptions ser;
      ser.exec = Exec::serial;
      const SolveResult a = solve_game(TupleSpec::parse(c.spec), fam, universe, budget, ser);
      const SolveResult b = solve_game(TupleSpec::parse(c.spec), fam, universe, budget);
      CHECK((a.value != Value::s_wins) == want);
      CHECK(a.value == b.value);
      if (want) {
        auto strat = std::make_shared<const Strategy>(a.strategy);
        const VerifyResult v = verify_strategy(TupleSpec::parse(c.spec), *strategy_policy(strat),
                                               fam, universe, Exec::serial);
        CHECK(v.wins);
      }
    }
  }
}

TEST_CASE("solver soundness and non-triviality on S_1") {
  const auto s1 = schreier_oracle(O("1"));
  SolveOptions clean;
  clean.require_clean = true;
  auto strat = solve_N(TupleSpec::parse("1,1"), s1, 8, 8, clean);
  REQUIRE(strat);
  CHECK(!strat->truncation_win);
  auto sp = std::make_shared<const Strategy>(*strat);
  const VerifyResult v = verify_strategy(TupleSpec::parse("1,1"), *strategy_policy(sp), s1, 8);
  CHECK(v.wins);
  CHECK(!v.truncation_win);
  CHECK(!solve_N(TupleSpec::parse("1"), s1, 12, 6, clean));

  // JSON round trip keeps every decision
  const Strategy back = strategy_from_json(to_json(*strat));
  CHECK(back.decisions == strat->decisions);
  CHECK(back.spec == strat->spec);
  CHECK(back.fallback == strat->fallback);
}

TEST_CASE("state cap") {
  SolveOptions tiny;
  tiny.state_cap = 5;
  CHECK_THROWS_AS(solve_game(TupleSpec::parse("1,1"), schreier_oracle(O("1")), 8, 8, tiny),
                  CapExceeded);
}

TEST_CASE("clean stuck positions") {
  const auto s1 = schreier_oracle(O("1"));
  // {2,3} plus a block of at least 2 elements always leaves S_1
  CHECK(stuck_is_clean(s1, FinSet{2, 3}, 2, 4));
  CHECK(!stuck_is_clean(s1, FinSet{5}, 1, 5));
  CHECK(stuck_is_clean(s1, FinSet{1, 2}, 1, 2));
}

TEST_CASE("interactive session") {
  std::istringstream in("1\n2\n");
  std::ostringstream out;
  const Transcript t =
      interactive_play(TupleSpec::parse("1"), schreier_oracle(O("1")), Side::S, 6, 6, in, out);
  CHECK(t.status == Status::complete);
  CHECK(out.str().find("S wins") != std::string::npos);
  std::istringstream quit("quit\n");
  std::ostringstream out2;
  const Transcript q =
      interactive_play(TupleSpec::parse("1"), schreier_oracle(O("1")), Side::S, 6, 6, quit, out2);
  CHECK(q.status == Status::in_progress);
}
