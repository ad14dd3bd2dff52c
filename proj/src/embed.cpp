#include "schreier/embed.hpp"

#include <algorithm>

#include "schreier/error.hpp"
#include "schreier/strategy.hpp"

namespace schreier::embed {

using games::Machine;
using games::Move;
using games::Turn;

namespace {

std::size_t n_moves(const std::vector<Move>& moves) {
  return static_cast<std::size_t>(std::count_if(
      moves.begin(), moves.end(), [](const Move& m) { return m.side == games::Side::N; }));
}

Nat choose(const games::Policy& strat, const Machine& m, const std::vector<Move>& moves) {
  const games::Obligation ob = m.obligation();
  auto l = strat.choose(games::DecisionContext{moves, ob.game, n_moves(moves)});
  if (!l || *l < 1) {
    throw PreconditionError("strategy " + strat.describe() + " is undefined at prefix \"" +
                            games::prefix_key(moves, moves.size()) + "\"");
  }
  return *l;
}

Nat demand(const games::Obligation& ob) { return ob.exact ? 1 : std::max<Nat>(ob.min_size, 1); }

// Replays d's moves on a fresh machine.
Machine replayed(const TupleSpec& spec, const std::vector<Move>& moves) {
  Machine m(spec);
  for (const auto& mv : moves) {
    m.play(mv);
  }
  return m;
}

}  // namespace

Decomposition decompose(const FinSet& e, const TupleSpec& spec, const games::Policy& strat) {
  Decomposition d;
  d.source = e;
  Machine m(spec);
  std::size_t pos = 0;
  while (!m.done()) {
    if (m.turn() == Turn::n_picks) {
      const Nat l = choose(strat, m, d.moves);
      m.play_n(l);
      d.moves.push_back(Move::n(l));
      continue;
    }
    if (pos == e.size()) {
      break;
    }
    const Nat need = demand(m.obligation());
    d.demanded_sizes.push_back(need);
    if (e.size() - pos < need) {
      d.remainder = FinSet::from_sorted_unchecked(
          std::vector<Nat>(e.begin() + static_cast<std::ptrdiff_t>(pos), e.end()));
      pos = e.size();
      break;
    }
    FinSet block = FinSet::from_sorted_unchecked(
        std::vector<Nat>(e.begin() + static_cast<std::ptrdiff_t>(pos),
                         e.begin() + static_cast<std::ptrdiff_t>(pos + need)));
    pos += need;
    m.play_s(block);
    d.blocks.push_back(block);
    d.moves.push_back(Move::s(std::move(block)));
  }
  d.game_complete = m.done();
  if (pos < e.size()) {
    d.overflow = FinSet::from_sorted_unchecked(
        std::vector<Nat>(e.begin() + static_cast<std::ptrdiff_t>(pos), e.end()));
    d.diagnostic = "game ended with " + d.overflow.to_string() +
                   " unconsumed: the strategy is not winning or E is not in the family";
  }
  d.exhausted = d.remainder.empty() && d.overflow.empty();
  return d;
}

FinSet complete_to_Ebar(const Decomposition& d, const TupleSpec& spec, const games::Policy& strat,
                        Nat universe_bound) {
  if (!d.overflow.empty()) {
    throw PreconditionError("cannot complete " + d.source.to_string() + ": " + d.diagnostic);
  }
  Machine m = replayed(spec, d.moves);
  std::vector<Move> moves = d.moves;
  FinSet pending = d.remainder;
  while (!m.done()) {
    if (m.turn() == Turn::n_picks) {
      const Nat l = choose(strat, m, moves);
      m.play_n(l);
      moves.push_back(Move::n(l));
      continue;
    }
    const Nat need = demand(m.obligation());
    std::vector<Nat> block = pending.elements();
    Nat next = block.empty() ? m.min_element() : block.back() + 1;
    while (block.size() < need) {
      block.push_back(next++);
    }
    pending = FinSet{};
    if (block.back() > universe_bound) {
      throw PreconditionError("completing " + d.source.to_string() + " needs elements up to " +
                              std::to_string(block.back()) + ", " +
                              std::to_string(block.back() - universe_bound) +
                              " beyond the universe bound " + std::to_string(universe_bound));
    }
    FinSet b = FinSet::from_sorted_unchecked(std::move(block));
    m.play_s(b);
    moves.push_back(Move::s(std::move(b)));
  }
  return m.result();
}

std::string family_fingerprint(const SetFamily& fam) {
  std::uint64_t h = 14695981039346656037ULL;
  fam.for_each([&](const FinSet& e) {
    for (unsigned char c : e.to_csv() + "\n") {
      h ^= c;
      h *= 1099511628211ULL;
    }
  });
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return "explicit:" + std::to_string(fam.size()) + ":" + hex;
}

EmbeddingCertificate build_embedding(const SetFamily& fam, const TupleSpec& spec,
                                     const games::Policy& strat, const std::string& strategy_id,
                                     Nat universe_bound, Exec exec) {
  if (!is_hereditary(fam)) {
    throw PreconditionError("the embedding pipeline needs a hereditary family");
  }
  EmbeddingCertificate cert;
  cert.family_id = family_fingerprint(fam);
  cert.members = fam.members();
  cert.spec = spec;
  cert.strategy_id = strategy_id;
  cert.universe_bound = universe_bound;

  const FamilyOracle oracle = FamilyOracle::explicit_family(fam);
  const games::VerifyResult vr = games::verify_strategy(spec, strat, oracle, universe_bound, exec);
  cert.strategy_wins = vr.wins;
  cert.strategy_truncation_win = vr.truncation_win;
  cert.strategy_counterexample = vr.counterexample;
  if (!vr.wins) {
    cert.failures.push_back(
        Failure{vr.counterexample ? games::result_set(*vr.counterexample) : FinSet{}, std::nullopt,
                std::nullopt, "strategy is not winning: S reaches a member of the family"});
    return cert;
  }

  // Complete every member; the headroom the completions need sets the budget.
  const std::size_t n = cert.members.size();
  std::vector<std::optional<FinSet>> ebars(n);
  std::vector<std::string> errors(n);
  Nat budget = 1;
  const Nat completion_bound = universe_bound * 4 + 64;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Decomposition d = decompose(cert.members[i], spec, strat);
      ebars[i] = complete_to_Ebar(d, spec, strat, completion_bound);
      if (!ebars[i]->empty()) {
        budget = std::max(budget, ebars[i]->max());
      }
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  }
  auto bound_strat = std::shared_ptr<const games::Policy>(&strat, [](const games::Policy*) {});
  const games::GameSpec bound{spec, bound_strat};
  cert.map = spreadmap::build(bound, budget);

  std::vector<std::optional<Failure>> results(n);
  auto check = [&](std::int64_t i) {
    const auto k = static_cast<std::size_t>(i);
    const FinSet& e = cert.members[k];
    if (!ebars[k]) {
      results[k] = Failure{e, std::nullopt, std::nullopt, errors[k]};
      return;
    }
    const FinSet img = cert.map.image(e);
    if (!tuple_member(spec, img)) {
      const FinSet img_bar = cert.map.image(*ebars[k]);
      results[k] = Failure{e, ebars[k], img,
                           std::string("image outside the tuple family (image of the completion ") +
                               (tuple_member(spec, img_bar) ? "inside" : "outside") + ")"};
    }
  };
  const std::int64_t total = static_cast<std::int64_t>(n);
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < total; ++i) {
      check(i);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < total; ++i) {
      check(i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) {
      cert.failures.push_back(std::move(*results[i]));
    } else {
      ++cert.verified_members;
    }
  }
  return cert;
}

Json to_json(const EmbeddingCertificate& c) {
  Json j;
  j["kind"] = "embedding_certificate";
  j["family"] = c.family_id;
  Json members = Json::array();
  for (const auto& e : c.members) {
    members.push_back(e.elements());
  }
  j["members"] = std::move(members);
  j["spec"] = c.spec.to_string();
  j["strategy"] = c.strategy_id;
  j["universe_bound"] = c.universe_bound;
  Json sc;
  sc["wins"] = c.strategy_wins;
  sc["truncation_win"] = c.strategy_truncation_win;
  sc["counterexample"] =
      c.strategy_counterexample ? games::to_json(*c.strategy_counterexample) : Json(nullptr);
  j["strategy_check"] = std::move(sc);
  j["budget"] = c.map.budget;
  j["N"] = c.map.table;
  j["verified_members"] = c.verified_members;
  Json failures = Json::array();
  for (const auto& f : c.failures) {
    Json x;
    x["E"] = f.e.elements();
    x["Ebar"] = f.ebar ? Json(f.ebar->elements()) : Json(nullptr);
    x["image"] = f.image ? Json(f.image->elements()) : Json(nullptr);
    x["reason"] = f.reason;
    failures.push_back(std::move(x));
  }
  j["failures"] = std::move(failures);
  j["accepted"] = c.accepted();
  return j;
}

CertificateCheck verify_certificate(const Json& cert) {
  CertificateCheck r;
  try {
    const TupleSpec spec = TupleSpec::parse(cert.at("spec").get<std::string>());
    const auto table = cert.at("N").get<std::vector<Nat>>();
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (table[i] <= table[i - 1]) {
        r.problems.push_back("N is not strictly increasing at position " + std::to_string(i + 1));
      }
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] < i + 1) {
        r.problems.push_back("N(" + std::to_string(i + 1) + ") < " + std::to_string(i + 1));
      }
    }
    if (!r.problems.empty()) {
      r.ok = false;
      return r;
    }
    const SeqView n(table, table.empty() ? 0 : table.back());
    for (const auto& m : cert.at("members")) {
      const FinSet e(m.get<std::vector<Nat>>());
      ++r.checked;
      if (!e.empty() && e.max() > table.size()) {
        r.problems.push_back("member " + e.to_string() + " indexes beyond N");
        continue;
      }
      const FinSet img = n.image(e);
      if (!tuple_member(spec, img)) {
        r.problems.push_back("n_E = " + img.to_string() + " for E = " + e.to_string() +
                             " lies outside the tuple family " + spec.to_string());
      }
    }
    if (!cert.at("failures").empty()) {
      r.problems.push_back("certificate records " + std::to_string(cert.at("failures").size()) +
                           " failures");
    }
    if (!cert.at("strategy_check").at("wins").get<bool>()) {
      r.problems.push_back("certificate records a non-winning strategy");
    }
  } catch (const Json::exception& e) {
    r.problems.push_back(std::string("malformed certificate: ") + e.what());
  } catch (const Error& e) {
    r.problems.push_back(std::string("malformed certificate: ") + e.what());
  }
  r.ok = r.problems.empty();
  return r;
}

}  // namespace schreier::embed
