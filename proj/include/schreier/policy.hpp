#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schreier/games.hpp"

namespace schreier::games {

struct DecisionContext {
  const std::vector<Move>& moves;  // global transcript so far
  const Ordinal& game;             // the game whose l is being chosen
  std::size_t decision_index;      // number of earlier N moves
};

// A deterministic rule for N. nullopt means the rule is undefined here.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<Nat> choose(const DecisionContext& ctx) const = 0;
  virtual std::string describe() const = 0;
  // The choice depends only on the game being decided, not on the history.
  virtual bool history_free() const { return false; }
};

using PolicyPtr = std::shared_ptr<const Policy>;

// Always l.
PolicyPtr constant_policy(Nat l);
// The i-th decision takes values[i]; undefined past the end.
PolicyPtr sequence_policy(std::vector<Nat> values);
// l = min of the last S block, or `first` before any block.
PolicyPtr min_last_policy(Nat first = 1);
// l chosen by the ordinal of the game being decided.
PolicyPtr per_game_policy(std::map<Ordinal, Nat> by_game, std::optional<Nat> fallback);
// Looks decisions up in a solved or loaded strategy.
PolicyPtr strategy_policy(std::shared_ptr<const Strategy> strat);

// Grammar:
//   const:L | seq:a,b,c | minlast[:L] | game:<ord>=L;<ord>=L;default=L
PolicyPtr parse_policy(std::string_view text);

}  // namespace schreier::games
