#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schreier/error.hpp"
#include "schreier/exec.hpp"
#include "schreier/family.hpp"
#include "schreier/finset.hpp"
#include "schreier/ordinal.hpp"
#include "schreier/schreier.hpp"

namespace schreier::games {

class Policy;

// An (a1,...,ar)-game, optionally bound by a policy fixing every choice of N.
struct GameSpec {
  TupleSpec tuple;
  std::shared_ptr<const Policy> policy;
};

enum class Side { N, S };

struct Move {
  Side side = Side::N;
  Nat l = 0;     // N moves
  FinSet block;  // S moves

  static Move n(Nat l) { return Move{Side::N, l, {}}; }
  static Move s(FinSet b) { return Move{Side::S, 0, std::move(b)}; }
  std::string to_string() const;  // "N:2" / "S:{4,5}"
  friend bool operator==(const Move&, const Move&) = default;
};

enum class Turn { n_picks, s_picks, done };

struct Obligation {
  Turn turn = Turn::done;
  Nat min_size = 0;                 // S: |E| >= min_size (== 1 when exact)
  Nat min_element = 1;              // S: E > previous blocks
  bool exact = false;               // S must pick a singleton (0-game)
  Ordinal game;                     // N: the game whose l is being chosen
  std::vector<std::string> frames;  // pending tasks, innermost first
  std::string to_string() const;
};

// One pending task of the unfolded game.
struct Task {
  enum class Kind { game, block };
  Kind kind = Kind::game;
  Ordinal alpha;  // game: play the alpha-game `count` more times
  Nat count = 0;
  Nat min_size = 0;  // block
  bool exact = false;
  friend bool operator==(const Task&, const Task&) = default;
};

// Stack machine unfolding the recursive game definitions:
//   0-game:        S picks a singleton
//   1-game:        N picks l, S picks E with |E| >= l
//   (b+1)-game:    N picks l, then the b-game is played l times (b >= 1)
//   limit a-game:  N picks l, then the a[l]-game is played
//   tuple game:    the a1-game, then the a2-game, ...
class Machine {
 public:
  explicit Machine(const TupleSpec& spec);

  Obligation obligation() const;
  Turn turn() const;
  bool done() const { return turn() == Turn::done; }

  // Throw IllegalMove (without an index) on violations.
  void play_n(Nat l);
  void play_s(const FinSet& block);
  void play(const Move& m);

  const std::vector<Task>& stack() const { return stack_; }
  // Stack height right after the last move, before the next obligation was
  // unfolded. Used to detect where a sub-game instance ends.
  std::size_t raw_depth() const { return raw_depth_; }
  // Stack height at which the instance about to start at the top ends.
  std::size_t instance_end_depth() const;
  Nat min_element() const { return next_min_; }
  FinSet result() const { return FinSet::from_sorted_unchecked(union_); }
  const std::vector<Nat>& union_elements() const { return union_; }
  // Canonical encoding of the pending tasks and the next admissible element.
  std::string state_key() const;

 private:
  void settle();

  std::vector<Task> stack_;
  std::vector<Nat> union_;
  Nat next_min_ = 1;
  std::size_t raw_depth_ = 0;
};

class IllegalMove : public Error {
 public:
  IllegalMove(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : Error(what), index_(index) {}
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

enum class Status { in_progress, complete };

struct Transcript {
  TupleSpec spec;
  std::vector<Move> moves;
  std::vector<Obligation> obligations;  // obligation in force before each move
  Status status = Status::in_progress;

  std::vector<FinSet> blocks() const;
};

// Replays moves, recording obligations. Throws IllegalMove carrying the
// 0-based index of the first offending move.
Transcript replay(const TupleSpec& spec, const std::vector<Move>& moves);
Obligation next_obligation(const GameSpec& spec, const Transcript& t);
// Union of the S blocks of a complete transcript.
FinSet result_set(const Transcript& t);

// Canonical text of a move prefix ("N1;S2,3;") and its 64-bit FNV-1a hash
// rendered as 16 hex digits.
std::string prefix_key(const std::vector<Move>& moves, std::size_t count);
std::string prefix_hash(const std::vector<Move>& moves, std::size_t count);

// Complete plays of the bound game where every S block has exactly the
// obligated size and lies in [1, budget], in lexicographic order of moves.
// Returning false from the callback stops the enumeration.
void for_each_minimal_play(const GameSpec& spec, Nat budget,
                           const std::function<bool(const Transcript&)>& fn);
std::vector<Transcript> minimal_plays(const GameSpec& spec, Nat budget);
// Minimal continuations from m: N follows the policy (seeing the global
// prefix `moves`), S picks blocks of exactly the obligated size inside
// [.., budget]. Stops a line when the stack height after an S move drops to
// end_depth or the game ends, and calls fn there with the machine and the
// extended prefix. Returns false when fn asked to stop.
bool for_each_minimal_continuation(
    const Machine& m, std::vector<Move>& moves, const Policy& policy, Nat budget,
    std::size_t end_depth, const std::function<bool(const Machine&, const std::vector<Move>&)>& fn);

// Outcome of a position under optimal play, worst for N first.
enum class Value { s_wins = 0, truncation = 1, clean = 2 };
std::string to_string(Value v);

struct Strategy {
  TupleSpec spec;
  std::string family;
  Nat universe_bound = 0;
  Nat n_budget = 0;
  // prefix_hash -> choice of N at that decision point.
  std::vector<std::pair<std::string, Nat>> decisions;  // sorted by hash
  std::optional<Nat> fallback;                         // used where no entry exists
  // Human-readable (prefix_key, choice) pairs in discovery order.
  std::vector<std::pair<std::string, Nat>> trace;
  bool truncation_win = false;

  std::optional<Nat> lookup(const std::string& hash) const;
};

struct SolveOptions {
  std::size_t state_cap = 20'000'000;
  bool require_clean = false;
  Exec exec = Exec::parallel;
};

struct SolveResult {
  Value value = Value::s_wins;
  Strategy strategy;  // N's best responses (meaningful for every value)
  std::size_t states = 0;
};

// Backward induction over N choices in [1, n_budget] and S blocks inside
// [1, universe_bound]. A stuck S is a win for N; it is clean when the
// position already certifies the result outside fam (see stuck_is_clean),
// and a truncation win otherwise.
SolveResult solve_game(const TupleSpec& spec, const FamilyOracle& fam, Nat universe_bound,
                       Nat n_budget, const SolveOptions& opts = {});
// The strategy when N wins (cleanly, if required), none when S wins.
std::optional<Strategy> solve_N(const TupleSpec& spec, const FamilyOracle& fam, Nat universe_bound,
                                Nat n_budget, const SolveOptions& opts = {});

// Whether S being unable to move at position (result so far `a`, next block
// of at least `min_size` elements above max a) already forces every
// completion on N outside fam. Exact for hereditary families with finite
// support, finite-order Schreier and tuple oracles, and results already
// outside a hereditary fam; false otherwise.
bool stuck_is_clean(const FamilyOracle& fam, const FinSet& a, Nat min_size, Nat universe_bound);

struct VerifyResult {
  bool wins = true;
  std::optional<Transcript> counterexample;
  bool truncation_win = false;
  std::uint64_t plays = 0;  // complete plays examined
  std::uint64_t stuck_branches = 0;
  std::uint64_t truncated_branches = 0;  // stuck branches not certified clean
};

// Exhaustively plays every S response inside [1, universe_bound] against the
// policy. Throws PreconditionError when the policy is undefined at a
// reachable decision point.
VerifyResult verify_strategy(const TupleSpec& spec, const Policy& strat, const FamilyOracle& fam,
                             Nat universe_bound, Exec exec = Exec::parallel);

// Terminal play. The machine side uses the solver for N and the least
// family-preserving block for S. "quit" ends the session early.
Transcript interactive_play(const TupleSpec& spec, const FamilyOracle& fam, Side machine_side,
                            Nat universe_bound, Nat n_budget, std::istream& in, std::ostream& out);

}  // namespace schreier::games
