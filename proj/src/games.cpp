#include "schreier/games.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "schreier/error.hpp"
#include "schreier/policy.hpp"

namespace schreier::games {

std::string Move::to_string() const {
  return side == Side::N ? "N:" + std::to_string(l) : "S:" + block.to_string();
}

std::string Obligation::to_string() const {
  switch (turn) {
    case Turn::done:
      return "done";
    case Turn::n_picks:
      return "N picks l for the " + game.to_string() + "-game";
    case Turn::s_picks:
      return exact ? "S picks a singleton {n} with n >= " + std::to_string(min_element)
                   : "S picks E with |E| >= " + std::to_string(min_size) +
                         " and min E >= " + std::to_string(min_element);
  }
  return "";
}

std::string to_string(Value v) {
  switch (v) {
    case Value::s_wins:
      return "s_wins";
    case Value::truncation:
      return "truncation_win";
    case Value::clean:
      return "clean";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Machine

Machine::Machine(const TupleSpec& spec) {
  for (auto it = spec.ordinals.rbegin(); it != spec.ordinals.rend(); ++it) {
    stack_.push_back(Task{Task::Kind::game, *it, 1, 0, false});
  }
  raw_depth_ = stack_.size();
  settle();
}

void Machine::settle() {
  while (!stack_.empty()) {
    Task& top = stack_.back();
    if (top.kind == Task::Kind::block) {
      return;
    }
    if (top.count == 0) {
      stack_.pop_back();
      continue;
    }
    if (!top.alpha.is_zero()) {
      return;
    }
    if (--top.count == 0) {
      stack_.pop_back();
    }
    stack_.push_back(Task{Task::Kind::block, Ordinal{}, 0, 1, true});
    return;
  }
}

Turn Machine::turn() const {
  if (stack_.empty()) {
    return Turn::done;
  }
  return stack_.back().kind == Task::Kind::block ? Turn::s_picks : Turn::n_picks;
}

Obligation Machine::obligation() const {
  Obligation ob;
  ob.turn = turn();
  ob.min_element = next_min_;
  if (ob.turn == Turn::n_picks) {
    ob.game = stack_.back().alpha;
  } else if (ob.turn == Turn::s_picks) {
    ob.min_size = stack_.back().min_size;
    ob.exact = stack_.back().exact;
  }
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
    if (it->kind == Task::Kind::block) {
      ob.frames.push_back(it->exact ? "singleton" : "block >= " + std::to_string(it->min_size));
    } else {
      ob.frames.push_back(it->alpha.to_string() + "-game x" + std::to_string(it->count));
    }
  }
  return ob;
}

void Machine::play_n(Nat l) {
  if (turn() != Turn::n_picks) {
    throw IllegalMove("N moved but it is not N's turn");
  }
  if (l < 1) {
    throw IllegalMove("N must pick l >= 1");
  }
  const Ordinal alpha = stack_.back().alpha;
  if (--stack_.back().count == 0) {
    stack_.pop_back();
  }
  const Classification c = classify(alpha);
  if (alpha == Ordinal::nat(1)) {
    stack_.push_back(Task{Task::Kind::block, Ordinal{}, 0, l, false});
  } else if (c.kind == OrdinalKind::successor) {
    stack_.push_back(Task{Task::Kind::game, c.predecessor, l, 0, false});
  } else {
    stack_.push_back(Task{Task::Kind::game, fundamental(alpha, l), 1, 0, false});
  }
  raw_depth_ = stack_.size();
  settle();
}

void Machine::play_s(const FinSet& block) {
  if (turn() != Turn::s_picks) {
    throw IllegalMove("S moved but it is not S's turn");
  }
  const Task& top = stack_.back();
  if (block.empty()) {
    throw IllegalMove("S must pick a nonempty set");
  }
  if (block.min() < next_min_) {
    throw IllegalMove("block " + block.to_string() +
                      " must lie above the previous blocks (min >= " + std::to_string(next_min_) +
                      ")");
  }
  if (top.exact && block.size() != 1) {
    throw IllegalMove("block " + block.to_string() + " must be a singleton");
  }
  if (block.size() < top.min_size) {
    throw IllegalMove("block " + block.to_string() + " has " + std::to_string(block.size()) +
                      " elements, needs at least " + std::to_string(top.min_size));
  }
  stack_.pop_back();
  union_.insert(union_.end(), block.begin(), block.end());
  next_min_ = block.max() + 1;
  raw_depth_ = stack_.size();
  settle();
}

void Machine::play(const Move& m) {
  if (m.side == Side::N) {
    play_n(m.l);
  } else {
    play_s(m.block);
  }
}

std::size_t Machine::instance_end_depth() const {
  if (stack_.empty()) {
    return 0;
  }
  const Task& top = stack_.back();
  if (top.kind == Task::Kind::game && top.count > 1) {
    return stack_.size();
  }
  return stack_.size() - 1;
}

std::string Machine::state_key() const {
  std::string key;
  for (const auto& t : stack_) {
    if (t.kind == Task::Kind::block) {
      key += "b" + std::to_string(t.min_size) + (t.exact ? "!" : "") + ";";
    } else {
      key += "g" + t.alpha.to_string() + "x" + std::to_string(t.count) + ";";
    }
  }
  return key + "@" + std::to_string(next_min_);
}

namespace {

bool n_decisions_remain(const Machine& m) {
  return std::any_of(m.stack().begin(), m.stack().end(), [](const Task& t) {
    return t.kind == Task::Kind::game && !t.alpha.is_zero() && t.count > 0;
  });
}

std::size_t count_n_moves(const std::vector<Move>& moves) {
  return static_cast<std::size_t>(
      std::count_if(moves.begin(), moves.end(), [](const Move& m) { return m.side == Side::N; }));
}

// Calls fn on every combination of `size` integers in [lo, hi], lexicographically.
template <typename Fn>
bool for_each_combination(Nat lo, Nat hi, Nat size, Fn&& fn) {
  if (size == 0 || hi < lo || hi - lo + 1 < size) {
    return true;
  }
  std::vector<Nat> c(size);
  for (Nat i = 0; i < size; ++i) {
    c[i] = lo + i;
  }
  while (true) {
    if (!fn(FinSet::from_sorted_unchecked(c))) {
      return false;
    }
    std::size_t i = size;
    while (i > 0 && c[i - 1] == hi - (size - i)) {
      --i;
    }
    if (i == 0) {
      return true;
    }
    ++c[i - 1];
    for (std::size_t j = i; j < size; ++j) {
      c[j] = c[j - 1] + 1;
    }
  }
}

// Every legal block for the current S obligation inside [.., bound], by
// increasing size and then lexicographically.
template <typename Fn>
bool for_each_block(const Obligation& ob, Nat bound, Fn&& fn) {
  if (ob.min_element > bound) {
    return true;
  }
  const Nat room = bound - ob.min_element + 1;
  const Nat hi_size = ob.exact ? 1 : room;
  for (Nat s = std::max<Nat>(ob.min_size, 1); s <= hi_size; ++s) {
    if (!for_each_combination(ob.min_element, bound, s, fn)) {
      return false;
    }
  }
  return true;
}

bool s_can_move(const Obligation& ob, Nat bound) {
  return ob.min_element <= bound && bound - ob.min_element + 1 >= std::max<Nat>(ob.min_size, 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Transcripts

std::vector<FinSet> Transcript::blocks() const {
  std::vector<FinSet> out;
  for (const auto& m : moves) {
    if (m.side == Side::S) {
      out.push_back(m.block);
    }
  }
  return out;
}

Transcript replay(const TupleSpec& spec, const std::vector<Move>& moves) {
  Transcript t;
  t.spec = spec;
  Machine m(spec);
  for (std::size_t i = 0; i < moves.size(); ++i) {
    t.obligations.push_back(m.obligation());
    try {
      m.play(moves[i]);
    } catch (const IllegalMove& e) {
      throw IllegalMove(
          "move " + std::to_string(i) + " (" + moves[i].to_string() + "): " + e.what(), i);
    }
    t.moves.push_back(moves[i]);
  }
  t.status = m.done() ? Status::complete : Status::in_progress;
  return t;
}

Obligation next_obligation(const GameSpec& spec, const Transcript& t) {
  Machine m(spec.tuple);
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    try {
      m.play(t.moves[i]);
    } catch (const IllegalMove& e) {
      throw IllegalMove(
          "move " + std::to_string(i) + " (" + t.moves[i].to_string() + "): " + e.what(), i);
    }
  }
  return m.obligation();
}

FinSet result_set(const Transcript& t) {
  if (t.status != Status::complete) {
    throw PreconditionError("result_set needs a complete transcript");
  }
  auto blocks = t.blocks();
  return concat_blocks(blocks);
}

std::string prefix_key(const std::vector<Move>& moves, std::size_t count) {
  std::string key;
  for (std::size_t i = 0; i < count && i < moves.size(); ++i) {
    if (moves[i].side == Side::N) {
      key += "N" + std::to_string(moves[i].l) + ";";
    } else {
      key += "S" + moves[i].block.to_csv() + ";";
    }
  }
  return key;
}

std::string prefix_hash(const std::vector<Move>& moves, std::size_t count) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : prefix_key(moves, count)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimal plays

bool for_each_minimal_continuation(
    const Machine& m, std::vector<Move>& moves, const Policy& policy, Nat budget,
    std::size_t end_depth,
    const std::function<bool(const Machine&, const std::vector<Move>&)>& fn) {
  const Obligation ob = m.obligation();
  if (ob.turn == Turn::done) {
    return fn(m, moves);
  }
  if (ob.turn == Turn::n_picks) {
    auto l = policy.choose(DecisionContext{moves, ob.game, count_n_moves(moves)});
    if (!l || *l < 1) {
      throw PreconditionError("policy " + policy.describe() + " is undefined at prefix \"" +
                              prefix_key(moves, moves.size()) + "\"");
    }
    Machine next = m;
    next.play_n(*l);
    moves.push_back(Move::n(*l));
    const bool go = for_each_minimal_continuation(next, moves, policy, budget, end_depth, fn);
    moves.pop_back();
    return go;
  }
  const Nat size = ob.exact ? 1 : std::max<Nat>(ob.min_size, 1);
  return for_each_combination(ob.min_element, budget, size, [&](FinSet block) {
    Machine next = m;
    next.play_s(block);
    moves.push_back(Move::s(std::move(block)));
    bool go;
    if (next.raw_depth() <= end_depth || next.done()) {
      go = fn(next, moves);
    } else {
      go = for_each_minimal_continuation(next, moves, policy, budget, end_depth, fn);
    }
    moves.pop_back();
    return go;
  });
}

void for_each_minimal_play(const GameSpec& spec, Nat budget,
                           const std::function<bool(const Transcript&)>& fn) {
  if (!spec.policy) {
    throw PreconditionError("minimal plays need a bound game (a policy for N)");
  }
  Machine root(spec.tuple);
  std::vector<Move> moves;
  for_each_minimal_continuation(
      root, moves, *spec.policy, budget, 0,
      [&](const Machine&, const std::vector<Move>& mv) { return fn(replay(spec.tuple, mv)); });
}

std::vector<Transcript> minimal_plays(const GameSpec& spec, Nat budget) {
  std::vector<Transcript> out;
  for_each_minimal_play(spec, budget, [&](const Transcript& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Stuck positions

namespace {

FinSet far_completion(const FinSet& a, Nat min_size) {
  const Nat base = (a.empty() ? 0 : a.max()) + min_size;
  std::vector<Nat> v = a.elements();
  for (Nat i = 1; i <= min_size; ++i) {
    v.push_back(base + i);
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

// Whether some B above max a with |B| = m keeps a u B in S_alpha. For finite
// alpha the greedy decomposition of a u B does not depend on the values of B
// once they exceed max a + m (every level opened inside B has capacity above
// m), and by spreading any admissible B can be pushed there.
std::optional<bool> far_member(const Ordinal& alpha, const FinSet& a, Nat m) {
  if (alpha.is_finite()) {
    return member(alpha, far_completion(a, m));
  }
  if (alpha.is_limit()) {
    if (a.empty()) {
      return true;
    }
    for (Nat n = 1; n <= a.min(); ++n) {
      auto r = far_member(fundamental(alpha, n), a, m);
      if (!r) {
        return std::nullopt;
      }
      if (*r) {
        return true;
      }
    }
    return false;
  }
  return std::nullopt;
}

}  // namespace

bool stuck_is_clean(const FamilyOracle& fam, const FinSet& a, Nat min_size, Nat universe_bound) {
  if (fam.known_hereditary() && !fam.contains(a)) {
    return true;
  }
  if (auto s = fam.support_bound(); s && *s <= universe_bound && fam.known_hereditary()) {
    return true;  // every completion needs an element above the universe
  }
  const Nat m = std::max<Nat>(min_size, 1);
  if (auto alpha = oracle_ordinal(fam)) {
    auto r = far_member(*alpha, a, m);
    return r.has_value() && !*r;
  }
  if (auto spec = oracle_tuple(fam)) {
    const bool all_finite = std::all_of(spec->ordinals.begin(), spec->ordinals.end(),
                                        [](const Ordinal& o) { return o.is_finite(); });
    if (all_finite) {
      return !tuple_member(*spec, far_completion(a, m));
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

class Solver {
 public:
  Solver(const FamilyOracle& fam, Nat bound, Nat n_budget, std::size_t cap)
      : fam_(fam),
        bound_(bound),
        n_budget_(n_budget),
        cap_(cap),
        hereditary_(fam.known_hereditary()) {}

  Value value(const Machine& m) {
    const FinSet a = m.result();
    if (m.done()) {
      return fam_.contains(a) ? Value::s_wins : Value::clean;
    }
    if (hereditary_ && !fam_.contains(a)) {
      return Value::clean;
    }
    std::string key = m.state_key() + "|" + a.to_csv();
    if (auto it = memo_.find(key); it != memo_.end()) {
      return it->second;
    }
    const Obligation ob = m.obligation();
    Value v;
    if (ob.turn == Turn::n_picks) {
      v = Value::s_wins;
      for (Nat l = 1; l <= n_budget_ && v != Value::clean; ++l) {
        Machine next = m;
        next.play_n(l);
        v = std::max(v, value(next));
      }
    } else if (!s_can_move(ob, bound_)) {
      v = stuck_is_clean(fam_, a, ob.min_size, bound_) ? Value::clean : Value::truncation;
    } else {
      v = Value::clean;
      for_each_block(ob, bound_, [&](const FinSet& block) {
        Machine next = m;
        next.play_s(block);
        v = std::min(v, value(next));
        return v != Value::s_wins;
      });
    }
    if (memo_.size() >= cap_) {
      throw CapExceeded("game solver state cap of " + std::to_string(cap_) + " exceeded");
    }
    memo_.emplace(std::move(key), v);
    return v;
  }

  Nat best_choice(const Machine& m) {
    Value best = Value::s_wins;
    Nat arg = 1;
    for (Nat l = 1; l <= n_budget_; ++l) {
      Machine next = m;
      next.play_n(l);
      const Value v = value(next);
      if (v > best) {
        best = v;
        arg = l;
        if (best == Value::clean) {
          break;
        }
      }
    }
    return arg;
  }

  std::unordered_map<std::string, Value>& memo() { return memo_; }
  bool hereditary() const { return hereditary_; }
  const FamilyOracle& fam() const { return fam_; }
  Nat bound() const { return bound_; }

 private:
  const FamilyOracle& fam_;
  Nat bound_;
  Nat n_budget_;
  std::size_t cap_;
  bool hereditary_;
  std::unordered_map<std::string, Value> memo_;
};

// Positions a few plies below the root, used to seed the parallel solve.
void collect_frontier(const Machine& m, Nat bound, Nat n_budget, int depth,
                      std::vector<Machine>& out) {
  if (depth == 0 || m.done()) {
    out.push_back(m);
    return;
  }
  const Obligation ob = m.obligation();
  if (ob.turn == Turn::n_picks) {
    for (Nat l = 1; l <= n_budget; ++l) {
      Machine next = m;
      next.play_n(l);
      collect_frontier(next, bound, n_budget, depth - 1, out);
    }
  } else {
    for_each_block(ob, bound, [&](const FinSet& block) {
      Machine next = m;
      next.play_s(block);
      collect_frontier(next, bound, n_budget, depth - 1, out);
      return true;
    });
  }
}

void extract(Solver& solver, const Machine& m, std::vector<Move>& moves, Strategy& strat,
             std::unordered_map<std::string, Nat>& seen) {
  if (m.done() || !n_decisions_remain(m)) {
    return;
  }
  if (solver.hereditary() && !solver.fam().contains(m.result())) {
    return;  // every continuation wins; the fallback choice suffices
  }
  const Obligation ob = m.obligation();
  if (ob.turn == Turn::n_picks) {
    const Nat l = solver.best_choice(m);
    const std::string h = prefix_hash(moves, moves.size());
    auto [it, inserted] = seen.emplace(h, l);
    if (!inserted && it->second != l) {
      throw Error("prefix hash collision at " + prefix_key(moves, moves.size()));
    }
    if (inserted) {
      strat.trace.emplace_back(prefix_key(moves, moves.size()), l);
    }
    Machine next = m;
    next.play_n(l);
    moves.push_back(Move::n(l));
    extract(solver, next, moves, strat, seen);
    moves.pop_back();
    return;
  }
  for_each_block(ob, solver.bound(), [&](const FinSet& block) {
    Machine next = m;
    next.play_s(block);
    moves.push_back(Move::s(block));
    extract(solver, next, moves, strat, seen);
    moves.pop_back();
    return true;
  });
}

}  // namespace

std::optional<Nat> Strategy::lookup(const std::string& hash) const {
  auto it = std::lower_bound(decisions.begin(), decisions.end(), hash,
                             [](const auto& e, const std::string& h) { return e.first < h; });
  if (it != decisions.end() && it->first == hash) {
    return it->second;
  }
  return fallback;
}

SolveResult solve_game(const TupleSpec& spec, const FamilyOracle& fam, Nat universe_bound,
                       Nat n_budget, const SolveOptions& opts) {
  if (n_budget < 1) {
    throw PreconditionError("n_budget must be >= 1");
  }
  Solver solver(fam, universe_bound, n_budget, opts.state_cap);
  const Machine root(spec);
  if (opts.exec == Exec::parallel) {
    std::vector<Machine> frontier;
    collect_frontier(root, universe_bound, n_budget, 2, frontier);
    const std::int64_t n = static_cast<std::int64_t>(frontier.size());
    std::vector<std::unordered_map<std::string, Value>> memos(frontier.size());
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      Solver local(fam, universe_bound, n_budget, opts.state_cap);
      try {
        local.value(frontier[static_cast<std::size_t>(i)]);
      } catch (const CapExceeded& e) {
#pragma omp critical(schreier_solver_error)
        failure = e.what();
      }
      memos[static_cast<std::size_t>(i)] = std::move(local.memo());
    }
    if (!failure.empty()) {
      throw CapExceeded(failure);
    }
    for (auto& mm : memos) {
      solver.memo().insert(mm.begin(), mm.end());
      mm.clear();
    }
  }
  SolveResult res;
  res.value = solver.value(root);
  res.strategy.spec = spec;
  res.strategy.family = fam.describe();
  res.strategy.universe_bound = universe_bound;
  res.strategy.n_budget = n_budget;
  res.strategy.fallback = 1;
  res.strategy.truncation_win = res.value == Value::truncation;
  std::vector<Move> moves;
  std::unordered_map<std::string, Nat> seen;
  extract(solver, root, moves, res.strategy, seen);
  res.strategy.decisions.assign(seen.begin(), seen.end());
  std::sort(res.strategy.decisions.begin(), res.strategy.decisions.end());
  res.states = solver.memo().size();
  return res;
}

std::optional<Strategy> solve_N(const TupleSpec& spec, const FamilyOracle& fam, Nat universe_bound,
                                Nat n_budget, const SolveOptions& opts) {
  SolveResult r = solve_game(spec, fam, universe_bound, n_budget, opts);
  if (r.value == Value::s_wins || (opts.require_clean && r.value != Value::clean)) {
    return std::nullopt;
  }
  return std::move(r.strategy);
}

// ---------------------------------------------------------------------------
// Verification

namespace {

struct VerifyWalk {
  const Policy& policy;
  const FamilyOracle& fam;
  Nat bound;
  bool hereditary;
  TupleSpec spec;

  // Returns false once a counterexample is recorded.
  bool run(const Machine& m, std::vector<Move>& moves, VerifyResult& r) const {
    const FinSet a = m.result();
    if (m.done()) {
      ++r.plays;
      if (fam.contains(a)) {
        r.wins = false;
        r.counterexample = replay(spec, moves);
        return false;
      }
      return true;
    }
    if (hereditary && !fam.contains(a)) {
      return true;
    }
    const Obligation ob = m.obligation();
    if (ob.turn == Turn::n_picks) {
      auto l = policy.choose(DecisionContext{moves, ob.game, count_n_moves(moves)});
      if (!l || *l < 1) {
        throw PreconditionError("strategy undefined at reachable prefix \"" +
                                prefix_key(moves, moves.size()) + "\"");
      }
      Machine next = m;
      next.play_n(*l);
      moves.push_back(Move::n(*l));
      const bool go = run(next, moves, r);
      moves.pop_back();
      return go;
    }
    if (!s_can_move(ob, bound)) {
      ++r.stuck_branches;
      if (!stuck_is_clean(fam, a, ob.min_size, bound)) {
        ++r.truncated_branches;
        r.truncation_win = true;
      }
      return true;
    }
    return for_each_block(ob, bound, [&](const FinSet& block) {
      Machine next = m;
      next.play_s(block);
      moves.push_back(Move::s(block));
      const bool go = run(next, moves, r);
      moves.pop_back();
      return go;
    });
  }
};

void merge(VerifyResult& into, const VerifyResult& part) {
  into.plays += part.plays;
  into.stuck_branches += part.stuck_branches;
  into.truncated_branches += part.truncated_branches;
  into.truncation_win = into.truncation_win || part.truncation_win;
  if (!part.wins && into.wins) {
    into.wins = false;
    into.counterexample = part.counterexample;
  }
}

}  // namespace

VerifyResult verify_strategy(const TupleSpec& spec, const Policy& strat, const FamilyOracle& fam,
                             Nat universe_bound, Exec exec) {
  VerifyWalk walk{strat, fam, universe_bound, fam.known_hereditary(), spec};
  // Follow N's forced moves to the first S decision; its branches are the
  // independent units of work.
  Machine m(spec);
  std::vector<Move> moves;
  while (m.turn() == Turn::n_picks) {
    const Obligation ob = m.obligation();
    auto l = strat.choose(DecisionContext{moves, ob.game, count_n_moves(moves)});
    if (!l || *l < 1) {
      throw PreconditionError("strategy undefined at reachable prefix \"" +
                              prefix_key(moves, moves.size()) + "\"");
    }
    m.play_n(*l);
    moves.push_back(Move::n(*l));
  }
  VerifyResult total;
  if (m.turn() != Turn::s_picks || !s_can_move(m.obligation(), universe_bound)) {
    walk.run(m, moves, total);
    return total;
  }
  std::vector<FinSet> firsts;
  for_each_block(m.obligation(), universe_bound, [&](const FinSet& b) {
    firsts.push_back(b);
    return true;
  });
  const std::int64_t n = static_cast<std::int64_t>(firsts.size());
  std::vector<VerifyResult> parts(firsts.size());
  auto branch = [&](std::int64_t i) {
    Machine next = m;
    std::vector<Move> mv = moves;
    next.play_s(firsts[static_cast<std::size_t>(i)]);
    mv.push_back(Move::s(firsts[static_cast<std::size_t>(i)]));
    walk.run(next, mv, parts[static_cast<std::size_t>(i)]);
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      branch(i);
    }
  } else {
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        branch(i);
      } catch (const Error& e) {
#pragma omp critical(schreier_verify_error)
        if (failure.empty()) {
          failure = e.what();
        }
      }
    }
    if (!failure.empty()) {
      throw PreconditionError(failure);
    }
  }
  for (const auto& p : parts) {
    merge(total, p);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Interactive play

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

FinSet machine_s_block(const Obligation& ob, const FamilyOracle& fam, const FinSet& so_far,
                       Nat bound) {
  std::vector<FinSet> options;
  for_each_block(ob, bound, [&](const FinSet& b) {
    options.push_back(b);
    return options.size() < 200000;
  });
  std::sort(options.begin(), options.end());
  for (const auto& b : options) {
    std::vector<Nat> u = so_far.elements();
    u.insert(u.end(), b.begin(), b.end());
    if (fam.contains(FinSet::from_sorted_unchecked(std::move(u)))) {
      return b;
    }
  }
  return options.front();
}

}  // namespace

Transcript interactive_play(const TupleSpec& spec, const FamilyOracle& fam, Side machine_side,
                            Nat universe_bound, Nat n_budget, std::istream& in, std::ostream& out) {
  Machine m(spec);
  std::vector<Move> moves;
  std::optional<Solver> solver;
  if (machine_side == Side::N) {
    solver.emplace(fam, universe_bound, n_budget, SolveOptions{}.state_cap);
  }
  out << "game " << spec.to_string() << " on " << fam.describe() << ", universe [1,"
      << universe_bound << "]; machine plays " << (machine_side == Side::N ? "N" : "S") << "\n";
  auto finish = [&](Status status) {
    Transcript t = replay(spec, moves);
    t.status = status;
    return t;
  };
  while (!m.done()) {
    const Obligation ob = m.obligation();
    out << "> " << ob.to_string() << "\n";
    const bool machine_turn = (ob.turn == Turn::n_picks) == (machine_side == Side::N);
    if (ob.turn == Turn::s_picks && !s_can_move(ob, universe_bound)) {
      const bool clean = stuck_is_clean(fam, m.result(), ob.min_size, universe_bound);
      out << "S has no legal block inside the universe: N wins"
          << (clean ? "" : " (truncation_win)") << "\n";
      return finish(Status::in_progress);
    }
    if (machine_turn) {
      if (ob.turn == Turn::n_picks) {
        const Nat l = solver->best_choice(m);
        out << "N picks " << l << "\n";
        m.play_n(l);
        moves.push_back(Move::n(l));
      } else {
        FinSet b = machine_s_block(ob, fam, m.result(), universe_bound);
        out << "S picks " << b.to_string() << "\n";
        m.play_s(b);
        moves.push_back(Move::s(std::move(b)));
      }
      continue;
    }
    std::string line;
    out << (ob.turn == Turn::n_picks ? "l = " : "E = ") << std::flush;
    if (!std::getline(in, line) || trim(line) == "quit") {
      out << "session ended; transcript saved in progress\n";
      return finish(Status::in_progress);
    }
    line = trim(line);
    try {
      if (ob.turn == Turn::n_picks) {
        std::size_t used = 0;
        const unsigned long long l = std::stoull(line, &used);
        if (used != line.size()) {
          throw ParseError("expected a positive integer");
        }
        m.play_n(l);
        moves.push_back(Move::n(l));
      } else {
        FinSet b = FinSet::parse(line);
        if (!b.empty() && b.max() > universe_bound) {
          throw IllegalMove("block leaves the universe [1," + std::to_string(universe_bound) + "]");
        }
        m.play_s(b);
        moves.push_back(Move::s(std::move(b)));
      }
    } catch (const std::exception& e) {
      out << "illegal move: " << e.what() << "; try again\n";
    }
  }
  const FinSet r = m.result();
  const bool inside = fam.contains(r);
  out << "result " << r.to_string() << (inside ? " is in " : " is not in ") << fam.describe()
      << (inside ? ": S wins" : ": N wins") << "\n";
  return finish(Status::complete);
}

}  // namespace schreier::games
