#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schreier/exec.hpp"
#include "schreier/family.hpp"
#include "schreier/finset.hpp"
#include "schreier/ordinal.hpp"

namespace schreier {

// A nonempty ascending list of ordinals (a1 <= ... <= ar).
struct TupleSpec {
  std::vector<Ordinal> ordinals;

  TupleSpec() = default;
  explicit TupleSpec(std::vector<Ordinal> ords);  // validates
  static TupleSpec single(Ordinal a) { return TupleSpec({std::move(a)}); }
  // "0,1,w" or "(0,1,w)".
  static TupleSpec parse(std::string_view text);

  std::size_t size() const { return ordinals.size(); }
  const Ordinal& operator[](std::size_t i) const { return ordinals[i]; }
  std::string to_string() const;  // "(0,1,w)"
  friend bool operator==(const TupleSpec&, const TupleSpec&) = default;
};

// E in S_alpha under the fixed fundamental sequences. Finite alpha uses the
// incremental greedy state; infinite alpha the memoized greedy recursion.
bool member(const Ordinal& alpha, const FinSet& e);
// Reference decision straight from the definition: exhaustive block
// partitions for successors and the full n-range for limits. Exponential.
bool member_exhaustive(const Ordinal& alpha, const FinSet& e);

// E = F1 u ... u Fr with F1 < ... < Fr (blocks may be empty), Fi in S_ai.
bool tuple_member(const TupleSpec& spec, const FinSet& e);
// Reference: dynamic program over all split points using member_exhaustive.
bool tuple_member_exhaustive(const TupleSpec& spec, const FinSet& e);

// Greedy decomposition state of a set inside S_k for finite k. Level i
// tracks the current S_{i-1} block inside the current S_i block: cap = the
// S_i block's minimum, used = S_{i-1} blocks opened so far. Only the lowest
// levels are stored (levels()[0] is level 1); every level above them is
// untouched and equals (first(), 1). Sets with equal key() admit the same
// extensions by integers above their maxima.
class FiniteSchreierState {
 public:
  struct Level {
    Nat cap = 0;
    Nat used = 0;
    friend bool operator==(const Level&, const Level&) = default;
  };

  explicit FiniteSchreierState(std::uint64_t k);
  static std::optional<FiniteSchreierState> of(std::uint64_t k, const FinSet& e);

  std::uint64_t order() const { return k_; }
  bool empty() const { return !started_; }
  Nat last() const { return last_; }
  // Whether appending x (> last) stays inside S_k; does not mutate.
  bool can_add(Nat x) const;
  // Appends x; returns false (and leaves the state unchanged) if E u {x}
  // leaves S_k.
  bool add(Nat x);
  Nat first() const { return first_; }
  const std::vector<Level>& levels() const { return levels_; }
  std::vector<Nat> key() const;

  friend bool operator==(const FiniteSchreierState&, const FiniteSchreierState&) = default;

 private:
  std::uint64_t k_;
  bool started_ = false;
  Nat first_ = 0;
  Nat last_ = 0;
  std::vector<Level> levels_;
};

struct EnumerateOptions {
  std::size_t cap = 5'000'000;
  bool maximal_only = false;
  Exec exec = Exec::parallel;
};

// Members of S_alpha (or of the tuple family) inside [1, universe_bound], by
// depth-first search with hereditary pruning. Throws CapExceeded naming the
// cap when more than opts.cap sets would be produced.
SetFamily enumerate(const Ordinal& alpha, Nat universe_bound, const EnumerateOptions& opts = {});
SetFamily enumerate(const TupleSpec& spec, Nat universe_bound, const EnumerateOptions& opts = {});
// Same for any oracle known to be hereditary; other oracles are scanned
// exhaustively (universe_bound <= 24).
SetFamily enumerate(const FamilyOracle& fam, Nat universe_bound, const EnumerateOptions& opts = {});

std::uint64_t count(const Ordinal& alpha, Nat universe_bound, Exec exec = Exec::parallel);
std::uint64_t count(const TupleSpec& spec, Nat universe_bound, Exec exec = Exec::parallel);

// No strict superset of E inside [1, universe_bound] is in S_alpha.
// Throws PreconditionError unless E in S_alpha and E inside the universe.
bool is_maximal(const Ordinal& alpha, const FinSet& e, Nat universe_bound);
bool is_maximal(const FamilyOracle& fam, const FinSet& e, Nat universe_bound);

FamilyOracle schreier_oracle(Ordinal alpha);
FamilyOracle tuple_oracle(TupleSpec spec);
// The ordinal / tuple behind a schreier or tuple oracle, if any.
std::optional<Ordinal> oracle_ordinal(const FamilyOracle& fam);
std::optional<TupleSpec> oracle_tuple(const FamilyOracle& fam);

// Drops the per-thread membership memo of the calling thread.
void clear_member_cache();

}  // namespace schreier
