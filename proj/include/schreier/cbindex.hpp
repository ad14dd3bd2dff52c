#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "schreier/exec.hpp"
#include "schreier/family.hpp"
#include "schreier/ordinal.hpp"
#include "schreier/schreier.hpp"
#include "schreier/strategy.hpp"

namespace schreier::cb {

using games::Json;

// For a spreading oracle and A in fam: whether A survives one strong
// derivative, i.e. some l > max A has A u {l} in fam. Probes the oracle's
// stabilization point (max A + 1 when unknown) and cross-checks one further.
// Throws PreconditionError on non-spreading input or A outside fam.
bool in_derivative(const FamilyOracle& fam, const FinSet& a);

struct Probe {
  Nat l = 0;
  std::optional<Ordinal> rank;  // nullopt: A u {l} outside fam
};

struct RankResult {
  enum class Outcome { rank, not_in_family, pattern_undetected };
  Outcome outcome = Outcome::rank;
  Ordinal rank;
  std::size_t window = 0;
  std::vector<Probe> trace;  // top-level extensions examined
  std::string detail;        // where the detector gave up

  bool ok() const { return outcome == Outcome::rank; }
};
std::string to_string(RankResult::Outcome o);

struct RankOptions {
  std::size_t window = 8;
  std::size_t node_cap = 5'000'000;
  Exec exec = Exec::parallel;
};

// Ordinal rank of A under the strong Cantor-Bendixson derivative of a
// spreading family: 0 without extensions, otherwise the supremum of
// rank(A u {l}) + 1, read off a window of probes as eventually constant
// (successor) or affine in the first varying CNF coefficient (limit).
// Finite-order Schreier oracles use the greedy state as the memo key.
class RankEngine {
 public:
  explicit RankEngine(FamilyOracle fam, RankOptions opts = {});

  RankResult rank(const FinSet& a);
  // rank(empty) + 1; asserts the result is a successor.
  RankResult index();

  const FamilyOracle& family() const { return fam_; }
  std::size_t memo_size() const;
  // Identifies the family and window for cache files.
  std::string fingerprint() const;

  void load(const std::string& path);
  void save(const std::string& path) const;
  // Loads from / saves to $SCHREIER_CACHE_DIR when set; no-op otherwise.
  void load_env_cache();
  void save_env_cache() const;

 private:
  struct Node {
    FinSet set;
    std::optional<FiniteSchreierState> state;
  };
  std::optional<Node> root(const FinSet& a) const;
  std::string key(const Node& n) const;
  Nat first_probe(const Node& n) const;
  std::optional<Node> extend(const Node& n, Nat l) const;
  Ordinal rank_node(const Node& n);
  Ordinal sup_of(const std::vector<Probe>& probes, const Node& n) const;

  FamilyOracle fam_;
  RankOptions opts_;
  std::optional<std::uint64_t> finite_order_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Ordinal> memo_;
  std::size_t nodes_ = 0;
};

// Exact finite rank by exhausting extensions up to the oracle's
// stabilization point (requires stable_from). Memoized per call.
Nat finite_rank(const FamilyOracle& fam, const FinSet& a);
// Exact finite rank relative to a ground sequence: extensions range over
// the ground's elements beyond max A inside its prefix.
Nat finite_rank_along(const FamilyOracle& fam, const FinSet& a, const SeqView& ground);

// {n} u F for F in fam with n < F, together with fam.
FamilyOracle bar(const FamilyOracle& fam);

// For the spreading closure of gens and every member A with max A <= bound
// plus the empty set: rank_F(A) equals the rank of n_A in F(N) derived along N.
struct TransferCheck {
  bool ok = true;
  std::uint64_t checked = 0;
  std::optional<FinSet> counterexample;
};
TransferCheck rank_transfer_check(const SetFamily& gens, const SeqView& n, Nat bound = 8);

// rank_bar({l} u A) >= rank(A) for nonempty A in spread(gens), max A <= bound,
// l < min A.
struct BarLiftResult {
  std::uint64_t families = 0;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::optional<std::pair<std::size_t, FinSet>> first_failure;  // family index, {l} u A
};
BarLiftResult bar_lift_batch(const std::vector<SetFamily>& generator_sets, Nat bound,
                             Exec exec = Exec::parallel);

// All generator families with at most `max_sets` sets, each of size 1..max_size
// inside [1, universe].
std::vector<SetFamily> small_generator_families(Nat universe, std::size_t max_sets,
                                                std::size_t max_size);

Json to_json(const RankResult& r, const FamilyOracle& fam, const FinSet& a);

}  // namespace schreier::cb
