#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schreier/exec.hpp"
#include "schreier/finset.hpp"

namespace schreier {

// A finite collection of FinSets over [1, universe_bound], stored as a trie
// keyed by element values with children kept in ascending order. Built
// single-threaded; const access is safe from any number of threads.
class SetFamily {
 public:
  explicit SetFamily(Nat universe_bound = 0);
  SetFamily(Nat universe_bound, const std::vector<FinSet>& members);

  Nat universe_bound() const { return bound_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  // Returns false if already present. Throws if e leaves [1, universe_bound].
  bool insert(const FinSet& e);
  bool contains(const FinSet& e) const;
  // Some member strictly contains e.
  bool has_strict_superset(const FinSet& e) const;
  std::size_t max_member_size() const;

  // Members in trie (prefix-lexicographic) order; the empty set first.
  std::vector<FinSet> members() const;
  void for_each(const std::function<void(const FinSet&)>& fn) const;

  friend bool operator==(const SetFamily& a, const SetFamily& b);

 private:
  struct Node {
    Nat value = 0;
    bool terminal = false;
    std::vector<std::uint32_t> children;  // sorted by nodes_[c].value
  };

  std::uint32_t find_child(std::uint32_t node, Nat value) const;
  bool superset_dfs(std::uint32_t node, const FinSet& e, std::size_t next, bool extra) const;

  std::vector<Node> nodes_;
  Nat bound_ = 0;
  std::size_t count_ = 0;
};

enum class OracleKind {
  schreier,
  tuple,
  explicit_family,
  spread_closure,
  bar,
  restricted,
  link,
  predicate
};

// Implementation interface behind FamilyOracle. Implementations are immutable
// and their membership test is pure, so oracles may be shared across threads.
class OracleImpl {
 public:
  virtual ~OracleImpl() = default;
  virtual bool contains(const FinSet& e) const = 0;
  virtual OracleKind kind() const = 0;
  virtual std::string describe() const = 0;
  // Every member lies inside [1, bound].
  virtual std::optional<Nat> support_bound() const { return std::nullopt; }
  virtual bool known_hereditary() const { return false; }
  virtual bool known_spreading() const { return false; }
  // Some l0 > max a with a u {l} in or out of the family alike for all l >= l0.
  virtual std::optional<Nat> stable_from(const FinSet& a) const {
    (void)a;
    return std::nullopt;
  }
};

// A total, deterministic membership rule on all FinSets.
class FamilyOracle {
 public:
  FamilyOracle() = default;
  explicit FamilyOracle(std::shared_ptr<const OracleImpl> impl) : impl_(std::move(impl)) {}

  bool contains(const FinSet& e) const { return impl_->contains(e); }
  OracleKind kind() const { return impl_->kind(); }
  std::string describe() const { return impl_->describe(); }
  std::optional<Nat> support_bound() const { return impl_->support_bound(); }
  bool known_hereditary() const { return impl_->known_hereditary(); }
  bool known_spreading() const { return impl_->known_spreading(); }
  std::optional<Nat> stable_from(const FinSet& a) const { return impl_->stable_from(a); }
  const OracleImpl& impl() const { return *impl_; }
  const std::shared_ptr<const OracleImpl>& impl_ptr() const { return impl_; }

  static FamilyOracle explicit_family(SetFamily fam);
  // Smallest hereditary spreading family containing the generators:
  // E is a member iff some generator G has |G| >= |E| and G[i] <= E[i].
  static FamilyOracle spread_closure(SetFamily generators);
  // {{n} u F : F in fam, n < F} u fam.
  static FamilyOracle bar(FamilyOracle fam);
  // fam[N]: members of fam contained in the prefix of N.
  static FamilyOracle restrict(FamilyOracle fam, SeqView n);
  // {F : m < F and {m} u F in fam}.
  static FamilyOracle link(FamilyOracle fam, Nat m);
  static FamilyOracle predicate(std::string name, std::function<bool(const FinSet&)> fn,
                                bool hereditary = false, bool spreading = false,
                                std::optional<Nat> support = std::nullopt);

 private:
  std::shared_ptr<const OracleImpl> impl_;
};

bool is_hereditary(const SetFamily& fam);
SetFamily hereditary_closure(const SetFamily& fam);

// Every member inside [1, bound] has all its spreadings inside [1, bound] in
// the family. Exhaustive over the 2^bound subsets; bound is capped at 24.
bool is_spreading_within(const FamilyOracle& fam, Nat bound, Exec exec = Exec::parallel);
// Hereditary check of an oracle over all subsets of [1, bound].
bool is_hereditary_within(const FamilyOracle& fam, Nat bound, Exec exec = Exec::parallel);

// Materializes the members of an oracle inside [1, bound] (bound <= 24).
SetFamily materialize(const FamilyOracle& fam, Nat bound, Exec exec = Exec::parallel);

SetFamily restrict(const SetFamily& fam, const SeqView& n);
// F(N) = {n_F : F in fam}. Throws naming the first member whose largest
// index exceeds the prefix length.
SetFamily pushforward(const SetFamily& fam, const SeqView& n);
// {F : m < F and {m} u F in fam}, materialized.
SetFamily link(const SetFamily& fam, Nat m);

// Text format: one set per line as ascending comma-separated integers, "{}"
// for the empty set, '#' starts a comment line. Blank lines are rejected.
SetFamily read_family(std::istream& in, Nat universe_bound = 0);
SetFamily read_family_file(const std::string& path, Nat universe_bound = 0);
void write_family(std::ostream& out, const SetFamily& fam);

}  // namespace schreier
