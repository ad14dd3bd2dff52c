#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace schreier {

using Nat = std::uint64_t;

// A finite subset of N = {1, 2, ...}, stored as its increasing enumeration.
class FinSet {
 public:
  FinSet() = default;
  // Throws PreconditionError unless strictly increasing with all elements >= 1.
  explicit FinSet(std::vector<Nat> elements);
  FinSet(std::initializer_list<Nat> elements);

  // Skips validation; the caller guarantees the invariant.
  static FinSet from_sorted_unchecked(std::vector<Nat> elements);
  // Parses "3,4,5" or "{}" (also accepts "{3,4,5}").
  static FinSet parse(std::string_view text);

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  Nat min() const { return elems_.front(); }
  Nat max() const { return elems_.back(); }
  Nat operator[](std::size_t i) const { return elems_[i]; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<Nat>& elements() const { return elems_; }

  bool contains(Nat x) const;
  bool is_subset_of(const FinSet& other) const;
  // Adds x (any position).
  FinSet with(Nat x) const;
  // Appends x; requires x > max().
  FinSet extended(Nat x) const;
  FinSet without_min() const;
  FinSet prefix(std::size_t n) const;

  // "{1,2,3}" / "{}".
  std::string to_string() const;
  // "1,2,3" / "{}": the family-file and CLI encoding.
  std::string to_csv() const;

  friend bool operator==(const FinSet&, const FinSet&) = default;
  friend std::strong_ordering operator<=>(const FinSet& a, const FinSet& b) {
    return a.elems_ <=> b.elems_;
  }

 private:
  std::vector<Nat> elems_;
};

// E < F in the block sense: either is empty, or max E < min F.
bool precedes(const FinSet& e, const FinSet& f);

// Concatenates blocks B1 < B2 < ... into their union.
FinSet concat_blocks(std::span<const FinSet> blocks);

// Subset of [1, n] encoded by the low n bits of mask (bit i <-> element i+1).
FinSet finset_from_mask(std::uint64_t mask);
std::uint64_t mask_of(const FinSet& e);

struct FinSetHash {
  std::size_t operator()(const FinSet& e) const noexcept;
};

// An increasing finite prefix standing in for an infinite M = (m_i) in [N],
// together with the universe bound it was drawn from.
class SeqView {
 public:
  SeqView() = default;
  SeqView(std::vector<Nat> prefix, Nat universe_bound);

  static SeqView identity(Nat n);
  static SeqView parse(std::string_view csv, Nat universe_bound);

  std::size_t size() const { return prefix_.size(); }
  Nat universe_bound() const { return bound_; }
  // 1-based position.
  Nat at(std::size_t i) const { return prefix_.at(i - 1); }
  const std::vector<Nat>& prefix() const { return prefix_; }
  bool contains(Nat value) const;
  // 1-based index of value, if present.
  std::optional<std::size_t> index_of(Nat value) const;
  // m_E = {m_i : i in E}; throws PreconditionError if an index exceeds size().
  FinSet image(const FinSet& indices) const;
  // Indices of the values of E, if E is contained in the prefix.
  std::optional<FinSet> preimage(const FinSet& values) const;
  SeqView tail_from(std::size_t i) const;
  FinSet as_set() const { return FinSet::from_sorted_unchecked(prefix_); }

  std::string to_string() const;

  friend bool operator==(const SeqView&, const SeqView&) = default;

 private:
  std::vector<Nat> prefix_;
  Nat bound_ = 0;
};

}  // namespace schreier
