#include "schreier/schreier.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include "schreier/error.hpp"

namespace schreier {

// ---------------------------------------------------------------------------
// TupleSpec

TupleSpec::TupleSpec(std::vector<Ordinal> ords) : ordinals(std::move(ords)) {
  if (ordinals.empty()) {
    throw PreconditionError("tuple spec must list at least one ordinal");
  }
  for (std::size_t i = 1; i < ordinals.size(); ++i) {
    if (ordinals[i] < ordinals[i - 1]) {
      throw PreconditionError("tuple spec ordinals must be ascending: " +
                              ordinals[i - 1].to_string() + " > " + ordinals[i].to_string());
    }
  }
}

TupleSpec TupleSpec::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') {
    text.remove_prefix(1);
  }
  while (!text.empty() && text.back() == ' ') {
    text.remove_suffix(1);
  }
  if (text.size() >= 2 && text.front() == '(' && text.back() == ')') {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<Ordinal> ords;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      ords.push_back(parse_ordinal(text.substr(start, i - start)));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  try {
    return TupleSpec(std::move(ords));
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
}

std::string TupleSpec::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < ordinals.size(); ++i) {
    out += (i ? "," : "") + ordinals[i].to_string();
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// FiniteSchreierState

FiniteSchreierState::FiniteSchreierState(std::uint64_t k) : k_(k) {}

std::optional<FiniteSchreierState> FiniteSchreierState::of(std::uint64_t k, const FinSet& e) {
  FiniteSchreierState s(k);
  for (Nat x : e) {
    if (!s.add(x)) {
      return std::nullopt;
    }
  }
  return s;
}

bool FiniteSchreierState::can_add(Nat x) const {
  if (!started_) {
    return true;
  }
  if (x <= last_) {
    return false;
  }
  for (const auto& lv : levels_) {
    if (lv.used < lv.cap) {
      return true;
    }
  }
  return levels_.size() < k_ && first_ > 1;
}

bool FiniteSchreierState::add(Nat x) {
  if (!started_) {
    started_ = true;
    first_ = last_ = x;
    if (k_ > 0) {
      levels_.push_back(Level{x, 1});
    }
    return true;
  }
  if (x <= last_) {
    return false;
  }
  std::size_t i = 0;
  while (i < levels_.size() && levels_[i].used >= levels_[i].cap) {
    ++i;
  }
  if (i == levels_.size()) {
    if (levels_.size() >= k_ || first_ <= 1) {
      return false;
    }
    levels_.push_back(Level{first_, 1});
  }
  ++levels_[i].used;
  for (std::size_t j = 0; j < i; ++j) {
    levels_[j] = Level{x, 1};
  }
  last_ = x;
  return true;
}

std::vector<Nat> FiniteSchreierState::key() const {
  std::vector<Nat> out;
  out.reserve(2 * levels_.size() + 3);
  out.push_back(started_ ? 1 : 0);
  out.push_back(first_);
  out.push_back(k_ - levels_.size());
  for (const auto& lv : levels_) {
    out.push_back(lv.cap);
    out.push_back(lv.used);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

struct MemoKey {
  Ordinal alpha;
  FinSet set;
  friend bool operator==(const MemoKey&, const MemoKey&) = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const noexcept {
    return OrdinalHash{}(k.alpha) * 31 + FinSetHash{}(k.set);
  }
};

constexpr std::size_t kMemoLimit = 1u << 20;

std::unordered_map<MemoKey, bool, MemoKeyHash>& memo() {
  thread_local std::unordered_map<MemoKey, bool, MemoKeyHash> cache;
  return cache;
}

FinSet slice(const FinSet& e, std::size_t from, std::size_t to) {
  return FinSet::from_sorted_unchecked(std::vector<Nat>(
      e.begin() + static_cast<std::ptrdiff_t>(from), e.begin() + static_cast<std::ptrdiff_t>(to)));
}

bool member_finite(std::uint64_t k, const FinSet& e) {
  return FiniteSchreierState::of(k, e).has_value();
}

// Largest j with e[from, j) in the family decided by `in`; the family is
// hereditary, so membership of the slices is monotone in j.
template <typename In>
std::size_t longest_prefix(const FinSet& e, std::size_t from, In in) {
  std::size_t lo = from, hi = e.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (in(slice(e, from, mid))) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

bool member_infinite(const Ordinal& alpha, const FinSet& e) {
  if (e.empty() || e.size() <= e.min()) {
    return true;  // S_1 is contained in every S_b with b >= 1
  }
  auto& cache = memo();
  MemoKey key{alpha, e};
  if (auto it = cache.find(key); it != cache.end()) {
    return it->second;
  }
  bool result = false;
  const Classification c = classify(alpha);
  if (c.kind == OrdinalKind::successor) {
    const Ordinal& beta = c.predecessor;
    std::size_t pos = 0;
    Nat blocks = 0;
    result = true;
    while (pos < e.size()) {
      pos = longest_prefix(e, pos, [&](const FinSet& b) { return member(beta, b); });
      if (++blocks > e.min()) {
        result = false;
        break;
      }
    }
  } else {
    for (Nat n = 1; n <= e.min() && !result; ++n) {
      result = member(fundamental(alpha, n), e);
    }
  }
  if (cache.size() >= kMemoLimit) {
    cache.clear();
  }
  cache.emplace(std::move(key), result);
  return result;
}

}  // namespace

bool member(const Ordinal& alpha, const FinSet& e) {
  if (alpha.is_finite()) {
    return member_finite(alpha.finite_value(), e);
  }
  return member_infinite(alpha, e);
}

bool member_exhaustive(const Ordinal& alpha, const FinSet& e) {
  if (e.empty()) {
    return true;
  }
  const Classification c = classify(alpha);
  switch (c.kind) {
    case OrdinalKind::zero:
      return e.size() == 1;
    case OrdinalKind::successor: {
      // fewest[i]: least number of nonempty S_b blocks covering e[i..).
      const std::size_t n = e.size();
      constexpr Nat kNone = ~Nat{0};
      std::vector<Nat> fewest(n + 1, kNone);
      fewest[n] = 0;
      for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j <= n; ++j) {
          if (fewest[j] != kNone && member_exhaustive(c.predecessor, slice(e, i, j))) {
            fewest[i] = std::min(fewest[i], fewest[j] + 1);
          }
        }
      }
      return fewest[0] <= e.min();
    }
    case OrdinalKind::limit:
      for (Nat n = 1; n <= e.min(); ++n) {
        if (member_exhaustive(fundamental(alpha, n), e)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

bool tuple_member(const TupleSpec& spec, const FinSet& e) {
  std::size_t pos = 0;
  for (const auto& a : spec.ordinals) {
    if (pos == e.size()) {
      return true;
    }
    if (a.is_finite()) {
      FiniteSchreierState s(a.finite_value());
      while (pos < e.size() && s.add(e[pos])) {
        ++pos;
      }
    } else {
      // the empty block is always admissible, so start the search below pos+1
      std::size_t lo = pos, hi = e.size();
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (member(a, slice(e, pos, mid))) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      pos = lo;
    }
  }
  return pos == e.size();
}

bool tuple_member_exhaustive(const TupleSpec& spec, const FinSet& e) {
  const std::size_t n = e.size();
  std::vector<char> reach(n + 1, 0);
  reach[0] = 1;
  for (const auto& a : spec.ordinals) {
    std::vector<char> next(n + 1, 0);
    for (std::size_t p = 0; p <= n; ++p) {
      if (!reach[p]) {
        continue;
      }
      for (std::size_t j = p; j <= n; ++j) {
        if (!next[j] && member_exhaustive(a, slice(e, p, j))) {
          next[j] = 1;
        }
      }
    }
    reach = std::move(next);
  }
  return reach[n] != 0;
}

void clear_member_cache() { memo().clear(); }

// ---------------------------------------------------------------------------
// Oracles

namespace {

class SchreierOracle final : public OracleImpl {
 public:
  explicit SchreierOracle(Ordinal alpha) : alpha_(std::move(alpha)) {}
  bool contains(const FinSet& e) const override { return member(alpha_, e); }
  OracleKind kind() const override { return OracleKind::schreier; }
  std::string describe() const override { return "s:" + alpha_.to_string(); }
  bool known_hereditary() const override { return true; }
  bool known_spreading() const override { return true; }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    return (a.empty() ? 0 : a.max()) + 1;
  }
  const Ordinal& alpha() const { return alpha_; }

 private:
  Ordinal alpha_;
};

class TupleOracle final : public OracleImpl {
 public:
  explicit TupleOracle(TupleSpec spec) : spec_(std::move(spec)) {}
  bool contains(const FinSet& e) const override { return tuple_member(spec_, e); }
  OracleKind kind() const override { return OracleKind::tuple; }
  std::string describe() const override {
    std::string s = spec_.to_string();
    return "tuple:" + s.substr(1, s.size() - 2);
  }
  bool known_hereditary() const override { return true; }
  bool known_spreading() const override { return true; }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    return (a.empty() ? 0 : a.max()) + 1;
  }
  const TupleSpec& spec() const { return spec_; }

 private:
  TupleSpec spec_;
};

}  // namespace

FamilyOracle schreier_oracle(Ordinal alpha) {
  return FamilyOracle(std::make_shared<SchreierOracle>(std::move(alpha)));
}

FamilyOracle tuple_oracle(TupleSpec spec) {
  return FamilyOracle(std::make_shared<TupleOracle>(std::move(spec)));
}

std::optional<Ordinal> oracle_ordinal(const FamilyOracle& fam) {
  if (auto* s = dynamic_cast<const SchreierOracle*>(&fam.impl())) {
    return s->alpha();
  }
  return std::nullopt;
}

std::optional<TupleSpec> oracle_tuple(const FamilyOracle& fam) {
  if (auto* t = dynamic_cast<const TupleOracle*>(&fam.impl())) {
    return t->spec();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

// Node types for the search: a way to extend the current set by x > max.
struct StateNode {
  FiniteSchreierState state;
  bool extend(Nat x, StateNode& out) const {
    out = *this;
    return out.state.add(x);
  }
};

struct PredicateNode {
  const std::function<bool(const FinSet&)>* in;
  FinSet set;
  bool extend(Nat x, PredicateNode& out) const {
    FinSet next = set.extended(x);
    if (!(*in)(next)) {
      return false;
    }
    out.in = in;
    out.set = std::move(next);
    return true;
  }
};

struct Search {
  Nat bound;
  std::size_t cap;
  bool collect;
  std::function<bool(const FinSet&)> keep;  // filter applied before emitting
  std::atomic<std::uint64_t>* produced;
};

template <typename Node>
void dfs(const Node& node, std::vector<Nat>& path, const Search& s, std::vector<FinSet>* out,
         std::uint64_t& counted) {
  FinSet here = FinSet::from_sorted_unchecked(path);
  if (!s.keep || s.keep(here)) {
    ++counted;
    if (s.collect) {
      if (s.produced->fetch_add(1, std::memory_order_relaxed) >= s.cap) {
        throw CapExceeded("enumeration cap of " + std::to_string(s.cap) + " sets exceeded");
      }
      out->push_back(std::move(here));
    }
  }
  const Nat start = path.empty() ? 1 : path.back() + 1;
  Node child = node;
  for (Nat x = start; x <= s.bound; ++x) {
    if (node.extend(x, child)) {
      path.push_back(x);
      dfs(child, path, s, out, counted);
      path.pop_back();
    }
  }
}

// Runs the search below `root`. Subtrees rooted at each first element are
// independent and run as separate parallel tasks; results are concatenated
// in first-element order so both paths emit the same sequence.
template <typename Node>
std::uint64_t run_search(const Node& root, const Search& s, Exec exec, std::vector<FinSet>* out) {
  const std::int64_t n = static_cast<std::int64_t>(s.bound);
  std::vector<std::vector<FinSet>> parts(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  std::uint64_t root_count = 0;
  {
    const FinSet empty;
    if (!s.keep || s.keep(empty)) {
      root_count = 1;
      if (s.collect) {
        if (s.produced->fetch_add(1) >= s.cap) {
          throw CapExceeded("enumeration cap of " + std::to_string(s.cap) + " sets exceeded");
        }
        out->push_back(empty);
      }
    }
  }
  auto subtree = [&](std::int64_t i) {
    const Nat x = static_cast<Nat>(i) + 1;
    Node child = root;
    if (!root.extend(x, child)) {
      return;
    }
    std::vector<Nat> path{x};
    dfs(child, path, s, &parts[static_cast<std::size_t>(i)], counts[static_cast<std::size_t>(i)]);
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      subtree(i);
    }
  } else {
    std::atomic<bool> failed{false};
    std::string message;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      if (failed.load()) {
        continue;
      }
      try {
        subtree(i);
      } catch (const CapExceeded& e) {
#pragma omp critical(schreier_enum_error)
        {
          if (!failed.exchange(true)) {
            message = e.what();
          }
        }
      }
    }
    if (failed.load()) {
      throw CapExceeded(message);
    }
  }
  std::uint64_t total = root_count;
  for (std::int64_t i = 0; i < n; ++i) {
    total += counts[static_cast<std::size_t>(i)];
    if (out) {
      auto& p = parts[static_cast<std::size_t>(i)];
      out->insert(out->end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
  }
  return total;
}

std::function<bool(const FinSet&)> maximal_filter(std::function<bool(const FinSet&)> in,
                                                  Nat bound) {
  return [in = std::move(in), bound](const FinSet& e) {
    for (Nat x = 1; x <= bound; ++x) {
      if (!e.contains(x) && in(e.with(x))) {
        return false;
      }
    }
    return true;
  };
}

SetFamily search_family(std::function<bool(const FinSet&)> in,
                        std::optional<std::uint64_t> finite_k, Nat bound,
                        const EnumerateOptions& opts) {
  std::atomic<std::uint64_t> produced{0};
  Search s{bound, opts.cap, true, nullptr, &produced};
  if (opts.maximal_only) {
    s.keep = maximal_filter(in, bound);
  }
  std::vector<FinSet> sets;
  if (finite_k) {
    run_search(StateNode{FiniteSchreierState(*finite_k)}, s, opts.exec, &sets);
  } else {
    run_search(PredicateNode{&in, FinSet{}}, s, opts.exec, &sets);
  }
  return SetFamily(bound, sets);
}

std::uint64_t count_family(std::function<bool(const FinSet&)> in,
                           std::optional<std::uint64_t> finite_k, Nat bound, Exec exec) {
  std::atomic<std::uint64_t> produced{0};
  Search s{bound, 0, false, nullptr, &produced};
  if (finite_k) {
    return run_search(StateNode{FiniteSchreierState(*finite_k)}, s, exec, nullptr);
  }
  return run_search(PredicateNode{&in, FinSet{}}, s, exec, nullptr);
}

std::optional<std::uint64_t> finite_order(const Ordinal& a) {
  if (a.is_finite()) {
    return a.finite_value();
  }
  return std::nullopt;
}

}  // namespace

SetFamily enumerate(const Ordinal& alpha, Nat universe_bound, const EnumerateOptions& opts) {
  return search_family([alpha](const FinSet& e) { return member(alpha, e); }, finite_order(alpha),
                       universe_bound, opts);
}

SetFamily enumerate(const TupleSpec& spec, Nat universe_bound, const EnumerateOptions& opts) {
  if (spec.size() == 1) {
    return enumerate(spec[0], universe_bound, opts);
  }
  return search_family([spec](const FinSet& e) { return tuple_member(spec, e); }, std::nullopt,
                       universe_bound, opts);
}

SetFamily enumerate(const FamilyOracle& fam, Nat universe_bound, const EnumerateOptions& opts) {
  if (auto a = oracle_ordinal(fam)) {
    return enumerate(*a, universe_bound, opts);
  }
  if (auto t = oracle_tuple(fam)) {
    return enumerate(*t, universe_bound, opts);
  }
  std::function<bool(const FinSet&)> in = [fam](const FinSet& e) { return fam.contains(e); };
  if (fam.known_hereditary()) {
    return search_family(in, std::nullopt, universe_bound, opts);
  }
  SetFamily all = materialize(fam, universe_bound, opts.exec);
  if (all.size() > opts.cap) {
    throw CapExceeded("enumeration cap of " + std::to_string(opts.cap) + " sets exceeded");
  }
  if (!opts.maximal_only) {
    return all;
  }
  auto keep = maximal_filter(in, universe_bound);
  SetFamily out(universe_bound);
  all.for_each([&](const FinSet& e) {
    if (keep(e)) {
      out.insert(e);
    }
  });
  return out;
}

std::uint64_t count(const Ordinal& alpha, Nat universe_bound, Exec exec) {
  return count_family([alpha](const FinSet& e) { return member(alpha, e); }, finite_order(alpha),
                      universe_bound, exec);
}

std::uint64_t count(const TupleSpec& spec, Nat universe_bound, Exec exec) {
  if (spec.size() == 1) {
    return count(spec[0], universe_bound, exec);
  }
  return count_family([spec](const FinSet& e) { return tuple_member(spec, e); }, std::nullopt,
                      universe_bound, exec);
}

bool is_maximal(const FamilyOracle& fam, const FinSet& e, Nat universe_bound) {
  if (!e.empty() && e.max() > universe_bound) {
    throw PreconditionError("is_maximal: " + e.to_string() + " lies outside [1, " +
                            std::to_string(universe_bound) + "]");
  }
  if (!fam.contains(e)) {
    throw PreconditionError("is_maximal: " + e.to_string() + " is not a member of " +
                            fam.describe());
  }
  for (Nat x = 1; x <= universe_bound; ++x) {
    if (!e.contains(x) && fam.contains(e.with(x))) {
      return false;
    }
  }
  return true;
}

bool is_maximal(const Ordinal& alpha, const FinSet& e, Nat universe_bound) {
  return is_maximal(schreier_oracle(alpha), e, universe_bound);
}

}  // namespace schreier
