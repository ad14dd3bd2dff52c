#include "schreier/family.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "schreier/error.hpp"

namespace schreier {

// ---------------------------------------------------------------------------
// SetFamily

SetFamily::SetFamily(Nat universe_bound) : bound_(universe_bound) { nodes_.emplace_back(); }

SetFamily::SetFamily(Nat universe_bound, const std::vector<FinSet>& members)
    : SetFamily(universe_bound) {
  for (const auto& e : members) {
    insert(e);
  }
}

std::uint32_t SetFamily::find_child(std::uint32_t node, Nat value) const {
  const auto& ch = nodes_[node].children;
  auto it = std::lower_bound(ch.begin(), ch.end(), value,
                             [this](std::uint32_t c, Nat v) { return nodes_[c].value < v; });
  if (it == ch.end() || nodes_[*it].value != value) {
    return 0;
  }
  return *it;
}

bool SetFamily::insert(const FinSet& e) {
  if (!e.empty() && e.max() > bound_) {
    throw PreconditionError("set " + e.to_string() + " lies outside the family universe [1, " +
                            std::to_string(bound_) + "]");
  }
  std::uint32_t node = 0;
  for (Nat x : e) {
    std::uint32_t child = find_child(node, x);
    if (child == 0) {
      child = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(Node{x, false, {}});
      auto& ch = nodes_[node].children;
      auto it = std::lower_bound(ch.begin(), ch.end(), x,
                                 [this](std::uint32_t c, Nat v) { return nodes_[c].value < v; });
      ch.insert(it, child);
    }
    node = child;
  }
  if (nodes_[node].terminal) {
    return false;
  }
  nodes_[node].terminal = true;
  ++count_;
  return true;
}

bool SetFamily::contains(const FinSet& e) const {
  std::uint32_t node = 0;
  for (Nat x : e) {
    node = find_child(node, x);
    if (node == 0) {
      return false;
    }
  }
  return nodes_[node].terminal;
}

bool SetFamily::superset_dfs(std::uint32_t node, const FinSet& e, std::size_t next,
                             bool extra) const {
  if (next == e.size() && extra && nodes_[node].terminal) {
    return true;
  }
  for (std::uint32_t c : nodes_[node].children) {
    const Nat v = nodes_[c].value;
    if (next < e.size()) {
      if (v > e[next]) {
        break;
      }
      if (v == e[next]) {
        if (superset_dfs(c, e, next + 1, extra)) {
          return true;
        }
        continue;
      }
    }
    if (superset_dfs(c, e, next, true)) {
      return true;
    }
  }
  return false;
}

bool SetFamily::has_strict_superset(const FinSet& e) const { return superset_dfs(0, e, 0, false); }

std::size_t SetFamily::max_member_size() const {
  std::size_t best = 0;
  for_each([&](const FinSet& e) { best = std::max(best, e.size()); });
  return best;
}

void SetFamily::for_each(const std::function<void(const FinSet&)>& fn) const {
  std::vector<Nat> path;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  if (nodes_[0].terminal) {
    fn(FinSet{});
  }
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx == nodes_[node].children.size()) {
      stack.pop_back();
      if (!path.empty()) {
        path.pop_back();
      }
      continue;
    }
    const std::uint32_t c = nodes_[node].children[idx++];
    path.push_back(nodes_[c].value);
    if (nodes_[c].terminal) {
      fn(FinSet::from_sorted_unchecked(path));
    }
    stack.emplace_back(c, 0);
  }
}

std::vector<FinSet> SetFamily::members() const {
  std::vector<FinSet> out;
  out.reserve(count_);
  for_each([&](const FinSet& e) { out.push_back(e); });
  return out;
}

bool operator==(const SetFamily& a, const SetFamily& b) {
  if (a.size() != b.size()) {
    return false;
  }
  bool same = true;
  a.for_each([&](const FinSet& e) { same = same && b.contains(e); });
  return same;
}

// ---------------------------------------------------------------------------
// Oracle implementations

namespace {

class ExplicitOracle final : public OracleImpl {
 public:
  explicit ExplicitOracle(SetFamily fam) : fam_(std::move(fam)), hereditary_(is_hereditary(fam_)) {}
  bool contains(const FinSet& e) const override { return fam_.contains(e); }
  OracleKind kind() const override { return OracleKind::explicit_family; }
  std::string describe() const override {
    return "explicit(" + std::to_string(fam_.size()) + " sets in [1," +
           std::to_string(fam_.universe_bound()) + "])";
  }
  std::optional<Nat> support_bound() const override { return fam_.universe_bound(); }
  bool known_hereditary() const override { return hereditary_; }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    return std::max(fam_.universe_bound(), a.empty() ? 0 : a.max()) + 1;
  }
  const SetFamily& family() const { return fam_; }

 private:
  SetFamily fam_;
  bool hereditary_;
};

class SpreadClosureOracle final : public OracleImpl {
 public:
  explicit SpreadClosureOracle(SetFamily gens) : gens_(gens.members()) {
    for (const auto& g : gens_) {
      top_ = std::max(top_, g.empty() ? Nat{0} : g.max());
    }
  }

  bool contains(const FinSet& e) const override {
    for (const auto& g : gens_) {
      if (g.size() < e.size()) {
        continue;
      }
      bool dominated = true;
      for (std::size_t i = 0; i < e.size() && dominated; ++i) {
        dominated = g[i] <= e[i];
      }
      if (dominated) {
        return true;
      }
    }
    return false;
  }
  OracleKind kind() const override { return OracleKind::spread_closure; }
  std::string describe() const override {
    std::string out = "spread(";
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      out += (i ? ";" : "") + gens_[i].to_string();
    }
    return out + ")";
  }
  bool known_hereditary() const override { return true; }
  bool known_spreading() const override { return true; }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    return std::max(top_, a.empty() ? 0 : a.max()) + 1;
  }

 private:
  std::vector<FinSet> gens_;
  Nat top_ = 0;
};

class BarOracle final : public OracleImpl {
 public:
  explicit BarOracle(FamilyOracle fam) : fam_(std::move(fam)) {}
  bool contains(const FinSet& e) const override {
    return fam_.contains(e) || (!e.empty() && fam_.contains(e.without_min()));
  }
  OracleKind kind() const override { return OracleKind::bar; }
  std::string describe() const override { return "bar:" + fam_.describe(); }
  bool known_hereditary() const override { return fam_.known_hereditary(); }
  bool known_spreading() const override { return fam_.known_spreading(); }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    auto s = fam_.stable_from(a);
    if (!s || a.empty()) {
      return s;
    }
    auto t = fam_.stable_from(a.without_min());
    if (!t) {
      return t;
    }
    return std::max(*s, *t);
  }

 private:
  FamilyOracle fam_;
};

class RestrictedOracle final : public OracleImpl {
 public:
  RestrictedOracle(FamilyOracle fam, SeqView n) : fam_(std::move(fam)), n_(std::move(n)) {}
  bool contains(const FinSet& e) const override {
    for (Nat x : e) {
      if (!n_.contains(x)) {
        return false;
      }
    }
    return fam_.contains(e);
  }
  OracleKind kind() const override { return OracleKind::restricted; }
  std::string describe() const override { return fam_.describe() + "[" + n_.to_string() + "]"; }
  std::optional<Nat> support_bound() const override {
    Nat b = n_.size() ? n_.prefix().back() : 0;
    if (auto s = fam_.support_bound()) {
      b = std::min(b, *s);
    }
    return b;
  }
  bool known_hereditary() const override { return fam_.known_hereditary(); }

 private:
  FamilyOracle fam_;
  SeqView n_;
};

class LinkOracle final : public OracleImpl {
 public:
  LinkOracle(FamilyOracle fam, Nat m) : fam_(std::move(fam)), m_(m) {}
  bool contains(const FinSet& f) const override {
    if (!f.empty() && f.min() <= m_) {
      return false;
    }
    return fam_.contains(f.with(m_));
  }
  OracleKind kind() const override { return OracleKind::link; }
  std::string describe() const override {
    return "link(" + std::to_string(m_) + "," + fam_.describe() + ")";
  }
  std::optional<Nat> support_bound() const override { return fam_.support_bound(); }
  bool known_hereditary() const override { return fam_.known_hereditary(); }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    auto s = fam_.stable_from(a.with(m_));
    if (!s) {
      return s;
    }
    return std::max(*s, std::max(m_, a.empty() ? 0 : a.max()) + 1);
  }

 private:
  FamilyOracle fam_;
  Nat m_;
};

class PredicateOracle final : public OracleImpl {
 public:
  PredicateOracle(std::string name, std::function<bool(const FinSet&)> fn, bool hereditary,
                  bool spreading, std::optional<Nat> support)
      : name_(std::move(name)),
        fn_(std::move(fn)),
        hereditary_(hereditary),
        spreading_(spreading),
        support_(support) {}
  bool contains(const FinSet& e) const override { return fn_(e); }
  OracleKind kind() const override { return OracleKind::predicate; }
  std::string describe() const override { return name_; }
  std::optional<Nat> support_bound() const override { return support_; }
  bool known_hereditary() const override { return hereditary_; }
  bool known_spreading() const override { return spreading_; }
  std::optional<Nat> stable_from(const FinSet& a) const override {
    if (!support_) {
      return std::nullopt;
    }
    return std::max(*support_, a.empty() ? 0 : a.max()) + 1;
  }

 private:
  std::string name_;
  std::function<bool(const FinSet&)> fn_;
  bool hereditary_;
  bool spreading_;
  std::optional<Nat> support_;
};

constexpr Nat kMaxMaskBound = 24;

void check_mask_bound(Nat bound) {
  if (bound > kMaxMaskBound) {
    throw CapExceeded("exhaustive subset scans are capped at universe bound " +
                      std::to_string(kMaxMaskBound) + " (requested " + std::to_string(bound) + ")");
  }
}

// Unit right-shifts of e inside [1, bound]: bump one element by one while
// keeping strict increase. Every spreading inside [1, bound] is reachable by
// a chain of these, so closure under unit shifts is closure under spreading.
bool unit_shifts_stay(const FamilyOracle& fam, const FinSet& e, Nat bound) {
  std::vector<Nat> v = e.elements();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Nat limit = (i + 1 < v.size()) ? v[i + 1] : bound + 1;
    if (v[i] + 1 < limit) {
      ++v[i];
      const bool ok = fam.contains(FinSet::from_sorted_unchecked(v));
      --v[i];
      if (!ok) {
        return false;
      }
    }
  }
  return true;
}

bool single_deletions_stay(const FamilyOracle& fam, const FinSet& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<Nat> v = e.elements();
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
    if (!fam.contains(FinSet::from_sorted_unchecked(std::move(v)))) {
      return false;
    }
  }
  return true;
}

template <typename Check>
bool all_members_satisfy(const FamilyOracle& fam, Nat bound, Exec exec, Check check) {
  check_mask_bound(bound);
  const std::int64_t n = std::int64_t{1} << bound;
  if (exec == Exec::serial) {
    for (std::int64_t m = 0; m < n; ++m) {
      const FinSet e = finset_from_mask(static_cast<std::uint64_t>(m));
      if (fam.contains(e) && !check(e)) {
        return false;
      }
    }
    return true;
  }
  bool ok = true;
#pragma omp parallel for schedule(dynamic, 256) reduction(&& : ok)
  for (std::int64_t m = 0; m < n; ++m) {
    if (!ok) {
      continue;
    }
    const FinSet e = finset_from_mask(static_cast<std::uint64_t>(m));
    if (fam.contains(e) && !check(e)) {
      ok = false;
    }
  }
  return ok;
}

}  // namespace

FamilyOracle FamilyOracle::explicit_family(SetFamily fam) {
  return FamilyOracle(std::make_shared<ExplicitOracle>(std::move(fam)));
}

FamilyOracle FamilyOracle::spread_closure(SetFamily generators) {
  return FamilyOracle(std::make_shared<SpreadClosureOracle>(std::move(generators)));
}

FamilyOracle FamilyOracle::bar(FamilyOracle fam) {
  return FamilyOracle(std::make_shared<BarOracle>(std::move(fam)));
}

FamilyOracle FamilyOracle::restrict(FamilyOracle fam, SeqView n) {
  return FamilyOracle(std::make_shared<RestrictedOracle>(std::move(fam), std::move(n)));
}

FamilyOracle FamilyOracle::link(FamilyOracle fam, Nat m) {
  return FamilyOracle(std::make_shared<LinkOracle>(std::move(fam), m));
}

FamilyOracle FamilyOracle::predicate(std::string name, std::function<bool(const FinSet&)> fn,
                                     bool hereditary, bool spreading, std::optional<Nat> support) {
  return FamilyOracle(std::make_shared<PredicateOracle>(std::move(name), std::move(fn), hereditary,
                                                        spreading, support));
}

// ---------------------------------------------------------------------------
// Operations

bool is_hereditary(const SetFamily& fam) {
  bool ok = true;
  fam.for_each([&](const FinSet& e) {
    if (!ok) {
      return;
    }
    for (std::size_t i = 0; i < e.size() && ok; ++i) {
      std::vector<Nat> v = e.elements();
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      ok = fam.contains(FinSet::from_sorted_unchecked(std::move(v)));
    }
  });
  return ok;
}

SetFamily hereditary_closure(const SetFamily& fam) {
  SetFamily out(fam.universe_bound());
  std::vector<FinSet> work = fam.members();
  while (!work.empty()) {
    FinSet e = std::move(work.back());
    work.pop_back();
    if (!out.insert(e)) {
      continue;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::vector<Nat> v = e.elements();
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      FinSet d = FinSet::from_sorted_unchecked(std::move(v));
      if (!out.contains(d)) {
        work.push_back(std::move(d));
      }
    }
  }
  return out;
}

bool is_spreading_within(const FamilyOracle& fam, Nat bound, Exec exec) {
  return all_members_satisfy(fam, bound, exec,
                             [&](const FinSet& e) { return unit_shifts_stay(fam, e, bound); });
}

bool is_hereditary_within(const FamilyOracle& fam, Nat bound, Exec exec) {
  return all_members_satisfy(fam, bound, exec,
                             [&](const FinSet& e) { return single_deletions_stay(fam, e); });
}

SetFamily materialize(const FamilyOracle& fam, Nat bound, Exec exec) {
  check_mask_bound(bound);
  const std::int64_t n = std::int64_t{1} << bound;
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  if (exec == Exec::serial) {
    for (std::int64_t m = 0; m < n; ++m) {
      in[static_cast<std::size_t>(m)] =
          fam.contains(finset_from_mask(static_cast<std::uint64_t>(m)));
    }
  } else {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t m = 0; m < n; ++m) {
      in[static_cast<std::size_t>(m)] =
          fam.contains(finset_from_mask(static_cast<std::uint64_t>(m)));
    }
  }
  SetFamily out(bound);
  for (std::int64_t m = 0; m < n; ++m) {
    if (in[static_cast<std::size_t>(m)]) {
      out.insert(finset_from_mask(static_cast<std::uint64_t>(m)));
    }
  }
  return out;
}

SetFamily restrict(const SetFamily& fam, const SeqView& n) {
  SetFamily out(fam.universe_bound());
  fam.for_each([&](const FinSet& e) {
    if (std::all_of(e.begin(), e.end(), [&](Nat x) { return n.contains(x); })) {
      out.insert(e);
    }
  });
  return out;
}

SetFamily pushforward(const SetFamily& fam, const SeqView& n) {
  const Nat bound = n.size() ? n.prefix().back() : 0;
  SetFamily out(std::max(bound, n.universe_bound()));
  fam.for_each([&](const FinSet& e) {
    if (!e.empty() && e.max() > n.size()) {
      throw PreconditionError("pushforward: member " + e.to_string() + " indexes position " +
                              std::to_string(e.max()) + " beyond the sequence prefix length " +
                              std::to_string(n.size()));
    }
    out.insert(n.image(e));
  });
  return out;
}

SetFamily link(const SetFamily& fam, Nat m) {
  SetFamily out(fam.universe_bound());
  fam.for_each([&](const FinSet& e) {
    if (e.contains(m) && e.min() == m) {
      out.insert(e.without_min());
    }
  });
  return out;
}

SetFamily read_family(std::istream& in, Nat universe_bound) {
  std::vector<FinSet> sets;
  std::string line;
  std::size_t lineno = 0;
  Nat max_seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    while (!view.empty() && (view.back() == '\r' || view.back() == ' ' || view.back() == '\t')) {
      view.remove_suffix(1);
    }
    std::size_t start = view.find_first_not_of(" \t");
    if (start == std::string_view::npos) {
      throw ParseError("family file line " + std::to_string(lineno) +
                       ": blank lines are not allowed; write {} for the empty set");
    }
    view.remove_prefix(start);
    if (view.front() == '#') {
      continue;
    }
    try {
      FinSet e = FinSet::parse(view);
      if (!e.empty()) {
        max_seen = std::max(max_seen, e.max());
      }
      sets.push_back(std::move(e));
    } catch (const ParseError& err) {
      throw ParseError("family file line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (universe_bound == 0) {
    universe_bound = max_seen;
  } else if (max_seen > universe_bound) {
    throw PreconditionError("family file contains element " + std::to_string(max_seen) +
                            " beyond the universe bound " + std::to_string(universe_bound));
  }
  return SetFamily(universe_bound, sets);
}

SetFamily read_family_file(const std::string& path, Nat universe_bound) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open family file '" + path + "'");
  }
  return read_family(in, universe_bound);
}

void write_family(std::ostream& out, const SetFamily& fam) {
  fam.for_each([&](const FinSet& e) { out << e.to_csv() << '\n'; });
}

}  // namespace schreier
