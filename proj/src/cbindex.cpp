#include "schreier/cbindex.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "schreier/error.hpp"
#include "schreier/schreier.hpp"

namespace schreier::cb {

namespace {

struct Undetected : Error {
  using Error::Error;
};

Nat max_or_zero(const FinSet& a) { return a.empty() ? 0 : a.max(); }

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return hex;
}

void require_spreading(const FamilyOracle& fam) {
  if (!fam.known_spreading() && !is_spreading_within(fam, 10, Exec::serial)) {
    throw PreconditionError("the strong derivative needs a spreading family; " + fam.describe() +
                            " fails the spreading check on [1,10]");
  }
}

std::string probes_text(const std::vector<Probe>& probes) {
  std::string s;
  for (const auto& p : probes) {
    s += (s.empty() ? "" : ", ") + std::to_string(p.l) + ":" + (p.rank ? p.rank->to_string() : "-");
  }
  return s;
}

// Supremum of r_j + 1 for a window of nondecreasing probe ranks.
Ordinal detect_sup(const std::vector<Probe>& probes) {
  std::vector<Ordinal> present;
  bool seen = false;
  for (const auto& p : probes) {
    if (p.rank) {
      seen = true;
      present.push_back(*p.rank);
    } else if (seen) {
      throw Undetected("extension membership is not monotone in the probe: " + probes_text(probes));
    }
  }
  if (present.empty()) {
    return Ordinal{};
  }
  const std::size_t want = std::max<std::size_t>(3, (probes.size() + 1) / 2);
  if (present.size() < want) {
    throw Undetected("only " + std::to_string(present.size()) +
                     " extensions in the window: " + probes_text(probes));
  }
  const std::vector<Ordinal> tail(present.end() - static_cast<std::ptrdiff_t>(want), present.end());
  if (std::all_of(tail.begin(), tail.end(), [&](const Ordinal& o) { return o == tail.front(); })) {
    return successor(tail.front());
  }
  // First CNF position where the tail disagrees.
  std::size_t p = 0;
  for (;; ++p) {
    bool all_have = true;
    for (const auto& o : tail) {
      all_have = all_have && o.terms().size() > p;
    }
    if (!all_have) {
      throw Undetected("probe ranks end before they diverge: " + probes_text(probes));
    }
    const OrdinalTerm& t0 = tail.front().terms()[p];
    if (!std::all_of(tail.begin(), tail.end(),
                     [&](const Ordinal& o) { return o.terms()[p] == t0; })) {
      break;
    }
  }
  const Ordinal& e = tail.front().terms()[p].exponent;
  std::vector<std::uint64_t> c;
  for (const auto& o : tail) {
    if (!(o.terms()[p].exponent == e)) {
      throw Undetected("leading varying exponent changes: " + probes_text(probes));
    }
    c.push_back(o.terms()[p].coefficient);
  }
  if (c[1] <= c[0]) {
    throw Undetected("varying coefficient does not increase: " + probes_text(probes));
  }
  const std::uint64_t d = c[1] - c[0];
  for (std::size_t i = 2; i < c.size(); ++i) {
    if (c[i] <= c[i - 1] || c[i] - c[i - 1] != d) {
      throw Undetected("varying coefficient is not affine: " + probes_text(probes));
    }
  }
  std::vector<OrdinalTerm> head(tail.front().terms().begin(),
                                tail.front().terms().begin() + static_cast<std::ptrdiff_t>(p));
  return add(Ordinal::from_terms(std::move(head)), omega_power(successor(e)));
}

}  // namespace

std::string to_string(RankResult::Outcome o) {
  switch (o) {
    case RankResult::Outcome::rank:
      return "rank";
    case RankResult::Outcome::not_in_family:
      return "not_in_family";
    case RankResult::Outcome::pattern_undetected:
      return "pattern_undetected";
  }
  return "?";
}

bool in_derivative(const FamilyOracle& fam, const FinSet& a) {
  require_spreading(fam);
  if (!fam.contains(a)) {
    throw PreconditionError(a.to_string() + " is not a member of " + fam.describe());
  }
  const Nat l0 = fam.stable_from(a).value_or(max_or_zero(a) + 1);
  const bool near = fam.contains(a.extended(l0));
  const bool far = fam.contains(a.extended(l0 + 1));
  if (near && !far) {
    throw PreconditionError(fam.describe() + " is not spreading: " + a.extended(l0).to_string() +
                            " is a member but " + a.extended(l0 + 1).to_string() + " is not");
  }
  return near || far;
}

RankEngine::RankEngine(FamilyOracle fam, RankOptions opts) : fam_(std::move(fam)), opts_(opts) {
  if (opts_.window < 3) {
    throw PreconditionError("rank probe window must be at least 3");
  }
  require_spreading(fam_);
  if (auto alpha = oracle_ordinal(fam_); alpha && alpha->is_finite()) {
    finite_order_ = alpha->finite_value();
  }
}

std::size_t RankEngine::memo_size() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

std::string RankEngine::fingerprint() const {
  return fam_.describe() + "|window=" + std::to_string(opts_.window);
}

std::optional<RankEngine::Node> RankEngine::root(const FinSet& a) const {
  if (finite_order_) {
    auto st = FiniteSchreierState::of(*finite_order_, a);
    if (!st) {
      return std::nullopt;
    }
    return Node{a, std::move(st)};
  }
  if (!fam_.contains(a)) {
    return std::nullopt;
  }
  return Node{a, std::nullopt};
}

std::string RankEngine::key(const Node& n) const {
  std::string k;
  if (n.state) {
    // Only the spare capacity per level matters for later extensions; the
    // first element matters while levels remain to be opened.
    const FiniteSchreierState& s = *n.state;
    const bool open = s.levels().size() < s.order();
    k = "s:" + std::to_string(s.empty() ? 0 : 1) + ":" + std::to_string(open ? s.first() : 0) +
        ":" + std::to_string(s.order() - s.levels().size());
    for (const auto& lv : s.levels()) {
      k += ":" + std::to_string(lv.cap - lv.used);
    }
  } else {
    k = "e:" + n.set.to_csv();
  }
  return k;
}

Nat RankEngine::first_probe(const Node& n) const {
  if (n.state) {
    return n.state->last() + 1;
  }
  return fam_.stable_from(n.set).value_or(max_or_zero(n.set) + 1);
}

std::optional<RankEngine::Node> RankEngine::extend(const Node& n, Nat l) const {
  if (n.state) {
    FiniteSchreierState s = *n.state;
    if (!s.add(l)) {
      return std::nullopt;
    }
    return Node{FinSet{}, std::move(s)};
  }
  FinSet e = n.set.extended(l);
  if (!fam_.contains(e)) {
    return std::nullopt;
  }
  return Node{std::move(e), std::nullopt};
}

Ordinal RankEngine::sup_of(const std::vector<Probe>& probes, const Node& n) const {
  try {
    return detect_sup(probes);
  } catch (const Undetected& e) {
    throw Undetected("at " + (n.state ? key(n) : n.set.to_string()) + ": " + e.what());
  }
}

Ordinal RankEngine::rank_node(const Node& n) {
  const std::string k = key(n);
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(k); it != memo_.end()) {
      return it->second;
    }
    if (++nodes_ > opts_.node_cap) {
      throw CapExceeded("rank engine visited more than " + std::to_string(opts_.node_cap) +
                        " positions");
    }
  }
  std::vector<Probe> probes;
  const Nat l0 = first_probe(n);
  for (Nat j = 0; j < opts_.window; ++j) {
    Probe p{l0 + j, std::nullopt};
    if (auto child = extend(n, p.l)) {
      p.rank = rank_node(*child);
    }
    probes.push_back(std::move(p));
  }
  Ordinal r = sup_of(probes, n);
  std::lock_guard lock(mu_);
  memo_.emplace(k, r);
  return r;
}

RankResult RankEngine::rank(const FinSet& a) {
  RankResult out;
  out.window = opts_.window;
  const auto r = root(a);
  if (!r) {
    out.outcome = RankResult::Outcome::not_in_family;
    out.detail = a.to_string() + " is not a member of " + fam_.describe();
    return out;
  }
  const Nat l0 = first_probe(*r);
  const auto w = static_cast<std::int64_t>(opts_.window);
  std::vector<Probe> probes(opts_.window);
  std::vector<std::string> errors(opts_.window);
  std::vector<std::exception_ptr> failures(opts_.window);
  auto probe = [&](std::int64_t j) {
    const auto i = static_cast<std::size_t>(j);
    probes[i].l = l0 + i;
    try {
      if (auto child = extend(*r, probes[i].l)) {
        probes[i].rank = rank_node(*child);
      }
    } catch (const Undetected& e) {
      errors[i] = e.what();
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (opts_.exec == Exec::serial) {
    for (std::int64_t j = 0; j < w; ++j) {
      probe(j);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < w; ++j) {
      probe(j);
    }
  }
  for (const auto& f : failures) {
    if (f) {
      std::rethrow_exception(f);
    }
  }
  out.trace = probes;
  for (const auto& e : errors) {
    if (!e.empty()) {
      out.outcome = RankResult::Outcome::pattern_undetected;
      out.detail = e;
      return out;
    }
  }
  try {
    out.rank = sup_of(probes, *r);
  } catch (const Undetected& e) {
    out.outcome = RankResult::Outcome::pattern_undetected;
    out.detail = e.what();
  }
  return out;
}

RankResult RankEngine::index() {
  if (!fam_.contains(FinSet{})) {
    throw PreconditionError("the index needs the empty set in " + fam_.describe());
  }
  RankResult r = rank(FinSet{});
  if (r.ok()) {
    r.rank = successor(r.rank);
    if (!r.rank.is_successor()) {
      throw Error("internal: index " + r.rank.to_string() + " is not a successor");
    }
  }
  return r;
}

void RankEngine::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return;
  }
  std::string line;
  std::getline(in, line);
  if (line != "# " + fingerprint()) {
    return;
  }
  std::lock_guard lock(mu_);
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("malformed rank cache line in " + path + ": " + line);
    }
    memo_.emplace(line.substr(0, tab), parse_ordinal(line.substr(tab + 1)));
  }
}

void RankEngine::save(const std::string& path) const {
  std::map<std::string, Ordinal> sorted;
  {
    std::lock_guard lock(mu_);
    sorted.insert(memo_.begin(), memo_.end());
  }
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write rank cache " + path);
  }
  out << "# " << fingerprint() << "\n";
  for (const auto& [k, v] : sorted) {
    out << k << "\t" << v.to_string() << "\n";
  }
}

namespace {

std::optional<std::string> env_cache_path(const std::string& fingerprint) {
  const char* dir = std::getenv("SCHREIER_CACHE_DIR");
  if (!dir || !*dir) {
    return std::nullopt;
  }
  std::filesystem::create_directories(dir);
  return std::string(dir) + "/rank-" + fnv_hex(fingerprint) + ".tsv";
}

}  // namespace

void RankEngine::load_env_cache() {
  if (auto p = env_cache_path(fingerprint())) {
    load(*p);
  }
}

void RankEngine::save_env_cache() const {
  if (auto p = env_cache_path(fingerprint())) {
    save(*p);
  }
}

namespace {

Nat finite_rank_rec(const FamilyOracle& fam, const FinSet& a, std::map<FinSet, Nat>& memo) {
  if (auto it = memo.find(a); it != memo.end()) {
    return it->second;
  }
  const auto stable = fam.stable_from(a);
  if (!stable) {
    throw PreconditionError("exact finite rank needs a stabilization point for " + fam.describe());
  }
  Nat best = 0;
  for (Nat l = max_or_zero(a) + 1; l <= *stable; ++l) {
    const FinSet e = a.extended(l);
    if (fam.contains(e)) {
      best = std::max(best, finite_rank_rec(fam, e, memo) + 1);
    }
  }
  memo.emplace(a, best);
  return best;
}

Nat finite_rank_along_rec(const FamilyOracle& fam, const FinSet& a, const SeqView& ground,
                          std::map<FinSet, Nat>& memo) {
  if (auto it = memo.find(a); it != memo.end()) {
    return it->second;
  }
  Nat best = 0;
  for (Nat x : ground.prefix()) {
    if (x <= max_or_zero(a)) {
      continue;
    }
    const FinSet e = a.extended(x);
    if (fam.contains(e)) {
      best = std::max(best, finite_rank_along_rec(fam, e, ground, memo) + 1);
    }
  }
  memo.emplace(a, best);
  return best;
}

}  // namespace

Nat finite_rank(const FamilyOracle& fam, const FinSet& a) {
  if (!fam.contains(a)) {
    throw PreconditionError(a.to_string() + " is not a member of " + fam.describe());
  }
  std::map<FinSet, Nat> memo;
  return finite_rank_rec(fam, a, memo);
}

Nat finite_rank_along(const FamilyOracle& fam, const FinSet& a, const SeqView& ground) {
  if (!fam.contains(a)) {
    throw PreconditionError(a.to_string() + " is not a member of " + fam.describe());
  }
  std::map<FinSet, Nat> memo;
  return finite_rank_along_rec(fam, a, ground, memo);
}

FamilyOracle bar(const FamilyOracle& fam) { return FamilyOracle::bar(fam); }

TransferCheck rank_transfer_check(const SetFamily& gens, const SeqView& n, Nat bound) {
  if (n.size() < bound) {
    throw PreconditionError("transfer check needs a prefix of N of length >= " +
                            std::to_string(bound));
  }
  const FamilyOracle f = FamilyOracle::spread_closure(gens);
  const FamilyOracle pushed = FamilyOracle::predicate("pushforward", [f, n](const FinSet& x) {
    auto pre = n.preimage(x);
    return pre && f.contains(*pre);
  });
  TransferCheck out;
  std::map<FinSet, Nat> memo_f;
  std::map<FinSet, Nat> memo_g;
  std::vector<FinSet> members = materialize(f, bound, Exec::serial).members();
  if (std::find(members.begin(), members.end(), FinSet{}) == members.end()) {
    members.insert(members.begin(), FinSet{});
  }
  for (const auto& a : members) {
    ++out.checked;
    if (!f.contains(a)) {
      // empty set outside an empty closure: nothing to transfer
      if (pushed.contains(n.image(a))) {
        out.ok = false;
        out.counterexample = a;
        break;
      }
      continue;
    }
    const Nat left = finite_rank_rec(f, a, memo_f);
    const Nat right = finite_rank_along_rec(pushed, n.image(a), n, memo_g);
    if (left != right) {
      out.ok = false;
      out.counterexample = a;
      break;
    }
  }
  return out;
}

BarLiftResult bar_lift_batch(const std::vector<SetFamily>& generator_sets, Nat bound, Exec exec) {
  struct Local {
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
    std::optional<FinSet> first;
  };
  std::vector<Local> results(generator_sets.size());
  auto run = [&](std::int64_t i) {
    const auto k = static_cast<std::size_t>(i);
    const FamilyOracle f = FamilyOracle::spread_closure(generator_sets[k]);
    const FamilyOracle b = FamilyOracle::bar(f);
    std::map<FinSet, Nat> memo_f;
    std::map<FinSet, Nat> memo_b;
    Local& out = results[k];
    materialize(f, bound, Exec::serial).for_each([&](const FinSet& a) {
      if (a.empty()) {
        return;
      }
      const Nat ra = finite_rank_rec(f, a, memo_f);
      for (Nat l = 1; l < a.min(); ++l) {
        ++out.checks;
        const FinSet la = a.with(l);
        if (finite_rank_rec(b, la, memo_b) < ra) {
          ++out.failures;
          if (!out.first) {
            out.first = la;
          }
        }
      }
    });
  };
  const auto n = static_cast<std::int64_t>(generator_sets.size());
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      run(i);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
      run(i);
    }
  }
  BarLiftResult r;
  r.families = generator_sets.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    r.checks += results[i].checks;
    r.failures += results[i].failures;
    if (results[i].first && !r.first_failure) {
      r.first_failure.emplace(i, *results[i].first);
    }
  }
  return r;
}

std::vector<SetFamily> small_generator_families(Nat universe, std::size_t max_sets,
                                                std::size_t max_size) {
  if (universe > 24) {
    throw CapExceeded("generator families are enumerated on universes up to 24");
  }
  std::vector<FinSet> sets;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << universe); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (bits <= max_size) {
      sets.push_back(finset_from_mask(mask));
    }
  }
  std::sort(sets.begin(), sets.end());
  std::vector<SetFamily> out;
  std::vector<std::size_t> pick;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (!pick.empty()) {
      std::vector<FinSet> members;
      for (std::size_t i : pick) {
        members.push_back(sets[i]);
      }
      out.emplace_back(universe, members);
    }
    if (pick.size() == max_sets) {
      return;
    }
    for (std::size_t i = from; i < sets.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

Json to_json(const RankResult& r, const FamilyOracle& fam, const FinSet& a) {
  Json j;
  j["kind"] = "rank";
  j["family"] = fam.describe();
  j["set"] = a.elements();
  j["outcome"] = to_string(r.outcome);
  j["rank"] = r.ok() ? Json(r.rank.to_string()) : Json(nullptr);
  j["window"] = r.window;
  Json trace = Json::array();
  for (const auto& p : r.trace) {
    Json x;
    x["l"] = p.l;
    x["rank"] = p.rank ? Json(p.rank->to_string()) : Json(nullptr);
    trace.push_back(std::move(x));
  }
  j["trace"] = std::move(trace);
  if (!r.detail.empty()) {
    j["detail"] = r.detail;
  }
  return j;
}

}  // namespace schreier::cb
