#include "schreier/dichotomy.hpp"

#include <algorithm>
#include <random>

#include "schreier/error.hpp"
#include "schreier/policy.hpp"
#include "schreier/strategy.hpp"

namespace schreier::dichotomy {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::inclusion:
      return "inclusion";
    case Outcome::embedding:
      return "embedding";
    case Outcome::undecided_at_truncation:
      return "undecided_at_truncation";
  }
  return "?";
}

std::string to_string(Color c) {
  switch (c) {
    case Color::red:
      return "red";
    case Color::blue:
      return "blue";
    case Color::undecided:
      return "undecided";
  }
  return "?";
}

namespace {

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

// Tuple-family members on [1, k_max] bucketed by their maximum (0 = empty set).
std::vector<std::vector<FinSet>> buckets_by_max(const TupleSpec& spec, Nat k_max) {
  std::vector<std::vector<FinSet>> out(k_max + 1);
  if (k_max == 0) {
    out[0].push_back(FinSet{});
    return out;
  }
  enumerate(spec, k_max).for_each([&](const FinSet& e) {
    out[e.empty() ? 0 : e.max()].push_back(e);
  });
  return out;
}

struct Branch {
  std::vector<Nat> m;
  std::uint64_t nodes = 0;
  bool found = false;
  bool truncated = false;
};

class InclusionDfs {
 public:
  InclusionDfs(const FamilyOracle& fam, const std::vector<std::vector<FinSet>>& buckets,
               const std::vector<Nat>& ground, Nat target, std::size_t cap)
      : fam_(fam), buckets_(buckets), ground_(ground), target_(target), cap_(cap) {}

  Branch run(std::size_t first) {
    Branch b;
    std::vector<Nat> m;
    b.found = extend(m, first, b);
    if (b.found) {
      b.m = std::move(m);
    }
    return b;
  }

 private:
  bool admissible(const std::vector<Nat>& m) const {
    const std::size_t k = m.size();
    for (const auto& e : buckets_[k]) {
      std::vector<Nat> img;
      img.reserve(e.size());
      for (Nat i : e) {
        img.push_back(m[i - 1]);
      }
      if (!fam_.contains(FinSet::from_sorted_unchecked(std::move(img)))) {
        return false;
      }
    }
    return true;
  }

  // Places ground_[idx] as the next element, then extends depth-first.
  bool extend(std::vector<Nat>& m, std::size_t idx, Branch& b) {
    if (++b.nodes > cap_) {
      b.truncated = true;
      return false;
    }
    m.push_back(ground_[idx]);
    if (!admissible(m)) {
      m.pop_back();
      return false;
    }
    if (m.size() >= target_) {
      return true;
    }
    const std::size_t need = target_ - m.size();
    for (std::size_t j = idx + 1; j + need <= ground_.size(); ++j) {
      if (extend(m, j, b)) {
        return true;
      }
      if (b.truncated) {
        break;
      }
    }
    m.pop_back();
    return false;
  }

  const FamilyOracle& fam_;
  const std::vector<std::vector<FinSet>>& buckets_;
  const std::vector<Nat>& ground_;
  Nat target_;
  std::size_t cap_;
};

}  // namespace

InclusionSearch inclusion_search(const FamilyOracle& fam, const TupleSpec& spec,
                                 const SeqView& ground, Nat min_length, std::size_t node_cap,
                                 Exec exec) {
  InclusionSearch out;
  if (min_length > ground.size()) {
    return out;
  }
  if (!fam.contains(FinSet{})) {
    return out;
  }
  if (min_length == 0) {
    out.m = SeqView({}, ground.universe_bound());
    return out;
  }
  const auto buckets = buckets_by_max(spec, min_length);
  const std::vector<Nat>& g = ground.prefix();
  const std::size_t firsts = g.size() - min_length + 1;
  std::vector<Branch> branches(firsts);
  InclusionDfs dfs(fam, buckets, g, min_length, node_cap);
  if (exec == Exec::serial) {
    for (std::size_t j = 0; j < firsts; ++j) {
      branches[j] = dfs.run(j);
      if (branches[j].found) {
        break;
      }
    }
  } else {
    const auto n = static_cast<std::int64_t>(firsts);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < n; ++j) {
      branches[static_cast<std::size_t>(j)] = dfs.run(static_cast<std::size_t>(j));
    }
  }
  for (std::size_t j = 0; j < firsts; ++j) {
    out.nodes += branches[j].nodes;
    out.truncated = out.truncated || branches[j].truncated;
    if (branches[j].found) {
      out.m = SeqView(branches[j].m, ground.universe_bound());
      break;
    }
  }
  return out;
}

std::optional<FinSet> first_inclusion_failure(const FamilyOracle& fam, const TupleSpec& spec,
                                              const SeqView& m, std::uint64_t* checked) {
  std::optional<FinSet> bad;
  std::uint64_t n = 0;
  if (!fam.contains(FinSet{})) {
    bad = FinSet{};
  } else if (m.size() > 0) {
    enumerate(spec, m.size()).for_each([&](const FinSet& e) {
      if (bad) {
        return;
      }
      ++n;
      if (!fam.contains(m.image(e))) {
        bad = e;
      }
    });
  } else {
    n = 1;
  }
  if (checked) {
    *checked = n;
  }
  return bad;
}

DichotomyCertificate dichotomy_search(const SetFamily& fam, const TupleSpec& spec,
                                      Nat universe_bound, const SearchParams& params) {
  if (!is_hereditary(fam)) {
    throw PreconditionError("dichotomy search needs a hereditary family");
  }
  if (fam.universe_bound() > universe_bound) {
    throw PreconditionError("family universe " + std::to_string(fam.universe_bound()) +
                            " exceeds the search universe " + std::to_string(universe_bound));
  }
  DichotomyCertificate c;
  c.family_id = embed::family_fingerprint(fam);
  c.spec = spec;
  c.universe_bound = universe_bound;
  c.params = params;
  if (c.params.min_length == 0) {
    c.params.min_length = (universe_bound + 1) / 2;
  }
  if (c.params.n_budget == 0) {
    c.params.n_budget = universe_bound;
  }
  const FamilyOracle oracle = FamilyOracle::explicit_family(fam);
  const SeqView ground = SeqView::identity(universe_bound);

  const InclusionSearch inc =
      inclusion_search(oracle, spec, ground, c.params.min_length, c.params.node_cap, params.exec);
  c.search_trace.push_back("inclusion: min_length=" + std::to_string(c.params.min_length) +
                           " nodes=" + std::to_string(inc.nodes) +
                           (inc.truncated ? " (node cap hit)" : "") +
                           (inc.m ? " found M=" + inc.m->to_string() : " no M"));
  if (inc.m) {
    c.outcome = Outcome::inclusion;
    c.m = *inc.m;
    first_inclusion_failure(oracle, spec, c.m, &c.inclusion_checked);
    return c;
  }

  games::SolveOptions so;
  so.state_cap = c.params.state_cap;
  so.require_clean = true;
  so.exec = params.exec;
  for (Nat start = 1; start <= universe_bound; ++start) {
    std::vector<Nat> tail;
    for (Nat x = start; x <= universe_bound; ++x) {
      tail.push_back(x);
    }
    const SeqView m(tail, universe_bound);
    const SetFamily restricted = restrict(fam, m);
    std::optional<games::Strategy> strat;
    try {
      strat = games::solve_N(spec, FamilyOracle::explicit_family(restricted), universe_bound,
                             c.params.n_budget, so);
    } catch (const CapExceeded& e) {
      c.search_trace.push_back("embedding: M=" + m.to_string() + " solver cap: " + e.what());
      continue;
    }
    if (!strat) {
      c.search_trace.push_back("embedding: M=" + m.to_string() + " no clean N strategy");
      continue;
    }
    auto sp = std::make_shared<const games::Strategy>(*strat);
    const std::string sid = "solved:" + fnv_hex(games::to_json(*strat).dump());
    embed::EmbeddingCertificate ec;
    try {
      ec = embed::build_embedding(restricted, spec, *games::strategy_policy(sp), sid,
                                  universe_bound, params.exec);
    } catch (const Error& e) {
      c.search_trace.push_back("embedding: M=" + m.to_string() + " pipeline error: " + e.what());
      continue;
    }
    c.search_trace.push_back("embedding: M=" + m.to_string() + " strategy " + sid +
                             (ec.accepted() ? " accepted" : " rejected"));
    if (ec.accepted()) {
      c.outcome = Outcome::embedding;
      c.m = m;
      c.strategy = *strat;
      c.embedding = std::move(ec);
      return c;
    }
  }
  c.outcome = Outcome::undecided_at_truncation;
  return c;
}

Json to_json(const DichotomyCertificate& c) {
  Json j;
  j["kind"] = "dichotomy_certificate";
  j["outcome"] = to_string(c.outcome);
  j["family"] = c.family_id;
  j["spec"] = c.spec.to_string();
  j["universe_bound"] = c.universe_bound;
  Json p;
  p["min_length"] = c.params.min_length;
  p["n_budget"] = c.params.n_budget;
  p["node_cap"] = c.params.node_cap;
  p["state_cap"] = c.params.state_cap;
  p["seed"] = c.params.seed;
  j["params"] = std::move(p);
  j["M"] = c.outcome == Outcome::undecided_at_truncation ? Json(nullptr) : Json(c.m.prefix());
  j["inclusion_checked"] = c.inclusion_checked;
  j["strategy"] = c.strategy ? games::to_json(*c.strategy) : Json(nullptr);
  j["embedding"] = c.embedding ? embed::to_json(*c.embedding) : Json(nullptr);
  j["search_trace"] = c.search_trace;
  return j;
}

Reverification reverify(const Json& cert, const SetFamily& fam) {
  Reverification r;
  try {
    const std::string outcome = cert.at("outcome").get<std::string>();
    const TupleSpec spec = TupleSpec::parse(cert.at("spec").get<std::string>());
    const Nat universe = cert.at("universe_bound").get<Nat>();
    if (cert.at("family").get<std::string>() != embed::family_fingerprint(fam)) {
      r.problems.push_back("certificate was issued for a different family");
    }
    if (outcome == "undecided_at_truncation") {
      r.problems.push_back("no side certified");
    } else {
      const SeqView m(cert.at("M").get<std::vector<Nat>>(), universe);
      if (outcome == "inclusion") {
        const Nat min_length = cert.at("params").at("min_length").get<Nat>();
        if (m.size() < min_length) {
          r.problems.push_back("M shorter than the declared minimum length");
        }
        const auto bad =
            first_inclusion_failure(FamilyOracle::explicit_family(fam), spec, m, &r.checked);
        if (bad) {
          r.problems.push_back("m_E = " + m.image(*bad).to_string() +
                               " for E = " + bad->to_string() + " is outside the family");
        }
      } else if (outcome == "embedding") {
        const Json& ec = cert.at("embedding");
        std::vector<FinSet> expect = restrict(fam, m).members();
        std::vector<FinSet> got;
        for (const auto& x : ec.at("members")) {
          got.push_back(FinSet(x.get<std::vector<Nat>>()));
        }
        std::sort(expect.begin(), expect.end());
        std::sort(got.begin(), got.end());
        if (expect != got) {
          r.problems.push_back("embedding members differ from fam[M]");
        }
        const auto check = embed::verify_certificate(ec);
        r.checked = check.checked;
        r.problems.insert(r.problems.end(), check.problems.begin(), check.problems.end());
      } else {
        r.problems.push_back("unknown outcome " + outcome);
      }
    }
  } catch (const Json::exception& e) {
    r.problems.push_back(std::string("malformed certificate: ") + e.what());
  } catch (const Error& e) {
    r.problems.push_back(e.what());
  }
  r.ok = r.problems.empty();
  return r;
}

SetFamily random_hereditary_family(Nat universe_bound, std::uint64_t seed) {
  if (universe_bound < 1) {
    throw PreconditionError("random family needs a universe bound >= 1");
  }
  std::mt19937_64 rng(seed);
  const std::size_t gens = 1 + rng() % 5;
  std::vector<FinSet> sets;
  for (std::size_t g = 0; g < gens; ++g) {
    const std::size_t size = std::min<std::size_t>(1 + rng() % 6, universe_bound);
    std::vector<Nat> pool(universe_bound);
    for (Nat i = 0; i < universe_bound; ++i) {
      pool[i] = i + 1;
    }
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + rng() % (pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<Nat> pick(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(pick.begin(), pick.end());
    sets.push_back(FinSet(std::move(pick)));
  }
  std::vector<FinSet> antichain;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
      if (i == j) {
        continue;
      }
      dominated = sets[i].is_subset_of(sets[j]) && (sets[i] != sets[j] || j < i);
    }
    if (!dominated) {
      antichain.push_back(sets[i]);
    }
  }
  return hereditary_closure(SetFamily(universe_bound, antichain));
}

Diagonalization diagonalize_first_lemma(const FamilyOracle& fam, const TupleSpec& spec,
                                        Nat universe_bound, std::size_t depth,
                                        const SearchParams& params) {
  if (depth > universe_bound) {
    throw PreconditionError("diagonalization depth " + std::to_string(depth) +
                            " exceeds the universe bound " + std::to_string(universe_bound));
  }
  Diagonalization d;
  std::vector<Nat> current = SeqView::identity(universe_bound).prefix();
  std::vector<Nat> reds;
  std::vector<Nat> blues;
  std::size_t position = 0;
  while (!current.empty()) {
    ++position;
    const Nat m = current.front();
    const SeqView tail(std::vector<Nat>(current.begin() + 1, current.end()), universe_bound);
    const FamilyOracle shifted = FamilyOracle::link(fam, m);
    ColoredPosition cp{position, m, Color::blue, {}};
    InclusionSearch whole =
        inclusion_search(shifted, spec, tail, tail.size(), params.node_cap, params.exec);
    std::vector<Nat> next = tail.prefix();
    if (whole.m) {
      cp.color = Color::red;
      cp.provenance = "inclusion on the whole tail of length " + std::to_string(tail.size());
    } else if (tail.size() > 1) {
      const Nat half = (tail.size() + 1) / 2;
      InclusionSearch thin =
          inclusion_search(shifted, spec, tail, half, params.node_cap, params.exec);
      if (thin.m) {
        cp.color = Color::red;
        cp.provenance = "inclusion on thinned tail " + thin.m->to_string();
        next = thin.m->prefix();
      } else if (whole.truncated || thin.truncated) {
        cp.color = Color::undecided;
        cp.provenance = "inner search hit the node cap";
      } else {
        cp.provenance = "no inclusion on tail subsequences of length >= " + std::to_string(half);
      }
    } else if (whole.truncated) {
      cp.color = Color::undecided;
      cp.provenance = "inner search hit the node cap";
    } else {
      cp.provenance = "no inclusion on the tail of length " + std::to_string(tail.size());
    }
    if (cp.color == Color::red) {
      reds.push_back(m);
    } else if (cp.color == Color::blue) {
      blues.push_back(m);
    }
    d.coloring.positions.push_back(std::move(cp));
    current = std::move(next);
  }
  d.red_side = reds.size() >= depth && depth > 0;
  d.l = SeqView(d.red_side ? reds : blues, universe_bound);
  return d;
}

Json to_json(const Diagonalization& d) {
  Json j;
  j["kind"] = "diagonalization";
  j["side"] = d.red_side ? "red" : "blue";
  j["L"] = d.l.prefix();
  Json pos = Json::array();
  for (const auto& p : d.coloring.positions) {
    Json x;
    x["position"] = p.position;
    x["m"] = p.m;
    x["color"] = to_string(p.color);
    x["provenance"] = p.provenance;
    pos.push_back(std::move(x));
  }
  j["coloring"] = std::move(pos);
  return j;
}

}  // namespace schreier::dichotomy
