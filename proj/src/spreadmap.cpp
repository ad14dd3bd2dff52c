#include "schreier/spreadmap.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "schreier/error.hpp"
#include "schreier/policy.hpp"

namespace schreier::spreadmap {

using games::Machine;
using games::Move;
using games::Task;

Nat SpreadingMap::at(Nat t) const {
  if (t < 1 || t > table.size()) {
    throw PreconditionError("spreading map tabulated on [1, " + std::to_string(table.size()) +
                            "], asked for f(" + std::to_string(t) + ")");
  }
  return table[t - 1];
}

FinSet SpreadingMap::image(const FinSet& e) const {
  std::vector<Nat> v;
  v.reserve(e.size());
  for (Nat t : e) {
    v.push_back(at(t));
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

namespace {

using Table = std::vector<Nat>;

Nat add_checked(Nat a, Nat b, Nat t) {
  Nat r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw OverflowError("spreading map value overflows at t = " + std::to_string(t));
  }
  return r;
}

Nat mul_checked(Nat a, Nat b, Nat t) {
  Nat r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw OverflowError("spreading map value overflows at t = " + std::to_string(t));
  }
  return r;
}

struct Context {
  Machine machine;
  std::vector<Move> moves;
  Nat finish = 0;  // largest element played so far (0 for none)
};

class Builder {
 public:
  Builder(const GameSpec& spec, Nat budget, const BuildOptions& opts)
      : spec_(spec), policy_(*spec.policy), budget_(budget), opts_(opts) {}

  SpreadingMap run() {
    SpreadingMap out;
    out.budget = budget_;
    Context root{Machine(spec_.tuple), {}, 0};
    std::vector<Table> parts;
    if (spec_.tuple.size() == 1) {
      out.table = instance(root, 0, &parts);
    } else {
      out.table =
          sequence(root, spec_.tuple.size(), 0, 0, "tuple", spec_.tuple.to_string(), 0, &parts);
    }
    out.constituents = std::move(parts);
    out.trace = std::move(trace_);
    out.trace_truncated = trace_truncated_;
    return out;
  }

 private:
  void record(TraceEntry e) {
    if (trace_.size() < opts_.trace_cap) {
      trace_.push_back(std::move(e));
    } else {
      trace_truncated_ = true;
    }
  }

  // Map for the single game instance starting at the top of c's stack.
  Table instance(const Context& c, std::size_t depth, std::vector<Table>* parts = nullptr) {
    std::string key;
    if (policy_.history_free()) {
      key = c.machine.state_key();
      if (auto it = memo_.find(key); it != memo_.end()) {
        return it->second;
      }
    }
    Table t = compute_instance(c, depth, parts);
    if (!key.empty()) {
      memo_.emplace(std::move(key), t);
    }
    return t;
  }

  Table compute_instance(const Context& c, std::size_t depth, std::vector<Table>* parts) {
    const std::string ctx = games::prefix_key(c.moves, c.moves.size());
    const Task& top = c.machine.stack().back();
    if (top.kind == Task::Kind::block) {
      record(TraceEntry{depth, ctx, "0", "identity", 0, {}});
      Table id(budget_);
      for (Nat t = 1; t <= budget_; ++t) {
        id[t - 1] = t;
      }
      return id;
    }
    const Ordinal alpha = top.alpha;
    const games::Obligation ob = c.machine.obligation();
    const auto choice = policy_.choose(games::DecisionContext{
        c.moves, ob.game,
        static_cast<std::size_t>(std::count_if(c.moves.begin(), c.moves.end(), [](const Move& m) {
          return m.side == games::Side::N;
        }))});
    if (!choice || *choice < 1) {
      throw PreconditionError("policy " + policy_.describe() + " is undefined at prefix \"" + ctx +
                              "\"");
    }
    const Nat l = *choice;
    Context next{c.machine, c.moves, c.finish};
    next.machine.play_n(l);
    next.moves.push_back(Move::n(l));
    Table f(budget_);
    if (alpha == Ordinal::nat(1)) {
      record(TraceEntry{depth, ctx, alpha.to_string(), "one", l, {}});
      for (Nat t = 1; t <= budget_; ++t) {
        f[t - 1] = add_checked(l, mul_checked(l, t, t), t);
      }
      if (parts) {
        Table id(budget_);
        for (Nat t = 1; t <= budget_; ++t) {
          id[t - 1] = t;
        }
        parts->assign(static_cast<std::size_t>(l), id);
      }
      return f;
    }
    if (alpha.is_successor()) {
      return sequence(next, l, l, depth, "successor", alpha.to_string(), l, parts);
    }
    record(TraceEntry{depth, ctx, alpha.to_string(), "limit", l, {}});
    Table inner = instance(next, depth + 1);
    for (Nat t = 1; t <= budget_; ++t) {
      f[t - 1] = add_checked(inner[t - 1], l, t);
    }
    if (parts) {
      parts->push_back(inner);
    }
    return f;
  }

  // k consecutive instances starting at c: f(t) = offset + sum_i f^i(t).
  Table sequence(const Context& c, Nat k, Nat offset, std::size_t depth, const char* rule,
                 const std::string& game, Nat choice, std::vector<Table>* parts) {
    const std::string ctx = games::prefix_key(c.moves, c.moves.size());
    TraceEntry entry{depth, ctx, game, rule, choice, {}};
    const std::size_t slot = trace_.size();
    record(entry);
    Table f(budget_, offset);
    std::vector<Context> contexts{c};
    for (Nat i = 1; i <= k; ++i) {
      if (contexts.empty()) {
        // no i-th sub-game can start before the budget ends: f^i(t) = t
        for (Nat t = 1; t <= budget_; ++t) {
          f[t - 1] = add_checked(f[t - 1], t, t);
        }
        if (parts) {
          Table id(budget_);
          for (Nat t = 1; t <= budget_; ++t) {
            id[t - 1] = t;
          }
          parts->push_back(std::move(id));
        }
        if (slot < trace_.size()) {
          trace_[slot].distinct.push_back(0);
        }
        continue;
      }
      // distinct tables and the earliest finish at which each appears
      std::map<Table, Nat> earliest;
      for (const auto& cc : contexts) {
        Table sub = instance(cc, depth + 1);
        auto [it, inserted] = earliest.emplace(std::move(sub), cc.finish);
        if (!inserted) {
          it->second = std::min(it->second, cc.finish);
        }
      }
      Table fi(budget_, 0);
      for (Nat t = 1; t <= budget_; ++t) {
        bool any = false;
        for (const auto& [sub, fin] : earliest) {
          if (fin <= t - 1) {
            fi[t - 1] = add_checked(fi[t - 1], sub[t - 1], t);
            any = true;
          }
        }
        if (!any) {
          fi[t - 1] = t;
        }
        f[t - 1] = add_checked(f[t - 1], fi[t - 1], t);
      }
      if (parts) {
        parts->push_back(fi);
      }
      if (slot < trace_.size()) {
        trace_[slot].distinct.push_back(earliest.size());
      }
      if (i < k) {
        contexts = advance(contexts);
      }
    }
    return f;
  }

  // Ends of minimal plays of the instance at the top of each context, with
  // all blocks below the budget.
  std::vector<Context> advance(const std::vector<Context>& from) {
    std::vector<Context> out;
    for (const auto& c : from) {
      if (c.machine.done()) {
        continue;
      }
      std::vector<Move> moves = c.moves;
      games::for_each_minimal_continuation(
          c.machine, moves, policy_, budget_ > 0 ? budget_ - 1 : 0, c.machine.instance_end_depth(),
          [&](const Machine& m, const std::vector<Move>& mv) {
            const Nat finish = m.union_elements().empty() ? 0 : m.union_elements().back();
            if (out.size() >= opts_.context_cap) {
              throw CapExceeded("more than " + std::to_string(opts_.context_cap) +
                                " sub-games finish before t = " + std::to_string(finish + 1));
            }
            out.push_back(Context{m, mv, finish});
            return true;
          });
    }
    return out;
  }

  const GameSpec& spec_;
  const games::Policy& policy_;
  Nat budget_;
  BuildOptions opts_;
  std::map<std::string, Table> memo_;
  std::vector<TraceEntry> trace_;
  bool trace_truncated_ = false;
};

}  // namespace

SpreadingMap build(const GameSpec& spec, Nat budget, const BuildOptions& opts) {
  if (!spec.policy) {
    throw PreconditionError("spreadmap build needs a bound game (a policy for N)");
  }
  if (budget < 1) {
    throw PreconditionError("spreadmap budget must be >= 1");
  }
  return Builder(spec, budget, opts).run();
}

VerifyResult verify(const SpreadingMap& f, const GameSpec& spec, Nat budget, Exec exec) {
  if (f.table.size() < budget) {
    throw PreconditionError("spreading map covers [1, " + std::to_string(f.table.size()) +
                            "], verification needs [1, " + std::to_string(budget) + "]");
  }
  std::vector<Transcript> plays = games::minimal_plays(spec, budget);
  const std::int64_t n = static_cast<std::int64_t>(plays.size());
  std::vector<char> bad(plays.size(), 0);
  auto check = [&](std::int64_t i) {
    const FinSet img = f.image(games::result_set(plays[static_cast<std::size_t>(i)]));
    bad[static_cast<std::size_t>(i)] = !tuple_member(spec.tuple, img);
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      check(i);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      check(i);
    }
  }
  VerifyResult r;
  r.plays = plays.size();
  for (std::size_t i = 0; i < plays.size(); ++i) {
    if (bad[i]) {
      r.ok = false;
      r.counterexample.emplace(plays[i], f.image(games::result_set(plays[i])));
      break;
    }
  }
  return r;
}

bool image_is_spreading_dominated(const SpreadingMap& f, const SpreadingMap& g) {
  if (f.table.size() != g.table.size()) {
    throw PreconditionError("domination check needs equal budgets (" +
                            std::to_string(f.table.size()) + " vs " +
                            std::to_string(g.table.size()) + ")");
  }
  for (std::size_t i = 0; i < f.table.size(); ++i) {
    if (f.table[i] < g.table[i]) {
      return false;
    }
  }
  return true;
}

bool is_prefix_of(const SpreadingMap& f, const SpreadingMap& g) {
  return f.table.size() <= g.table.size() &&
         std::equal(f.table.begin(), f.table.end(), g.table.begin());
}

SpreadingMap from_table(std::vector<Nat> table) {
  SpreadingMap f;
  f.budget = table.size();
  f.table = std::move(table);
  return f;
}

Json to_json(const SpreadingMap& f, const GameSpec& spec) {
  Json j;
  j["kind"] = "spreadmap";
  j["spec"] = spec.tuple.to_string();
  j["policy"] = spec.policy ? spec.policy->describe() : "";
  j["budget"] = f.budget;
  j["table"] = f.table;
  j["constituents"] = f.constituents;
  Json trace = Json::array();
  for (const auto& e : f.trace) {
    Json x;
    x["depth"] = e.depth;
    x["context"] = e.context;
    x["game"] = e.game;
    x["rule"] = e.rule;
    x["choice"] = e.choice;
    x["distinct"] = e.distinct;
    trace.push_back(std::move(x));
  }
  j["trace"] = std::move(trace);
  j["trace_truncated"] = f.trace_truncated;
  return j;
}

SpreadingMap map_from_json(const Json& j) {
  try {
    SpreadingMap f;
    f.table = j.at("table").get<std::vector<Nat>>();
    f.budget = j.value("budget", static_cast<Nat>(f.table.size()));
    if (j.contains("constituents")) {
      f.constituents = j.at("constituents").get<std::vector<std::vector<Nat>>>();
    }
    return f;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed spreading map JSON: ") + e.what());
  }
}

}  // namespace schreier::spreadmap
