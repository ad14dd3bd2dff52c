#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schreier/exec.hpp"
#include "schreier/games.hpp"
#include "schreier/strategy.hpp"

namespace schreier::spreadmap {

using games::GameSpec;
using games::Json;
using games::Transcript;

// One game instance met during construction.
struct TraceEntry {
  std::size_t depth = 0;
  std::string context;  // move prefix at the instance start
  std::string game;     // ordinal of the instance
  std::string rule;     // identity | successor | one | limit | tuple
  Nat choice = 0;       // N's l (0 for identity and tuple)
  // Distinct sub-maps summed for each sub-game position (successor, tuple).
  std::vector<std::size_t> distinct;
};

struct SpreadingMap {
  Nat budget = 0;
  std::vector<Nat> table;  // f(1) .. f(budget)
  // Top-level constituents: f^1..f^k (successor, tuple) or f' (limit).
  std::vector<std::vector<Nat>> constituents;
  std::vector<TraceEntry> trace;
  bool trace_truncated = false;

  // f(t) for 1 <= t <= budget; throws PreconditionError beyond the table.
  Nat at(Nat t) const;
  FinSet image(const FinSet& e) const;
};

struct BuildOptions {
  std::size_t context_cap = 1'000'000;
  std::size_t trace_cap = 10'000;
};

// The spreading function for the bound game: identity for 0-games,
// k + f^1 + ... + f^k for successors (each f^i summing the distinct maps of
// the i-th sub-games reachable by minimal plays finishing before t, or t
// when there are none), f' + l for limits, and f^1 + ... + f^r for tuples.
SpreadingMap build(const GameSpec& spec, Nat budget, const BuildOptions& opts = {});

struct VerifyResult {
  bool ok = true;
  std::uint64_t plays = 0;
  std::optional<std::pair<Transcript, FinSet>> counterexample;  // play, image
};

// Every minimal play inside [1, budget] maps into the tuple family.
VerifyResult verify(const SpreadingMap& f, const GameSpec& spec, Nat budget,
                    Exec exec = Exec::parallel);

// f(t) >= g(t) for every t; throws PreconditionError on unequal budgets.
bool image_is_spreading_dominated(const SpreadingMap& f, const SpreadingMap& g);
// f's table is a prefix of g's.
bool is_prefix_of(const SpreadingMap& f, const SpreadingMap& g);

SpreadingMap from_table(std::vector<Nat> table);

Json to_json(const SpreadingMap& f, const GameSpec& spec);
// Reads a map file; spec and policy are returned when recorded.
SpreadingMap map_from_json(const Json& j);

}  // namespace schreier::spreadmap
