#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schreier/embed.hpp"
#include "schreier/family.hpp"
#include "schreier/games.hpp"
#include "schreier/schreier.hpp"

namespace schreier::dichotomy {

using games::Json;

struct SearchParams {
  Nat min_length = 0;  // inclusion side: shortest acceptable M; 0 = ceil(universe/2)
  Nat n_budget = 0;    // N's choices in [1, n_budget]; 0 = universe
  std::size_t node_cap = 5'000'000;
  std::size_t state_cap = 20'000'000;
  std::uint64_t seed = 0;  // recorded only (random families carry their own)
  Exec exec = Exec::parallel;
};

enum class Outcome { inclusion, embedding, undecided_at_truncation };
std::string to_string(Outcome o);

struct InclusionSearch {
  std::optional<SeqView> m;
  std::uint64_t nodes = 0;
  bool truncated = false;  // node cap hit before the space was exhausted
};

// Lexicographically least subsequence M of `ground` with |M| >= min_length
// and m_E in fam for every E of the tuple family with max E <= |M|.
// Branch and bound on the earliest violating tuple member.
InclusionSearch inclusion_search(const FamilyOracle& fam, const TupleSpec& spec,
                                 const SeqView& ground, Nat min_length, std::size_t node_cap,
                                 Exec exec = Exec::parallel);

// Members of the tuple family on [1, |M|] checked through M; nullopt when
// every image lies in fam, else the first failing E.
std::optional<FinSet> first_inclusion_failure(const FamilyOracle& fam, const TupleSpec& spec,
                                              const SeqView& m, std::uint64_t* checked = nullptr);

struct DichotomyCertificate {
  Outcome outcome = Outcome::undecided_at_truncation;
  std::string family_id;
  TupleSpec spec;
  Nat universe_bound = 0;
  SearchParams params;
  SeqView m;
  std::uint64_t inclusion_checked = 0;
  std::optional<games::Strategy> strategy;
  std::optional<embed::EmbeddingCertificate> embedding;
  std::vector<std::string> search_trace;
};

// fam must be hereditary (PreconditionError otherwise).
DichotomyCertificate dichotomy_search(const SetFamily& fam, const TupleSpec& spec,
                                      Nat universe_bound, const SearchParams& params = {});

Json to_json(const DichotomyCertificate& c);

struct Reverification {
  bool ok = true;
  std::uint64_t checked = 0;
  std::vector<std::string> problems;
};

// Re-checks a certificate JSON against fam without trusting the search:
// inclusion by enumerating the tuple family on M, embedding by recomputing
// fam[M] and checking every n_E.
Reverification reverify(const Json& cert, const SetFamily& fam);

// Hereditary closure of a random antichain over [1, universe]: 1..5
// generators of sizes 1..6, drawn from a seeded mt19937_64.
SetFamily random_hereditary_family(Nat universe_bound, std::uint64_t seed);

enum class Color { red, blue, undecided };
std::string to_string(Color c);

struct ColoredPosition {
  std::size_t position = 0;  // l
  Nat m = 0;                 // m_l
  Color color = Color::blue;
  std::string provenance;
};

struct Coloring {
  std::vector<ColoredPosition> positions;
};

struct Diagonalization {
  SeqView l;
  bool red_side = false;
  Coloring coloring;
};

// Stage l takes m = first element of M_{l-1}, tests the link family
// {F : m < F, {m} u F in fam} against the inclusion side on the rest of
// M_{l-1} (whole tail, then a thinned tail of half its length), colors l red
// on success and sets M_l to the witnessing subsequence, blue otherwise.
// L collects the red m's if at least `depth` are red, else the blue ones.
Diagonalization diagonalize_first_lemma(const FamilyOracle& fam, const TupleSpec& spec,
                                        Nat universe_bound, std::size_t depth,
                                        const SearchParams& params = {});

Json to_json(const Diagonalization& d);

// --- the counterexample family -------------------------------------------

// F_k = {2^k + 1, ..., 2^k + k}.
FinSet example_block(Nat k);
// E and {1} u E for E contained in some F_k, k <= k_max; universe 2^k_max + k_max.
SetFamily example_family(Nat k_max);
// Membership in the untruncated family.
bool example_member(const FinSet& e);
FamilyOracle example_oracle();

struct ExampleCheck {
  enum class Status { ok, insufficient_prefix, s1_witness_not_found };
  Status status = Status::ok;
  Nat l = 0;  // = m_1
  std::size_t required_length = 0;
  std::optional<FinSet> f_witness;    // {m_1} u m_{F_l}, in F(M), not in S_1
  std::optional<FinSet> f_preimage;   // {1} u F_l
  std::optional<FinSet> s1_witness;   // m_E for E in S_1, not in F
  std::optional<FinSet> s1_preimage;  // E

  bool both() const { return f_witness && s1_witness; }
};
std::string to_string(ExampleCheck::Status s);

ExampleCheck check_example_noninclusions(Nat k_max, const SeqView& m);

Json to_json(const ExampleCheck& c, Nat k_max, const SeqView& m);

}  // namespace schreier::dichotomy
