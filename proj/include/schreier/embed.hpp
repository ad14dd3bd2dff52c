#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schreier/exec.hpp"
#include "schreier/family.hpp"
#include "schreier/games.hpp"
#include "schreier/policy.hpp"
#include "schreier/spreadmap.hpp"

namespace schreier::embed {

using games::Json;

// E cut into the blocks the strategy demands, S answering with the next l_q
// elements of E each time.
struct Decomposition {
  FinSet source;
  std::vector<FinSet> blocks;       // full blocks E_1 < ... < E_p
  std::vector<Nat> demanded_sizes;  // l_q per S obligation met (incl. a partial one)
  std::vector<games::Move> moves;   // the replayed prefix
  bool exhausted = false;           // blocks concatenate to E
  FinSet remainder;                 // elements of a final, too-short chunk
  FinSet overflow;                  // elements left after the game ended
  bool game_complete = false;
  std::string diagnostic;  // set when E could not be exhausted
};

Decomposition decompose(const FinSet& e, const TupleSpec& spec, const games::Policy& strat);

// Finishes the bound game from d: pads the remainder with the least following
// integers, then S plays the least consecutive blocks of exactly the demanded
// sizes. Throws PreconditionError on overflow and when the completion needs
// elements above universe_bound (reporting the headroom needed).
FinSet complete_to_Ebar(const Decomposition& d, const TupleSpec& spec, const games::Policy& strat,
                        Nat universe_bound);

struct Failure {
  FinSet e;
  std::optional<FinSet> ebar;
  std::optional<FinSet> image;
  std::string reason;
};

struct EmbeddingCertificate {
  std::string family_id;
  std::vector<FinSet> members;
  TupleSpec spec;
  std::string strategy_id;
  Nat universe_bound = 0;
  bool strategy_wins = false;
  bool strategy_truncation_win = false;
  std::optional<games::Transcript> strategy_counterexample;
  spreadmap::SpreadingMap map;  // N = map.table
  std::uint64_t verified_members = 0;
  std::vector<Failure> failures;

  bool accepted() const { return strategy_wins && failures.empty(); }
};

// The pipeline from a winning strategy for N on a hereditary family to N
// with fam(N) inside the tuple family. Throws PreconditionError when fam is
// not hereditary.
EmbeddingCertificate build_embedding(const SetFamily& fam, const TupleSpec& spec,
                                     const games::Policy& strat, const std::string& strategy_id,
                                     Nat universe_bound, Exec exec = Exec::parallel);

// A stable identifier for an explicit family: size plus FNV-1a of its
// members.
std::string family_fingerprint(const SetFamily& fam);

Json to_json(const EmbeddingCertificate& c);

struct CertificateCheck {
  bool ok = true;
  std::uint64_t checked = 0;
  std::vector<std::string> problems;
};

// Independent re-check of a certificate: the table is strictly increasing
// and every recorded member maps into the tuple family.
CertificateCheck verify_certificate(const Json& cert);

}  // namespace schreier::embed
