#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "schreier/cbindex.hpp"
#include "schreier/dichotomy.hpp"
#include "schreier/embed.hpp"
#include "schreier/error.hpp"
#include "schreier/family_spec.hpp"
#include "schreier/games.hpp"
#include "schreier/policy.hpp"
#include "schreier/schreier.hpp"
#include "schreier/spreadmap.hpp"
#include "schreier/strategy.hpp"

#ifndef SCHREIER_VERSION
#define SCHREIER_VERSION "0.0.0"
#endif

using namespace schreier;
using games::Json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUndecided = 2;

const char* kHint =
    "hint: ordinals look like 3, w, w^2*3+w+1 or w^w; tuples like 0,1,w; sets like 3,4,5 or {}; "
    "families like s:2, tuple:0,1, file:f.txt, spread:1,2;3,4, bar:s:1, example:3, random:7";

struct Common {
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
};

Json artifact(const std::string& command, Json inputs, const Common& c, Json body) {
  Json j;
  j["tool"] = "schreier";
  j["version"] = SCHREIER_VERSION;
  j["command"] = command;
  inputs["seed"] = c.seed;
  j["inputs"] = std::move(inputs);
  for (auto& [k, v] : body.items()) {
    j[k] = v;
  }
  return j;
}

void emit(const Json& j, const Common& c, const std::string& text) {
  const std::string dumped = j.dump(2) + "\n";
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      throw Error("cannot write " + c.out);
    }
    f << dumped;
  }
  if (c.format == "text") {
    std::cout << text << "\n";
  } else if (c.out.empty()) {
    std::cout << dumped;
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot read " + path);
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what());
  }
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--out", c.out, "write the JSON artifact here");
  cmd->add_option("--seed", c.seed, "recorded in the artifact");
}

games::PolicyPtr policy_from(const std::string& policy, const std::string& strategy_file) {
  if (!strategy_file.empty()) {
    return games::strategy_policy(
        std::make_shared<const games::Strategy>(games::read_strategy_file(strategy_file)));
  }
  if (policy.empty()) {
    throw PreconditionError("give --policy or --strategy");
  }
  return games::parse_policy(policy);
}

TupleSpec tuple_from(const std::string& alpha, const std::string& spec) {
  if (!spec.empty()) {
    return TupleSpec::parse(spec);
  }
  if (!alpha.empty()) {
    return TupleSpec::single(parse_ordinal(alpha));
  }
  throw PreconditionError("give --alpha or --spec");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schreier families, games, spreading maps, dichotomy search and ranks"};
  app.set_version_flag("--version", SCHREIER_VERSION);
  app.require_subcommand(1);
  int status = kOk;
  Common common;

  // schreier ---------------------------------------------------------------
  auto* sch = app.add_subcommand("schreier", "membership, enumeration and counting");
  sch->require_subcommand(1);
  std::string alpha, tspec, set_text;
  Nat universe = 0;
  bool exhaustive = false, maximal = false;
  std::size_t cap = 5'000'000;

  auto* member_cmd = sch->add_subcommand("member", "test E in S_alpha or a tuple family");
  member_cmd->add_option("--alpha", alpha, "ordinal");
  member_cmd->add_option("--spec", tspec, "tuple of ordinals");
  member_cmd->add_option("--set", set_text, "the set E")->required();
  member_cmd->add_flag("--exhaustive", exhaustive, "use the reference decision procedure");
  add_common(member_cmd, common);
  member_cmd->callback([&] {
    const TupleSpec t = tuple_from(alpha, tspec);
    const FinSet e = FinSet::parse(set_text);
    const bool in = t.size() == 1
                        ? (exhaustive ? member_exhaustive(t[0], e) : member(t[0], e))
                        : (exhaustive ? tuple_member_exhaustive(t, e) : tuple_member(t, e));
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["set"] = e.elements();
    in_j["exhaustive"] = exhaustive;
    Json body;
    body["member"] = in;
    emit(artifact("schreier member", in_j, common, body), common, in ? "true" : "false");
  });

  auto* enum_cmd = sch->add_subcommand("enum", "list the members inside [1, universe]");
  enum_cmd->add_option("--alpha", alpha, "ordinal");
  enum_cmd->add_option("--spec", tspec, "tuple of ordinals");
  enum_cmd->add_option("--universe", universe, "universe bound")
      ->required()
      ->check(CLI::PositiveNumber);
  enum_cmd->add_flag("--maximal", maximal, "maximal members only");
  enum_cmd->add_option("--cap", cap, "member cap");
  add_common(enum_cmd, common);
  enum_cmd->callback([&] {
    const TupleSpec t = tuple_from(alpha, tspec);
    EnumerateOptions opts;
    opts.cap = cap;
    opts.maximal_only = maximal;
    const SetFamily fam =
        t.size() == 1 ? enumerate(t[0], universe, opts) : enumerate(t, universe, opts);
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["universe_bound"] = universe;
    in_j["maximal_only"] = maximal;
    in_j["cap"] = cap;
    Json body;
    body["count"] = fam.size();
    Json members = Json::array();
    for (const auto& e : fam.members()) {
      members.push_back(e.elements());
    }
    body["members"] = std::move(members);
    std::ostringstream text;
    write_family(text, fam);
    std::string lines = text.str();
    if (!lines.empty()) {
      lines.pop_back();
    }
    emit(artifact("schreier enum", in_j, common, body), common, lines);
  });

  auto* count_cmd = sch->add_subcommand("count", "count the members inside [1, universe]");
  count_cmd->add_option("--alpha", alpha, "ordinal");
  count_cmd->add_option("--spec", tspec, "tuple of ordinals");
  count_cmd->add_option("--universe", universe, "universe bound")
      ->required()
      ->check(CLI::PositiveNumber);
  add_common(count_cmd, common);
  count_cmd->callback([&] {
    const TupleSpec t = tuple_from(alpha, tspec);
    const std::uint64_t n = t.size() == 1 ? count(t[0], universe) : count(t, universe);
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["universe_bound"] = universe;
    Json body;
    body["count"] = n;
    emit(artifact("schreier count", in_j, common, body), common, std::to_string(n));
  });

  // game -------------------------------------------------------------------
  auto* game = app.add_subcommand("game", "Schreier games");
  game->require_subcommand(1);
  std::string family_text, policy_text, strategy_file, side_text = "N";
  Nat n_budget = 0;
  std::size_t state_cap = 20'000'000;
  bool require_clean = false;

  auto* play_cmd = game->add_subcommand("play", "play interactively against the machine");
  play_cmd->add_option("--spec", tspec, "tuple of ordinals")->required();
  play_cmd->add_option("--family", family_text, "target family")->required();
  play_cmd->add_option("--universe", universe, "universe bound")
      ->required()
      ->check(CLI::PositiveNumber);
  play_cmd->add_option("--n-budget", n_budget, "largest choice for N (default universe)");
  play_cmd->add_option("--machine", side_text, "side the machine plays")
      ->check(CLI::IsMember({"N", "S"}));
  add_common(play_cmd, common);
  play_cmd->callback([&] {
    const TupleSpec t = TupleSpec::parse(tspec);
    const FamilySpec fs = parse_family_spec(family_text, universe);
    const games::Transcript tr =
        games::interactive_play(t, fs.oracle, side_text == "N" ? games::Side::N : games::Side::S,
                                universe, n_budget ? n_budget : universe, std::cin, std::cout);
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["family"] = family_text;
    in_j["universe_bound"] = universe;
    in_j["machine"] = side_text;
    Json body;
    body["transcript"] = games::to_json(tr);
    if (!common.out.empty()) {
      emit(artifact("game play", in_j, common, body), common, "");
    }
  });

  auto* solve_cmd = game->add_subcommand("solve", "backward induction for N");
  solve_cmd->add_option("--spec", tspec, "tuple of ordinals")->required();
  solve_cmd->add_option("--family", family_text, "target family")->required();
  solve_cmd->add_option("--universe", universe, "universe bound")
      ->required()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--n-budget", n_budget, "largest choice for N (default universe)");
  solve_cmd->add_option("--state-cap", state_cap, "solver state cap");
  solve_cmd->add_flag("--require-clean", require_clean, "treat truncation wins as losses");
  add_common(solve_cmd, common);
  solve_cmd->callback([&] {
    const TupleSpec t = TupleSpec::parse(tspec);
    const FamilySpec fs = parse_family_spec(family_text, universe);
    games::SolveOptions so;
    so.state_cap = state_cap;
    so.require_clean = require_clean;
    const Nat nb = n_budget ? n_budget : universe;
    const games::SolveResult r = games::solve_game(t, fs.oracle, universe, nb, so);
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["family"] = family_text;
    in_j["universe_bound"] = universe;
    in_j["n_budget"] = nb;
    in_j["require_clean"] = require_clean;
    const bool n_wins =
        r.value == games::Value::clean || (r.value == games::Value::truncation && !require_clean);
    Json body = games::to_json(r.strategy);
    body["value"] = games::to_string(r.value);
    body["n_wins"] = n_wins;
    body["states"] = r.states;
    emit(artifact("game solve", in_j, common, body), common, games::to_string(r.value));
    status = r.value == games::Value::truncation ? kUndecided : kOk;
  });

  auto* verify_cmd = game->add_subcommand("verify", "check a strategy against every S play");
  verify_cmd->add_option("--spec", tspec, "tuple of ordinals")->required();
  verify_cmd->add_option("--family", family_text, "target family")->required();
  verify_cmd->add_option("--universe", universe, "universe bound")
      ->required()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--policy", policy_text, "const:L | seq:a,b | minlast[:L] | game:...");
  verify_cmd->add_option("--strategy", strategy_file, "strategy JSON from game solve");
  add_common(verify_cmd, common);
  verify_cmd->callback([&] {
    const TupleSpec t = TupleSpec::parse(tspec);
    const FamilySpec fs = parse_family_spec(family_text, universe);
    const auto pol = policy_from(policy_text, strategy_file);
    const games::VerifyResult r = games::verify_strategy(t, *pol, fs.oracle, universe);
    Json in_j;
    in_j["spec"] = t.to_string();
    in_j["family"] = family_text;
    in_j["universe_bound"] = universe;
    in_j["strategy"] = pol->describe();
    Json body;
    body["kind"] = "strategy_verification";
    body["wins"] = r.wins;
    body["truncation_win"] = r.truncation_win;
    body["plays"] = r.plays;
    body["stuck_branches"] = r.stuck_branches;
    body["truncated_branches"] = r.truncated_branches;
    body["counterexample"] = r.counterexample ? games::to_json(*r.counterexample) : Json(nullptr);
    emit(artifact("game verify", in_j, common, body), common,
         r.wins ? (r.truncation_win ? "wins (truncation)" : "wins") : "loses");
    status = !r.wins ? kError : (r.truncation_win ? kUndecided : kOk);
  });

  // spreadmap --------------------------------------------------------------
  auto* sm = app.add_subcommand("spreadmap", "spreading maps of bound games");
  sm->require_subcommand(1);
  Nat budget = 0;
  std::string map_file;
  auto* smb = sm->add_subcommand("build", "tabulate f on [1, budget]");
  smb->add_option("--spec", tspec, "tuple of ordinals")->required();
  smb->add_option("--policy", policy_text, "policy binding N");
  smb->add_option("--strategy", strategy_file, "strategy JSON binding N");
  smb->add_option("--budget", budget, "largest t")->required()->check(CLI::PositiveNumber);
  add_common(smb, common);
  smb->callback([&] {
    const games::GameSpec g{TupleSpec::parse(tspec), policy_from(policy_text, strategy_file)};
    const spreadmap::SpreadingMap f = spreadmap::build(g, budget);
    Json in_j;
    in_j["spec"] = g.tuple.to_string();
    in_j["policy"] = g.policy->describe();
    in_j["budget"] = budget;
    emit(artifact("spreadmap build", in_j, common, spreadmap::to_json(f, g)), common,
         Json(f.table).dump());
  });
  auto* smv = sm->add_subcommand("verify", "check every minimal play image");
  smv->add_option("--map", map_file, "map JSON from spreadmap build")->required();
  smv->add_option("--spec", tspec, "tuple of ordinals (default: recorded)");
  smv->add_option("--policy", policy_text, "policy (default: recorded)");
  smv->add_option("--strategy", strategy_file, "strategy JSON binding N");
  smv->add_option("--budget", budget, "largest t (default: the map's budget)");
  add_common(smv, common);
  smv->callback([&] {
    const Json mj = read_json_file(map_file);
    const spreadmap::SpreadingMap f = spreadmap::map_from_json(mj);
    const std::string spec_text = tspec.empty() ? mj.at("spec").get<std::string>() : tspec;
    if (policy_text.empty() && strategy_file.empty()) {
      policy_text = mj.at("policy").get<std::string>();
    }
    const games::GameSpec g{TupleSpec::parse(spec_text), policy_from(policy_text, strategy_file)};
    const Nat b = budget ? budget : f.budget;
    const spreadmap::VerifyResult r = spreadmap::verify(f, g, b);
    Json in_j;
    in_j["map"] = map_file;
    in_j["spec"] = g.tuple.to_string();
    in_j["policy"] = g.policy->describe();
    in_j["budget"] = b;
    Json body;
    body["kind"] = "spreadmap_verification";
    body["ok"] = r.ok;
    body["plays"] = r.plays;
    if (r.counterexample) {
      body["counterexample"] = {{"play", games::to_json(r.counterexample->first)},
                                {"image", r.counterexample->second.elements()}};
    } else {
      body["counterexample"] = nullptr;
    }
    emit(artifact("spreadmap verify", in_j, common, body), common, r.ok ? "ok" : "counterexample");
    status = r.ok ? kOk : kError;
  });

  // embed ------------------------------------------------------------------
  auto* emb = app.add_subcommand("embed", "the embedding pipeline");
  emb->require_subcommand(1);
  std::string cert_file;
  auto* eb = emb->add_subcommand("build", "N with fam(N) inside the tuple family");
  eb->add_option("--family", family_text, "hereditary family")->required();
  eb->add_option("--spec", tspec, "tuple of ordinals")->required();
  eb->add_option("--universe", universe, "universe bound")->required()->check(CLI::PositiveNumber);
  eb->add_option("--policy", policy_text, "strategy for N (default: solve for one)");
  eb->add_option("--strategy", strategy_file, "strategy JSON for N");
  eb->add_option("--n-budget", n_budget, "solver choice budget (default universe)");
  add_common(eb, common);
  eb->callback([&] {
    const TupleSpec t = TupleSpec::parse(tspec);
    const FamilySpec fs = parse_family_spec(family_text, universe);
    const SetFamily fam = family_within(fs, universe);
    games::PolicyPtr pol;
    std::string sid;
    if (policy_text.empty() && strategy_file.empty()) {
      games::SolveOptions so;
      so.require_clean = true;
      auto strat = games::solve_N(t, FamilyOracle::explicit_family(fam), universe,
                                  n_budget ? n_budget : universe, so);
      if (!strat) {
        throw PreconditionError("N has no clean winning strategy on " + family_text +
                                " within the budgets");
      }
      pol = games::strategy_policy(std::make_shared<const games::Strategy>(*strat));
      sid = "solved";
    } else {
      pol = policy_from(policy_text, strategy_file);
      sid = pol->describe();
    }
    const embed::EmbeddingCertificate c = embed::build_embedding(fam, t, *pol, sid, universe);
    Json in_j;
    in_j["family"] = family_text;
    in_j["spec"] = t.to_string();
    in_j["universe_bound"] = universe;
    in_j["strategy"] = sid;
    emit(artifact("embed build", in_j, common, embed::to_json(c)), common,
         c.accepted() ? "accepted" : "rejected");
    status = c.accepted() ? kOk : kError;
  });
  auto* ev = emb->add_subcommand("verify", "re-check an embedding certificate");
  ev->add_option("--cert", cert_file, "certificate JSON")->required();
  add_common(ev, common);
  ev->callback([&] {
    const embed::CertificateCheck r = embed::verify_certificate(read_json_file(cert_file));
    Json in_j;
    in_j["cert"] = cert_file;
    Json body;
    body["kind"] = "certificate_verification";
    body["ok"] = r.ok;
    body["checked"] = r.checked;
    body["problems"] = r.problems;
    emit(artifact("embed verify", in_j, common, body), common, r.ok ? "ok" : "invalid");
    status = r.ok ? kOk : kError;
  });

  // dichotomy --------------------------------------------------------------
  auto* dich = app.add_subcommand("dichotomy", "bounded dichotomy search");
  dich->require_subcommand(1);
  std::size_t depth = 0;
  Nat min_length = 0;
  auto* run = dich->add_subcommand("run", "inclusion side or certified embedding");
  run->add_option("--family", family_text, "hereditary family")->required();
  run->add_option("--spec", tspec, "tuple of ordinals")->required();
  run->add_option("--universe", universe, "universe bound")->required()->check(CLI::PositiveNumber);
  run->add_option("--depth", depth, "also run the red/blue diagonalization to this depth");
  run->add_option("--min-length", min_length, "shortest inclusion-side M (default ceil(N/2))");
  run->add_option("--n-budget", n_budget, "solver choice budget (default universe)");
  add_common(run, common);
  run->callback([&] {
    const TupleSpec t = TupleSpec::parse(tspec);
    const FamilySpec fs = parse_family_spec(family_text, universe);
    const SetFamily fam = family_within(fs, universe);
    dichotomy::SearchParams p;
    p.min_length = min_length;
    p.n_budget = n_budget;
    p.seed = common.seed;
    const dichotomy::DichotomyCertificate c = dichotomy::dichotomy_search(fam, t, universe, p);
    Json in_j;
    in_j["family"] = family_text;
    in_j["spec"] = t.to_string();
    in_j["universe_bound"] = universe;
    in_j["depth"] = depth;
    Json body = dichotomy::to_json(c);
    if (depth > 0) {
      body["diagonalization"] =
          dichotomy::to_json(dichotomy::diagonalize_first_lemma(fs.oracle, t, universe, depth, p));
    }
    emit(artifact("dichotomy run", in_j, common, body), common, dichotomy::to_string(c.outcome));
    status = c.outcome == dichotomy::Outcome::undecided_at_truncation ? kUndecided : kOk;
  });

  // example ----------------------------------------------------------------
  auto* ex = app.add_subcommand("example", "the counterexample family");
  ex->require_subcommand(1);
  Nat k_max = 0;
  std::string m_text;
  bool check = false;
  auto* amt = ex->add_subcommand("amt", "witnesses that neither side holds");
  amt->add_option("--kmax", k_max, "largest block index")->required()->check(CLI::Range(1, 20));
  amt->add_option("--m", m_text, "prefix of M (default 1,2,...,2^kmax+kmax)");
  amt->add_flag("--check", check, "produce and check both witnesses");
  add_common(amt, common);
  amt->callback([&] {
    const SetFamily fam = dichotomy::example_family(k_max);
    Json in_j;
    in_j["k_max"] = k_max;
    in_j["check"] = check;
    Json body;
    body["family_size"] = fam.size();
    body["universe_bound"] = fam.universe_bound();
    std::string text = std::to_string(fam.size()) + " sets";
    if (check) {
      SeqView m =
          m_text.empty() ? SeqView::identity(fam.universe_bound()) : SeqView::parse(m_text, 0);
      if (!m_text.empty()) {
        m = SeqView(m.prefix(), m.size() ? m.prefix().back() : 0);
      }
      in_j["M"] = m.prefix();
      const dichotomy::ExampleCheck r = dichotomy::check_example_noninclusions(k_max, m);
      body["check"] = dichotomy::to_json(r, k_max, m);
      text = dichotomy::to_string(r.status);
      status = r.both() && r.status == dichotomy::ExampleCheck::Status::ok ? kOk : kUndecided;
    } else {
      Json members = Json::array();
      for (const auto& e : fam.members()) {
        members.push_back(e.elements());
      }
      body["members"] = std::move(members);
    }
    emit(artifact("example amt", in_j, common, body), common, text);
  });

  // cb ---------------------------------------------------------------------
  auto* cbc = app.add_subcommand("cb", "strong Cantor-Bendixson rank and index");
  cbc->require_subcommand(1);
  std::size_t window = 8;
  std::string bar_out;
  auto engine_run = [&](const std::string& cmd, const FinSet& a, bool idx) {
    const FamilySpec fs = parse_family_spec(family_text, universe);
    cb::RankOptions ro;
    ro.window = window;
    cb::RankEngine engine(fs.oracle, ro);
    engine.load_env_cache();
    const cb::RankResult r = idx ? engine.index() : engine.rank(a);
    engine.save_env_cache();
    Json in_j;
    in_j["family"] = family_text;
    in_j["set"] = a.elements();
    in_j["window"] = window;
    Json body = cb::to_json(r, fs.oracle, a);
    if (idx) {
      body["kind"] = "index";
      body["index"] = body["rank"];
      body.erase("rank");
    }
    emit(artifact(cmd, in_j, common, body), common,
         r.ok() ? r.rank.to_string() : cb::to_string(r.outcome));
    status = r.ok()
                 ? kOk
                 : (r.outcome == cb::RankResult::Outcome::pattern_undetected ? kUndecided : kError);
  };
  auto* rank_cmd = cbc->add_subcommand("rank", "rank of a member");
  rank_cmd->add_option("--family", family_text, "spreading family")->required();
  rank_cmd->add_option("--set", set_text, "the member A")->required();
  rank_cmd->add_option("--window", window, "probe window")->check(CLI::Range(3, 64));
  add_common(rank_cmd, common);
  rank_cmd->callback([&] { engine_run("cb rank", FinSet::parse(set_text), false); });
  auto* index_cmd = cbc->add_subcommand("index", "rank of the empty set plus one");
  index_cmd->add_option("--family", family_text, "spreading family")->required();
  index_cmd->add_option("--window", window, "probe window")->check(CLI::Range(3, 64));
  add_common(index_cmd, common);
  index_cmd->callback([&] { engine_run("cb index", FinSet{}, true); });
  auto* bar_cmd = cbc->add_subcommand("bar", "write the bar family inside [1, universe]");
  bar_cmd->add_option("--family", family_text, "hereditary family")->required();
  bar_cmd->add_option("--universe", universe, "universe bound")->check(CLI::PositiveNumber);
  bar_cmd->add_option("--out", bar_out, "family file")->required();
  bar_cmd->callback([&] {
    const FamilySpec fs = parse_family_spec(family_text, universe);
    Nat u = universe;
    if (u == 0) {
      u = fs.oracle.support_bound().value_or(0);
      if (u == 0) {
        throw PreconditionError("cb bar needs --universe for families without finite support");
      }
    }
    const SetFamily b = materialize(cb::bar(fs.oracle), u);
    std::ofstream f(bar_out, std::ios::binary);
    if (!f) {
      throw Error("cannot write " + bar_out);
    }
    write_family(f, b);
    std::cout << b.size() << " sets written to " << bar_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << kHint << "\n";
    return kError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return status;
}
