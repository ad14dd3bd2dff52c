#include "schreier/strategy.hpp"

#include <algorithm>
#include <fstream>

#include "schreier/error.hpp"

namespace schreier::games {

namespace {

Json set_json(const FinSet& e) { return Json(e.elements()); }

FinSet set_from_json(const Json& j) { return FinSet(j.get<std::vector<Nat>>()); }

const char* turn_name(Turn t) {
  switch (t) {
    case Turn::n_picks:
      return "N_picks";
    case Turn::s_picks:
      return "S_picks";
    case Turn::done:
      return "done";
  }
  return "";
}

}  // namespace

Json to_json(const Obligation& ob) {
  Json j;
  j["turn"] = turn_name(ob.turn);
  if (ob.turn == Turn::n_picks) {
    j["game"] = ob.game.to_string();
  } else if (ob.turn == Turn::s_picks) {
    j["min_size"] = ob.min_size;
    j["min_element"] = ob.min_element;
    j["exact"] = ob.exact;
  }
  j["frames"] = ob.frames;
  return j;
}

Json to_json(const Transcript& t) {
  Json j;
  j["kind"] = "transcript";
  j["spec"] = t.spec.to_string();
  Json moves = Json::array();
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    Json m;
    if (t.moves[i].side == Side::N) {
      m["side"] = "N";
      m["l"] = t.moves[i].l;
    } else {
      m["side"] = "S";
      m["block"] = set_json(t.moves[i].block);
    }
    if (i < t.obligations.size()) {
      m["obligation"] = to_json(t.obligations[i]);
    }
    moves.push_back(std::move(m));
  }
  j["moves"] = std::move(moves);
  j["status"] = t.status == Status::complete ? "complete" : "in_progress";
  if (t.status == Status::complete) {
    j["result"] = set_json(result_set(t));
  }
  return j;
}

Transcript transcript_from_json(const Json& j) {
  try {
    const TupleSpec spec = TupleSpec::parse(j.at("spec").get<std::string>());
    std::vector<Move> moves;
    for (const auto& m : j.at("moves")) {
      if (m.at("side").get<std::string>() == "N") {
        moves.push_back(Move::n(m.at("l").get<Nat>()));
      } else {
        moves.push_back(Move::s(set_from_json(m.at("block"))));
      }
    }
    Transcript t = replay(spec, moves);
    if (j.value("status", "") == "in_progress") {
      t.status = Status::in_progress;
    }
    return t;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed transcript JSON: ") + e.what());
  }
}

Json to_json(const Strategy& s) {
  Json j;
  j["kind"] = "strategy";
  j["spec"] = s.spec.to_string();
  j["family"] = s.family;
  j["universe_bound"] = s.universe_bound;
  j["n_budget"] = s.n_budget;
  j["fallback"] = s.fallback ? Json(*s.fallback) : Json(nullptr);
  j["truncation_win"] = s.truncation_win;
  Json d = Json::object();
  for (const auto& [h, l] : s.decisions) {
    d[h] = l;
  }
  j["decisions"] = std::move(d);
  Json trace = Json::array();
  for (const auto& [prefix, l] : s.trace) {
    trace.push_back(Json{{"prefix", prefix}, {"choice", l}});
  }
  j["trace"] = std::move(trace);
  return j;
}

Strategy strategy_from_json(const Json& j) {
  try {
    Strategy s;
    s.spec = TupleSpec::parse(j.at("spec").get<std::string>());
    s.family = j.value("family", "");
    s.universe_bound = j.value("universe_bound", Nat{0});
    s.n_budget = j.value("n_budget", Nat{0});
    if (j.contains("fallback") && !j.at("fallback").is_null()) {
      s.fallback = j.at("fallback").get<Nat>();
    }
    s.truncation_win = j.value("truncation_win", false);
    for (const auto& [h, l] : j.at("decisions").items()) {
      s.decisions.emplace_back(h, l.get<Nat>());
    }
    std::sort(s.decisions.begin(), s.decisions.end());
    if (j.contains("trace")) {
      for (const auto& e : j.at("trace")) {
        s.trace.emplace_back(e.at("prefix").get<std::string>(), e.at("choice").get<Nat>());
      }
    }
    return s;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed strategy JSON: ") + e.what());
  }
}

Strategy read_strategy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open strategy file '" + path + "'");
  }
  try {
    return strategy_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError("strategy file '" + path + "': " + e.what());
  }
}

}  // namespace schreier::games
