#pragma once

#include <string>

#include "json.hpp"
#include "schreier/games.hpp"

namespace schreier::games {

using Json = nlohmann::ordered_json;

Json to_json(const Obligation& ob);
Json to_json(const Transcript& t);
Transcript transcript_from_json(const Json& j);

// {"kind": "strategy", "spec", "family", "universe_bound", "n_budget",
//  "fallback", "truncation_win", "decisions": {hash: l}, "trace": [...]}
Json to_json(const Strategy& s);
Strategy strategy_from_json(const Json& j);

Strategy read_strategy_file(const std::string& path);

}  // namespace schreier::games
