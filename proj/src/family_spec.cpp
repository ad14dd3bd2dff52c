#include "schreier/family_spec.hpp"

#include "schreier/dichotomy.hpp"
#include "schreier/error.hpp"
#include "schreier/schreier.hpp"

namespace schreier {

namespace {

const char* kGrammar =
    "expected s:<ordinal> | tuple:<ords> | file:<path> | spread:<set>;<set> | bar:<spec> | "
    "example:<k_max> | random:<seed>";

Nat parse_nat(std::string_view text, std::string_view what) {
  if (text.empty()) {
    throw ParseError(std::string(what) + " is empty");
  }
  Nat v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw ParseError(std::string(what) + " must be a natural number, got \"" + std::string(text) +
                       "\"");
    }
    if (__builtin_mul_overflow(v, Nat{10}, &v) || __builtin_add_overflow(v, Nat(c - '0'), &v)) {
      throw ParseError(std::string(what) + " overflows: \"" + std::string(text) + "\"");
    }
  }
  return v;
}

}  // namespace

FamilySpec parse_family_spec(std::string_view text, Nat universe_bound) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("family spec \"" + std::string(text) + "\": " + kGrammar);
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  FamilySpec out;
  out.text = std::string(text);
  if (kind == "s") {
    out.oracle = schreier_oracle(parse_ordinal(rest));
  } else if (kind == "tuple") {
    out.oracle = tuple_oracle(TupleSpec::parse(rest));
  } else if (kind == "file") {
    out.explicit_family = read_family_file(std::string(rest), universe_bound);
    out.oracle = FamilyOracle::explicit_family(*out.explicit_family);
  } else if (kind == "spread") {
    std::vector<FinSet> gens;
    Nat top = 0;
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto end = rest.find(';', start);
      if (end == std::string_view::npos) {
        end = rest.size();
      }
      FinSet g = FinSet::parse(rest.substr(start, end - start));
      top = std::max(top, g.empty() ? Nat{0} : g.max());
      gens.push_back(std::move(g));
      start = end + 1;
    }
    out.oracle = FamilyOracle::spread_closure(SetFamily(std::max<Nat>(top, 1), gens));
  } else if (kind == "bar") {
    FamilySpec inner = parse_family_spec(rest, universe_bound);
    out.oracle = FamilyOracle::bar(inner.oracle);
  } else if (kind == "example") {
    out.explicit_family = dichotomy::example_family(parse_nat(rest, "k_max"));
    out.oracle = FamilyOracle::explicit_family(*out.explicit_family);
  } else if (kind == "random") {
    if (universe_bound == 0) {
      throw PreconditionError("random:<seed> needs a universe bound");
    }
    out.explicit_family =
        dichotomy::random_hereditary_family(universe_bound, parse_nat(rest, "seed"));
    out.oracle = FamilyOracle::explicit_family(*out.explicit_family);
  } else {
    throw ParseError("unknown family kind \"" + std::string(kind) + "\": " + kGrammar);
  }
  return out;
}

SetFamily family_within(const FamilySpec& spec, Nat universe_bound, Exec exec) {
  if (spec.explicit_family) {
    return *spec.explicit_family;
  }
  return materialize(spec.oracle, universe_bound, exec);
}

}  // namespace schreier
