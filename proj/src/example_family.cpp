#include <bit>

#include "schreier/dichotomy.hpp"
#include "schreier/error.hpp"

namespace schreier::dichotomy {

namespace {

constexpr Nat kMaxK = 20;

// k with x in F_k, if any.
std::optional<Nat> block_of(Nat x) {
  if (x < 3) {
    return std::nullopt;
  }
  const Nat k = static_cast<Nat>(std::bit_width(x - 1) - 1);
  const Nat base = Nat{1} << k;
  if (x > base && x <= base + k) {
    return k;
  }
  return std::nullopt;
}

}  // namespace

FinSet example_block(Nat k) {
  if (k < 1 || k > 62) {
    throw PreconditionError("example block index must lie in [1, 62], got " + std::to_string(k));
  }
  std::vector<Nat> v;
  const Nat base = Nat{1} << k;
  for (Nat i = 1; i <= k; ++i) {
    v.push_back(base + i);
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

SetFamily example_family(Nat k_max) {
  if (k_max < 1 || k_max > kMaxK) {
    throw PreconditionError("example family needs 1 <= k_max <= " + std::to_string(kMaxK));
  }
  SetFamily fam((Nat{1} << k_max) + k_max);
  fam.insert(FinSet{});
  fam.insert(FinSet{1});
  for (Nat k = 1; k <= k_max; ++k) {
    const FinSet block = example_block(k);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      std::vector<Nat> e;
      for (Nat i = 0; i < k; ++i) {
        if (mask >> i & 1) {
          e.push_back(block[i]);
        }
      }
      FinSet sub = FinSet::from_sorted_unchecked(e);
      fam.insert(sub);
      e.insert(e.begin(), 1);
      fam.insert(FinSet::from_sorted_unchecked(std::move(e)));
    }
  }
  return fam;
}

bool example_member(const FinSet& e) {
  std::optional<Nat> k;
  for (Nat x : e) {
    if (x == 1) {
      continue;
    }
    const auto b = block_of(x);
    if (!b || (k && *k != *b)) {
      return false;
    }
    k = b;
  }
  return true;
}

FamilyOracle example_oracle() {
  return FamilyOracle::predicate("example", example_member, true, false);
}

std::string to_string(ExampleCheck::Status s) {
  switch (s) {
    case ExampleCheck::Status::ok:
      return "ok";
    case ExampleCheck::Status::insufficient_prefix:
      return "insufficient_prefix";
    case ExampleCheck::Status::s1_witness_not_found:
      return "s1_witness_not_found";
  }
  return "?";
}

ExampleCheck check_example_noninclusions(Nat k_max, const SeqView& m) {
  if (m.size() == 0) {
    throw PreconditionError("example check needs a nonempty prefix of M");
  }
  const SetFamily fam = example_family(k_max);
  ExampleCheck c;
  c.l = m.at(1);

  // S_1-witness: the first E in S_1 on the prefix whose image leaves the family.
  enumerate(Ordinal::nat(1), m.size()).for_each([&](const FinSet& e) {
    if (c.s1_witness) {
      return;
    }
    const FinSet img = m.image(e);
    if (!example_member(img)) {
      c.s1_preimage = e;
      c.s1_witness = img;
    }
  });

  if (c.l > k_max || c.l > 62) {
    c.required_length = c.l > 62 ? SIZE_MAX : (std::size_t{1} << c.l) + c.l;
    c.status = ExampleCheck::Status::insufficient_prefix;
    return c;
  }
  c.required_length = (std::size_t{1} << c.l) + c.l;
  if (m.size() < c.required_length) {
    c.status = ExampleCheck::Status::insufficient_prefix;
    return c;
  }
  const FinSet g = example_block(c.l).with(1);
  if (!fam.contains(g)) {
    throw Error("internal: {1} u F_l missing from the example family");
  }
  c.f_preimage = g;
  c.f_witness = m.image(g);
  if (!c.s1_witness) {
    c.status = ExampleCheck::Status::s1_witness_not_found;
  }
  return c;
}

Json to_json(const ExampleCheck& c, Nat k_max, const SeqView& m) {
  Json j;
  j["kind"] = "example_check";
  j["k_max"] = k_max;
  j["M"] = m.prefix();
  j["status"] = to_string(c.status);
  j["l"] = c.l;
  j["required_length"] = c.required_length;
  auto opt = [](const std::optional<FinSet>& e) { return e ? Json(e->elements()) : Json(nullptr); };
  Json f;
  f["witness"] = opt(c.f_witness);
  f["preimage"] = opt(c.f_preimage);
  if (c.f_witness) {
    f["size"] = c.f_witness->size();
    f["min"] = c.f_witness->min();
    f["in_S1"] = member(Ordinal::nat(1), *c.f_witness);
  }
  j["F_not_in_S1"] = std::move(f);
  Json s;
  s["witness"] = opt(c.s1_witness);
  s["preimage"] = opt(c.s1_preimage);
  if (c.s1_witness) {
    s["in_family"] = example_member(*c.s1_witness);
  }
  j["S1_not_in_F"] = std::move(s);
  return j;
}

}  // namespace schreier::dichotomy
