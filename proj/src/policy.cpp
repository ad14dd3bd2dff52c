#include "schreier/policy.hpp"

#include <charconv>

#include "schreier/error.hpp"

namespace schreier::games {

namespace {

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(Nat l) : l_(l) {}
  std::optional<Nat> choose(const DecisionContext&) const override { return l_; }
  std::string describe() const override { return "const:" + std::to_string(l_); }
  bool history_free() const override { return true; }

 private:
  Nat l_;
};

class SequencePolicy final : public Policy {
 public:
  explicit SequencePolicy(std::vector<Nat> v) : v_(std::move(v)) {}
  std::optional<Nat> choose(const DecisionContext& ctx) const override {
    if (ctx.decision_index >= v_.size()) {
      return std::nullopt;
    }
    return v_[ctx.decision_index];
  }
  std::string describe() const override {
    std::string s = "seq:";
    for (std::size_t i = 0; i < v_.size(); ++i) {
      s += (i ? "," : "") + std::to_string(v_[i]);
    }
    return s;
  }

 private:
  std::vector<Nat> v_;
};

class MinLastPolicy final : public Policy {
 public:
  explicit MinLastPolicy(Nat first) : first_(first) {}
  std::optional<Nat> choose(const DecisionContext& ctx) const override {
    for (auto it = ctx.moves.rbegin(); it != ctx.moves.rend(); ++it) {
      if (it->side == Side::S) {
        return it->block.min();
      }
    }
    return first_;
  }
  std::string describe() const override {
    return first_ == 1 ? "minlast" : "minlast:" + std::to_string(first_);
  }

 private:
  Nat first_;
};

class PerGamePolicy final : public Policy {
 public:
  PerGamePolicy(std::map<Ordinal, Nat> m, std::optional<Nat> fallback)
      : m_(std::move(m)), fallback_(fallback) {}
  std::optional<Nat> choose(const DecisionContext& ctx) const override {
    if (auto it = m_.find(ctx.game); it != m_.end()) {
      return it->second;
    }
    return fallback_;
  }
  std::string describe() const override {
    std::string s = "game:";
    bool first = true;
    for (const auto& [o, l] : m_) {
      s += (first ? "" : ";") + o.to_string() + "=" + std::to_string(l);
      first = false;
    }
    if (fallback_) {
      s += (first ? "" : ";") + std::string("default=") + std::to_string(*fallback_);
    }
    return s;
  }
  bool history_free() const override { return true; }

 private:
  std::map<Ordinal, Nat> m_;
  std::optional<Nat> fallback_;
};

class StrategyPolicy final : public Policy {
 public:
  explicit StrategyPolicy(std::shared_ptr<const Strategy> s) : s_(std::move(s)) {}
  std::optional<Nat> choose(const DecisionContext& ctx) const override {
    return s_->lookup(prefix_hash(ctx.moves, ctx.moves.size()));
  }
  std::string describe() const override {
    return "strategy(" + std::to_string(s_->decisions.size()) + " decisions)";
  }

 private:
  std::shared_ptr<const Strategy> s_;
};

Nat parse_positive(std::string_view text, std::string_view whole) {
  while (!text.empty() && text.front() == ' ') {
    text.remove_prefix(1);
  }
  while (!text.empty() && text.back() == ' ') {
    text.remove_suffix(1);
  }
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 1) {
    throw ParseError("policy \"" + std::string(whole) + "\": expected a positive integer, got \"" +
                     std::string(text) + "\"");
  }
  return v;
}

}  // namespace

PolicyPtr constant_policy(Nat l) { return std::make_shared<ConstantPolicy>(l); }

PolicyPtr sequence_policy(std::vector<Nat> values) {
  return std::make_shared<SequencePolicy>(std::move(values));
}

PolicyPtr min_last_policy(Nat first) { return std::make_shared<MinLastPolicy>(first); }

PolicyPtr per_game_policy(std::map<Ordinal, Nat> by_game, std::optional<Nat> fallback) {
  return std::make_shared<PerGamePolicy>(std::move(by_game), fallback);
}

PolicyPtr strategy_policy(std::shared_ptr<const Strategy> strat) {
  return std::make_shared<StrategyPolicy>(std::move(strat));
}

PolicyPtr parse_policy(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (head == "const") {
    return constant_policy(parse_positive(rest, text));
  }
  if (head == "seq") {
    std::vector<Nat> v;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto end = comma == std::string_view::npos ? rest.size() : comma;
      v.push_back(parse_positive(rest.substr(start, end - start), text));
      start = end + 1;
    }
    return sequence_policy(std::move(v));
  }
  if (head == "minlast") {
    return min_last_policy(colon == std::string_view::npos ? 1 : parse_positive(rest, text));
  }
  if (head == "game") {
    std::map<Ordinal, Nat> m;
    std::optional<Nat> fallback;
    std::size_t start = 0;
    while (start < rest.size()) {
      const auto semi = rest.find(';', start);
      const auto end = semi == std::string_view::npos ? rest.size() : semi;
      const std::string_view item = rest.substr(start, end - start);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("policy \"" + std::string(text) + "\": expected <ord>=L in \"" +
                         std::string(item) + "\"");
      }
      const std::string_view key = item.substr(0, eq);
      const Nat l = parse_positive(item.substr(eq + 1), text);
      if (key == "default") {
        fallback = l;
      } else {
        m[parse_ordinal(key)] = l;
      }
      start = end + 1;
    }
    return per_game_policy(std::move(m), fallback);
  }
  throw ParseError("unknown policy \"" + std::string(text) +
                   "\" (expected const:L, seq:a,b,..., minlast[:L] or game:<ord>=L;...;default=L)");
}

}  // namespace schreier::games
