#include "schreier/finset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>

#include "schreier/error.hpp"

namespace schreier {

namespace {

void validate_increasing(const std::vector<Nat>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1) {
      throw PreconditionError(std::string(what) + ": elements must be >= 1");
    }
    if (i > 0 && v[i] <= v[i - 1]) {
      throw PreconditionError(std::string(what) + ": elements must be strictly increasing");
    }
  }
}

std::vector<Nat> parse_csv_numbers(std::string_view text) {
  std::vector<Nat> out;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
      ++pos;
    }
  };
  skip_ws();
  if (pos == text.size()) {
    return out;
  }
  while (true) {
    skip_ws();
    Nat value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{}) {
      throw ParseError("expected a natural number in \"" + std::string(text) + "\"");
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    out.push_back(value);
    skip_ws();
    if (pos == text.size()) {
      break;
    }
    if (text[pos] != ',') {
      throw ParseError("expected ',' in \"" + std::string(text) + "\"");
    }
    ++pos;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

FinSet::FinSet(std::vector<Nat> elements) : elems_(std::move(elements)) {
  validate_increasing(elems_, "FinSet");
}

FinSet::FinSet(std::initializer_list<Nat> elements) : FinSet(std::vector<Nat>(elements)) {}

FinSet FinSet::from_sorted_unchecked(std::vector<Nat> elements) {
  FinSet e;
  e.elems_ = std::move(elements);
  return e;
}

FinSet FinSet::parse(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '{' && text.back() == '}') {
    text = text.substr(1, text.size() - 2);
  }
  try {
    return FinSet(parse_csv_numbers(text));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string(e.what()) + " in \"" + std::string(text) + "\"");
  }
}

bool FinSet::contains(Nat x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

bool FinSet::is_subset_of(const FinSet& other) const {
  return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

FinSet FinSet::with(Nat x) const {
  if (x < 1) {
    throw PreconditionError("FinSet elements must be >= 1");
  }
  auto it = std::lower_bound(elems_.begin(), elems_.end(), x);
  if (it != elems_.end() && *it == x) {
    return *this;
  }
  std::vector<Nat> v;
  v.reserve(elems_.size() + 1);
  v.insert(v.end(), elems_.begin(), it);
  v.push_back(x);
  v.insert(v.end(), it, elems_.end());
  return from_sorted_unchecked(std::move(v));
}

FinSet FinSet::extended(Nat x) const {
  if (x < 1 || (!elems_.empty() && x <= elems_.back())) {
    throw PreconditionError("FinSet::extended requires x > max");
  }
  std::vector<Nat> v = elems_;
  v.push_back(x);
  return from_sorted_unchecked(std::move(v));
}

FinSet FinSet::without_min() const {
  if (elems_.empty()) {
    return *this;
  }
  return from_sorted_unchecked(std::vector<Nat>(elems_.begin() + 1, elems_.end()));
}

FinSet FinSet::prefix(std::size_t n) const {
  n = std::min(n, elems_.size());
  return from_sorted_unchecked(std::vector<Nat>(elems_.begin(), elems_.begin() + n));
}

std::string FinSet::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += std::to_string(elems_[i]);
  }
  return out + "}";
}

std::string FinSet::to_csv() const {
  if (elems_.empty()) {
    return "{}";
  }
  std::string out;
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += std::to_string(elems_[i]);
  }
  return out;
}

bool precedes(const FinSet& e, const FinSet& f) {
  return e.empty() || f.empty() || e.max() < f.min();
}

FinSet concat_blocks(std::span<const FinSet> blocks) {
  std::vector<Nat> v;
  for (const auto& b : blocks) {
    if (!v.empty() && !b.empty() && b.min() <= v.back()) {
      throw PreconditionError("blocks must be increasing to concatenate");
    }
    v.insert(v.end(), b.begin(), b.end());
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

FinSet finset_from_mask(std::uint64_t mask) {
  std::vector<Nat> v;
  while (mask != 0) {
    const int bit = __builtin_ctzll(mask);
    v.push_back(static_cast<Nat>(bit) + 1);
    mask &= mask - 1;
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

std::uint64_t mask_of(const FinSet& e) {
  std::uint64_t m = 0;
  for (Nat x : e) {
    if (x > 64) {
      throw PreconditionError("mask_of: element beyond 64");
    }
    m |= std::uint64_t{1} << (x - 1);
  }
  return m;
}

std::size_t FinSetHash::operator()(const FinSet& e) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Nat x : e) {
    h ^= std::hash<Nat>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

SeqView::SeqView(std::vector<Nat> prefix, Nat universe_bound)
    : prefix_(std::move(prefix)), bound_(universe_bound) {
  validate_increasing(prefix_, "SeqView");
  if (!prefix_.empty() && prefix_.back() > bound_) {
    throw PreconditionError("SeqView prefix exceeds its universe bound " + std::to_string(bound_));
  }
}

SeqView SeqView::identity(Nat n) {
  std::vector<Nat> v(n);
  for (Nat i = 0; i < n; ++i) {
    v[i] = i + 1;
  }
  return SeqView(std::move(v), n);
}

SeqView SeqView::parse(std::string_view csv, Nat universe_bound) {
  auto v = parse_csv_numbers(trim(csv));
  if (universe_bound == 0 && !v.empty()) {
    universe_bound = v.back();
  }
  try {
    return SeqView(std::move(v), universe_bound);
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
}

bool SeqView::contains(Nat value) const {
  return std::binary_search(prefix_.begin(), prefix_.end(), value);
}

std::optional<std::size_t> SeqView::index_of(Nat value) const {
  auto it = std::lower_bound(prefix_.begin(), prefix_.end(), value);
  if (it == prefix_.end() || *it != value) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - prefix_.begin()) + 1;
}

FinSet SeqView::image(const FinSet& indices) const {
  std::vector<Nat> v;
  v.reserve(indices.size());
  for (Nat i : indices) {
    if (i > prefix_.size()) {
      throw PreconditionError("index " + std::to_string(i) + " of " + indices.to_string() +
                              " exceeds sequence prefix length " + std::to_string(prefix_.size()));
    }
    v.push_back(prefix_[i - 1]);
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

std::optional<FinSet> SeqView::preimage(const FinSet& values) const {
  std::vector<Nat> v;
  v.reserve(values.size());
  for (Nat x : values) {
    auto i = index_of(x);
    if (!i) {
      return std::nullopt;
    }
    v.push_back(*i);
  }
  return FinSet::from_sorted_unchecked(std::move(v));
}

SeqView SeqView::tail_from(std::size_t i) const {
  SeqView s;
  s.bound_ = bound_;
  if (i >= 1 && i <= prefix_.size()) {
    s.prefix_.assign(prefix_.begin() + static_cast<std::ptrdiff_t>(i - 1), prefix_.end());
  }
  return s;
}

std::string SeqView::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += std::to_string(prefix_[i]);
  }
  return out + ")";
}

}  // namespace schreier
