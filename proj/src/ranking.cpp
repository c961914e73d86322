#include "rankdens/ranking.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rankdens {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = s.find(sep, begin);
    parts.push_back(s.substr(begin, end == std::string_view::npos ? end : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

}  // namespace

// ---------------------------------------------------------------------------
// ItemUniverse

ItemUniverse::ItemUniverse(std::size_t n) : size_(n) {
  if (n == 0) throw std::invalid_argument("item universe must be nonempty");
}

ItemUniverse::ItemUniverse(std::vector<std::string> labels)
    : size_(labels.size()), labels_(std::move(labels)) {
  if (size_ == 0) throw std::invalid_argument("item universe must be nonempty");
  index_.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    if (labels_[i].empty()) throw std::invalid_argument("empty item label");
    if (!index_.emplace(labels_[i], static_cast<Item>(i)).second) {
      throw std::invalid_argument("duplicate item label '" + labels_[i] + "'");
    }
  }
}

std::string ItemUniverse::label(Item item) const {
  if (item >= size_) throw std::out_of_range("item index out of range");
  return labels_.empty() ? std::to_string(item + 1) : labels_[item];
}

std::optional<Item> ItemUniverse::find(std::string_view label) const {
  if (!labels_.empty()) {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t value = 0;
  const auto* end = label.data() + label.size();
  const auto [ptr, ec] = std::from_chars(label.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 1 || value > size_) return std::nullopt;
  return static_cast<Item>(value - 1);
}

Item ItemUniverse::index_of(std::string_view label) const {
  const auto item = find(label);
  if (!item) throw DataError("unknown item '" + std::string(label) + "'");
  return *item;
}

UniversePtr make_universe(std::size_t n) { return std::make_shared<const ItemUniverse>(n); }

UniversePtr make_universe(std::vector<std::string> labels) {
  return std::make_shared<const ItemUniverse>(std::move(labels));
}

// ---------------------------------------------------------------------------
// TiedRanking

TiedRanking::TiedRanking(UniversePtr universe, std::vector<std::vector<Item>> groups,
                         std::optional<std::vector<int>> levels)
    : universe_(std::move(universe)), groups_(std::move(groups)), levels_(std::move(levels)) {
  if (!universe_) throw std::invalid_argument("ranking without a universe");
  if (groups_.empty()) throw std::invalid_argument("ranking needs at least one group");
  if (levels_) {
    if (levels_->size() != groups_.size()) {
      throw std::invalid_argument("level labels must match the group count");
    }
    for (std::size_t g = 1; g < levels_->size(); ++g) {
      if ((*levels_)[g] >= (*levels_)[g - 1]) {
        throw std::invalid_argument("level labels must decrease in preference order");
      }
    }
  }
  starts_.reserve(groups_.size());
  std::size_t count = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto& group = groups_[g];
    if (group.empty()) throw std::invalid_argument("empty group in ranking");
    std::sort(group.begin(), group.end());
    starts_.push_back(count);
    count += group.size();
    for (const Item item : group) {
      if (item >= universe_->size()) throw std::out_of_range("item index out of range");
      lookup_.emplace_back(item, static_cast<std::uint32_t>(g));
    }
  }
  std::sort(lookup_.begin(), lookup_.end());
  const auto dup = std::adjacent_find(lookup_.begin(), lookup_.end(),
                                      [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != lookup_.end()) {
    throw std::invalid_argument("item " + universe_->label(dup->first) +
                                " appears more than once");
  }
}

std::optional<std::size_t> TiedRanking::group_of(Item item) const {
  const auto it = std::lower_bound(lookup_.begin(), lookup_.end(), item,
                                   [](const auto& entry, Item x) { return entry.first < x; });
  if (it == lookup_.end() || it->first != item) return std::nullopt;
  return it->second;
}

bool TiedRanking::same_universe(const TiedRanking& other) const {
  return universe_ == other.universe_ || *universe_ == *other.universe_;
}

bool TiedRanking::operator==(const TiedRanking& other) const {
  return same_universe(other) && groups_ == other.groups_ && levels_ == other.levels_;
}

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<Item> order) : order_(std::move(order)) {
  positions_.assign(order_.size(), order_.size());
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const Item item = order_[p];
    if (item >= order_.size() || positions_[item] != order_.size()) {
      throw std::invalid_argument("permutation is not a bijection");
    }
    positions_[item] = p;
  }
}

// ---------------------------------------------------------------------------
// Text notation

TiedRanking parse_ranking(std::string_view text, const UniversePtr& universe) {
  static constexpr std::string_view kPrec = "\xE2\x89\xBA";  // U+227A
  std::string normalized(text);
  for (auto pos = normalized.find(kPrec); pos != std::string::npos;
       pos = normalized.find(kPrec, pos)) {
    normalized.replace(pos, kPrec.size(), "|");
  }
  if (trim(normalized).empty()) throw DataError("empty ranking");

  std::vector<std::vector<Item>> groups;
  std::vector<bool> seen(universe->size(), false);
  for (const auto group_text : split(normalized, '|')) {
    std::vector<Item> group;
    for (const auto raw : split(group_text, ',')) {
      const auto label = trim(raw);
      if (label.empty()) throw DataError("empty item or group in '" + std::string(text) + "'");
      const Item item = universe->index_of(label);
      if (seen[item]) throw DataError("duplicate item '" + std::string(label) + "'");
      seen[item] = true;
      group.push_back(item);
    }
    groups.push_back(std::move(group));
  }
  return TiedRanking(universe, std::move(groups));
}

std::string format_ranking(const TiedRanking& r) {
  std::string out;
  for (std::size_t g = 0; g < r.group_count(); ++g) {
    if (g > 0) out += '|';
    bool first = true;
    for (const Item item : r.group(g)) {
      if (!first) out += ',';
      out += r.universe().label(item);
      first = false;
    }
  }
  return out;
}

std::string format_permutation(const Permutation& p, const ItemUniverse& universe) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out += '|';
    out += universe.label(p.order()[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries

std::optional<RankedPosition> ranked_position(const TiedRanking& r, Item item) {
  if (item >= r.universe_size()) throw std::out_of_range("item index out of range");
  const auto g = r.group_of(item);
  if (!g) return std::nullopt;
  return RankedPosition{r.group_start(*g) + 1, r.group(*g).size()};
}

double log_consistent_count(const TiedRanking& r) {
  double value = std::lgamma(static_cast<double>(r.universe_size()) + 1.0) -
                 std::lgamma(static_cast<double>(r.ranked_count()) + 1.0);
  for (const auto& group : r.groups()) {
    value += std::lgamma(static_cast<double>(group.size()) + 1.0);
  }
  return value;
}

bool implies(const TiedRanking& r, const TiedRanking& s) {
  if (!r.same_universe(s)) throw std::invalid_argument("rankings over different universes");
  // s constrains nothing unless it has two or more groups. Otherwise each
  // ranked item of s must be ranked by r, and r must separate consecutive
  // groups of s strictly.
  if (s.group_count() < 2) return true;
  std::optional<std::size_t> previous_max;
  for (const auto& group : s.groups()) {
    std::size_t lo = SIZE_MAX;
    std::size_t hi = 0;
    for (const Item item : group) {
      const auto g = r.group_of(item);
      if (!g) return false;
      lo = std::min(lo, *g);
      hi = std::max(hi, *g);
    }
    if (previous_max && lo <= *previous_max) return false;
    previous_max = hi;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Editing

TiedRanking insert_item(const TiedRanking& r, Item item, InsertSlot slot) {
  if (item >= r.universe_size()) throw std::out_of_range("item index out of range");
  if (r.is_ranked(item)) {
    throw std::invalid_argument("item " + r.universe().label(item) + " is already ranked");
  }
  auto groups = r.groups();
  auto levels = r.levels();
  const auto k = static_cast<long>(groups.size());

  switch (slot.kind) {
    case InsertSlot::Kind::join_group:
      if (slot.value < 0 || slot.value >= k) throw std::out_of_range("group index out of range");
      groups[static_cast<std::size_t>(slot.value)].push_back(item);
      break;
    case InsertSlot::Kind::new_group:
      if (slot.value < 0 || slot.value > k) throw std::out_of_range("gap index out of range");
      if (levels) throw std::invalid_argument("labelled ranking: insert by level instead");
      groups.insert(groups.begin() + slot.value, std::vector<Item>{item});
      break;
    case InsertSlot::Kind::level: {
      if (!levels) throw std::invalid_argument("ranking has no level labels");
      const int level = static_cast<int>(slot.value);
      // Levels are strictly decreasing; find the first group not above `level`.
      std::size_t g = 0;
      while (g < levels->size() && (*levels)[g] > level) ++g;
      if (g < levels->size() && (*levels)[g] == level) {
        groups[g].push_back(item);
      } else {
        groups.insert(groups.begin() + static_cast<long>(g), std::vector<Item>{item});
        levels->insert(levels->begin() + static_cast<long>(g), level);
      }
      break;
    }
  }
  return TiedRanking(r.universe_ptr(), std::move(groups), std::move(levels));
}

TiedRanking remove_items(const TiedRanking& r, std::span<const Item> items) {
  std::vector<bool> drop(r.universe_size(), false);
  for (const Item item : items) {
    if (item >= r.universe_size()) throw std::out_of_range("item index out of range");
    drop[item] = true;
  }
  std::vector<std::vector<Item>> groups;
  std::optional<std::vector<int>> levels;
  if (r.has_levels()) levels.emplace();
  for (std::size_t g = 0; g < r.group_count(); ++g) {
    std::vector<Item> kept;
    for (const Item item : r.group(g)) {
      if (!drop[item]) kept.push_back(item);
    }
    if (kept.empty()) continue;
    groups.push_back(std::move(kept));
    if (levels) levels->push_back((*r.levels())[g]);
  }
  if (groups.empty()) throw std::invalid_argument("removing every ranked item");
  return TiedRanking(r.universe_ptr(), std::move(groups), std::move(levels));
}

std::optional<TiedRanking> project(const TiedRanking& r, std::span<const Item> subset) {
  std::vector<bool> keep(r.universe_size(), false);
  for (const Item item : subset) keep.at(item) = true;
  std::vector<Item> dropped;
  for (const auto& [item, g] : r.ranked()) {
    if (!keep[item]) dropped.push_back(item);
  }
  if (dropped.size() == r.ranked_count()) return std::nullopt;
  if (dropped.empty()) return r;
  return remove_items(r, dropped);
}

TiedRanking make_chain(const UniversePtr& universe, std::span<const Item> order) {
  std::vector<std::vector<Item>> groups;
  groups.reserve(order.size());
  for (const Item item : order) groups.push_back({item});
  return TiedRanking(universe, std::move(groups));
}

std::vector<Permutation> enumerate_consistent(const TiedRanking& r, std::size_t bound) {
  const std::size_t n = r.universe_size();
  if (n > bound) {
    throw std::invalid_argument("enumeration over " + std::to_string(n) +
                                " items exceeds the bound of " + std::to_string(bound));
  }
  std::vector<long> group(n, -1);
  for (const auto& [item, g] : r.ranked()) group[item] = g;

  std::vector<Item> order(n);
  std::iota(order.begin(), order.end(), Item{0});
  std::vector<Permutation> out;
  do {
    long last = -1;
    bool ok = true;
    for (const Item item : order) {
      if (group[item] < 0) continue;
      if (group[item] < last) {
        ok = false;
        break;
      }
      last = group[item];
    }
    if (ok) out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace rankdens
