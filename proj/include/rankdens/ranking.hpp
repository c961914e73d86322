#pragma once

// Tied, incomplete rankings over a dense item universe, viewed both as data
// records and as events (the set of permutations consistent with them).

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankdens/common.hpp"

namespace rankdens {

/// Items 0..n-1 with optional external labels. Without labels, an item's
/// text form is its 1-based number, so "3|2|1,4" works over n = 4.
class ItemUniverse {
 public:
  explicit ItemUniverse(std::size_t n);
  explicit ItemUniverse(std::vector<std::string> labels);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool has_labels() const { return !labels_.empty(); }
  [[nodiscard]] std::string label(Item item) const;
  [[nodiscard]] std::optional<Item> find(std::string_view label) const;
  /// Throws DataError for an unknown label.
  [[nodiscard]] Item index_of(std::string_view label) const;
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const ItemUniverse& other) const {
    return size_ == other.size_ && labels_ == other.labels_;
  }

 private:
  std::size_t size_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Item> index_;
};

using UniversePtr = std::shared_ptr<const ItemUniverse>;

UniversePtr make_universe(std::size_t n);
UniversePtr make_universe(std::vector<std::string> labels);

/// tau: best 1-based position among ranked items; phi: size of the tie group.
struct RankedPosition {
  std::size_t tau;
  std::size_t phi;
  bool operator==(const RankedPosition&) const = default;
};

/// Ordered sequence of disjoint nonempty groups, most preferred first. Items
/// not in any group are unranked. Immutable once built.
class TiedRanking {
 public:
  /// Validates disjointness, nonempty groups, index range and level order.
  TiedRanking(UniversePtr universe, std::vector<std::vector<Item>> groups,
              std::optional<std::vector<int>> levels = std::nullopt);

  [[nodiscard]] const ItemUniverse& universe() const { return *universe_; }
  [[nodiscard]] const UniversePtr& universe_ptr() const { return universe_; }
  [[nodiscard]] std::size_t universe_size() const { return universe_->size(); }

  [[nodiscard]] std::size_t group_count() const { return groups_.size(); }
  [[nodiscard]] const std::vector<std::vector<Item>>& groups() const { return groups_; }
  [[nodiscard]] const std::vector<Item>& group(std::size_t g) const { return groups_[g]; }
  /// Number of ranked items before group g.
  [[nodiscard]] std::size_t group_start(std::size_t g) const { return starts_[g]; }
  [[nodiscard]] std::size_t ranked_count() const { return lookup_.size(); }

  [[nodiscard]] const std::optional<std::vector<int>>& levels() const { return levels_; }
  [[nodiscard]] bool has_levels() const { return levels_.has_value(); }

  [[nodiscard]] std::optional<std::size_t> group_of(Item item) const;
  [[nodiscard]] bool is_ranked(Item item) const { return group_of(item).has_value(); }

  /// Ranked items with their group index, sorted by item.
  [[nodiscard]] const std::vector<std::pair<Item, std::uint32_t>>& ranked() const {
    return lookup_;
  }

  [[nodiscard]] bool same_universe(const TiedRanking& other) const;

  /// Same universe, same groups in the same order, same labels.
  bool operator==(const TiedRanking& other) const;

 private:
  UniversePtr universe_;
  std::vector<std::vector<Item>> groups_;
  std::optional<std::vector<int>> levels_;
  std::vector<std::size_t> starts_;
  std::vector<std::pair<Item, std::uint32_t>> lookup_;
};

/// Total order over all n items, stored most preferred first.
class Permutation {
 public:
  explicit Permutation(std::vector<Item> order);

  [[nodiscard]] std::size_t size() const { return order_.size(); }
  [[nodiscard]] const std::vector<Item>& order() const { return order_; }
  /// 0-based position of an item.
  [[nodiscard]] std::size_t position(Item item) const { return positions_.at(item); }

  bool operator==(const Permutation& other) const { return order_ == other.order_; }
  bool operator<(const Permutation& other) const { return order_ < other.order_; }

 private:
  std::vector<Item> order_;
  std::vector<std::size_t> positions_;
};

inline constexpr std::size_t kEnumerationBound = 8;

/// Parses "1,8,9 | 4 | 2,3,7". Groups are separated by '|' or U+227A, items
/// by ','; whitespace is ignored. Throws DataError on unknown labels,
/// duplicates or empty groups.
TiedRanking parse_ranking(std::string_view text, const UniversePtr& universe);
std::string format_ranking(const TiedRanking& r);
std::string format_permutation(const Permutation& p, const ItemUniverse& universe);

std::optional<RankedPosition> ranked_position(const TiedRanking& r, Item item);

/// log |R|, the number of permutations consistent with r.
double log_consistent_count(const TiedRanking& r);

/// True iff every permutation consistent with r is consistent with s.
bool implies(const TiedRanking& r, const TiedRanking& s);

/// Where insert_item places an item.
struct InsertSlot {
  enum class Kind { join_group, new_group, level };
  Kind kind;
  long value;

  /// Tie the item with the existing group g.
  static InsertSlot join(std::size_t g) { return {Kind::join_group, static_cast<long>(g)}; }
  /// New singleton group in gap 0..k (0 = most preferred).
  static InsertSlot gap(std::size_t p) { return {Kind::new_group, static_cast<long>(p)}; }
  /// Join the group labelled with this level, or add a singleton group at
  /// the position that keeps levels decreasing.
  static InsertSlot at_level(int level) { return {Kind::level, level}; }
};

TiedRanking insert_item(const TiedRanking& r, Item item, InsertSlot slot);

/// Drops items from r; emptied groups disappear with their labels. Throws if
/// nothing would remain ranked.
TiedRanking remove_items(const TiedRanking& r, std::span<const Item> items);

/// Restriction of r to the given items, or nullopt if none of them is ranked.
std::optional<TiedRanking> project(const TiedRanking& r, std::span<const Item> subset);

/// The chain order[0] < order[1] < ... with every other item unranked.
TiedRanking make_chain(const UniversePtr& universe, std::span<const Item> order);

/// All permutations consistent with r. Throws std::invalid_argument when the
/// universe is larger than bound.
std::vector<Permutation> enumerate_consistent(const TiedRanking& r,
                                              std::size_t bound = kEnumerationBound);

}  // namespace rankdens
