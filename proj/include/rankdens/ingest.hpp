#pragma once

// Ratings files to per-user tied rankings, subset selection and seeded
// train/test splits.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankdens/recommend.hpp"

namespace rankdens {

/// Layout of a ratings file.
///   ml100k                      tab separated user, item, rating, timestamp
///   ml1m                        "::" separated, same columns
///   csv:COLS[:header][:LO-HI][:tab|:colons]
/// COLS names the columns in order: u user, i item, r rating, anything else
/// ignored (e.g. "uirt"). The scale defaults to 1-5.
struct FormatDescriptor {
  std::string delimiter = "\t";
  std::size_t user_column = 0;
  std::size_t item_column = 1;
  std::size_t rating_column = 2;
  std::size_t min_fields = 3;
  bool header = false;
  int min_level = 1;
  int max_level = 5;

  /// Throws std::invalid_argument on an unknown name or malformed descriptor.
  static FormatDescriptor parse(std::string_view text);
};

struct Rating {
  std::string user;
  std::string item;
  int level;
};

struct RatingsTable {
  std::vector<Rating> ratings;  // one per (user, item), in first-seen order
  int min_level = 1;
  int max_level = 5;
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
};

inline constexpr double kDefaultErrorCap = 0.01;

/// Malformed lines (missing fields, non-integer or out-of-scale rating) are
/// counted; DataError once they exceed max_error_rate of the data lines.
/// Duplicate (user, item) pairs keep the last rating.
RatingsTable parse_ratings(std::istream& in, const FormatDescriptor& format,
                           double max_error_rate = kDefaultErrorCap);
RatingsTable load_ratings(const std::string& path, const FormatDescriptor& format,
                          double max_error_rate = kDefaultErrorCap);

/// Orders ids numerically when both are integers, otherwise as text.
bool id_less(std::string_view a, std::string_view b);

/// The top_n most rated items (ties by id), returned in id order. top_n = 0
/// or beyond the item count selects every item.
std::vector<std::string> select_items(const RatingsTable& table, std::size_t top_n);

struct UserPolicy {
  /// Minimum ratings among the selected items.
  std::size_t min_count = 1;
  /// Keep only the top_m users by that count (ties by id).
  std::optional<std::size_t> top_m;
};

/// Users passing the policy, in id order.
std::vector<std::string> select_users(const RatingsTable& table,
                                      const std::vector<std::string>& items,
                                      const UserPolicy& policy);

struct RankingSet {
  UniversePtr universe;  // labels are item ids
  std::vector<std::string> users;
  std::vector<TiedRanking> rankings;  // with level labels, parallel to users
};

/// One ranking per user (in id order) over the selected items: a group per
/// occupied level, highest level first. Users with no rating among the
/// items are left out.
RankingSet build_rankings(const RatingsTable& table, const std::vector<std::string>& items,
                          const std::vector<std::string>& users);

struct Split {
  std::vector<std::string> train_users;
  std::vector<TiedRanking> train;
  std::vector<std::string> test_users;  // parallel to test.users
  PredictionSplit test;
};

/// Random user partition, then per test user a random holdout of
/// round(holdout_fraction * k) of its k ranked items, kept between 1 and
/// k - 1. Test users with fewer than two ranked items hold nothing out.
Split split(const RankingSet& set, std::uint64_t seed, double test_fraction,
            double holdout_fraction = 0.5);

/// "user<TAB>levels<TAB>ranking", one user per line.
void serialize_rankings(const RankingSet& set, std::ostream& out);
/// Train lines as above, then test lines with the held-out items appended
/// as "item:level:rank".
void serialize_split(const Split& s, std::ostream& out);

/// id<TAB>title per line; lines without a tab are skipped.
std::map<std::string, std::string> load_titles(const std::string& path);

}  // namespace rankdens
