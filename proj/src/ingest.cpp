#include "rankdens/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rankdens/random.hpp"

namespace rankdens {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + delim.size();
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<long long> parse_integer(std::string_view s) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

}  // namespace

FormatDescriptor FormatDescriptor::parse(std::string_view text) {
  FormatDescriptor f;
  if (text == "ml100k") return f;
  if (text == "ml1m") {
    f.delimiter = "::";
    return f;
  }
  if (!text.starts_with("csv:")) {
    throw std::invalid_argument("unknown format '" + std::string(text) + "'");
  }
  const auto parts = split_fields(text.substr(4), ":");
  const std::string_view cols = parts.front();
  const auto u = cols.find('u');
  const auto i = cols.find('i');
  const auto r = cols.find('r');
  if (u == std::string_view::npos || i == std::string_view::npos || r == std::string_view::npos ||
      cols.find('u', u + 1) != std::string_view::npos ||
      cols.find('i', i + 1) != std::string_view::npos ||
      cols.find('r', r + 1) != std::string_view::npos) {
    throw std::invalid_argument("csv columns must name u, i and r exactly once");
  }
  f.delimiter = ",";
  f.user_column = u;
  f.item_column = i;
  f.rating_column = r;
  f.min_fields = std::max({u, i, r}) + 1;
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto opt = parts[p];
    if (opt == "header") {
      f.header = true;
    } else if (opt == "tab") {
      f.delimiter = "\t";
    } else if (opt == "colons") {
      f.delimiter = "::";
    } else if (const auto dash = opt.find('-', 1); dash != std::string_view::npos) {
      const auto lo = parse_integer(opt.substr(0, dash));
      const auto hi = parse_integer(opt.substr(dash + 1));
      if (!lo || !hi || *lo > *hi) throw std::invalid_argument("bad scale '" + std::string(opt) + "'");
      f.min_level = static_cast<int>(*lo);
      f.max_level = static_cast<int>(*hi);
    } else {
      throw std::invalid_argument("unknown csv option '" + std::string(opt) + "'");
    }
  }
  return f;
}

RatingsTable parse_ratings(std::istream& in, const FormatDescriptor& format, double max_error_rate) {
  RatingsTable table;
  table.min_level = format.min_level;
  table.max_level = format.max_level;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::string line;
  bool skip_header = format.header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (skip_header) {
      skip_header = false;
      continue;
    }
    ++table.lines;
    const auto fields = split_fields(line, format.delimiter);
    if (fields.size() < format.min_fields) {
      ++table.malformed;
      continue;
    }
    const auto user = trim(fields[format.user_column]);
    const auto item = trim(fields[format.item_column]);
    const auto level = parse_integer(trim(fields[format.rating_column]));
    if (user.empty() || item.empty() || !level || *level < format.min_level ||
        *level > format.max_level) {
      ++table.malformed;
      continue;
    }
    auto key = std::pair(std::string(user), std::string(item));
    if (const auto it = seen.find(key); it != seen.end()) {
      table.ratings[it->second].level = static_cast<int>(*level);
      ++table.duplicates;
      continue;
    }
    seen.emplace(key, table.ratings.size());
    table.ratings.push_back({std::move(key.first), std::move(key.second), static_cast<int>(*level)});
  }
  if (table.lines > 0 &&
      static_cast<double>(table.malformed) > max_error_rate * static_cast<double>(table.lines)) {
    throw DataError(std::to_string(table.malformed) + " of " + std::to_string(table.lines) +
                    " lines are malformed");
  }
  if (table.ratings.empty()) throw DataError("no ratings");
  return table;
}

RatingsTable load_ratings(const std::string& path, const FormatDescriptor& format,
                          double max_error_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  return parse_ratings(in, format, max_error_rate);
}

bool id_less(std::string_view a, std::string_view b) {
  const auto x = parse_integer(a);
  const auto y = parse_integer(b);
  if (x && y) return *x != *y ? *x < *y : a < b;
  if (x || y) return x.has_value();
  return a < b;
}

namespace {

struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const { return id_less(a, b); }
};

// Sort by count descending, then id.
std::vector<std::string> by_count(const std::unordered_map<std::string, std::size_t>& counts) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return id_less(a.first, b.first);
  });
  std::vector<std::string> out;
  out.reserve(v.size());
  for (auto& [id, c] : v) out.push_back(std::move(id));
  return out;
}

}  // namespace

std::vector<std::string> select_items(const RatingsTable& table, std::size_t top_n) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : table.ratings) ++counts[r.item];
  auto ranked = by_count(counts);
  if (top_n > 0 && top_n < ranked.size()) ranked.resize(top_n);
  std::sort(ranked.begin(), ranked.end(), IdLess{});
  return ranked;
}

std::vector<std::string> select_users(const RatingsTable& table,
                                      const std::vector<std::string>& items,
                                      const UserPolicy& policy) {
  const std::unordered_map<std::string_view, bool> wanted = [&] {
    std::unordered_map<std::string_view, bool> m;
    for (const auto& i : items) m.emplace(i, true);
    return m;
  }();
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : table.ratings) {
    if (wanted.contains(r.item)) ++counts[r.user];
  }
  std::erase_if(counts, [&](const auto& kv) { return kv.second < std::max<std::size_t>(1, policy.min_count); });
  auto ranked = by_count(counts);
  if (policy.top_m && *policy.top_m < ranked.size()) ranked.resize(*policy.top_m);
  std::sort(ranked.begin(), ranked.end(), IdLess{});
  return ranked;
}

RankingSet build_rankings(const RatingsTable& table, const std::vector<std::string>& items,
                          const std::vector<std::string>& users) {
  if (table.ratings.empty()) throw DataError("no ratings");
  RankingSet set;
  set.universe = make_universe(items);
  std::unordered_map<std::string_view, std::size_t> user_index;
  for (std::size_t u = 0; u < users.size(); ++u) user_index.emplace(users[u], u);

  // per user: level -> items
  std::vector<std::map<int, std::vector<Item>, std::greater<>>> by_level(users.size());
  for (const auto& r : table.ratings) {
    const auto u = user_index.find(r.user);
    if (u == user_index.end()) continue;
    const auto item = set.universe->find(r.item);
    if (!item) continue;
    by_level[u->second][r.level].push_back(*item);
  }
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (by_level[u].empty()) continue;
    std::vector<std::vector<Item>> groups;
    std::vector<int> levels;
    for (auto& [level, group] : by_level[u]) {
      levels.push_back(level);
      groups.push_back(std::move(group));
    }
    set.users.push_back(users[u]);
    set.rankings.emplace_back(set.universe, std::move(groups), std::move(levels));
  }
  return set;
}

Split split(const RankingSet& set, std::uint64_t seed, double test_fraction,
            double holdout_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0) ||
      !(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("split fractions must be in (0, 1)");
  }
  const std::size_t m = set.rankings.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng users_rng(derive_seed(seed, 1));
  users_rng.shuffle(order);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
  std::vector<bool> is_test(m, false);
  for (std::size_t x = 0; x < n_test; ++x) is_test[order[x]] = true;

  Split out;
  out.test.seed = seed;
  const std::uint64_t holdout_seed = derive_seed(seed, 2);
  for (std::size_t u = 0; u < m; ++u) {
    const auto& r = set.rankings[u];
    if (!is_test[u]) {
      out.train_users.push_back(set.users[u]);
      out.train.push_back(r);
      continue;
    }
    std::vector<HeldOut> held;
    const std::size_t k = r.ranked_count();
    TiedRanking observed = r;
    if (k >= 2) {
      auto count = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(k)));
      count = std::clamp<std::size_t>(count, 1, k - 1);
      std::vector<Item> items;
      for (const auto& [item, g] : r.ranked()) items.push_back(item);
      Rng rng(derive_seed(holdout_seed, u));
      rng.shuffle(items);
      items.resize(count);
      std::sort(items.begin(), items.end());
      for (const Item item : items) {
        const auto g = *r.group_of(item);
        held.push_back({item, r.has_levels() ? (*r.levels())[g] : 0, g + 1});
      }
      observed = remove_items(r, items);
    }
    out.test_users.push_back(set.users[u]);
    out.test.users.push_back({set.users[u], std::move(observed), std::move(held)});
  }
  return out;
}

namespace {

void write_line(std::ostream& out, const std::string& user, const TiedRanking& r) {
  out << user << '\t';
  if (r.has_levels()) {
    const auto& levels = *r.levels();
    for (std::size_t g = 0; g < levels.size(); ++g) out << (g ? "," : "") << levels[g];
  }
  out << '\t' << format_ranking(r);
}

}  // namespace

void serialize_rankings(const RankingSet& set, std::ostream& out) {
  for (std::size_t u = 0; u < set.rankings.size(); ++u) {
    write_line(out, set.users[u], set.rankings[u]);
    out << '\n';
  }
}

void serialize_split(const Split& s, std::ostream& out) {
  for (std::size_t u = 0; u < s.train.size(); ++u) {
    out << "train\t";
    write_line(out, s.train_users[u], s.train[u]);
    out << '\n';
  }
  for (const auto& user : s.test.users) {
    out << "test\t";
    write_line(out, user.id, user.observed);
    for (const auto& h : user.held_out) {
      out << '\t' << user.observed.universe().label(h.item) << ':' << h.level << ':' << h.rank;
    }
    out << '\n';
  }
}

std::map<std::string, std::string> load_titles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::map<std::string, std::string> titles;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    titles[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return titles;
}

}  // namespace rankdens
