#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "rankdens/ingest.hpp"

using namespace rankdens;

namespace {

RatingsTable parse(const std::string& text, const std::string& format = "ml100k",
                   double cap = kDefaultErrorCap) {
  std::istringstream in(text);
  return parse_ratings(in, FormatDescriptor::parse(format), cap);
}

std::string ml100k_path() {
  if (const char* env = std::getenv("RANKDENS_ML100K")) return env;
  return std::string(RANKDENS_SOURCE_DIR) + "/data/ml-100k/u.data";
}

}  // namespace

TEST_CASE("format descriptors") {
  const auto ml = FormatDescriptor::parse("ml100k");
  CHECK(ml.delimiter == "\t");
  CHECK(ml.user_column == 0);
  CHECK(ml.rating_column == 2);
  CHECK(FormatDescriptor::parse("ml1m").delimiter == "::");

  const auto csv = FormatDescriptor::parse("csv:iur:header:0-5");
  CHECK(csv.delimiter == ",");
  CHECK(csv.item_column == 0);
  CHECK(csv.user_column == 1);
  CHECK(csv.rating_column == 2);
  CHECK(csv.header);
  CHECK(csv.min_level == 0);
  CHECK(csv.max_level == 5);
  CHECK(FormatDescriptor::parse("csv:xuir:tab").min_fields == 4);

  for (const auto* bad : {"ml10m", "csv:ui", "csv:uuir", "csv:uir:5-1", "csv:uir:bogus", "tsv"}) {
    CHECK_THROWS_AS(FormatDescriptor::parse(bad), std::invalid_argument);
  }
}

TEST_CASE("parsing ratings") {
  SUBCASE("movielens 100k layout") {
    const auto t = parse("196\t242\t3\t881250949\n186\t302\t3\t891717742\n");
    REQUIRE(t.ratings.size() == 2);
    CHECK(t.ratings[0].user == "196");
    CHECK(t.ratings[0].item == "242");
    CHECK(t.ratings[0].level == 3);
    CHECK(t.lines == 2);
  }
  SUBCASE("movielens 1m layout") {
    const auto t = parse("1::1193::5::978300760\r\n", "ml1m");
    REQUIRE(t.ratings.size() == 1);
    CHECK(t.ratings[0].item == "1193");
    CHECK(t.ratings[0].level == 5);
  }
  SUBCASE("csv with header and zero-based scale") {
    const auto t = parse("item,user,stars\nm1,alice,0\nm2,alice,5\n", "csv:iur:header:0-5");
    REQUIRE(t.ratings.size() == 2);
    CHECK(t.ratings[0].user == "alice");
    CHECK(t.ratings[0].level == 0);
    CHECK(t.min_level == 0);
  }
  SUBCASE("duplicates keep the last rating") {
    const auto t = parse("1\t10\t2\t0\n1\t11\t4\t0\n1\t10\t5\t0\n");
    REQUIRE(t.ratings.size() == 2);
    CHECK(t.ratings[0].level == 5);
    CHECK(t.duplicates == 1);
  }
  SUBCASE("malformed lines under the cap are counted") {
    std::string text;
    for (int u = 0; u < 200; ++u) text += std::to_string(u) + "\t1\t3\t0\n";
    text += "7\t2\n";
    const auto t = parse(text);
    CHECK(t.malformed == 1);
    CHECK(t.ratings.size() == 200);
  }
  SUBCASE("malformed lines over the cap") {
    CHECK_THROWS_AS(parse("1\t1\t3\t0\n1\t2\tx\t0\n"), DataError);
    CHECK_THROWS_AS(parse("1\t1\t9\t0\n1\t2\t3\t0\n"), DataError);
    CHECK_NOTHROW(parse("1\t1\t9\t0\n1\t2\t3\t0\n", "ml100k", 0.5));
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(parse("\n\n"), DataError); }
  SUBCASE("unreadable file") {
    CHECK_THROWS_AS(load_ratings("/nonexistent/ratings", FormatDescriptor::parse("ml100k")), DataError);
  }
}

TEST_CASE("id ordering") {
  CHECK(id_less("2", "10"));
  CHECK_FALSE(id_less("10", "2"));
  CHECK(id_less("10", "a"));
  CHECK(id_less("abc", "abd"));
  CHECK_FALSE(id_less("5", "5"));
}

TEST_CASE("building rankings") {
  const auto t = parse("u1\ta\t5\t0\nu1\tb\t5\t0\nu1\tc\t3\t0\nu2\tb\t1\t0\nu3\tz\t4\t0\n");
  const std::vector<std::string> items{"a", "b", "c"};
  const auto users = select_users(t, items, {});
  CHECK(users == std::vector<std::string>{"u1", "u2"});
  const auto set = build_rankings(t, items, users);
  REQUIRE(set.rankings.size() == 2);
  CHECK(format_ranking(set.rankings[0]) == "a,b|c");
  CHECK(*set.rankings[0].levels() == std::vector<int>{5, 3});
  CHECK(format_ranking(set.rankings[1]) == "b");
  CHECK(set.rankings[1].group_count() == 1);
  // users without a rating among the items are left out
  CHECK(build_rankings(t, items, {"u3", "u1"}).rankings.size() == 1);
}

TEST_CASE("selecting items and users") {
  const auto t = parse(
      "1\t10\t5\t0\n2\t10\t4\t0\n3\t10\t3\t0\n"
      "1\t20\t5\t0\n2\t20\t1\t0\n"
      "1\t30\t2\t0\n3\t30\t2\t0\n"
      "4\t40\t1\t0\n");
  CHECK(select_items(t, 0) == std::vector<std::string>{"10", "20", "30", "40"});
  CHECK(select_items(t, 10) == select_items(t, 0));
  // 20 and 30 tie on two ratings; the smaller id wins
  CHECK(select_items(t, 2) == std::vector<std::string>{"10", "20"});

  const std::vector<std::string> items{"10", "20", "30"};
  CHECK(select_users(t, items, {}) == std::vector<std::string>{"1", "2", "3"});
  CHECK(select_users(t, items, {.min_count = 2}) == std::vector<std::string>{"1", "2", "3"});
  CHECK(select_users(t, items, {.min_count = 3}) == std::vector<std::string>{"1"});
  CHECK(select_users(t, items, {.top_m = 2}) == std::vector<std::string>{"1", "2"});
}

TEST_CASE("splits") {
  std::string text;
  for (int u = 1; u <= 41; ++u) {
    for (int i = 1; i <= 1 + u % 6; ++i) {
      text += std::to_string(u) + "\t" + std::to_string(i) + "\t" + std::to_string(1 + (u * i) % 5) + "\t0\n";
    }
  }
  const auto t = parse(text);
  const auto items = select_items(t, 0);
  const auto set = build_rankings(t, items, select_users(t, items, {}));
  REQUIRE(set.rankings.size() == 41);

  const auto a = split(set, 7, 0.5);
  const auto b = split(set, 7, 0.5);
  const auto c = split(set, 8, 0.5);
  auto text_of = [](const Split& s) {
    std::ostringstream out;
    serialize_split(s, out);
    return out.str();
  };
  CHECK(text_of(a) == text_of(b));
  CHECK(text_of(a) != text_of(c));

  CHECK(a.test_users.size() + a.train_users.size() == 41);
  CHECK(a.test_users.size() >= 20);
  CHECK(a.test_users.size() <= 21);
  std::set<std::string> all(a.train_users.begin(), a.train_users.end());
  all.insert(a.test_users.begin(), a.test_users.end());
  CHECK(all.size() == 41);

  for (std::size_t x = 0; x < a.test.users.size(); ++x) {
    const auto& user = a.test.users[x];
    CHECK(user.id == a.test_users[x]);
    const auto it = std::find(set.users.begin(), set.users.end(), user.id);
    const auto& full = set.rankings[static_cast<std::size_t>(it - set.users.begin())];
    const std::size_t k = full.ranked_count();
    if (k < 2) {
      CHECK(user.held_out.empty());
      continue;
    }
    CHECK(user.held_out.size() >= 1);
    CHECK(user.held_out.size() <= k - 1);
    CHECK(user.observed.ranked_count() + user.held_out.size() == k);
    for (const auto& h : user.held_out) {
      CHECK_FALSE(user.observed.is_ranked(h.item));
      const auto g = *full.group_of(h.item);
      CHECK(h.level == (*full.levels())[g]);
      CHECK(h.rank == g + 1);
    }
  }
  CHECK_THROWS(split(set, 1, 0.0));
  CHECK_THROWS(split(set, 1, 0.5, 1.0));
}

TEST_CASE("serialization") {
  const auto t = parse("7\ta\t5\t0\n7\tb\t2\t0\n3\tb\t4\t0\n");
  const std::vector<std::string> items{"a", "b"};
  const auto set = build_rankings(t, items, select_users(t, items, {}));
  std::ostringstream out;
  serialize_rankings(set, out);
  CHECK(out.str() == "3\t4\tb\n7\t5,2\ta|b\n");
}

TEST_CASE("movielens 100k selection") {
  const auto path = ml100k_path();
  if (!std::filesystem::exists(path)) {
    MESSAGE("skipped: no ratings file at " << path);
    return;
  }
  const auto table = load_ratings(path, FormatDescriptor::parse("ml100k"));
  CHECK(table.ratings.size() == 100000);
  CHECK(table.malformed == 0);
  const auto items = select_items(table, 53);
  std::string joined;
  for (const auto& i : items) joined += (joined.empty() ? "" : ",") + i;
  CHECK(joined ==
        "1,7,9,15,22,25,28,50,56,64,69,79,89,96,98,100,111,117,118,121,127,151,168,172,173,174,176,"
        "181,183,191,195,202,204,210,216,222,234,237,257,258,269,276,286,288,294,300,302,313,318,"
        "328,405,423,748");
  const auto users = select_users(table, items, {.top_m = 2000});
  CHECK(users.size() == 941);
  const auto set = build_rankings(table, items, users);
  std::size_t ranked = 0;
  for (const auto& r : set.rankings) ranked += r.ranked_count();
  CHECK(ranked == 18664);
}
