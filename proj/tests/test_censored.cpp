#include <doctest.h>

#include "rankdens/censored.hpp"
#include "rankdens/oracle.hpp"
#include "support.hpp"

using namespace rankdens;

TEST_CASE("documented pair preferences") {
  const auto u = make_universe(4);
  CHECK(pair_pref_prob(parse_ranking("3|2|4", u), 0, 2) == doctest::Approx(0.25));
  CHECK(pair_pref_prob(parse_ranking("2,3|4", u), 0, 1) == doctest::Approx(0.375));
  CHECK(oracle::brute_pair_pref(parse_ranking("2,3|4", u), 0, 1) == doctest::Approx(0.375));
  CHECK(pair_pref_prob(parse_ranking("2,3|4", u), 1, 2) == doctest::Approx(0.5));
  CHECK(pair_pref_prob(parse_ranking("2|4", u), 0, 2) == doctest::Approx(0.5));
  CHECK(pair_pref_prob(parse_ranking("2|4", u), 1, 3) == 1.0);
  CHECK_THROWS(pair_pref_prob(parse_ranking("2|4", u), 1, 1));
  CHECK_THROWS(pair_pref_prob(parse_ranking("2|4", u), 1, 9));
}

TEST_CASE("pair preferences match enumeration") {
  Rng rng(21);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto u = make_universe(n);
    for (int trial = 0; trial < 60; ++trial) {
      const auto r = testing::random_ranking(u, rng);
      for (Item i = 0; i < n; ++i) {
        for (Item j = 0; j < n; ++j) {
          if (i == j) continue;
          CHECK(pair_pref_prob(r, i, j) == doctest::Approx(oracle::brute_pair_pref(r, i, j)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("expected Kendall distance") {
  const auto u2 = make_universe(2);
  CHECK(expected_kendall(parse_ranking("1|2", u2), parse_ranking("2|1", u2)) == doctest::Approx(1.0));
  CHECK(oracle::brute_expected_kendall(parse_ranking("1|2", u2), parse_ranking("2|1", u2)) == doctest::Approx(1.0));

  const auto u = make_universe(5);
  const auto free = parse_ranking("1,2,3,4,5", u);
  CHECK(expected_kendall(free, free) == doctest::Approx(5.0));

  Rng rng(8);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto un = make_universe(n);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = testing::random_ranking(un, rng);
      const auto r = testing::random_ranking(un, rng);
      const double brute = oracle::brute_expected_kendall(s, r);
      CHECK(expected_kendall(s, r) == doctest::Approx(brute).epsilon(1e-12));
      CHECK(expected_kendall(r, s) == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}
