#include <doctest.h>

#include <cmath>
#include <map>

#include "rankdens/kendall.hpp"
#include "rankdens/oracle.hpp"
#include "support.hpp"

using namespace rankdens;

TEST_CASE("brute-force event probability, worked case") {
  const auto u = make_universe(3);
  const std::vector<TiedRanking> train{parse_ranking("1|2|3", u)};
  CHECK(oracle::brute_event_prob(train, 3.0, KernelMode::modified, parse_ranking("1|2", u)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(oracle::brute_event_prob(train, 3.0, KernelMode::exact_support, parse_ranking("1,2,3", u)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // per-permutation weights 1/3, 2/9, 1/9 on 123, 132, 312
  const auto probs = oracle::brute_permutation_probs(train, 3.0, KernelMode::modified);
  CHECK(probs[0] == doctest::Approx(1.0 / 3));
  CHECK(probs[1] == doctest::Approx(2.0 / 9));
  CHECK(probs[4] == doctest::Approx(1.0 / 9));
  double total = 0.0;
  for (const double p : probs) total += p;
  CHECK(total == doctest::Approx(1.0));

  const auto big = make_universe(9);
  const std::vector<TiedRanking> too_big{TiedRanking(big, {{0}})};
  CHECK_THROWS_AS(oracle::brute_event_prob(too_big, 40.0, KernelMode::modified, too_big[0]),
                  std::invalid_argument);
}

TEST_CASE("Mallows sampler matches the reweighted Mahonian distribution") {
  const std::size_t n = 5;
  const double theta = 0.4;
  const std::vector<Item> center{0, 1, 2, 3, 4};
  const auto table = mahonian_distribution(n);
  std::vector<double> expected(table.max_distance() + 1);
  double z = 0.0;
  for (std::size_t t = 0; t < expected.size(); ++t) {
    expected[t] = table[t] * std::exp(-theta * static_cast<double>(t));
    z += expected[t];
  }
  const std::size_t draws = 100000;
  std::vector<double> observed(expected.size(), 0.0);
  Rng rng(99);
  const Permutation c(center);
  for (std::size_t d = 0; d < draws; ++d) {
    observed[kendall_tau(oracle::sample_mallows(center, theta, rng), c)] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t t = 0; t < expected.size(); ++t) {
    const double e = expected[t] / z * static_cast<double>(draws);
    chi2 += (observed[t] - e) * (observed[t] - e) / e;
  }
  // 10 degrees of freedom; the 0.999 quantile is 29.6
  CHECK(chi2 < 29.6);
}

TEST_CASE("synthesize") {
  const auto u = make_universe(5);
  oracle::SynthConfig config;
  config.components = {{1.0, {0, 1, 2, 3, 4}, 1.0}};
  config.count = 200;
  config.seed = 4;

  SUBCASE("full observation gives full permutations") {
    const auto sample = oracle::synthesize(config, u);
    REQUIRE(sample.observed.size() == 200);
    for (std::size_t i = 0; i < 200; ++i) {
      CHECK(sample.observed[i] == make_chain(u, sample.latent[i].order()));
    }
  }
  SUBCASE("reproducible") {
    config.censoring = {0.6, 0.3};
    const auto a = oracle::synthesize(config, u);
    const auto b = oracle::synthesize(config, u);
    CHECK(a.observed == b.observed);
    for (std::size_t i = 0; i < a.observed.size(); ++i) {
      CHECK(implies(make_chain(u, a.latent[i].order()), a.observed[i]));
    }
  }
  SUBCASE("concentration zero is uniform") {
    config.components = {{1.0, {0, 1, 2, 3, 4}, 0.0}};
    config.count = 24000;
    const auto sample = oracle::synthesize(config, make_universe(5));
    std::map<std::vector<Item>, int> counts;
    for (const auto& p : sample.latent) ++counts[p.order()];
    CHECK(counts.size() == 120);
    for (const auto& [order, c] : counts) CHECK(std::abs(c - 200) < 70);
  }
  SUBCASE("two separated components are bimodal") {
    config.components = {{0.5, {0, 1, 2, 3, 4}, 2.0}, {0.5, {4, 3, 2, 1, 0}, 2.0}};
    config.count = 2000;
    const auto sample = oracle::synthesize(config, u);
    const Permutation a({0, 1, 2, 3, 4});
    const Permutation b({4, 3, 2, 1, 0});
    std::size_t near_a = 0;
    std::size_t near_b = 0;
    for (const auto& p : sample.latent) {
      const auto da = kendall_tau(p, a);
      if (da <= 2) ++near_a;
      if (da >= 8) ++near_b;
    }
    CHECK(near_a > 800);
    CHECK(near_b > 800);
  }
  SUBCASE("invalid weights") {
    config.components = {{0.0, {0, 1, 2, 3, 4}, 1.0}};
    CHECK_THROWS(oracle::synthesize(config, u));
  }
}
