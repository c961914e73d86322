#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rankdens/kendall.hpp"
#include "rankdens/oracle.hpp"
#include "support.hpp"

using namespace rankdens;

TEST_CASE("kendall_tau counts discordant pairs") {
  CHECK(kendall_tau(Permutation({0, 1, 2}), Permutation({0, 1, 2})) == 0);
  CHECK(kendall_tau(Permutation({0, 1, 2}), Permutation({2, 1, 0})) == 3);
  CHECK(kendall_tau(Permutation({0, 1, 2, 3}), Permutation({1, 0, 2, 3})) == 1);
  CHECK_THROWS(kendall_tau(Permutation({0, 1}), Permutation({0, 1, 2})));

  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    std::vector<Item> a(n);
    std::iota(a.begin(), a.end(), Item{0});
    auto b = a;
    rng.shuffle(a);
    rng.shuffle(b);
    std::uint64_t slow = 0;
    const Permutation pa(a);
    const Permutation pb(b);
    for (Item x = 0; x < n; ++x) {
      for (Item y = x + 1; y < n; ++y) {
        if ((pa.position(x) < pa.position(y)) != (pb.position(x) < pb.position(y))) ++slow;
      }
    }
    CHECK(kendall_tau(pa, pb) == slow);
    CHECK(kendall_tau(pb, pa) == slow);
  }
}

TEST_CASE("Mahonian coefficients") {
  const auto g3 = mahonian_distribution(3);
  const std::vector<double> expected3{1, 2, 2, 1};
  for (std::size_t t = 0; t < 4; ++t) CHECK(g3[t] * 6.0 == doctest::Approx(expected3[t]));

  const auto g4 = mahonian_distribution(4);
  const std::vector<double> expected4{1, 3, 5, 6, 5, 3, 1};
  for (std::size_t t = 0; t < 7; ++t) CHECK(g4[t] * 24.0 == doctest::Approx(expected4[t]));

  for (std::size_t n = 1; n <= 8; ++n) {
    const auto table = mahonian_distribution(n);
    const auto counts = oracle::inversion_histogram(n);
    const double nf = std::tgamma(static_cast<double>(n) + 1.0);
    REQUIRE(counts.size() == table.max_distance() + 1);
    for (std::size_t t = 0; t < counts.size(); ++t) {
      CHECK(table[t] * nf == doctest::Approx(static_cast<double>(counts[t])).epsilon(1e-12));
    }
  }
  CHECK_THROWS(mahonian_distribution(0));
}

TEST_CASE("Mahonian table moments") {
  for (const std::size_t n : {2, 10, 50, 300}) {
    const auto table = mahonian_distribution(n);
    const std::size_t d = table.max_distance();
    double total = 0.0;
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t t = 0; t <= d; ++t) {
      total += table[t];
      mean += static_cast<double>(t) * table[t];
      CHECK(table[t] >= 0.0);
      CHECK(std::abs(table[t] - table[d - t]) <= 1e-12 * std::max(table[t], 1e-300));
    }
    for (std::size_t t = 0; t <= d; ++t) {
      const double c = static_cast<double>(t) - mean;
      var += c * c * table[t];
    }
    const double nd = static_cast<double>(n);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean == doctest::Approx(nd * (nd - 1) / 4).epsilon(1e-11));
    CHECK(var == doctest::Approx(nd * (nd - 1) * (2 * nd + 5) / 72).epsilon(1e-10));
  }
}

TEST_CASE("triangular normalization agrees with enumeration") {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto nf = std::tgamma(static_cast<double>(n) + 1.0);
    const auto d = max_distance(n);
    for (std::uint64_t h = 1; h <= std::max<std::uint64_t>(d, 1); ++h) {
      const auto norm = triangular_normalization(n, static_cast<double>(h), KernelMode::exact_support);
      const double brute = oracle::brute_normalization(n, static_cast<double>(h), KernelMode::exact_support);
      CHECK(norm.norm * nf == doctest::Approx(brute).epsilon(1e-12));
      CHECK(oracle::generating_function_normalization(n, h) == doctest::Approx(brute).epsilon(1e-12));
    }
  }
  CHECK(oracle::brute_normalization(3, 2, KernelMode::exact_support) == doctest::Approx(2.0));
}

TEST_CASE("modified normalization") {
  const auto norm = triangular_normalization(5, 7.5, KernelMode::modified);
  CHECK(norm.norm == doctest::Approx(1.0 - 5.0 * 4.0 / (4.0 * 7.5)));
  CHECK(norm.norm * 120.0 == doctest::Approx(oracle::brute_normalization(5, 7.5, KernelMode::modified)));
  CHECK_THROWS_AS(triangular_normalization(5, 5.0, KernelMode::modified), std::invalid_argument);
  CHECK_THROWS_AS(triangular_normalization(5, 0.0, KernelMode::exact_support), std::invalid_argument);
  CHECK_THROWS_AS(triangular_normalization(5, -1.0, KernelMode::exact_support), std::invalid_argument);
}

TEST_CASE("kernel weights at n = 3") {
  const auto h2 = triangular_normalization(3, 2.0, KernelMode::exact_support);
  const auto h3 = triangular_normalization(3, 3.0, KernelMode::exact_support);
  // distances of 123, 132, 213, 231, 312, 321 from 123
  const std::vector<double> t{0, 1, 1, 2, 2, 3};
  const std::vector<double> w2{0.5, 0.25, 0.25, 0, 0, 0};
  const std::vector<double> w3{1.0 / 3, 2.0 / 9, 2.0 / 9, 1.0 / 9, 1.0 / 9, 0};
  for (std::size_t p = 0; p < 6; ++p) {
    CHECK(kernel_weight(t[p], h2) == doctest::Approx(w2[p]).epsilon(1e-12));
    CHECK(kernel_weight(t[p], h3) == doctest::Approx(w3[p]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(kernel_weight(4, h3), std::out_of_range);
}

TEST_CASE("kernel mode names") {
  CHECK(parse_kernel_mode("modified") == KernelMode::modified);
  CHECK(parse_kernel_mode("exact") == KernelMode::exact_support);
  CHECK(std::string(to_string(KernelMode::exact_support)) == "exact");
  CHECK_THROWS(parse_kernel_mode("gaussian"));
}
