#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rankdens/oracle.hpp"
#include "rankdens/rules.hpp"
#include "support.hpp"

using namespace rankdens;

namespace {

JointPairTable table_of(double a, double b, double c, double d) {
  JointPairTable t;
  t.items = {0, 1, 2, 3};
  t.cell = {{{a, b}, {c, d}}};
  return t;
}

// Two taste groups that disagree on items 0-3.
std::vector<TiedRanking> franchise_data(const UniversePtr& u, std::size_t count, std::uint64_t seed) {
  oracle::SynthConfig config;
  config.components = {{1.0, {0, 2, 1, 3, 4, 5}, 0.8}, {1.0, {1, 3, 0, 2, 4, 5}, 0.8}};
  config.censoring = {0.8, 0.0};
  config.count = count;
  config.seed = seed;
  return oracle::synthesize(config, u).observed;
}

}  // namespace

TEST_CASE("mutual information of fixed tables") {
  CHECK(mutual_information(table_of(0.25, 0.25, 0.25, 0.25)) == 0.0);
  CHECK(std::abs(mutual_information(table_of(0.5, 0, 0, 0.5)) - std::log(2.0)) < 1e-12);
  CHECK(std::abs(mutual_information(table_of(0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4))) < 1e-12);
  // a zero marginal reduces to a one-row table
  CHECK(mutual_information(table_of(0.4, 0.6, 0.0, 0.0)) == doctest::Approx(0.0));

  const auto clamped = renormalize(table_of(0.6, -0.1, 0.2, 0.3));
  CHECK(clamped.renormalized);
  CHECK(clamped.cell[0][1] == 0.0);
  CHECK(clamped.total() == doctest::Approx(1.0));

  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = table_of(rng.uniform() - 0.1, rng.uniform(), rng.uniform(), rng.uniform());
    CHECK(mutual_information(t) >= 0.0);
  }
}

TEST_CASE("joint pair table") {
  const auto u = make_universe(6);
  SUBCASE("uninformative model gives a uniform table") {
    const auto model = fit({parse_ranking("5|6", u)}, {});
    const auto t = joint_pair_table(model, 0, 1, 2, 3);
    for (const auto& row : t.cell) {
      for (const double p : row) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(mutual_information(t) == doctest::Approx(0.0));
  }
  SUBCASE("concentrated chain") {
    const auto u5 = make_universe(5);
    const std::vector<TiedRanking> train(20, parse_ranking("1|2|3|4", u5));
    const auto model = fit(train, {.bandwidth = 5.5});
    const auto t = joint_pair_table(model, 0, 1, 2, 3);
    const auto probs = oracle::brute_permutation_probs(train, 5.5, KernelMode::modified);
    std::vector<Item> order{0, 1, 2, 3, 4};
    double brute = 0.0;
    std::size_t p = 0;
    do {
      const Permutation pi(order);
      if (pi.position(0) < pi.position(1) && pi.position(2) < pi.position(3)) brute += probs[p];
      ++p;
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(t.cell[0][0] == doctest::Approx(brute).epsilon(1e-12));
    CHECK(t.cell[0][0] > t.cell[1][1]);
    const auto sharp = fit(train, {.bandwidth = 0.5, .mode = KernelMode::exact_support});
    CHECK(joint_pair_table(sharp, 0, 1, 2, 3).cell[0][0] == doctest::Approx(1.0));
  }
  SUBCASE("marginals") {
    Rng rng(3);
    const auto model = fit(testing::random_rankings(u, rng, 12), {});
    const auto t = joint_pair_table(model, 4, 1, 0, 5);
    CHECK(std::abs(t.total() - 1.0) < 1e-12);
    const std::vector<Item> ij{4, 1};
    const std::vector<Item> kl{0, 5};
    CHECK(std::abs(t.row(0) - event_prob(model, make_chain(u, ij)).value) < 1e-12);
    CHECK(std::abs(t.col(0) - event_prob(model, make_chain(u, kl)).value) < 1e-12);
  }
  SUBCASE("repeated items") {
    const auto model = fit({parse_ranking("5|6", u)}, {});
    CHECK_THROWS(joint_pair_table(model, 0, 1, 1, 3));
  }
}

TEST_CASE("mutual information agrees with enumeration") {
  Rng rng(19);
  const auto u = make_universe(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto train = testing::random_rankings(u, rng, 1 + rng.below(6));
    const auto model = fit(train, {.bandwidth = 10.0});
    const auto probs = oracle::brute_permutation_probs(train, 10.0, KernelMode::modified);
    JointPairTable brute;
    brute.items = {0, 3, 1, 4};
    std::vector<Item> order{0, 1, 2, 3, 4};
    std::size_t p = 0;
    do {
      const Permutation pi(order);
      brute.cell[pi.position(0) < pi.position(3) ? 0 : 1][pi.position(1) < pi.position(4) ? 0 : 1] +=
          probs[p++];
    } while (std::next_permutation(order.begin(), order.end()));
    const auto t = joint_pair_table(model, 0, 3, 1, 4);
    CHECK(std::abs(mutual_information(t) - mutual_information(brute)) < 1e-9);
  }
}

TEST_CASE("mining MI rules") {
  const auto u = make_universe(6);
  const auto data = franchise_data(u, 300, 5);
  const auto model = fit(data, {});
  const std::vector<Item> subset{0, 1, 2, 3, 4, 5};

  const auto rules = mine_mi_rules(model, subset, 5);
  REQUIRE(rules.size() == 5);
  for (std::size_t r = 1; r < rules.size(); ++r) CHECK(rules[r - 1].score >= rules[r].score);
  // the best rule is the best quadruple, oriented by its largest cell
  double best = 0.0;
  for (Item i = 0; i < 6; ++i) {
    for (Item j = i + 1; j < 6; ++j) {
      for (Item k = i + 1; k < 6; ++k) {
        for (Item l = k + 1; l < 6; ++l) {
          if (k == j || l == j) continue;
          best = std::max(best, mutual_information(joint_pair_table(model, i, j, k, l)));
        }
      }
    }
  }
  const auto& top = rules.front();
  CHECK(top.score == best);
  const auto table = renormalize(joint_pair_table(model, top.items[0], top.items[1], top.items[2], top.items[3]));
  const std::size_t a = top.antecedent == table.row_event(0) ? 0 : 1;
  const std::size_t b = top.consequent == table.col_event(0) ? 0 : 1;
  CHECK(top.antecedent == table.row_event(a));
  CHECK(top.consequent == table.col_event(b));
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) CHECK(pointwise_mi(table, a, b) >= pointwise_mi(table, x, y));
  }
  CHECK(pointwise_mi(table, a, b) > 0.0);

  const std::vector<Item> shuffled{5, 3, 1, 0, 4, 2};
  const auto again = mine_mi_rules(model, shuffled, 5);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    CHECK(again[r].items == rules[r].items);
    CHECK(again[r].score == rules[r].score);
  }

  // 6 items: 15 pairs, 45 disjoint pairs of pairs
  CHECK(mine_mi_rules(model, subset, 1000).size() == 45);

  const std::vector<Item> small{0, 1, 2};
  CHECK_THROWS(mine_mi_rules(model, small, 5));
  CHECK_THROWS(mine_mi_rules(model, subset, 5, 5));
}

TEST_CASE("reversed preferences reverse rule orientation") {
  const auto u = make_universe(6);
  const auto data = franchise_data(u, 200, 8);
  std::vector<TiedRanking> reversed;
  for (const auto& r : data) {
    auto groups = r.groups();
    std::reverse(groups.begin(), groups.end());
    reversed.emplace_back(u, std::move(groups));
  }
  const std::vector<Item> subset{0, 1, 2, 3, 4, 5};
  const auto a = mine_mi_rules(fit(data, {}), subset, 10);
  const auto b = mine_mi_rules(fit(reversed, {}), subset, 10);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].items == b[r].items);
    CHECK(a[r].score == doctest::Approx(b[r].score).epsilon(1e-10));
    CHECK(a[r].antecedent == std::pair(b[r].antecedent.second, b[r].antecedent.first));
    CHECK(a[r].consequent == std::pair(b[r].consequent.second, b[r].consequent.first));
  }
}

TEST_CASE("lift") {
  const auto u = make_universe(6);
  const std::vector<Item> subset{0, 1, 2, 3};

  SUBCASE("exchangeable model") {
    // Nothing distinguishes the subset items, so every position is equally
    // likely and the lift is |V| / (|V| - 1).
    const auto model = fit({parse_ranking("5|6", u), parse_ranking("6|5", u)}, {});
    for (const auto mode : {LiftMode::top2, LiftMode::top_bottom}) {
      CHECK(lift_score(model, 0, 1, mode, subset) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    }
  }
  SUBCASE("ordered data") {
    const std::vector<TiedRanking> train(10, parse_ranking("1|2|3|4", u));
    const auto model = fit(train, {});
    const double best = lift_score(model, 0, 1, LiftMode::top2, subset);
    CHECK(best > 1.0);
    CHECK(best > lift_score(model, 0, 2, LiftMode::top2, subset));
    CHECK(best > lift_score(model, 0, 3, LiftMode::top2, subset));
    CHECK(lift_score(model, 0, 3, LiftMode::top_bottom, subset) > 1.0);
    // The reversed pair is rare on both sides, so its lift is not pinned.

    const auto rules = mine_lift_rules(model, subset, LiftMode::top2, 3);
    REQUIRE(rules.size() == 3);
    CHECK(rules.front().score >= rules.back().score);
    for (const auto& r : rules) {
      CHECK(r.score == doctest::Approx(lift_score(model, r.first, r.second, LiftMode::top2, subset)));
    }
  }
  SUBCASE("errors") {
    const auto model = fit({parse_ranking("5|6", u)}, {});
    CHECK_THROWS(lift_score(model, 0, 0, LiftMode::top2, subset));
    CHECK_THROWS(lift_score(model, 0, 5, LiftMode::top2, subset));
  }
}

TEST_CASE("affinity graph") {
  const auto u = make_universe(6);
  const auto model = fit(franchise_data(u, 300, 2), {});
  const std::vector<Item> subset{0, 1, 2, 3, 4, 5};
  const auto all = affinity_graph(model, subset, 1e-9);
  CHECK(all.size() == 15);
  double max_weight = 0.0;
  for (const auto& e : all) {
    CHECK(e.a < e.b);
    max_weight = std::max(max_weight, e.weight);
    const double mean = (lift_score(model, e.a, e.b, LiftMode::top2, subset) +
                         lift_score(model, e.b, e.a, LiftMode::top2, subset)) /
                        2.0;
    CHECK(e.weight == doctest::Approx(mean).epsilon(1e-12));
  }
  CHECK(affinity_graph(model, subset, max_weight).empty());
  CHECK_THROWS(affinity_graph(model, subset, 0.0));

  const auto strong = affinity_graph(model, subset, 1.2);
  std::ostringstream csv;
  write_edges_csv(strong, [&](Item i) { return u->label(i); }, csv);
  CHECK(csv.str().rfind("item_a,item_b,weight\n", 0) == 0);
  std::ostringstream dot;
  const std::vector<Edge> one{{0, 2, 1.5}};
  write_dot(one, [](Item i) { return i == 0 ? std::string("A \"x\"") : std::string("B"); }, dot);
  CHECK(dot.str() == "graph affinity {\n  n0 [label=\"A \\\"x\\\"\"];\n  n2 [label=\"B\"];\n"
                     "  n0 -- n2 [weight=1.5];\n}\n");
}
