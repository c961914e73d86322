#include "rankdens/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rankdens/parallel.hpp"
#include "rankdens/random.hpp"

namespace rankdens {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state) {
  for (const unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

PairwiseTable pairwise_table(const KernelModel& model) {
  const std::size_t n = model.items();
  PairwiseTable out;
  out.prob.assign(n, std::vector<double>(n, 0.5));
  std::vector<std::size_t> negative(n, 0);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const TiedRanking event(model.universe(),
                              {{static_cast<Item>(i)}, {static_cast<Item>(j)}});
      const auto p = event_prob(model, event);
      out.prob[i][j] = p.value;
      if (p.negative()) ++negative[i];
    }
  });
  out.negative = std::accumulate(negative.begin(), negative.end(), std::size_t{0});
  out.score.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum row;
    for (const double p : out.prob[i]) row += p;
    out.score[i] = row.value() / static_cast<double>(n);
  }
  return out;
}

std::vector<Item> order_by_score(const PairwiseTable& table) {
  std::vector<Item> order(table.score.size());
  std::iota(order.begin(), order.end(), Item{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Item a, Item b) { return table.score[a] > table.score[b]; });
  return order;
}

// ---------------------------------------------------------------------------

LoglikComparison compare_loglik(const std::vector<TiedRanking>& train,
                                std::span<const TiedRanking> test, const KernelChoice& kernel,
                                std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const std::size_t n = train.front().universe_size();
  std::vector<Item> subset(n);
  std::iota(subset.begin(), subset.end(), Item{0});

  LoglikComparison out;
  out.bandwidth = kernel.bandwidth ? *kernel.bandwidth
                                   : select_bandwidth(train, seed, 0.2, kernel.mode).bandwidth;
  const auto model = fit(train, {.bandwidth = out.bandwidth, .mode = kernel.mode});
  out.kernel = test_loglikelihood(
      [&](const TiedRanking& chain) { return event_prob(model, chain).value; }, test, subset);
  out.empirical = test_loglikelihood(
      [&](const TiedRanking& chain) { return empirical_prob(train, chain); }, test, subset);

  if (n <= kMallowsMaxItems) {
    std::vector<Permutation> full;
    for (const auto& r : train) {
      if (auto order = full_order(r, subset)) full.emplace_back(std::move(*order));
    }
    if (!full.empty()) {
      const auto mallows = mallows_fit(full);
      out.mallows = test_loglikelihood(
          [&](const TiedRanking& chain) {
            return mallows.prob(Permutation(*full_order(chain, subset)));
          },
          test, subset);
    }
  }
  return out;
}

std::pair<std::vector<TiedRanking>, std::vector<TiedRanking>> synthetic_mixture(
    std::size_t n, std::size_t m, const SyntheticMixture& mixture, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("mixture needs at least two items");
  std::vector<Item> first(n);
  std::iota(first.begin(), first.end(), Item{0});
  std::vector<Item> second(n);
  for (std::size_t i = 0; i < n; ++i) second[i] = static_cast<Item>((i + n / 2) % n);

  oracle::SynthConfig config;
  config.components = {{0.5, first, mixture.concentration}, {0.5, second, mixture.concentration}};
  config.censoring = mixture.censoring;
  config.count = m + mixture.test_count;
  config.seed = seed;
  auto observed = oracle::synthesize(config, make_universe(n)).observed;
  std::vector<TiedRanking> test(std::make_move_iterator(observed.begin() + static_cast<long>(m)),
                                std::make_move_iterator(observed.end()));
  observed.erase(observed.begin() + static_cast<long>(m), observed.end());
  return {std::move(observed), std::move(test)};
}

std::vector<LoglikSummary> summarize(std::size_t n, std::size_t m,
                                     std::span<const LoglikComparison> runs) {
  std::vector<LoglikSummary> rows;
  auto add = [&](const char* name, const std::vector<double>& values) {
    if (values.empty()) return;
    const double r = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / r;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double se = values.size() > 1 ? std::sqrt(ss / (r - 1.0) / r) : 0.0;
    rows.push_back({n, m, name, mean, se, values.size()});
  };
  std::vector<double> kernel;
  std::vector<double> empirical;
  std::vector<double> mallows;
  for (const auto& run : runs) {
    kernel.push_back(run.kernel.mean);
    empirical.push_back(run.empirical.mean);
    if (run.mallows) mallows.push_back(run.mallows->mean);
  }
  add("kernel", kernel);
  add("empirical", empirical);
  add("mallows", mallows);
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<PredictRow> prediction_curve(const Split& split, std::span<const std::size_t> sizes,
                                         const LossMatrix& loss, const KernelChoice& kernel,
                                         PosteriorWeight weight, std::uint64_t seed) {
  if (split.train.empty()) throw std::invalid_argument("no training users");
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 3));
  rng.shuffle(order);

  std::vector<PredictRow> rows;
  for (const std::size_t size : sizes) {
    const std::size_t m = std::min(size, split.train.size());
    std::vector<TiedRanking> train;
    train.reserve(m);
    for (std::size_t x = 0; x < m; ++x) train.push_back(split.train[order[x]]);

    std::vector<double> histogram(loss.size(), 0.0);
    for (const auto& r : train) {
      if (!r.has_levels()) continue;
      for (std::size_t g = 0; g < r.group_count(); ++g) {
        const int level = (*r.levels())[g];
        if (loss.contains(level)) {
          histogram[static_cast<std::size_t>(level - loss.first_level())] +=
              static_cast<double>(r.group(g).size());
        }
      }
    }
    const double total = std::accumulate(histogram.begin(), histogram.end(), 0.0);
    for (double& h : histogram) h = total > 0.0 ? h / total : 1.0 / static_cast<double>(loss.size());
    const int constant = predict_level({loss.first_level(), histogram, false}, loss);

    KernelConfig config;
    config.mode = kernel.mode;
    if (kernel.bandwidth) {
      config.bandwidth = kernel.bandwidth;
    } else {
      std::vector<TiedRanking> all = train;
      for (const auto& u : split.test.users) all.push_back(u.observed);
      config.bandwidth = select_bandwidth(all, derive_seed(seed, 4), 0.2, kernel.mode).bandwidth;
    }
    const auto model = fit_prediction_model(train, split.test, config);
    std::atomic<std::size_t> clamped{0};
    const auto k = evaluate_prediction(kernel_predictor(model, loss, weight, &clamped), split.test, loss);
    const auto c = evaluate_prediction(constant_predictor(constant), split.test, loss);
    rows.push_back({m, "kernel", k.mean_loss, k.predictions, clamped.load()});
    rows.push_back({m, "constant", c.mean_loss, c.predictions, 0});
  }
  return rows;
}

}  // namespace rankdens
