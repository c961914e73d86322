#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "rankdens/random.hpp"
#include "rankdens/ranking.hpp"

namespace rankdens::testing {

/// Random tied-incomplete ranking: at least min_ranked items ranked, split
/// into random nonempty groups.
inline TiedRanking random_ranking(const UniversePtr& universe, Rng& rng, std::size_t min_ranked = 1) {
  const std::size_t n = universe->size();
  std::vector<Item> items(n);
  std::iota(items.begin(), items.end(), Item{0});
  rng.shuffle(items);
  const std::size_t k = min_ranked + rng.below(n - min_ranked + 1);
  items.resize(k);
  std::vector<std::vector<Item>> groups{{items[0]}};
  for (std::size_t x = 1; x < k; ++x) {
    if (rng.uniform() < 0.4) {
      groups.back().push_back(items[x]);
    } else {
      groups.push_back({items[x]});
    }
  }
  return TiedRanking(universe, std::move(groups));
}

inline std::vector<TiedRanking> random_rankings(const UniversePtr& universe, Rng& rng, std::size_t m,
                                                std::size_t min_ranked = 1) {
  std::vector<TiedRanking> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(random_ranking(universe, rng, min_ranked));
  return out;
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace rankdens::testing
