#include "rankdens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rankdens::oracle {

namespace {

void check_bound(std::size_t n, std::size_t bound) {
  if (n > bound) {
    throw std::invalid_argument("brute force over " + std::to_string(n) +
                                " items exceeds the bound of " + std::to_string(bound));
  }
}

std::vector<Permutation> all_permutations(std::size_t n) {
  std::vector<Item> order(n);
  std::iota(order.begin(), order.end(), Item{0});
  std::vector<Permutation> out;
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

// Item positions of each permutation, one row of n per permutation.
std::vector<std::size_t> position_rows(const std::vector<Permutation>& perms, std::size_t n) {
  std::vector<std::size_t> rows(perms.size() * n);
  for (std::size_t p = 0; p < perms.size(); ++p) {
    for (std::size_t x = 0; x < n; ++x) rows[p * n + perms[p].order()[x]] = x;
  }
  return rows;
}

// Kendall distance by its definition: item pairs the two orders disagree on.
std::uint64_t discordant(const std::size_t* a, const std::size_t* b, std::size_t n) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) count += (a[i] < a[j]) != (b[i] < b[j]);
  }
  return count;
}

double raw_kernel(double t, double h, KernelMode mode) {
  if (mode == KernelMode::exact_support && !(t < h)) return 0.0;
  return 1.0 - t / h;
}

}  // namespace

std::vector<std::uint64_t> inversion_histogram(std::size_t n, std::size_t bound) {
  check_bound(n, bound);
  std::vector<std::uint64_t> counts(max_distance(n) + 1, 0);
  const auto perms = all_permutations(n);
  const auto rows = position_rows(perms, n);
  for (std::size_t p = 0; p < perms.size(); ++p) ++counts[discordant(rows.data(), &rows[p * n], n)];
  return counts;
}

double brute_normalization(std::size_t n, double h, KernelMode mode, std::size_t bound) {
  check_bound(n, bound);
  const auto perms = all_permutations(n);
  const auto rows = position_rows(perms, n);
  double total = 0.0;
  for (std::size_t p = 0; p < perms.size(); ++p) {
    total += raw_kernel(static_cast<double>(discordant(rows.data(), &rows[p * n], n)), h, mode);
  }
  return total;
}

double generating_function_normalization(std::size_t n, std::uint64_t h) {
  if (n == 0 || h == 0) throw std::invalid_argument("need n >= 1 and h >= 1");
  // G_n = prod_{j=1}^{n-1} (1 + z + ... + z^j)
  std::vector<std::uint64_t> g{1};
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::uint64_t> next(g.size() + j, 0);
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b <= j; ++b) next[a + b] += g[a];
    }
    g = std::move(next);
  }
  const auto coeff = [](const std::vector<std::uint64_t>& poly, std::uint64_t k) {
    return k < poly.size() ? poly[k] : 0;
  };
  // [z^h] G/(1-z) = sum_{t<=h} g_t
  std::uint64_t h_coeff = 0;
  for (std::uint64_t t = 0; t <= h; ++t) h_coeff += coeff(g, t);
  // [z^(h-1)] G'/(1-z) = sum_{s<=h-1} (s+1) g_{s+1}
  std::uint64_t d_coeff = 0;
  for (std::uint64_t s = 0; s + 1 <= h; ++s) d_coeff += (s + 1) * coeff(g, s + 1);
  return static_cast<double>(h_coeff) -
         static_cast<double>(d_coeff) / static_cast<double>(h);
}

double brute_pair_pref(const TiedRanking& u, Item i, Item j) {
  const auto perms = enumerate_consistent(u);
  std::size_t hits = 0;
  for (const auto& p : perms) {
    if (p.position(i) < p.position(j)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(perms.size());
}

double brute_expected_kendall(const TiedRanking& s, const TiedRanking& r) {
  const std::size_t n = s.universe_size();
  const auto ps = enumerate_consistent(s);
  const auto pr = enumerate_consistent(r);
  const auto rs = position_rows(ps, n);
  const auto rr = position_rows(pr, n);
  double total = 0.0;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    for (std::size_t b = 0; b < pr.size(); ++b) {
      total += static_cast<double>(discordant(&rs[a * n], &rr[b * n], n));
    }
  }
  return total / (static_cast<double>(ps.size()) * static_cast<double>(pr.size()));
}

double brute_event_prob(std::span<const TiedRanking> rankings, double h, KernelMode mode,
                        const TiedRanking& r, std::size_t bound) {
  if (rankings.empty()) throw std::invalid_argument("no training rankings");
  const std::size_t n = r.universe_size();
  check_bound(n, bound);
  const double c = brute_normalization(n, h, mode, bound);
  const auto event = enumerate_consistent(r, bound);
  const auto event_rows = position_rows(event, n);
  double total = 0.0;
  for (const auto& s : rankings) {
    const auto support = enumerate_consistent(s, bound);
    const auto support_rows = position_rows(support, n);
    double inner = 0.0;
    for (std::size_t a = 0; a < event.size(); ++a) {
      for (std::size_t b = 0; b < support.size(); ++b) {
        const auto t = discordant(&event_rows[a * n], &support_rows[b * n], n);
        inner += raw_kernel(static_cast<double>(t), h, mode);
      }
    }
    total += inner / static_cast<double>(support.size());
  }
  return total / (c * static_cast<double>(rankings.size()));
}

std::vector<double> brute_permutation_probs(std::span<const TiedRanking> rankings, double h,
                                            KernelMode mode, std::size_t bound) {
  if (rankings.empty()) throw std::invalid_argument("no training rankings");
  const std::size_t n = rankings.front().universe_size();
  check_bound(n, bound);
  const double c = brute_normalization(n, h, mode, bound);
  const auto perms = all_permutations(n);
  const auto perm_rows = position_rows(perms, n);
  std::vector<double> probs(perms.size(), 0.0);
  for (const auto& s : rankings) {
    const auto support = enumerate_consistent(s, bound);
    const auto support_rows = position_rows(support, n);
    const double w = 1.0 / (static_cast<double>(support.size()) * c *
                            static_cast<double>(rankings.size()));
    for (std::size_t p = 0; p < perms.size(); ++p) {
      for (std::size_t b = 0; b < support.size(); ++b) {
        const auto t = discordant(&perm_rows[p * n], &support_rows[b * n], n);
        probs[p] += w * raw_kernel(static_cast<double>(t), h, mode);
      }
    }
  }
  return probs;
}

// ---------------------------------------------------------------------------

Permutation sample_mallows(std::span<const Item> center, double concentration, Rng& rng) {
  // Insert center[j] into the partial list at offset v from the end, which
  // creates v discordant pairs with the items already placed.
  std::vector<Item> order;
  order.reserve(center.size());
  std::vector<double> weights;
  for (std::size_t j = 0; j < center.size(); ++j) {
    weights.assign(j + 1, 0.0);
    double total = 0.0;
    for (std::size_t v = 0; v <= j; ++v) {
      weights[v] = std::exp(-concentration * static_cast<double>(v));
      total += weights[v];
    }
    double u = rng.uniform() * total;
    std::size_t v = 0;
    while (v < j && u >= weights[v]) {
      u -= weights[v];
      ++v;
    }
    order.insert(order.end() - static_cast<long>(v), center[j]);
  }
  return Permutation(std::move(order));
}

SynthSample synthesize(const SynthConfig& config, const UniversePtr& universe) {
  if (config.components.empty()) throw std::invalid_argument("no mixture components");
  double total_weight = 0.0;
  for (const auto& c : config.components) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("component weights must be positive");
    }
    if (c.center.size() != universe->size()) {
      throw std::invalid_argument("component center must order every item");
    }
    if (c.concentration < 0.0) throw std::invalid_argument("concentration must be >= 0");
    total_weight += c.weight;
  }
  const auto& cens = config.censoring;
  if (!(cens.observe_prob > 0.0 && cens.observe_prob <= 1.0) || cens.tie_prob < 0.0 ||
      cens.tie_prob >= 1.0) {
    throw std::invalid_argument("censoring probabilities out of range");
  }

  SynthSample out;
  out.latent.reserve(config.count);
  out.component.reserve(config.count);
  out.observed.reserve(config.count);
  for (std::size_t u = 0; u < config.count; ++u) {
    Rng rng(derive_seed(config.seed, u));
    double pick = rng.uniform() * total_weight;
    std::size_t c = 0;
    while (c + 1 < config.components.size() && pick >= config.components[c].weight) {
      pick -= config.components[c].weight;
      ++c;
    }
    const auto& comp = config.components[c];
    auto latent = sample_mallows(comp.center, comp.concentration, rng);

    std::vector<Item> seen;
    while (seen.empty()) {
      for (const Item item : latent.order()) {
        if (cens.observe_prob >= 1.0 || rng.uniform() < cens.observe_prob) seen.push_back(item);
      }
    }
    std::vector<std::vector<Item>> groups{{seen.front()}};
    for (std::size_t i = 1; i < seen.size(); ++i) {
      if (cens.tie_prob > 0.0 && rng.uniform() < cens.tie_prob) {
        groups.back().push_back(seen[i]);
      } else {
        groups.push_back({seen[i]});
      }
    }
    out.observed.emplace_back(universe, std::move(groups));
    out.latent.push_back(std::move(latent));
    out.component.push_back(c);
  }
  return out;
}

}  // namespace rankdens::oracle
