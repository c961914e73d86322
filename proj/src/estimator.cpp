#include "rankdens/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "rankdens/censored.hpp"
#include "rankdens/oracle.hpp"
#include "rankdens/parallel.hpp"
#include "rankdens/random.hpp"

namespace rankdens {

namespace {

std::size_t packed_index(std::size_t n, std::size_t a, std::size_t b) {
  // a < b
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

// log(|R| / n!) = sum_j log|A_j|! - log k!
double log_fraction(const TiedRanking& r, const LogFactorials& lf) {
  double value = -lf(r.ranked_count());
  for (const auto& group : r.groups()) value += lf(group.size());
  return value;
}

// Centred slot 2c/(k+1) - 1 of group g, c = tau + (phi - 1)/2.
double group_delta(const TiedRanking& r, std::size_t g) {
  const double k = static_cast<double>(r.ranked_count());
  const double c = static_cast<double>(r.group_start(g)) + 1.0 +
                   (static_cast<double>(r.group(g).size()) - 1.0) / 2.0;
  return 2.0 * c / (k + 1.0) - 1.0;
}

// Position of pi among the permutations of 0..n-1 in lexicographic order.
std::size_t lexicographic_index(const std::vector<Item>& order) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < order.size(); ++j) smaller += order[j] < order[i];
    index = index * (order.size() - i) + smaller;
  }
  return index;
}

// Kernel smoothing of the per-permutation empirical mass, in which every
// training ranking spreads 1/m evenly over its consistent permutations.
std::vector<double> tabulate(const std::vector<TiedRanking>& training,
                             const TriangularNormalization& norm, std::size_t bound) {
  const std::size_t n = norm.n;
  std::vector<Permutation> perms;
  std::vector<Item> order(n);
  std::iota(order.begin(), order.end(), Item{0});
  do {
    perms.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));

  std::vector<double> mass(perms.size(), 0.0);
  const double m = static_cast<double>(training.size());
  for (const auto& s : training) {
    const auto support = enumerate_consistent(s, bound);
    const double w = 1.0 / (m * static_cast<double>(support.size()));
    for (const auto& sigma : support) mass[lexicographic_index(sigma.order())] += w;
  }
  std::vector<std::size_t> occupied;
  for (std::size_t q = 0; q < mass.size(); ++q) {
    if (mass[q] > 0.0) occupied.push_back(q);
  }
  std::vector<double> probs(perms.size(), 0.0);
  parallel_for(perms.size(), [&](std::size_t p) {
    CompensatedSum sum;
    for (const auto q : occupied) {
      sum += mass[q] * kernel_weight(static_cast<double>(kendall_tau(perms[p], perms[q])), norm);
    }
    probs[p] = sum.value();
  });
  return probs;
}

EventProbability make_probability(double log_fraction, double ratio) {
  EventProbability p;
  if (ratio == 0.0) return p;
  p.sign = ratio > 0.0 ? 1 : -1;
  p.log_magnitude = log_fraction + std::log(std::fabs(ratio));
  p.value = p.sign * std::exp(p.log_magnitude);
  return p;
}

}  // namespace

double default_bandwidth(std::size_t n) {
  return std::max(1.0, static_cast<double>(max_distance(n)));
}

double KernelModel::permutation_prob(const Permutation& pi) const {
  if (!tabulated()) throw std::logic_error("permutation estimates are not tabulated");
  if (pi.size() != items()) throw std::invalid_argument("permutation over a different universe");
  return permutation_probs_[lexicographic_index(pi.order())];
}

double KernelModel::mean_centred(Item a, Item b) const {
  if (a == b) return 0.0;
  const std::size_t n = items();
  return a < b ? mean_centred_[packed_index(n, a, b)] : -mean_centred_[packed_index(n, b, a)];
}

KernelModel fit(std::vector<TiedRanking> rankings, const KernelConfig& config) {
  if (rankings.empty()) throw std::invalid_argument("empty training set");
  const auto& universe = rankings.front().universe_ptr();
  for (const auto& r : rankings) {
    if (!r.same_universe(rankings.front())) {
      throw std::invalid_argument("training rankings over different universes");
    }
  }
  const std::size_t n = universe->size();
  if (config.mode == KernelMode::exact_support && n > config.enumeration_bound) {
    throw std::invalid_argument("exact-support kernel needs n <= " +
                                std::to_string(config.enumeration_bound));
  }

  KernelModel model;
  model.universe_ = universe;
  model.config_ = config;
  model.norm_ = triangular_normalization(n, config.bandwidth.value_or(default_bandwidth(n)),
                                         config.mode);
  model.logfact_ = LogFactorials(n);
  model.training_ = std::move(rankings);

  if (config.mode == KernelMode::modified && n <= config.dense_limit) {
    // m * mean(1 - 2p_ab) = sum_{S ranks a,b} [d_ab(S) - delta_S(a) + delta_S(b)]
    //                       + A(a) - A(b),   A(a) = sum_{S ranks a} delta_S(a)
    const std::size_t pairs = max_distance(n);
    std::vector<CompensatedSum> both(pairs);
    std::vector<CompensatedSum> alone(n);
    std::vector<CompensatedSum> rows(n);
    std::vector<double> delta;
    for (const auto& s : model.training_) {
      const auto& ranked = s.ranked();
      const double k = static_cast<double>(s.ranked_count());
      delta.resize(s.group_count());
      for (std::size_t g = 0; g < s.group_count(); ++g) delta[g] = group_delta(s, g);
      for (std::size_t x = 0; x < ranked.size(); ++x) {
        const auto [a, ga] = ranked[x];
        alone[a] += delta[ga];
        const double before = static_cast<double>(s.group_start(ga));
        const double after = k - before - static_cast<double>(s.group(ga).size());
        rows[a] += before - after + (static_cast<double>(n) - k) * delta[ga];
        for (std::size_t y = x + 1; y < ranked.size(); ++y) {
          const auto [b, gb] = ranked[y];
          if (ga == gb) continue;
          const double d = ga < gb ? -1.0 : 1.0;
          both[packed_index(n, a, b)] += d - delta[ga] + delta[gb];
        }
      }
    }
    const double m = static_cast<double>(model.training_.size());
    model.mean_centred_.resize(pairs);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const auto idx = packed_index(n, a, b);
        model.mean_centred_[idx] = (both[idx].value() + alone[a].value() - alone[b].value()) / m;
      }
    }
    model.mean_row_.resize(n);
    for (std::size_t a = 0; a < n; ++a) model.mean_row_[a] = rows[a].value() / m;
  }
  if (config.mode == KernelMode::exact_support && n <= kTabulationLimit) {
    model.permutation_probs_ = tabulate(model.training_, model.norm_, config.enumeration_bound);
  }
  return model;
}

namespace {

void check_event(const KernelModel& model, const TiedRanking& r) {
  if (!r.same_universe(model.training().front())) {
    throw std::invalid_argument("event over a different universe");
  }
}

double mean_expected_distance_direct(const KernelModel& model, const TiedRanking& r) {
  CompensatedSum total;
  for (const auto& s : model.training()) total += expected_kendall(r, s);
  return total.value() / static_cast<double>(model.size());
}

// Mean expected distance to the training rankings:
//   D/2 - 1/2 sum_{i<j} d_ij(R) mean(d_ij(S)),
// where pairs of a ranked item a of R with an item R leaves unranked share
// d(R) = delta_R(a), so their sum collapses onto the row totals.
double mean_expected_distance(const KernelModel& model, const TiedRanking& r) {
  if (!model.aggregated()) return mean_expected_distance_direct(model, r);
  const auto& ranked = r.ranked();
  const std::size_t k = ranked.size();
  std::vector<double> delta(r.group_count());
  for (std::size_t g = 0; g < r.group_count(); ++g) delta[g] = group_delta(r, g);

  std::vector<double> inside(k, 0.0);  // sum_{b in R} mean(d_ab)
  double agreement = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    const auto [a, ga] = ranked[x];
    for (std::size_t y = x + 1; y < k; ++y) {
      const auto [b, gb] = ranked[y];
      const double dbar = model.mean_centred(a, b);
      inside[x] += dbar;
      inside[y] -= dbar;
      if (ga != gb) agreement += (ga < gb ? -1.0 : 1.0) * dbar;
    }
  }
  for (std::size_t x = 0; x < k; ++x) {
    const auto [a, ga] = ranked[x];
    agreement += delta[ga] * (model.mean_row(a) - inside[x]);
  }
  const double n = static_cast<double>(model.items());
  return n * (n - 1.0) / 4.0 - 0.5 * agreement;
}

EventProbability modified_estimate(const KernelModel& model, const TiedRanking& r,
                                   double expected) {
  const double ratio = (1.0 - expected / model.bandwidth()) / model.normalization().norm;
  return make_probability(log_fraction(r, model.log_factorials()), ratio);
}

}  // namespace

EventProbability event_prob_direct(const KernelModel& model, const TiedRanking& r) {
  check_event(model, r);
  if (model.mode() != KernelMode::modified) {
    throw std::invalid_argument("closed form needs the modified kernel");
  }
  return modified_estimate(model, r, mean_expected_distance_direct(model, r));
}

EventProbability event_prob(const KernelModel& model, const TiedRanking& r) {
  check_event(model, r);
  if (model.tabulated()) {
    CompensatedSum sum;
    for (const auto& pi : enumerate_consistent(r, model.config().enumeration_bound)) {
      sum += model.permutation_prob(pi);
    }
    EventProbability p;
    if (sum.value() > 0.0) {
      p.sign = 1;
      p.value = std::min(1.0, sum.value());
      p.log_magnitude = std::log(p.value);
    }
    return p;
  }
  if (model.mode() == KernelMode::exact_support) {
    const double value = oracle::brute_event_prob(model.training(), model.bandwidth(),
                                                  model.mode(), r,
                                                  model.config().enumeration_bound);
    EventProbability p;
    if (value > 0.0) {
      p.sign = 1;
      p.value = value;
      p.log_magnitude = std::log(value);
    }
    return p;
  }
  return modified_estimate(model, r, mean_expected_distance(model, r));
}

double conditional_prob(const KernelModel& model, const TiedRanking& r, const TiedRanking& s) {
  if (!implies(r, s)) throw std::invalid_argument("conditioning event is not implied");
  const auto num = event_prob(model, r);
  const auto den = event_prob(model, s);
  if (den.sign <= 0) throw std::domain_error("conditioning event has non-positive probability");
  return num.sign * std::exp(num.log_magnitude - den.log_magnitude);
}

double conjunction_prob(const KernelModel& model, std::span<const PairConstraint> constraints) {
  std::vector<Item> items;
  for (const auto& [a, b] : constraints) {
    if (a == b) throw std::invalid_argument("constraint between an item and itself");
    if (a >= model.items() || b >= model.items()) throw std::out_of_range("item out of range");
    items.push_back(a);
    items.push_back(b);
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  if (items.size() > 6) throw std::invalid_argument("conjunction over more than six items");
  if (items.empty()) return 1.0;

  CompensatedSum total;
  bool any = false;
  std::vector<Item> order = items;
  std::vector<std::size_t> pos(model.items());
  do {
    for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = p;
    const bool ok = std::all_of(constraints.begin(), constraints.end(),
                                [&](const PairConstraint& c) { return pos[c.first] < pos[c.second]; });
    if (!ok) continue;
    any = true;
    total += event_prob(model, make_chain(model.universe(), order)).value;
  } while (std::next_permutation(order.begin(), order.end()));
  if (!any) throw std::invalid_argument("contradictory constraints");
  return total.value();
}

double empirical_prob(std::span<const TiedRanking> rankings, const TiedRanking& r) {
  if (rankings.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : rankings) {
    if (implies(s, r)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

// ---------------------------------------------------------------------------

std::vector<double> bandwidth_grid(std::size_t n, KernelMode mode) {
  const double d = static_cast<double>(max_distance(n));
  std::vector<double> grid;
  if (d <= 0.0) return grid;
  if (mode == KernelMode::modified) {
    for (const double f : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0}) grid.push_back(d * f);
    return grid;
  }
  for (const double h : {1.0, 1.25, 1.5, 1.75}) grid.push_back(h);
  for (double h = 2.0; h <= d + 1.0; h += 0.5) grid.push_back(h);
  return grid;
}

BandwidthChoice select_bandwidth(std::span<const TiedRanking> rankings, std::uint64_t seed,
                                 double validation_fraction, KernelMode mode) {
  if (rankings.empty()) throw std::invalid_argument("empty training set");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must be in (0, 1)");
  }
  const std::size_t n = rankings.front().universe_size();
  if (mode == KernelMode::exact_support && n > kTabulationLimit) {
    throw std::invalid_argument("exact-support bandwidth search needs n <= " +
                                std::to_string(kTabulationLimit));
  }
  BandwidthChoice choice{default_bandwidth(n), {}};
  const auto grid = bandwidth_grid(n, mode);
  if (rankings.size() < 5 || grid.empty()) return choice;

  std::vector<std::size_t> order(rankings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0xB4D));
  rng.shuffle(order);
  const auto n_valid = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(validation_fraction * rankings.size())));
  std::vector<TiedRanking> train;
  std::vector<const TiedRanking*> valid;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_valid) {
      valid.push_back(&rankings[order[i]]);
    } else {
      train.push_back(rankings[order[i]]);
    }
  }

  auto score_with = [&](const auto& log_score) {
    CompensatedSum score;
    for (const auto* r : valid) score += log_score(*r);
    return score.value() / static_cast<double>(valid.size());
  };
  std::function<double(double)> score_at;
  std::vector<double> spread;  // D/2 - E(R) per validation ranking
  const double half_d = static_cast<double>(max_distance(n)) / 2.0;
  if (mode == KernelMode::modified) {
    // The mean pairwise statistics do not depend on h; fit once and rescale.
    const auto base = fit(train, {});
    for (const auto* r : valid) spread.push_back(half_d - mean_expected_distance(base, *r));
    score_at = [&](double h) {
      const double norm = 1.0 - half_d / h;
      CompensatedSum score;
      for (const double s : spread) {
        // (1 - E/h) / norm with E = D/2 - s
        score += std::log(std::max((1.0 - (half_d - s) / h) / norm, kLikelihoodFloor));
      }
      return score.value() / static_cast<double>(spread.size());
    };
  } else {
    score_at = [&](double h) {
      const auto model = fit(train, {.bandwidth = h, .mode = KernelMode::exact_support});
      return score_with([&](const TiedRanking& r) {
        const double p = event_prob(model, r).value;
        // relative to the uniform estimate, as in the modified branch
        return std::log(std::max(p, kLikelihoodFloor)) - log_fraction(r, model.log_factorials());
      });
    };
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const double h : grid) {
    const double mean = score_at(h);
    choice.scores.emplace_back(h, mean);
    if (mean >= best) {
      best = mean;
      choice.bandwidth = h;
    }
  }
  return choice;
}

// ---------------------------------------------------------------------------

std::optional<std::vector<Item>> full_order(const TiedRanking& r, std::span<const Item> subset) {
  std::vector<std::pair<std::size_t, Item>> keyed;
  keyed.reserve(subset.size());
  for (const Item item : subset) {
    const auto g = r.group_of(item);
    if (!g) return std::nullopt;
    keyed.emplace_back(*g, item);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    if (keyed[i].first == keyed[i - 1].first) return std::nullopt;
  }
  std::vector<Item> order;
  order.reserve(keyed.size());
  for (const auto& [g, item] : keyed) order.push_back(item);
  return order;
}

LogLikelihood test_loglikelihood(const EventScorer& scorer, std::span<const TiedRanking> test,
                                 std::span<const Item> subset) {
  LogLikelihood out;
  CompensatedSum total;
  for (const auto& r : test) {
    const auto order = full_order(r, subset);
    if (!order) {
      ++out.dropped;
      continue;
    }
    double p = scorer(make_chain(r.universe_ptr(), *order));
    if (!(p >= kLikelihoodFloor)) {
      p = kLikelihoodFloor;
      ++out.floored;
    }
    total += std::log(p);
    ++out.used;
  }
  if (out.used == 0) throw std::invalid_argument("no test ranking orders the item subset");
  out.mean = total.value() / static_cast<double>(out.used);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// log sum_t g[t] exp(-theta t)
double log_mahonian_mgf(const MahonianTable& table, double theta) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t <= table.max_distance(); ++t) {
    if (table[t] > 0.0) peak = std::max(peak, std::log(table[t]) - theta * static_cast<double>(t));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t <= table.max_distance(); ++t) {
    if (table[t] > 0.0) sum += std::exp(std::log(table[t]) - theta * static_cast<double>(t) - peak);
  }
  return peak + std::log(sum);
}

}  // namespace

MallowsModel::MallowsModel(Permutation center, double concentration)
    : center_(std::move(center)), concentration_(concentration) {
  if (!(concentration_ >= 0.0)) throw std::invalid_argument("concentration must be >= 0");
  const auto table = mahonian_distribution(center_.size());
  log_normalizer_ = std::lgamma(static_cast<double>(center_.size()) + 1.0) +
                    log_mahonian_mgf(table, concentration_);
}

double MallowsModel::log_prob(const Permutation& pi) const {
  return -concentration_ * static_cast<double>(kendall_tau(pi, center_)) - log_normalizer_;
}

MallowsModel mallows_fit(std::span<const Permutation> data, std::size_t max_items) {
  if (data.empty()) throw std::invalid_argument("Mallows fit needs data");
  const std::size_t n = data.front().size();
  if (n > max_items) {
    throw std::invalid_argument("Mallows fit limited to " + std::to_string(max_items) + " items");
  }
  for (const auto& p : data) {
    if (p.size() != n) throw std::invalid_argument("permutations of different sizes");
  }

  std::vector<Item> order(n);
  std::iota(order.begin(), order.end(), Item{0});
  std::optional<Permutation> best;
  std::uint64_t best_total = std::numeric_limits<std::uint64_t>::max();
  do {
    Permutation candidate(order);
    std::uint64_t total = 0;
    for (const auto& p : data) total += kendall_tau(p, candidate);
    if (total < best_total) {
      best_total = total;
      best = std::move(candidate);
    }
  } while (std::next_permutation(order.begin(), order.end()));

  const double mean = static_cast<double>(best_total) / static_cast<double>(data.size());
  const auto table = mahonian_distribution(n);
  // Negative log-likelihood per observation, up to the constant log n!.
  const auto objective = [&](double theta) { return theta * mean + log_mahonian_mgf(table, theta); };
  const auto [theta, value] = boost::math::tools::brent_find_minima(
      objective, 0.0, kMallowsMaxConcentration, 30);
  (void)value;
  return MallowsModel(std::move(*best), theta);
}

// ---------------------------------------------------------------------------

void save_model(const KernelModel& model, std::ostream& out) {
  nlohmann::json doc;
  doc["format"] = "rankdens-model";
  doc["version"] = 1;
  const auto& universe = *model.universe();
  if (universe.has_labels()) {
    doc["universe"] = universe.labels();
  } else {
    doc["universe"] = universe.size();
  }
  doc["bandwidth"] = model.bandwidth();
  doc["kernel"] = to_string(model.mode());
  auto& training = doc["training"] = nlohmann::json::array();
  for (const auto& r : model.training()) {
    nlohmann::json entry;
    entry["ranking"] = format_ranking(r);
    if (r.has_levels()) entry["levels"] = *r.levels();
    training.push_back(std::move(entry));
  }
  out << doc.dump(1) << '\n';
}

KernelModel load_model(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model archive is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "rankdens-model" || doc.at("version") != 1) {
      throw DataError("not a rankdens model archive");
    }
    const auto& u = doc.at("universe");
    const UniversePtr universe = u.is_array() ? make_universe(u.get<std::vector<std::string>>())
                                              : make_universe(u.get<std::size_t>());
    std::vector<TiedRanking> rankings;
    for (const auto& entry : doc.at("training")) {
      auto r = parse_ranking(entry.at("ranking").get<std::string>(), universe);
      if (entry.contains("levels")) {
        r = TiedRanking(universe, r.groups(), entry.at("levels").get<std::vector<int>>());
      }
      rankings.push_back(std::move(r));
    }
    KernelConfig config;
    config.bandwidth = doc.at("bandwidth").get<double>();
    config.mode = parse_kernel_mode(doc.at("kernel").get<std::string>());
    return fit(std::move(rankings), config);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model archive: ") + e.what());
  }
}

}  // namespace rankdens
