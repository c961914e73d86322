#pragma once

// Triangular-kernel density estimator over preference events with a uniform
// surrogate on each training ranking's consistent permutations.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rankdens/kendall.hpp"
#include "rankdens/ranking.hpp"

namespace rankdens {

/// n(n-1)/2: the default bandwidth (non-negative modified kernel everywhere).
double default_bandwidth(std::size_t n);

struct KernelConfig {
  /// Bandwidth; nullopt selects default_bandwidth(n).
  std::optional<double> bandwidth;
  KernelMode mode = KernelMode::modified;
  /// Largest universe for which the mean pairwise statistics are kept as a
  /// dense triangle. Larger universes fall back to per-ranking sums.
  std::size_t dense_limit = 2048;
  /// Exact-support estimates enumerate permutations; n must not exceed this.
  std::size_t enumeration_bound = kEnumerationBound;
};

/// Up to this many items an exact-support model tabulates the estimate of
/// every permutation at fit time; beyond it each query enumerates.
inline constexpr std::size_t kTabulationLimit = 7;

/// An estimated event probability. In modified mode the value may be
/// negative; it is reported as-is and flagged.
struct EventProbability {
  double value = 0.0;
  double log_magnitude = -std::numeric_limits<double>::infinity();  // log|value|
  int sign = 0;

  [[nodiscard]] bool negative() const { return sign < 0; }
};

/// Fitted estimator. Memory-based: stores the training rankings plus the
/// precomputations that make an event query cost O(k^2) in the number of
/// items the event ranks.
class KernelModel {
 public:
  [[nodiscard]] const UniversePtr& universe() const { return universe_; }
  [[nodiscard]] std::size_t items() const { return universe_->size(); }
  [[nodiscard]] std::size_t size() const { return training_.size(); }
  [[nodiscard]] const std::vector<TiedRanking>& training() const { return training_; }
  [[nodiscard]] double bandwidth() const { return norm_.h; }
  [[nodiscard]] KernelMode mode() const { return norm_.mode; }
  [[nodiscard]] const TriangularNormalization& normalization() const { return norm_; }
  [[nodiscard]] const LogFactorials& log_factorials() const { return logfact_; }
  [[nodiscard]] const KernelConfig& config() const { return config_; }

  /// Whether the dense mean pairwise statistics are available.
  [[nodiscard]] bool aggregated() const { return !mean_centred_.empty(); }
  /// Mean over training rankings of 1 - 2 p_ab(S).
  [[nodiscard]] double mean_centred(Item a, Item b) const;
  /// Mean over training rankings of sum_{x != a} (1 - 2 p_ax(S)).
  [[nodiscard]] double mean_row(Item a) const { return mean_row_[a]; }
  /// Whether per-permutation estimates are tabulated (exact support).
  [[nodiscard]] bool tabulated() const { return !permutation_probs_.empty(); }
  /// Estimate of one permutation; needs tabulated().
  [[nodiscard]] double permutation_prob(const Permutation& pi) const;

 private:
  friend KernelModel fit(std::vector<TiedRanking> rankings, const KernelConfig& config);

  UniversePtr universe_;
  std::vector<TiedRanking> training_;
  KernelConfig config_;
  TriangularNormalization norm_{};
  LogFactorials logfact_;
  std::vector<double> mean_centred_;  // packed upper triangle, a < b
  std::vector<double> mean_row_;
  std::vector<double> permutation_probs_;  // lexicographic order
};

/// Throws std::invalid_argument on an empty training set, mixed universes,
/// an invalid bandwidth, or exact-support mode beyond the enumeration bound.
KernelModel fit(std::vector<TiedRanking> rankings, const KernelConfig& config = {});

/// Estimated probability of the event r.
EventProbability event_prob(const KernelModel& model, const TiedRanking& r);

/// Same estimate computed literally: average over training rankings of the
/// closed form with expected_kendall. O(m k^2) per call.
EventProbability event_prob_direct(const KernelModel& model, const TiedRanking& r);

/// p(r) / p(s) for an event r that refines s.
double conditional_prob(const KernelModel& model, const TiedRanking& r, const TiedRanking& s);

/// Ordered pair (before, after).
using PairConstraint = std::pair<Item, Item>;

/// Probability that every constraint holds, summed over the total orders of
/// the involved items (at most six). Throws on contradictory constraints.
double conjunction_prob(const KernelModel& model, std::span<const PairConstraint> constraints);

/// Fraction of rankings that entail r.
double empirical_prob(std::span<const TiedRanking> rankings, const TiedRanking& r);

// ---------------------------------------------------------------------------
// Bandwidth selection

struct BandwidthChoice {
  double bandwidth;
  /// (h, mean held-out log density relative to uniform) per candidate.
  std::vector<std::pair<double, double>> scores;
};

/// Candidate bandwidths over n items. Modified kernel: multiples of
/// D = n(n-1)/2 from D up, where every weight is non-negative. Exact
/// support: quarter steps from 1 to 2, then half steps up to D + 1.
std::vector<double> bandwidth_grid(std::size_t n, KernelMode mode = KernelMode::modified);

/// Picks the bandwidth maximizing the held-out log likelihood of a seeded
/// validation fraction of the rankings, each scored as an event under a
/// model fitted on the rest. Exact support needs n <= kTabulationLimit.
BandwidthChoice select_bandwidth(std::span<const TiedRanking> rankings, std::uint64_t seed,
                                 double validation_fraction = 0.2,
                                 KernelMode mode = KernelMode::modified);

// ---------------------------------------------------------------------------
// Held-out log-likelihood

/// Probability assigned to a chain event over the evaluated item subset.
using EventScorer = std::function<double(const TiedRanking& chain)>;

inline constexpr double kLikelihoodFloor = 1e-12;

struct LogLikelihood {
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;
  std::size_t floored = 0;
};

/// Order of the subset items if r ranks all of them in distinct groups.
std::optional<std::vector<Item>> full_order(const TiedRanking& r, std::span<const Item> subset);

/// Mean log probability of the test rankings' orders over the subset. Test
/// rankings that do not order the subset completely are dropped; scores
/// below kLikelihoodFloor are floored. Throws if no test ranking is usable.
LogLikelihood test_loglikelihood(const EventScorer& scorer, std::span<const TiedRanking> test,
                                 std::span<const Item> subset);

// ---------------------------------------------------------------------------
// Mallows model baseline

/// p(pi) = exp(-concentration * T(pi, center)) / Z over permutations of a
/// small item set (indices 0..n-1 local to that set).
class MallowsModel {
 public:
  MallowsModel(Permutation center, double concentration);

  [[nodiscard]] const Permutation& center() const { return center_; }
  [[nodiscard]] double concentration() const { return concentration_; }
  [[nodiscard]] double log_prob(const Permutation& pi) const;
  [[nodiscard]] double prob(const Permutation& pi) const { return std::exp(log_prob(pi)); }

 private:
  Permutation center_;
  double concentration_;
  double log_normalizer_;
};

inline constexpr std::size_t kMallowsMaxItems = 6;
inline constexpr double kMallowsMaxConcentration = 50.0;

/// Maximum-likelihood fit: the center minimizing the mean distance
/// (exhaustive, first in lexicographic order on ties), then the
/// concentration by Brent's method on [0, kMallowsMaxConcentration].
MallowsModel mallows_fit(std::span<const Permutation> data,
                         std::size_t max_items = kMallowsMaxItems);

// ---------------------------------------------------------------------------
// Persistence: universe labels, training rankings in text notation, bandwidth
// and kernel mode, as JSON. Loading re-fits.

void save_model(const KernelModel& model, std::ostream& out);
KernelModel load_model(std::istream& in);

}  // namespace rankdens
