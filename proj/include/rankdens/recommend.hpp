#pragma once

// Level prediction for held-out items by minimizing posterior expected loss,
// and the held-out evaluation harness.

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rankdens/estimator.hpp"

namespace rankdens {

/// Square loss table over consecutive levels first_level .. first_level+L-1.
/// Entry (a, b) is the cost of predicting level a when the truth is b.
class LossMatrix {
 public:
  LossMatrix(int first_level, std::size_t size, std::vector<double> entries);

  /// 0/1 loss.
  static LossMatrix zero_one(int first_level, int last_level);
  /// Absolute difference |a - b|.
  static LossMatrix absolute(int first_level, int last_level);
  /// Asymmetric star loss on levels 0..5; overpredicting a bad item (truth
  /// 0-2 predicted 3-5) costs more than the reverse. first_level 1 drops
  /// the zero-star row and column.
  static LossMatrix asymmetric_stars(int first_level = 0);
  /// Built-in by name: l0, l1 or le.
  static LossMatrix builtin(std::string_view name, int first_level, int last_level);
  /// Comma-separated rows; levels start at first_level.
  static LossMatrix read_csv(std::istream& in, int first_level);

  [[nodiscard]] int first_level() const { return first_; }
  [[nodiscard]] int last_level() const { return first_ + static_cast<int>(size_) - 1; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool contains(int level) const { return level >= first_ && level <= last_level(); }
  [[nodiscard]] double operator()(int predicted, int truth) const;
  [[nodiscard]] double min_entry() const;
  [[nodiscard]] double max_entry() const;

 private:
  int first_;
  std::size_t size_;
  std::vector<double> entries_;  // row-major
};

/// Posterior over levels first_level..first_level+probs.size()-1.
struct LevelPosterior {
  int first_level = 0;
  std::vector<double> probs;
  /// Some level had a negative estimate and was clamped to zero.
  bool clamped = false;
};

/// How the candidate rankings are weighed against each other.
enum class PosteriorWeight {
  /// Estimated probability of the event itself, p(R_l).
  event,
  /// Estimated probability per consistent permutation, p(R_l) / |R_l|.
  /// Joining an existing tie group widens the event, which the event
  /// weighting rewards; this one does not.
  density,
};

PosteriorWeight parse_posterior_weight(std::string_view text);

/// Weight of level l from the user's ranking with the item inserted at
/// level l (R_l); the user's own probability cancels. Throws if the item is
/// already ranked or the ranking has no levels.
LevelPosterior level_posterior(const KernelModel& model, const TiedRanking& user, Item item,
                               int first_level, int last_level,
                               PosteriorWeight weight = PosteriorWeight::event);

/// Index into the posterior minimizing expected loss; ties go to the higher
/// index. Throws on a size mismatch.
std::size_t predict_index(std::span<const double> posterior, const LossMatrix& loss);

/// Level minimizing expected loss under the posterior; ties go to the more
/// preferred (higher) level.
int predict_level(const LevelPosterior& posterior, const LossMatrix& loss);

// ---------------------------------------------------------------------------
// Held-out evaluation

struct HeldOut {
  Item item;
  /// Level label of the item's group, or 0 when the ranking had none.
  int level;
  /// 1-based index of the item's group in the user's full ranking.
  std::size_t rank;
};

struct TestUser {
  std::string id;
  /// The user's ranking with the held-out items removed.
  TiedRanking observed;
  std::vector<HeldOut> held_out;
};

struct PredictionSplit {
  std::vector<TestUser> users;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t held_out_count() const;
};

/// What a prediction is compared with.
enum class Target { level, rank };

/// One prediction per held-out item of the user, in order.
using Predictor = std::function<std::vector<int>(const TestUser& user)>;

struct PredictionScore {
  double mean_loss = 0.0;
  std::size_t predictions = 0;
};

/// Mean of loss(predicted, truth) over all held-out (user, item) pairs.
/// Throws if nothing is held out or a prediction falls outside the loss
/// matrix.
PredictionScore evaluate_prediction(const Predictor& predictor, const PredictionSplit& split,
                                    const LossMatrix& loss, Target target = Target::level);

/// Fits on the training rankings plus the observed part of every test user.
KernelModel fit_prediction_model(std::span<const TiedRanking> train,
                                 const PredictionSplit& split, const KernelConfig& config);

/// Posterior-loss predictor over the loss matrix's levels. Posteriors with
/// a clamped negative estimate are counted into clamped when given.
Predictor kernel_predictor(const KernelModel& model, const LossMatrix& loss,
                           PosteriorWeight weight = PosteriorWeight::event,
                           std::atomic<std::size_t>* clamped = nullptr);

/// Always predicts the same level.
Predictor constant_predictor(int level);

}  // namespace rankdens
