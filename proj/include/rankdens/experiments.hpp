#pragma once

// Experiment drivers shared by the command line and the acceptance suite:
// pairwise preference tables, held-out log-likelihood comparisons and
// prediction loss curves.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rankdens/ingest.hpp"
#include "rankdens/oracle.hpp"
#include "rankdens/recommend.hpp"

namespace rankdens {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

struct PairwiseTable {
  /// prob[i][j] = p(i preferred to j); the diagonal is 0.5.
  std::vector<std::vector<double>> prob;
  /// Row means of prob, the average probability of beating the others.
  std::vector<double> score;
  /// Off-diagonal estimates below zero.
  std::size_t negative = 0;
};

PairwiseTable pairwise_table(const KernelModel& model);

/// Items by descending score, ties by index.
std::vector<Item> order_by_score(const PairwiseTable& table);

// ---------------------------------------------------------------------------
// Held-out log-likelihood of the kernel estimate against the empirical
// measure and a fitted Mallows model.

struct KernelChoice {
  KernelMode mode = KernelMode::modified;
  /// nullopt selects the bandwidth on a validation split.
  std::optional<double> bandwidth;
};

struct LoglikComparison {
  double bandwidth = 0.0;
  LogLikelihood kernel;
  LogLikelihood empirical;
  /// Absent when no training ranking orders the whole universe.
  std::optional<LogLikelihood> mallows;
};

/// All three scorers on test rankings that order the whole universe.
LoglikComparison compare_loglik(const std::vector<TiedRanking>& train,
                                std::span<const TiedRanking> test, const KernelChoice& kernel,
                                std::uint64_t seed);

struct SyntheticMixture {
  /// Two equally weighted Mallows components centred on the identity and
  /// on its rotation by n/2.
  double concentration = 1.0;
  oracle::CensoringPolicy censoring{0.8, 0.0};
  std::size_t test_count = 1000;
};

/// Training and test rankings over n items drawn from the mixture.
std::pair<std::vector<TiedRanking>, std::vector<TiedRanking>> synthetic_mixture(
    std::size_t n, std::size_t m, const SyntheticMixture& mixture, std::uint64_t seed);

struct LoglikSummary {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string estimator;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t repetitions = 0;
};

/// Mean and standard error over repetitions, one row per estimator.
std::vector<LoglikSummary> summarize(std::size_t n, std::size_t m,
                                     std::span<const LoglikComparison> runs);

// ---------------------------------------------------------------------------
// Prediction loss against training size.

struct PredictRow {
  std::size_t m = 0;
  std::string predictor;
  double mean_loss = 0.0;
  std::size_t predictions = 0;
  /// Posteriors with a clamped negative level estimate (kernel only).
  std::size_t clamped = 0;
};

/// For each size, fits on a seeded prefix of the training users plus the
/// observed part of the test users and scores the kernel predictor and the
/// constant level that minimizes expected loss under the training level
/// histogram.
std::vector<PredictRow> prediction_curve(const Split& split, std::span<const std::size_t> sizes,
                                         const LossMatrix& loss, const KernelChoice& kernel,
                                         PosteriorWeight weight, std::uint64_t seed);

}  // namespace rankdens
