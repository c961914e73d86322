#include "rankdens/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rankdens/parallel.hpp"

namespace rankdens {

LossMatrix::LossMatrix(int first_level, std::size_t size, std::vector<double> entries)
    : first_(first_level), size_(size), entries_(std::move(entries)) {
  if (size_ == 0) throw std::invalid_argument("empty loss matrix");
  if (entries_.size() != size_ * size_) throw std::invalid_argument("loss matrix is not square");
  for (const double e : entries_) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw std::invalid_argument("loss entries must be finite and non-negative");
    }
  }
}

LossMatrix LossMatrix::zero_one(int first_level, int last_level) {
  if (last_level < first_level) throw std::invalid_argument("empty level range");
  const auto size = static_cast<std::size_t>(last_level - first_level + 1);
  std::vector<double> e(size * size, 1.0);
  for (std::size_t a = 0; a < size; ++a) e[a * size + a] = 0.0;
  return LossMatrix(first_level, size, std::move(e));
}

LossMatrix LossMatrix::absolute(int first_level, int last_level) {
  if (last_level < first_level) throw std::invalid_argument("empty level range");
  const auto size = static_cast<std::size_t>(last_level - first_level + 1);
  std::vector<double> e(size * size);
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      e[a * size + b] = std::fabs(static_cast<double>(a) - static_cast<double>(b));
    }
  }
  return LossMatrix(first_level, size, std::move(e));
}

LossMatrix LossMatrix::asymmetric_stars(int first_level) {
  static constexpr double kStars[6][6] = {
      {0, 0, 0, 3, 4, 5},  {0, 0, 0, 2, 3, 4}, {0, 0, 0, 1, 2, 3},
      {9, 4, 1.5, 0, 0, 0}, {12, 6, 3, 0, 0, 0}, {15, 8, 4.5, 0, 0, 0},
  };
  if (first_level < 0 || first_level > 5) {
    throw std::invalid_argument("asymmetric star loss covers levels 0..5");
  }
  const auto skip = static_cast<std::size_t>(first_level);
  const std::size_t size = 6 - skip;
  std::vector<double> e;
  e.reserve(size * size);
  for (std::size_t a = skip; a < 6; ++a) {
    for (std::size_t b = skip; b < 6; ++b) e.push_back(kStars[a][b]);
  }
  return LossMatrix(first_level, size, std::move(e));
}

LossMatrix LossMatrix::builtin(std::string_view name, int first_level, int last_level) {
  if (name == "l0") return zero_one(first_level, last_level);
  if (name == "l1") return absolute(first_level, last_level);
  if (name == "le") {
    if (last_level != 5) throw std::invalid_argument("le is defined on a scale ending at 5");
    return asymmetric_stars(first_level);
  }
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

LossMatrix LossMatrix::read_csv(std::istream& in, int first_level) {
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        entries.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError("loss matrix: bad number '" + cell + "'");
      }
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw DataError("loss matrix: ragged rows");
    ++rows;
  }
  if (rows == 0 || rows != cols) throw DataError("loss matrix must be square and nonempty");
  try {
    return LossMatrix(first_level, rows, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("loss matrix: ") + e.what());
  }
}

double LossMatrix::operator()(int predicted, int truth) const {
  if (!contains(predicted) || !contains(truth)) throw std::out_of_range("level outside loss matrix");
  return entries_[static_cast<std::size_t>(predicted - first_) * size_ +
                  static_cast<std::size_t>(truth - first_)];
}

double LossMatrix::min_entry() const { return *std::min_element(entries_.begin(), entries_.end()); }
double LossMatrix::max_entry() const { return *std::max_element(entries_.begin(), entries_.end()); }

// ---------------------------------------------------------------------------

PosteriorWeight parse_posterior_weight(std::string_view text) {
  if (text == "density") return PosteriorWeight::density;
  if (text == "event") return PosteriorWeight::event;
  throw std::invalid_argument("unknown posterior weighting '" + std::string(text) + "'");
}

LevelPosterior level_posterior(const KernelModel& model, const TiedRanking& user, Item item,
                               int first_level, int last_level, PosteriorWeight weight) {
  if (!user.has_levels()) throw std::invalid_argument("user ranking has no levels");
  if (user.is_ranked(item)) throw std::invalid_argument("item is already ranked");
  if (last_level < first_level) throw std::invalid_argument("empty level range");

  LevelPosterior out;
  out.first_level = first_level;
  std::vector<EventProbability> raw;
  for (int level = first_level; level <= last_level; ++level) {
    const auto r = insert_item(user, item, InsertSlot::at_level(level));
    auto p = event_prob(model, r);
    if (weight == PosteriorWeight::density) p.log_magnitude -= log_consistent_count(r);
    raw.push_back(p);
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& p : raw) {
    if (p.sign > 0) peak = std::max(peak, p.log_magnitude);
    if (p.sign < 0) out.clamped = true;
  }
  out.probs.assign(raw.size(), 0.0);
  if (peak == -std::numeric_limits<double>::infinity()) {
    std::fill(out.probs.begin(), out.probs.end(), 1.0 / static_cast<double>(raw.size()));
    return out;
  }
  double total = 0.0;
  for (std::size_t l = 0; l < raw.size(); ++l) {
    if (raw[l].sign > 0) out.probs[l] = std::exp(raw[l].log_magnitude - peak);
    total += out.probs[l];
  }
  for (double& p : out.probs) p /= total;
  return out;
}

std::size_t predict_index(std::span<const double> posterior, const LossMatrix& loss) {
  if (posterior.size() != loss.size()) throw std::invalid_argument("posterior/loss size mismatch");
  const int first = loss.first_level();
  std::size_t best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < posterior.size(); ++a) {
    double risk = 0.0;
    for (std::size_t b = 0; b < posterior.size(); ++b) {
      risk += loss(first + static_cast<int>(a), first + static_cast<int>(b)) * posterior[b];
    }
    if (risk <= best_risk) {
      best_risk = risk;
      best = a;
    }
  }
  return best;
}

int predict_level(const LevelPosterior& posterior, const LossMatrix& loss) {
  if (posterior.first_level != loss.first_level()) {
    throw std::invalid_argument("posterior and loss matrix start at different levels");
  }
  return posterior.first_level + static_cast<int>(predict_index(posterior.probs, loss));
}

// ---------------------------------------------------------------------------

std::size_t PredictionSplit::held_out_count() const {
  std::size_t count = 0;
  for (const auto& u : users) count += u.held_out.size();
  return count;
}

PredictionScore evaluate_prediction(const Predictor& predictor, const PredictionSplit& split,
                                    const LossMatrix& loss, Target target) {
  const std::size_t total = split.held_out_count();
  if (total == 0) throw std::invalid_argument("nothing held out");
  std::vector<CompensatedSum> per_user(split.users.size());
  parallel_for(split.users.size(), [&](std::size_t u) {
    const auto& user = split.users[u];
    if (user.held_out.empty()) return;
    const auto predicted = predictor(user);
    if (predicted.size() != user.held_out.size()) {
      throw std::invalid_argument("predictor returned the wrong number of predictions");
    }
    for (std::size_t x = 0; x < predicted.size(); ++x) {
      const auto& h = user.held_out[x];
      const int truth = target == Target::level ? h.level : static_cast<int>(h.rank);
      per_user[u] += loss(predicted[x], truth);
    }
  });
  CompensatedSum sum;
  for (const auto& s : per_user) sum += s.value();
  return {sum.value() / static_cast<double>(total), total};
}

KernelModel fit_prediction_model(std::span<const TiedRanking> train, const PredictionSplit& split,
                                 const KernelConfig& config) {
  std::vector<TiedRanking> rankings(train.begin(), train.end());
  for (const auto& u : split.users) rankings.push_back(u.observed);
  return fit(std::move(rankings), config);
}

Predictor kernel_predictor(const KernelModel& model, const LossMatrix& loss,
                           PosteriorWeight weight, std::atomic<std::size_t>* clamped) {
  return [&model, &loss, weight, clamped](const TestUser& user) {
    std::vector<int> out;
    out.reserve(user.held_out.size());
    for (const auto& h : user.held_out) {
      const auto posterior =
          level_posterior(model, user.observed, h.item, loss.first_level(), loss.last_level(), weight);
      if (clamped && posterior.clamped) ++*clamped;
      out.push_back(predict_level(posterior, loss));
    }
    return out;
  };
}

Predictor constant_predictor(int level) {
  return [level](const TestUser& user) { return std::vector<int>(user.held_out.size(), level); };
}

}  // namespace rankdens
