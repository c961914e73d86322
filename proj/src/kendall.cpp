#include "rankdens/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rankdens {

namespace {

std::uint64_t count_inversions(std::vector<std::size_t>& seq, std::vector<std::size_t>& scratch,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = count_inversions(seq, scratch, lo, mid) +
                        count_inversions(seq, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t out = lo;
  while (i < mid && j < hi) {
    if (seq[j] < seq[i]) {
      count += mid - i;
      scratch[out++] = seq[j++];
    } else {
      scratch[out++] = seq[i++];
    }
  }
  while (i < mid) scratch[out++] = seq[i++];
  while (j < hi) scratch[out++] = seq[j++];
  std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
            seq.begin() + static_cast<long>(lo));
  return count;
}

}  // namespace

std::uint64_t kendall_tau(const Permutation& pi, const Permutation& sigma) {
  if (pi.size() != sigma.size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<std::size_t> seq(pi.size());
  for (std::size_t p = 0; p < pi.size(); ++p) seq[p] = sigma.position(pi.order()[p]);
  std::vector<std::size_t> scratch(seq.size());
  return count_inversions(seq, scratch, 0, seq.size());
}

// Adding item k to S_{k-1} multiplies the generating function by
// (1 + z + ... + z^{k-1}); in normalized form g_k[t] = (1/k) sum_{s<k} g_{k-1}[t-s].
// Only the lower half is computed from prefix-sum differences, which keeps
// every entry nonnegative and the small tail entries accurate; the upper half
// is the mirror image.
MahonianTable::MahonianTable(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Mahonian table needs n >= 1");
  const std::size_t full = rankdens::max_distance(n);
  mass_.reserve(full + 1);
  mass_.assign(1, 1.0);
  std::vector<double> prefix;
  std::vector<double> next;
  for (std::size_t k = 2; k <= n; ++k) {
    const std::size_t prev_max = mass_.size() - 1;
    const std::size_t cur_max = prev_max + (k - 1);
    prefix.resize(prev_max + 2);
    prefix[0] = 0.0;
    for (std::size_t t = 0; t <= prev_max; ++t) prefix[t + 1] = prefix[t] + mass_[t];

    next.assign(cur_max + 1, 0.0);
    const double inv_k = 1.0 / static_cast<double>(k);
    const std::size_t half = cur_max / 2;
    for (std::size_t t = 0; t <= half; ++t) {
      const std::size_t hi = std::min(t, prev_max) + 1;
      const std::size_t lo = t + 1 >= k ? t + 1 - k : 0;
      next[t] = (prefix[hi] - prefix[lo]) * inv_k;
    }
    for (std::size_t t = half + 1; t <= cur_max; ++t) next[t] = next[cur_max - t];

    CompensatedSum total;
    for (const double v : next) total += v;
    const double scale = 1.0 / total.value();
    for (double& v : next) v *= scale;
    mass_.swap(next);
  }
}

MahonianTable mahonian_distribution(std::size_t n) { return MahonianTable(n); }

const char* to_string(KernelMode mode) {
  return mode == KernelMode::modified ? "modified" : "exact";
}

KernelMode parse_kernel_mode(std::string_view text) {
  if (text == "modified") return KernelMode::modified;
  if (text == "exact" || text == "exact-support") return KernelMode::exact_support;
  throw std::invalid_argument("unknown kernel mode '" + std::string(text) + "'");
}

TriangularNormalization triangular_normalization(const MahonianTable& table, double h,
                                                 KernelMode mode) {
  const std::size_t n = table.items();
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be positive");
  if (mode == KernelMode::modified) return triangular_normalization(n, h, mode);
  CompensatedSum norm;
  for (std::size_t t = 0; t <= table.max_distance() && static_cast<double>(t) < h; ++t) {
    norm += (1.0 - static_cast<double>(t) / h) * table[t];
  }
  return {n, h, mode, norm.value()};
}

TriangularNormalization triangular_normalization(std::size_t n, double h, KernelMode mode) {
  if (n == 0) throw std::invalid_argument("normalization needs n >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be positive");
  if (mode == KernelMode::exact_support) {
    return triangular_normalization(mahonian_distribution(n), h, mode);
  }
  const double half_mean = static_cast<double>(n) * static_cast<double>(n - 1) / 4.0;
  if (!(h > half_mean)) {
    throw std::invalid_argument("modified kernel needs h > n(n-1)/4 = " +
                                std::to_string(half_mean));
  }
  return {n, h, mode, 1.0 - half_mean / h};
}

double kernel_weight(double t, const TriangularNormalization& norm) {
  const double d = static_cast<double>(max_distance(norm.n));
  if (t < 0.0 || t > d) throw std::out_of_range("distance out of range");
  if (norm.mode == KernelMode::exact_support && !(t < norm.h)) return 0.0;
  const double slope = 1.0 - t / norm.h;
  if (slope == 0.0) return 0.0;
  const double log_mag = std::log(std::fabs(slope)) -
                         std::lgamma(static_cast<double>(norm.n) + 1.0) - std::log(norm.norm);
  return std::copysign(std::exp(log_mag), slope);
}

}  // namespace rankdens
