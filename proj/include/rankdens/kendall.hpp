#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankdens/ranking.hpp"

namespace rankdens {

/// Number of item pairs that pi and sigma order differently.
std::uint64_t kendall_tau(const Permutation& pi, const Permutation& sigma);

/// Distribution of the Kendall distance from a fixed permutation when the
/// other one is uniform over S_n: mass[t] = #{sigma : T(sigma, pi) = t} / n!.
/// These are the coefficients of prod_{j<n} (1 + z + ... + z^j) scaled by 1/n!.
class MahonianTable {
 public:
  explicit MahonianTable(std::size_t n);

  [[nodiscard]] std::size_t items() const { return n_; }
  [[nodiscard]] std::size_t max_distance() const { return mass_.size() - 1; }
  [[nodiscard]] std::span<const double> mass() const { return mass_; }
  [[nodiscard]] double operator[](std::size_t t) const { return mass_[t]; }

 private:
  std::size_t n_;
  std::vector<double> mass_;
};

/// Builds the table for n items in O(n^3) with windowed prefix sums.
MahonianTable mahonian_distribution(std::size_t n);

enum class KernelMode {
  /// (1 - t/h) on t < h, zero beyond.
  exact_support,
  /// (1 - t/h) everywhere; negative past h. Requires h > n(n-1)/4.
  modified,
};

const char* to_string(KernelMode mode);
KernelMode parse_kernel_mode(std::string_view text);

/// Normalizer of the triangular kernel, stored as C(h)/n! so that it stays
/// finite for large n.
struct TriangularNormalization {
  std::size_t n;
  double h;
  KernelMode mode;
  double norm;  // C(h) / n!
};

TriangularNormalization triangular_normalization(std::size_t n, double h, KernelMode mode);
TriangularNormalization triangular_normalization(const MahonianTable& table, double h,
                                                 KernelMode mode);

/// Per-permutation kernel weight at distance t: (1 - t/h)[t < h] / C(h) for
/// exact support, (1 - t/h) / C(h) for the modified kernel.
double kernel_weight(double t, const TriangularNormalization& norm);

}  // namespace rankdens
