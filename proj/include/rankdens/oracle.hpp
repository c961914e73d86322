#pragma once

// Brute-force reference computations by exhaustive enumeration, for small n.
// They share no code path with the closed forms they check beyond
// enumerate_consistent; distances are counted pair by pair from positions.

#include <cstdint>
#include <span>
#include <vector>

#include "rankdens/kendall.hpp"
#include "rankdens/random.hpp"
#include "rankdens/ranking.hpp"

namespace rankdens::oracle {

/// Distances from the identity over all n! permutations, as counts.
std::vector<std::uint64_t> inversion_histogram(std::size_t n, std::size_t bound = kEnumerationBound);

/// Unnormalized C(h) = sum over sigma of (1 - T/h) [T < h] (exact support)
/// or of (1 - T/h) (modified), by enumeration.
double brute_normalization(std::size_t n, double h, KernelMode mode,
                           std::size_t bound = kEnumerationBound);

/// C(h) from the generating-function coefficients with exact integer
/// polynomial arithmetic: [z^h] G/(1-z) - (1/h) [z^(h-1)] G'/(1-z).
double generating_function_normalization(std::size_t n, std::uint64_t h);

double brute_pair_pref(const TiedRanking& u, Item i, Item j);
double brute_expected_kendall(const TiedRanking& s, const TiedRanking& r);

/// (1/m) sum_i sum_{pi in r} sum_{sigma in S_i} K(T(pi, sigma)) / |S_i|.
double brute_event_prob(std::span<const TiedRanking> rankings, double h, KernelMode mode,
                        const TiedRanking& r, std::size_t bound = kEnumerationBound);

/// The estimate for every permutation of the universe, indexed in the
/// lexicographic order of Permutation::order().
std::vector<double> brute_permutation_probs(std::span<const TiedRanking> rankings, double h,
                                            KernelMode mode, std::size_t bound = kEnumerationBound);

// ---------------------------------------------------------------------------
// Synthetic data

struct MallowsComponent {
  double weight;
  std::vector<Item> center;  // most preferred first
  double concentration;
};

/// Each item is observed independently with observe_prob (redrawn if none
/// is); consecutive observed items are merged into one tie group with
/// tie_prob.
struct CensoringPolicy {
  double observe_prob = 1.0;
  double tie_prob = 0.0;
};

struct SynthConfig {
  std::vector<MallowsComponent> components;
  CensoringPolicy censoring;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct SynthSample {
  std::vector<Permutation> latent;
  std::vector<std::size_t> component;
  std::vector<TiedRanking> observed;
};

/// Repeated-insertion sampler: T(result, center) = sum of the insertion
/// displacements, each drawn with weight exp(-concentration * v).
Permutation sample_mallows(std::span<const Item> center, double concentration, Rng& rng);

/// Draws latent permutations from the mixture and censors them. User u's
/// stream is seeded with derive_seed(seed, u).
SynthSample synthesize(const SynthConfig& config, const UniversePtr& universe);

}  // namespace rankdens::oracle
