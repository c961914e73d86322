#pragma once

// Statistics of a tied-incomplete ranking under the uniform distribution over
// its consistent permutations.

#include "rankdens/ranking.hpp"

namespace rankdens {

/// Probability that item i precedes item j when a permutation is drawn
/// uniformly from those consistent with u.
///
///   both ranked, different groups   1 or 0
///   only j ranked                   (tau(j) + (phi(j) - 1)/2) / (k + 1)
///   only i ranked                   1 - (tau(i) + (phi(i) - 1)/2) / (k + 1)
///   otherwise (tied, or unranked)   1/2
///
/// where k is the number of items ranked in u.
double pair_pref_prob(const TiedRanking& u, Item i, Item j);

/// Mean Kendall distance between independent uniform draws from the
/// permutations consistent with s and with r:
///   n(n-1)/4 - 1/2 sum_{i<j} (1 - 2 p_ij(s)) (1 - 2 p_ij(r)).
/// Only pairs touching an item ranked in s or r are visited.
double expected_kendall(const TiedRanking& s, const TiedRanking& r);

}  // namespace rankdens
