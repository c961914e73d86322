#include "rankdens/censored.hpp"

#include <algorithm>
#include <stdexcept>

namespace rankdens {

namespace {

// Per-item view of one ranking: group index (or -1) and the centred slot
// delta = 2c/(k+1) - 1 with c = tau + (phi-1)/2.
struct Slot {
  long group = -1;
  double delta = 0.0;
};

Slot slot_of(const TiedRanking& u, Item item) {
  const auto g = u.group_of(item);
  if (!g) return {};
  const double k = static_cast<double>(u.ranked_count());
  const double c = static_cast<double>(u.group_start(*g)) + 1.0 +
                   (static_cast<double>(u.group(*g).size()) - 1.0) / 2.0;
  return {static_cast<long>(*g), 2.0 * c / (k + 1.0) - 1.0};
}

// 1 - 2 p_ij, the signed preference of j over i.
double centred(const Slot& a, const Slot& b) {
  if (a.group >= 0 && b.group >= 0) {
    if (a.group == b.group) return 0.0;
    return a.group < b.group ? -1.0 : 1.0;
  }
  if (a.group >= 0) return a.delta;
  if (b.group >= 0) return -b.delta;
  return 0.0;
}

}  // namespace

double pair_pref_prob(const TiedRanking& u, Item i, Item j) {
  if (i >= u.universe_size() || j >= u.universe_size()) {
    throw std::out_of_range("item index out of range");
  }
  if (i == j) throw std::invalid_argument("pair preference needs two distinct items");
  const Slot a = slot_of(u, i);
  const Slot b = slot_of(u, j);
  if (a.group >= 0 && b.group >= 0) {
    if (a.group == b.group) return 0.5;
    return a.group < b.group ? 1.0 : 0.0;
  }
  const double k = static_cast<double>(u.ranked_count());
  if (b.group >= 0) {
    const auto pos = *ranked_position(u, j);
    return (static_cast<double>(pos.tau) + (static_cast<double>(pos.phi) - 1.0) / 2.0) / (k + 1.0);
  }
  if (a.group >= 0) {
    const auto pos = *ranked_position(u, i);
    return 1.0 -
           (static_cast<double>(pos.tau) + (static_cast<double>(pos.phi) - 1.0) / 2.0) / (k + 1.0);
  }
  return 0.5;
}

double expected_kendall(const TiedRanking& s, const TiedRanking& r) {
  if (!s.same_universe(r)) throw std::invalid_argument("rankings over different universes");
  // Union of ranked items, merged from the two sorted lookups.
  std::vector<Item> items;
  items.reserve(s.ranked_count() + r.ranked_count());
  for (const auto& [item, g] : s.ranked()) items.push_back(item);
  for (const auto& [item, g] : r.ranked()) items.push_back(item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  std::vector<Slot> in_s(items.size());
  std::vector<Slot> in_r(items.size());
  for (std::size_t a = 0; a < items.size(); ++a) {
    in_s[a] = slot_of(s, items[a]);
    in_r[a] = slot_of(r, items[a]);
  }

  const double n = static_cast<double>(s.universe_size());
  CompensatedSum agreement;

  // Pairs inside the union.
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      const double ds = centred(in_s[a], in_s[b]);
      if (ds == 0.0) continue;
      const double dr = centred(in_r[a], in_r[b]);
      agreement += ds * dr;
    }
  }
  // Pairs of one union item with an item ranked by neither ranking: both
  // factors reduce to the item's centred slot, the same for every partner.
  const double outside = n - static_cast<double>(items.size());
  if (outside > 0.0) {
    for (std::size_t a = 0; a < items.size(); ++a) {
      agreement += outside * in_s[a].delta * in_r[a].delta;
    }
  }
  return n * (n - 1.0) / 4.0 - 0.5 * agreement.value();
}

}  // namespace rankdens
