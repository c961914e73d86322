#include "rankdens/rules.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rankdens/parallel.hpp"

namespace rankdens {

PairConstraint JointPairTable::row_event(std::size_t a) const {
  return a == 0 ? PairConstraint{items[0], items[1]} : PairConstraint{items[1], items[0]};
}

PairConstraint JointPairTable::col_event(std::size_t b) const {
  return b == 0 ? PairConstraint{items[2], items[3]} : PairConstraint{items[3], items[2]};
}

JointPairTable joint_pair_table(const KernelModel& model, Item i, Item j, Item k, Item l) {
  std::array<Item, 4> sorted{i, j, k, l};
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("joint pair table needs four distinct items");
  }
  JointPairTable table;
  table.items = {i, j, k, l};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const std::array<PairConstraint, 2> c{table.row_event(a), table.col_event(b)};
      table.cell[a][b] = conjunction_prob(model, c);
    }
  }
  return table;
}

JointPairTable renormalize(JointPairTable table) {
  double total = 0.0;
  for (auto& row : table.cell) {
    for (double& p : row) {
      if (p < 0.0) {
        p = 0.0;
        table.renormalized = true;
      }
      total += p;
    }
  }
  if (!(total > 0.0)) throw std::domain_error("joint table has no positive mass");
  if (table.renormalized || std::fabs(total - 1.0) > 1e-12) {
    for (auto& row : table.cell) {
      for (double& p : row) p /= total;
    }
  }
  return table;
}

double pointwise_mi(const JointPairTable& table, std::size_t a, std::size_t b) {
  const double p = table.cell[a][b];
  if (!(p > 0.0)) return 0.0;
  return p * std::log(p / (table.row(a) * table.col(b)));
}

double mutual_information(const JointPairTable& table) {
  const auto t = renormalize(table);
  double mi = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) mi += pointwise_mi(t, a, b);
  }
  // Rounding can leave -1e-17 on an independent table.
  return std::max(mi, 0.0);
}

namespace {

std::vector<Item> checked_subset(std::span<const Item> subset, const KernelModel& model) {
  std::vector<Item> v(subset.begin(), subset.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw std::invalid_argument("subset has repeated items");
  }
  if (!v.empty() && v.back() >= model.items()) throw std::out_of_range("subset item out of range");
  return v;
}

}  // namespace

std::vector<Rule> mine_mi_rules(const KernelModel& model, std::span<const Item> subset,
                                std::size_t top_t, std::size_t max_subset) {
  const auto v = checked_subset(subset, model);
  if (v.size() < 4) throw std::invalid_argument("rule mining needs at least four items");
  if (v.size() > max_subset) {
    throw std::invalid_argument("subset of " + std::to_string(v.size()) +
                                " items exceeds the limit of " + std::to_string(max_subset));
  }

  std::vector<std::pair<Item, Item>> pairs;
  for (std::size_t x = 0; x < v.size(); ++x) {
    for (std::size_t y = x + 1; y < v.size(); ++y) pairs.emplace_back(v[x], v[y]);
  }
  std::vector<std::array<Item, 4>> quads;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t q = p + 1; q < pairs.size(); ++q) {
      const auto [i, j] = pairs[p];
      const auto [k, l] = pairs[q];
      if (i == k || i == l || j == k || j == l) continue;
      quads.push_back({i, j, k, l});
    }
  }

  std::vector<Rule> rules(quads.size());
  parallel_for(quads.size(), [&](std::size_t q) {
    const auto [i, j, k, l] = quads[q];
    const auto table = renormalize(joint_pair_table(model, i, j, k, l));
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        const double c = pointwise_mi(table, a, b);
        if (c > best) {
          best = c;
          best_a = a;
          best_b = b;
        }
      }
    }
    rules[q] = Rule{table.row_event(best_a), table.col_event(best_b), mutual_information(table),
                    quads[q]};
  });

  const auto order = [](const Rule& x, const Rule& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.items < y.items;
  };
  const std::size_t keep = std::min(top_t, rules.size());
  std::partial_sort(rules.begin(), rules.begin() + static_cast<long>(keep), rules.end(), order);
  rules.resize(keep);
  return rules;
}

// ---------------------------------------------------------------------------

namespace {

double estimate(const KernelModel& model, const TiedRanking& r) {
  return event_prob(model, r).value;
}

TiedRanking groups_event(const KernelModel& model, std::vector<std::vector<Item>> groups) {
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return TiedRanking(model.universe(), std::move(groups));
}

std::vector<Item> without(const std::vector<Item>& v, Item a, Item b) {
  std::vector<Item> out;
  out.reserve(v.size());
  for (const Item x : v) {
    if (x != a && x != b) out.push_back(x);
  }
  return out;
}

// p(x first)
double first_prob(const KernelModel& model, const std::vector<Item>& v, Item x) {
  return estimate(model, groups_event(model, {{x}, without(v, x, x)}));
}

// p(x first, y second)
double first_second_prob(const KernelModel& model, const std::vector<Item>& v, Item x, Item y) {
  return estimate(model, groups_event(model, {{x}, {y}, without(v, x, y)}));
}

// p(x first, y last)
double first_last_prob(const KernelModel& model, const std::vector<Item>& v, Item x, Item y) {
  return estimate(model, groups_event(model, {{x}, without(v, x, y), {y}}));
}

double last_prob(const KernelModel& model, const std::vector<Item>& v, Item y) {
  return estimate(model, groups_event(model, {without(v, y, y), {y}}));
}

double ratio(double joint, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("lift with a non-positive marginal");
  return joint / (a * b);
}

}  // namespace

double lift_score(const KernelModel& model, Item i, Item j, LiftMode mode,
                  std::span<const Item> subset) {
  const auto v = checked_subset(subset, model);
  if (i == j) throw std::invalid_argument("lift needs two different items");
  if (!std::binary_search(v.begin(), v.end(), i) || !std::binary_search(v.begin(), v.end(), j)) {
    throw std::invalid_argument("lift items must belong to the subset");
  }
  const double pi = first_prob(model, v, i);
  if (mode == LiftMode::top_bottom) {
    return ratio(first_last_prob(model, v, i, j), pi, last_prob(model, v, j));
  }
  CompensatedSum second;
  for (const Item x : v) {
    if (x != j) second += first_second_prob(model, v, x, j);
  }
  return ratio(first_second_prob(model, v, i, j), pi, second.value());
}

namespace {

// lift[x][y] over subset positions.
std::vector<std::vector<double>> lift_matrix(const KernelModel& model, const std::vector<Item>& v,
                                             LiftMode mode) {
  const std::size_t s = v.size();
  if (s < 2) throw std::invalid_argument("lift needs at least two items");
  std::vector<double> first(s);
  std::vector<double> other(s);
  std::vector<std::vector<double>> joint(s, std::vector<double>(s, 0.0));
  parallel_for(s, [&](std::size_t x) {
    first[x] = first_prob(model, v, v[x]);
    if (mode == LiftMode::top_bottom) other[x] = last_prob(model, v, v[x]);
    for (std::size_t y = 0; y < s; ++y) {
      if (y == x) continue;
      joint[x][y] = mode == LiftMode::top2 ? first_second_prob(model, v, v[x], v[y])
                                           : first_last_prob(model, v, v[x], v[y]);
    }
  });
  if (mode == LiftMode::top2) {
    for (std::size_t y = 0; y < s; ++y) {
      CompensatedSum second;
      for (std::size_t x = 0; x < s; ++x) {
        if (x != y) second += joint[x][y];
      }
      other[y] = second.value();
    }
  }
  std::vector<std::vector<double>> lift(s, std::vector<double>(s, 0.0));
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) {
      if (x != y) lift[x][y] = ratio(joint[x][y], first[x], other[y]);
    }
  }
  return lift;
}

}  // namespace

std::vector<LiftRule> mine_lift_rules(const KernelModel& model, std::span<const Item> subset,
                                      LiftMode mode, std::size_t top_t) {
  const auto v = checked_subset(subset, model);
  const auto lift = lift_matrix(model, v, mode);
  std::vector<LiftRule> rules;
  for (std::size_t x = 0; x < v.size(); ++x) {
    for (std::size_t y = 0; y < v.size(); ++y) {
      if (x != y) rules.push_back({v[x], v[y], lift[x][y]});
    }
  }
  const auto order = [](const LiftRule& a, const LiftRule& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::pair(a.first, a.second) < std::pair(b.first, b.second);
  };
  const std::size_t keep = std::min(top_t, rules.size());
  std::partial_sort(rules.begin(), rules.begin() + static_cast<long>(keep), rules.end(), order);
  rules.resize(keep);
  return rules;
}

std::vector<Edge> affinity_graph(const KernelModel& model, std::span<const Item> subset,
                                 double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  const auto v = checked_subset(subset, model);
  const auto lift = lift_matrix(model, v, LiftMode::top2);
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < v.size(); ++x) {
    for (std::size_t y = x + 1; y < v.size(); ++y) {
      const double w = (lift[x][y] + lift[y][x]) / 2.0;
      if (w > threshold) edges.push_back({v[x], v[y], w});
    }
  }
  return edges;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string dot_string(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_edges_csv(std::span<const Edge> edges, const ItemNamer& name, std::ostream& out) {
  out << "item_a,item_b,weight\n";
  out << std::setprecision(10);
  for (const auto& e : edges) {
    out << csv_field(name(e.a)) << ',' << csv_field(name(e.b)) << ',' << e.weight << '\n';
  }
}

void write_dot(std::span<const Edge> edges, const ItemNamer& name, std::ostream& out) {
  std::vector<Item> nodes;
  for (const auto& e : edges) {
    nodes.push_back(e.a);
    nodes.push_back(e.b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  out << "graph affinity {\n";
  out << std::setprecision(10);
  for (const Item n : nodes) out << "  n" << n << " [label=" << dot_string(name(n)) << "];\n";
  for (const auto& e : edges) {
    out << "  n" << e.a << " -- n" << e.b << " [weight=" << e.weight << "];\n";
  }
  out << "}\n";
}

}  // namespace rankdens
