#pragma once

// Association rules between preference events: mutual information of pair
// comparisons, lift of top-position events, and the affinity graph.

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rankdens/estimator.hpp"

namespace rankdens {

/// Joint distribution of the comparisons (i vs j) and (k vs l).
/// cell[0][0] = p(i<j, k<l), cell[0][1] = p(i<j, l<k),
/// cell[1][0] = p(j<i, k<l), cell[1][1] = p(j<i, l<k).
struct JointPairTable {
  std::array<Item, 4> items{};  // i, j, k, l
  std::array<std::array<double, 2>, 2> cell{};
  /// Negative cells were clamped to zero and the table rescaled.
  bool renormalized = false;

  [[nodiscard]] double row(std::size_t a) const { return cell[a][0] + cell[a][1]; }
  [[nodiscard]] double col(std::size_t b) const { return cell[0][b] + cell[1][b]; }
  [[nodiscard]] double total() const { return row(0) + row(1); }
  /// The constraint a cell's row (0: i<j, 1: j<i) or column stands for.
  [[nodiscard]] PairConstraint row_event(std::size_t a) const;
  [[nodiscard]] PairConstraint col_event(std::size_t b) const;
};

/// Throws on repeated items.
JointPairTable joint_pair_table(const KernelModel& model, Item i, Item j, Item k, Item l);

/// Clamps negative cells to zero and rescales to total 1.
JointPairTable renormalize(JointPairTable table);

/// p log(p / (row col)) of one cell, 0 for an empty cell.
double pointwise_mi(const JointPairTable& table, std::size_t a, std::size_t b);

/// Plug-in mutual information (natural log) of the renormalized table, with
/// marginals taken as its row and column sums.
double mutual_information(const JointPairTable& table);

struct Rule {
  PairConstraint antecedent;
  PairConstraint consequent;
  double score;
  /// Item quadruple the rule was scored on: {i, j} and {k, l}, each sorted,
  /// with i < k.
  std::array<Item, 4> items;
};

inline constexpr std::size_t kMaxRuleSubset = 60;

/// Scores every unordered pair of disjoint item pairs from the subset by
/// mutual information and returns the best top_t, best first (ties by item
/// indices). Each rule is oriented by its largest positive pointwise cell;
/// the constraint on {i, j} is the antecedent.
std::vector<Rule> mine_mi_rules(const KernelModel& model, std::span<const Item> subset,
                                std::size_t top_t, std::size_t max_subset = kMaxRuleSubset);

enum class LiftMode {
  /// p(i first, j second) / (p(i first) p(j second))
  top2,
  /// p(i first, j last) / (p(i first) p(j last))
  top_bottom,
};

/// Positions are relative to the subset; items outside it are unranked.
/// Throws on i == j, items outside the subset, or a non-positive marginal.
double lift_score(const KernelModel& model, Item i, Item j, LiftMode mode,
                  std::span<const Item> subset);

struct LiftRule {
  Item first;   // ranked first
  Item second;  // ranked second, or last for top_bottom
  double score;
};

/// lift_score for every ordered pair of the subset, best first (ties by
/// item indices); at most top_t.
std::vector<LiftRule> mine_lift_rules(const KernelModel& model, std::span<const Item> subset,
                                  LiftMode mode, std::size_t top_t);

struct Edge {
  Item a;
  Item b;  // a < b
  double weight;
};

/// Undirected edges with weight = mean of the two top2 lifts, kept when the
/// weight exceeds threshold. Sorted by (a, b).
std::vector<Edge> affinity_graph(const KernelModel& model, std::span<const Item> subset,
                                 double threshold);

using ItemNamer = std::function<std::string(Item)>;

/// item_a,item_b,weight
void write_edges_csv(std::span<const Edge> edges, const ItemNamer& name, std::ostream& out);
/// Undirected graph in DOT with labelled nodes.
void write_dot(std::span<const Edge> edges, const ItemNamer& name, std::ostream& out);

}  // namespace rankdens
