#pragma once

#include <set>
#include <vector>

#include "cap/grouping.hpp"

namespace cap {

// Directed acyclic graph encoding "ancestors enter the model first". Each node
// owns a set of predictor indices; an edge (parent, child) makes every index of
// the child subordinate to the parent's. Index sets of distinct nodes are
// disjoint; a predictor outside every node is unconstrained by the hierarchy.
struct HierarchyGraph {
  std::vector<std::vector<int>> nodes;          // predictor indices per node
  std::vector<std::pair<int, int>> edges;       // (parent node, child node)

  int node_count() const { return static_cast<int>(nodes.size()); }
};

// Structural checks: node indices valid and disjoint across nodes, edge
// endpoints in range, no directed cycle. Raises index_out_of_range,
// overlapping_groups (index in two nodes), cyclic_graph.
void validate_graph(const HierarchyGraph& g);

// Forest test: every node has at most one parent and there is no cycle.
bool is_tree(const HierarchyGraph& g);

std::vector<int> node_ancestors(const HierarchyGraph& g, int node);     // transitive
std::vector<int> node_descendants(const HierarchyGraph& g, int node);   // transitive

// Builds the overlapping-group penalty that enforces the hierarchy: one group
// per node m holding m's indices plus all indices of m's descendants, with the
// given per-node norms (default: all infinity) and weights (default 1), outer
// norm gamma0 = 1. Predictors in [0,p) not covered by any node are appended as
// weight-1 singleton infinity-norm groups so the penalty covers the design.
Grouping compile_penalty(const HierarchyGraph& g, int p,
                         const std::vector<double>& gamma = {},
                         const std::vector<double>& weights = {});

// Sufficient condition for "I1 enters only after I2": gamma0 = 1 and all group
// norms > 1; every group containing I1 contains I2; and some group contains I2
// but not I1. Index sets must be nonempty and in range.
bool validate_hierarchy_condition(const Grouping& g, const std::vector<int>& i1,
                                  const std::vector<int>& i2);

// Two-way ANOVA hierarchy on d factors: nodes 0..d-1 are main effects with
// index {i}; then one node per pair (i<j) in lexicographic order with index
// {d + rank(i,j)}, with edges from both parents. p = d + d(d-1)/2.
HierarchyGraph build_anova_graph(int d);

// Haar wavelet tree over [0,1): levels i = 0..levels-1, positions j = 0..2^i-1,
// column for node (i,j) evaluates, at the time-point grid t_k = (k+1/2)/T,
//   -1 on [ j/2^i, (2j+1)/2^(i+1) ),  +1 on [ (2j+1)/2^(i+1), (j+1)/2^i ),  0 off support
// (left-closed convention). Parent of (i,j) is (i-1, floor(j/2)); columns are
// ordered level-major: (0,0), (1,0), (1,1), (2,0), ...
struct WaveletDesign {
  Eigen::MatrixXd x;        // time_points rows, 2^levels - 1 columns
  HierarchyGraph tree;      // node id = column id
};
WaveletDesign build_haar_tree(int levels, int time_points);

// Ancestral closure at node granularity: for every selected predictor, adds
// all predictor indices owned by ancestor nodes of its node.
std::set<int> ancestral_closure(const std::set<int>& selected, const HierarchyGraph& g);

// |closure(selected) \ selected|; 0 iff the selection respects the hierarchy.
// Raises unknown_index if a selected index belongs to no node.
int hierarchy_gap(const std::set<int>& selected, const HierarchyGraph& g);

// Support of a coefficient vector at the numeric-zero threshold.
std::set<int> support(const Eigen::VectorXd& beta, double tol = 1e-10);

}  // namespace cap
