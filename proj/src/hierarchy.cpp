#include "cap/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "cap/error.hpp"

namespace cap {

namespace {

std::vector<std::vector<int>> children_of(const HierarchyGraph& g) {
  std::vector<std::vector<int>> ch(g.node_count());
  for (const auto& [a, b] : g.edges) ch[a].push_back(b);
  return ch;
}

std::vector<std::vector<int>> parents_of(const HierarchyGraph& g) {
  std::vector<std::vector<int>> pa(g.node_count());
  for (const auto& [a, b] : g.edges) pa[b].push_back(a);
  return pa;
}

// Transitive reach along the given adjacency, excluding the start node.
std::vector<int> reach(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  std::vector<int> out;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        out.push_back(w);
        q.push(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool has_cycle(const HierarchyGraph& g) {
  const auto ch = children_of(g);
  std::vector<int> indeg(g.node_count(), 0);
  for (const auto& [a, b] : g.edges) {
    (void)a;
    ++indeg[b];
  }
  std::queue<int> q;
  for (int v = 0; v < g.node_count(); ++v)
    if (indeg[v] == 0) q.push(v);
  int visited = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    ++visited;
    for (int w : ch[v])
      if (--indeg[w] == 0) q.push(w);
  }
  return visited != g.node_count();
}

}  // namespace

void validate_graph(const HierarchyGraph& g) {
  std::set<int> seen;
  for (const auto& node : g.nodes) {
    for (int j : node) {
      require(j >= 0, errc::index_out_of_range, "negative predictor index in node");
      require(seen.insert(j).second, errc::overlapping_groups,
              "predictor index appears in two nodes");
    }
  }
  for (const auto& [a, b] : g.edges) {
    require(a >= 0 && a < g.node_count() && b >= 0 && b < g.node_count(),
            errc::index_out_of_range, "edge endpoint outside node range");
  }
  require(!has_cycle(g), errc::cyclic_graph, "hierarchy graph has a directed cycle");
}

bool is_tree(const HierarchyGraph& g) {
  if (has_cycle(g)) return false;
  std::vector<int> indeg(g.node_count(), 0);
  for (const auto& [a, b] : g.edges) {
    (void)a;
    if (++indeg[b] > 1) return false;
  }
  return true;
}

std::vector<int> node_ancestors(const HierarchyGraph& g, int node) {
  require(node >= 0 && node < g.node_count(), errc::index_out_of_range, "bad node id");
  return reach(parents_of(g), node);
}

std::vector<int> node_descendants(const HierarchyGraph& g, int node) {
  require(node >= 0 && node < g.node_count(), errc::index_out_of_range, "bad node id");
  return reach(children_of(g), node);
}

Grouping compile_penalty(const HierarchyGraph& g, int p,
                         const std::vector<double>& gamma,
                         const std::vector<double>& weights) {
  validate_graph(g);
  const int m = g.node_count();
  require(gamma.empty() || int(gamma.size()) == m, errc::dimension_mismatch,
          "need one norm per node");
  require(weights.empty() || int(weights.size()) == m, errc::dimension_mismatch,
          "need one weight per node");

  Grouping out;
  out.gamma0 = 1.0;
  std::vector<char> covered(p, 0);
  for (int v = 0; v < m; ++v) {
    std::vector<int> idx = g.nodes[v];
    for (int d : node_descendants(g, v))
      idx.insert(idx.end(), g.nodes[d].begin(), g.nodes[d].end());
    std::sort(idx.begin(), idx.end());
    require(idx.empty() || idx.back() < p, errc::index_out_of_range,
            "node index beyond p");
    for (int j : idx) covered[j] = 1;
    out.groups.push_back(std::move(idx));
    out.gamma.push_back(gamma.empty() ? inf_norm : gamma[v]);
    out.weights.push_back(weights.empty() ? 1.0 : weights[v]);
  }
  for (int j = 0; j < p; ++j)
    if (!covered[j]) {
      out.groups.push_back({j});
      out.gamma.push_back(inf_norm);
      out.weights.push_back(1.0);
    }
  validate_grouping(out, p);
  return out;
}

bool validate_hierarchy_condition(const Grouping& g, const std::vector<int>& i1,
                                  const std::vector<int>& i2) {
  require(!i1.empty() && !i2.empty(), errc::empty_group, "index sets must be nonempty");
  if (g.gamma0 != 1.0) return false;
  for (double gm : g.gamma)
    if (gm <= 1.0) return false;

  const auto contains_all = [](const std::vector<int>& grp, const std::vector<int>& s) {
    return std::all_of(s.begin(), s.end(), [&](int j) {
      return std::find(grp.begin(), grp.end(), j) != grp.end();
    });
  };
  bool some_i2_without_i1 = false;
  for (const auto& grp : g.groups) {
    const bool c1 = contains_all(grp, i1);
    const bool c2 = contains_all(grp, i2);
    if (c1 && !c2) return false;
    if (c2 && !c1) some_i2_without_i1 = true;
  }
  return some_i2_without_i1;
}

HierarchyGraph build_anova_graph(int d) {
  require(d >= 2, errc::invalid_shape, "need at least two factors");
  HierarchyGraph g;
  for (int i = 0; i < d; ++i) g.nodes.push_back({i});
  int next = d;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      g.nodes.push_back({next});
      g.edges.emplace_back(i, int(g.nodes.size()) - 1);
      g.edges.emplace_back(j, int(g.nodes.size()) - 1);
      ++next;
    }
  return g;
}

WaveletDesign build_haar_tree(int levels, int time_points) {
  require(levels >= 1, errc::invalid_shape, "need at least one level");
  require(time_points >= (1 << levels), errc::invalid_shape,
          "need at least 2^levels time points");
  const int p = (1 << levels) - 1;
  WaveletDesign out;
  out.x = Eigen::MatrixXd::Zero(time_points, p);
  int col = 0;
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < (1 << i); ++j, ++col) {
      const double lo = double(j) / (1 << i);
      const double mid = double(2 * j + 1) / (1 << (i + 1));
      const double hi = double(j + 1) / (1 << i);
      for (int k = 0; k < time_points; ++k) {
        const double t = (k + 0.5) / time_points;
        if (t >= lo && t < mid)
          out.x(k, col) = -1.0;
        else if (t >= mid && t < hi)
          out.x(k, col) = 1.0;
      }
      out.tree.nodes.push_back({col});
      if (i > 0) {
        const int parent = (1 << (i - 1)) - 1 + j / 2;
        out.tree.edges.emplace_back(parent, col);
      }
    }
  }
  return out;
}

std::set<int> ancestral_closure(const std::set<int>& selected, const HierarchyGraph& g) {
  std::vector<int> owner;
  for (int v = 0; v < g.node_count(); ++v)
    for (int j : g.nodes[v]) {
      if (j >= int(owner.size())) owner.resize(j + 1, -1);
      owner[j] = v;
    }
  std::set<int> out = selected;
  for (int j : selected) {
    require(j >= 0 && j < int(owner.size()) && owner[j] >= 0, errc::unknown_index,
            "selected predictor belongs to no node");
    for (int a : node_ancestors(g, owner[j]))
      out.insert(g.nodes[a].begin(), g.nodes[a].end());
  }
  return out;
}

int hierarchy_gap(const std::set<int>& selected, const HierarchyGraph& g) {
  const std::set<int> closure = ancestral_closure(selected, g);
  return int(closure.size()) - int(selected.size());
}

std::set<int> support(const Eigen::VectorXd& beta, double tol) {
  std::set<int> out;
  for (int j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > tol) out.insert(j);
  return out;
}

}  // namespace cap
