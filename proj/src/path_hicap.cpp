#include <algorithm>
#include <cmath>

#include "cap/dataset.hpp"
#include "cap/internal/path_common.hpp"
#include "cap/path.hpp"

// Exact homotopy for the compiled tree penalty T = sum_v max_{j in subtree(v)} |beta_j|.
// The solution partitions the forest into supernodes: connected node sets whose
// predictors share one magnitude. An active supernode S is pinned like a
// max-norm group with budget lambda * #nodes(S): its r predictors carry the
// mass of every node term of S, its u predictors have zero residual
// correlation. The zero region is pooled by tree-PAVA on per-node correlation
// mass (merge parent/child blocks while avg(parent) < avg(child)); the top
// zero blocks activate when their per-node average reaches lambda. Splits
// (a lower subtree's pinned mass falls to lambda * its node count) and merges
// (a child supernode's magnitude catches its parent's) keep the active region
// an upper set of the forest, which is what makes every reported support
// respect the hierarchy.
namespace cap {

namespace {

Eigen::VectorXi corr_signs(const Eigen::VectorXd& c) {
  Eigen::VectorXi s(c.size());
  for (int j = 0; j < c.size(); ++j)
    s[j] = std::abs(c[j]) <= path_zero_tol ? 0 : (c[j] > 0 ? 1 : -1);
  return s;
}

struct ActiveBlock {
  std::vector<int> nodes;  // connected in the forest
  std::vector<int> r, u;   // predictor split
};

struct ZeroBlock {
  std::vector<int> nodes;
  std::vector<int> preds;
  int top = -1;     // node whose parent is outside the block
  double sum = 0;   // sum of |c_j| over preds
  double dsum = 0;  // forward derivative of sum along the step
};

}  // namespace

RegularizationPath hicap_path(const Dataset& ds, const HierarchyGraph& graph) {
  const int n = ds.n();
  const int p = ds.p();
  require(ds.standardized || x_standardized(ds), errc::data_error,
          "design columns must be standardized");
  validate_graph(graph);
  require(is_tree(graph), errc::not_a_tree, "hierarchy must be a forest");

  // forest over nodes; uncovered predictors become isolated root nodes
  std::vector<std::vector<int>> node_preds = graph.nodes;
  std::vector<int> parent(node_preds.size(), -1);
  for (const auto& [a, b] : graph.edges) parent[b] = a;
  {
    std::vector<char> covered(p, 0);
    for (const auto& preds : node_preds)
      for (int j : preds) {
        require(j < p, errc::index_out_of_range, "node predictor beyond p");
        covered[j] = 1;
      }
    for (int j = 0; j < p; ++j)
      if (!covered[j]) {
        node_preds.push_back({j});
        parent.push_back(-1);
      }
  }
  const int nn = int(node_preds.size());
  std::vector<int> node_of(p, -1);
  std::vector<std::vector<int>> children(nn);
  for (int v = 0; v < nn; ++v) {
    for (int j : node_preds[v]) node_of[j] = v;
    if (parent[v] >= 0) children[parent[v]].push_back(v);
  }

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  const Eigen::VectorXd c0 = ds.x.transpose() * ds.y;

  RegularizationPath path;
  path.solver = "hicap";
  path.fingerprint = dataset_fingerprint(ds);

  std::vector<ActiveBlock> act;
  std::vector<double> sgn(p, 0.0);
  std::vector<char> node_active(nn, 0);

  // nodes of one active block below `v` (v included), following block membership
  const auto block_subtree = [&](const ActiveBlock& blk, int v) {
    std::vector<char> in(nn, 0);
    for (int w : blk.nodes) in[w] = 1;
    std::vector<int> out, stack{v};
    while (!stack.empty()) {
      const int w = stack.back();
      stack.pop_back();
      out.push_back(w);
      for (int ch : children[w])
        if (in[ch]) stack.push_back(ch);
    }
    return out;
  };

  // fresh tree-PAVA over the zero region at the current correlations; this is
  // the exact isotonic fit (decreasing toward the leaves), so each parent
  // block average dominates its child blocks and the root block of every zero
  // subtree carries the largest rootward-closed average in that subtree.
  // children are processed before parents, and a node absorbs its largest
  // violating child block first; absorbing in any other order over-pools.
  // exact average ties (the state right after a drift event) are broken by
  // the forward derivative so the structure is the one valid just below the
  // current lambda.
  const auto pool_zero_region = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& cd) {
    const auto exceeds = [](double avg_a, double davg_a, double avg_b, double davg_b) {
      if (avg_a > avg_b + path_tie_tol) return true;
      if (avg_a < avg_b - path_tie_tol) return false;
      return davg_a > davg_b;
    };
    std::vector<int> order, stack;
    for (int v = 0; v < nn; ++v)
      if (!node_active[v] && (parent[v] < 0 || node_active[parent[v]])) stack.push_back(v);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (int ch : children[v])
        if (!node_active[ch]) stack.push_back(ch);
    }
    std::vector<ZeroBlock> zs;
    std::vector<std::vector<int>> kids;  // block id -> exposed child blocks
    std::vector<int> top_block(nn, -1);
    std::vector<char> absorbed;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int v = *it;
      ZeroBlock b;
      b.nodes = {v};
      b.preds = node_preds[v];
      b.top = v;
      for (int j : node_preds[v]) {
        b.sum += std::abs(c[j]);
        b.dsum += c[j] > 0.0 ? cd[j] : c[j] < 0.0 ? -cd[j] : std::abs(cd[j]);
      }
      std::vector<int> ks;
      for (int ch : children[v])
        if (!node_active[ch]) ks.push_back(top_block[ch]);
      for (;;) {
        int best = -1;
        double best_avg = b.sum / double(b.nodes.size());
        double best_davg = b.dsum / double(b.nodes.size());
        for (size_t i = 0; i < ks.size(); ++i) {
          const auto& kb = zs[ks[i]];
          const double avg = kb.sum / double(kb.nodes.size());
          const double davg = kb.dsum / double(kb.nodes.size());
          if (exceeds(avg, davg, best_avg, best_davg)) {
            best_avg = avg;
            best_davg = davg;
            best = int(i);
          }
        }
        if (best < 0) break;
        const int k = ks[best];
        b.nodes.insert(b.nodes.end(), zs[k].nodes.begin(), zs[k].nodes.end());
        b.preds.insert(b.preds.end(), zs[k].preds.begin(), zs[k].preds.end());
        b.sum += zs[k].sum;
        b.dsum += zs[k].dsum;
        ks.erase(ks.begin() + best);
        ks.insert(ks.end(), kids[k].begin(), kids[k].end());
        absorbed[k] = 1;
      }
      top_block[v] = int(zs.size());
      zs.push_back(std::move(b));
      kids.push_back(std::move(ks));
      absorbed.push_back(0);
    }
    std::vector<ZeroBlock> out;
    for (size_t k = 0; k < zs.size(); ++k)
      if (!absorbed[k]) out.push_back(std::move(zs[k]));
    return out;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double lambda = 0.0;
  for (const auto& b : pool_zero_region(c0, Eigen::VectorXd::Zero(p)))
    lambda = std::max(lambda, b.sum / b.nodes.size());
  if (lambda <= path_zero_tol) {
    path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
    return path;
  }
  path.breakpoints.push_back({lambda, beta, {}, {}, corr_signs(c0), 0});

  const auto push = [&](double lam, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    if (lam >= path.breakpoints.back().lambda) return;
    std::vector<int> nodes_active;
    std::vector<GroupState> st;
    int df = 0;
    for (const auto& blk : act) {
      nodes_active.insert(nodes_active.end(), blk.nodes.begin(), blk.nodes.end());
      int top = blk.nodes.front();
      std::vector<char> in(nn, 0);
      for (int w : blk.nodes) in[w] = 1;
      for (int w : blk.nodes)
        if (parent[w] < 0 || !in[parent[w]]) top = w;
      GroupState s{top, blk.r, blk.u};
      std::sort(s.r.begin(), s.r.end());
      std::sort(s.u.begin(), s.u.end());
      df += 1 + int(s.u.size());
      st.push_back(std::move(s));
    }
    std::sort(nodes_active.begin(), nodes_active.end());
    std::sort(st.begin(), st.end(),
              [](const GroupState& a, const GroupState& b) { return a.group < b.group; });
    path.breakpoints.push_back({lam, b, nodes_active, st, corr_signs(c), df});
  };

  int just_moved = -1;        // predictor excluded from r<->u flips at zero length
  int last_split_edge = -1;   // child node of the edge split at the current lambda
  int last_merge_edge = -1;   // child node of the edge merged at the current lambda
  std::vector<char> just_dropped_node(nn, 0);
  const long cap = 400L * (p + nn) + 2000;
  for (long iter = 0; iter < cap; ++iter) {
    const int na = int(act.size());
    int m = na;
    std::vector<std::pair<int, int>> upos;  // (block, predictor)
    for (int a = 0; a < na; ++a)
      for (int j : act[a].u) upos.emplace_back(a, j);
    m += int(upos.size());

    Eigen::MatrixXd colsm = Eigen::MatrixXd::Zero(p, m);
    Eigen::VectorXd rhs(m), unit = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < na; ++a) {
      double sc = 0.0;
      for (int j : act[a].r) {
        colsm(j, a) = sgn[j];
        sc += sgn[j] * c0[j];
      }
      const double w = double(act[a].nodes.size());
      rhs[a] = sc - lambda * w;
      unit[a] = w;
    }
    for (size_t i = 0; i < upos.size(); ++i) {
      colsm(upos[i].second, na + int(i)) = 1.0;
      rhs[na + int(i)] = c0[upos[i].second];
    }
    const Eigen::MatrixXd ww = colsm.transpose() * gram * colsm;
    const auto sol = detail::solve_gram(ww, rhs);
    const auto dir = detail::solve_gram(ww, unit);
    if (!sol.ok || !dir.ok) {
      if (m >= n) return path;  // saturated: centered columns span at most n-1 dims
      fail(errc::degenerate_design, "pinned system is numerically singular");
    }
    beta = colsm * sol.z;
    const Eigen::VectorXd bdot = colsm * dir.z;
    const Eigen::VectorXd c = c0 - gram * beta;
    const Eigen::VectorXd cdot = -gram * bdot;

    const auto zero_blocks = pool_zero_region(c, cdot);
    std::vector<int> block_of(nn, -1);
    for (int a = 0; a < na; ++a)
      for (int v : act[a].nodes) block_of[v] = a;

    detail::EventQueue q;
    q.offer(lambda, 6);  // offered first so ties at the floor end the path

    // a boundary left by the previous zero-length event is still touching, so
    // its reverse event is suppressed at zero length but kept at a real step
    const auto offer_guarded = [&](double delta, int kind, int a, int b, bool touched) {
      if (touched && !(delta > path_tie_tol)) return;
      q.offer(delta, kind, a, b);
    };

    for (int a = 0; a < na; ++a)  // kind 0: supernode magnitude falls to zero
      if (dir.z[a] < 0.0) q.offer(-sol.z[a] / dir.z[a], 0, a);

    for (int a = 0; a < na; ++a) {  // kind 1: child supernode catches its parent
      std::vector<char> in(nn, 0);
      for (int v : act[a].nodes) in[v] = 1;
      int top = act[a].nodes.front();
      for (int v : act[a].nodes)
        if (parent[v] < 0 || !in[parent[v]]) top = v;
      if (parent[top] < 0 || block_of[parent[top]] < 0) continue;
      const int s = block_of[parent[top]];
      const double gap = sol.z[s] - sol.z[a];
      const double closing = dir.z[a] - dir.z[s];
      if (closing > 0.0) offer_guarded(gap / closing, 1, a, top, top == last_split_edge);
    }

    for (int a = 0; a < na; ++a) {  // kind 2: lower subtree's mass falls to lambda * nodes
      std::vector<char> in(nn, 0);
      for (int v : act[a].nodes) in[v] = 1;
      std::vector<char> is_r(p, 0);
      for (int j : act[a].r) is_r[j] = 1;
      for (int v : act[a].nodes) {
        if (parent[v] < 0 || !in[parent[v]]) continue;
        const auto sub = block_subtree(act[a], v);
        double g0 = 0.0, gdot = 0.0;
        int nr_sub = 0;
        for (int w : sub)
          for (int j : node_preds[w])
            if (is_r[j]) {
              g0 += sgn[j] * c[j];
              gdot += sgn[j] * cdot[j];
              ++nr_sub;
            }
        // a split that would strip the remainder of every pinned predictor
        // can only balance at lambda = 0, so it is never an interior event
        if (nr_sub == int(act[a].r.size())) continue;
        const double wt = double(sub.size());
        if (gdot + wt < 0.0)
          offer_guarded((lambda * wt - g0) / (gdot + wt), 2, a, v, v == last_merge_edge);
      }
    }

    for (int a = 0; a < na; ++a) {  // kind 3: pinned correlation hits zero
      if (act[a].r.size() < 2) continue;
      std::vector<char> is_r(p, 0);
      for (int j : act[a].r) is_r[j] = 1;
      for (int j : act[a].r) {
        const double tdot = sgn[j] * cdot[j];
        if (!(tdot < 0.0)) continue;
        // the owner node must keep a pinned predictor in its own subtree
        bool covered_owner = false;
        for (int w : block_subtree(act[a], node_of[j]))
          for (int jj : node_preds[w])
            if (jj != j && is_r[jj]) covered_owner = true;
        if (covered_owner)
          offer_guarded(-sgn[j] * c[j] / tdot, 3, a, j, j == just_moved);
      }
    }

    for (int a = 0; a < na; ++a) {  // kind 4: free coefficient hits the magnitude
      const double mk = sol.z[a];
      const double mdot = dir.z[a];
      for (int j : act[a].u) {
        const bool jm = j == just_moved;
        if (bdot[j] - mdot > 0.0)
          offer_guarded((mk - beta[j]) / (bdot[j] - mdot), 4, a, j, jm);
        if (bdot[j] + mdot < 0.0)
          offer_guarded(-(beta[j] + mk) / (bdot[j] + mdot), 4, a, -j - 1, jm);
      }
    }

    for (size_t zi = 0; zi < zero_blocks.size(); ++zi) {  // kind 5: zero block activates
      const auto& b = zero_blocks[zi];
      const int pt = parent[b.top];
      if (pt >= 0 && block_of[pt] < 0) continue;  // shielded by a zero block above
      double min_delta = 0.0;
      for (int v : b.nodes)
        if (just_dropped_node[v]) min_delta = path_tie_tol;
      const int q_sz = int(b.preds.size());
      Eigen::VectorXd cg(q_sz), cgdot(q_sz), coef(q_sz);
      for (int i = 0; i < q_sz; ++i) {
        cg[i] = c[b.preds[i]];
        cgdot[i] = cdot[b.preds[i]];
        coef[i] = 1.0 / double(b.nodes.size());
      }
      const auto root =
          detail::first_piecewise_root(cg, cgdot, coef, -lambda, 1.0, min_delta, lambda);
      if (root) q.offer(*root, 5, int(zi));
    }

    // kind 7 (null): the zero-region pooling changes inside the step
    {
      std::vector<int> zb_of(nn, -1);
      for (size_t zi = 0; zi < zero_blocks.size(); ++zi)
        for (int v : zero_blocks[zi].nodes) zb_of[v] = int(zi);
      const auto avg_terms = [&](const std::vector<int>& preds, double coef_val,
                                 Eigen::VectorXd& cg, Eigen::VectorXd& cgdot,
                                 Eigen::VectorXd& coef, int at) {
        for (int j : preds) {
          cg[at] = c[j];
          cgdot[at] = cdot[j];
          coef[at] = coef_val;
          ++at;
        }
        return at;
      };
      // (a) adjacent zero blocks: averages cross
      std::vector<std::pair<int, int>> pairs;
      for (int v = 0; v < nn; ++v) {
        if (zb_of[v] < 0 || parent[v] < 0 || zb_of[parent[v]] < 0) continue;
        if (zb_of[v] == zb_of[parent[v]]) continue;
        pairs.emplace_back(zb_of[parent[v]], zb_of[v]);
      }
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      // the crossing is searched with a +tie offset: a pair left exactly tied
      // by a just-applied drift event then starts strictly positive, so the
      // zero-length re-offer is impossible while a real future crossing (the
      // gap dipping below -tie) is still caught
      for (const auto& [pb, cb] : pairs) {
        const auto& bp = zero_blocks[pb];
        const auto& bc = zero_blocks[cb];
        const int tsz = int(bp.preds.size() + bc.preds.size());
        Eigen::VectorXd cg(tsz), cgdot(tsz), coef(tsz);
        int at = avg_terms(bp.preds, 1.0 / double(bp.nodes.size()), cg, cgdot, coef, 0);
        avg_terms(bc.preds, -1.0 / double(bc.nodes.size()), cg, cgdot, coef, at);
        const auto root = detail::first_piecewise_root(cg, cgdot, coef, path_tie_tol, 0.0,
                                                       path_tie_tol, lambda);
        if (root) q.offer(*root, 7);
      }
      // (b) a pooled zero block wants to split at an internal edge
      for (const auto& b : zero_blocks) {
        if (b.nodes.size() < 2) continue;
        std::vector<char> in(nn, 0);
        for (int v : b.nodes) in[v] = 1;
        for (int v : b.nodes) {
          if (parent[v] < 0 || !in[parent[v]]) continue;
          std::vector<int> low, stack{v};
          while (!stack.empty()) {
            const int w = stack.back();
            stack.pop_back();
            low.push_back(w);
            for (int ch : children[w])
              if (in[ch]) stack.push_back(ch);
          }
          std::vector<char> in_low(nn, 0);
          for (int w : low) in_low[w] = 1;
          std::vector<int> lo_preds, hi_preds;
          for (int w : b.nodes)
            for (int j : node_preds[w])
              (in_low[w] ? lo_preds : hi_preds).push_back(j);
          const int tsz = int(lo_preds.size() + hi_preds.size());
          Eigen::VectorXd cg(tsz), cgdot(tsz), coef(tsz);
          int at = avg_terms(lo_preds, 1.0 / double(low.size()), cg, cgdot, coef, 0);
          avg_terms(hi_preds, -1.0 / double(b.nodes.size() - low.size()), cg, cgdot, coef,
                    at);
          // same +tie offset as above so a freshly tied edge cannot loop
          const auto root = detail::first_piecewise_root(cg, cgdot, coef, path_tie_tol,
                                                         0.0, path_tie_tol, lambda);
          if (root) q.offer(*root, 7);
        }
      }
    }

    const auto ev = q.pick();
    require(bool(ev), errc::degenerate_design, "no feasible step");
    const double delta = std::min(ev->delta, lambda);
    const double lambda_new = lambda - delta;
    beta += delta * bdot;
    if (ev->kind == 0)
      for (int v : act[ev->a].nodes)
        for (int j : node_preds[v]) beta[j] = 0.0;
    if (ev->kind != 7) push(lambda_new, beta, c + delta * cdot);
    if (delta > path_tie_tol) {
      just_moved = -1;
      last_split_edge = last_merge_edge = -1;
      std::fill(just_dropped_node.begin(), just_dropped_node.end(), 0);
    }

    switch (ev->kind) {
      case 6:
        return path;
      case 0: {  // deactivate: block joins the zero region
        for (int v : act[ev->a].nodes) {
          node_active[v] = 0;
          just_dropped_node[v] = 1;
          for (int j : node_preds[v]) sgn[j] = 0.0;
        }
        act.erase(act.begin() + ev->a);
        break;
      }
      case 1: {  // merge child block into its parent block
        const int a = ev->a;
        const int s = block_of[parent[ev->b]];
        act[s].nodes.insert(act[s].nodes.end(), act[a].nodes.begin(), act[a].nodes.end());
        act[s].r.insert(act[s].r.end(), act[a].r.begin(), act[a].r.end());
        act[s].u.insert(act[s].u.end(), act[a].u.begin(), act[a].u.end());
        act.erase(act.begin() + a);
        last_merge_edge = ev->b;
        break;
      }
      case 2: {  // split the subtree below the edge into its own block
        const int a = ev->a;
        const int v = ev->b;
        const auto sub = block_subtree(act[a], v);
        std::vector<char> in_sub(nn, 0);
        for (int w : sub) in_sub[w] = 1;
        ActiveBlock nb;
        nb.nodes = sub;
        const auto belongs = [&](int j) { return in_sub[node_of[j]]; };
        auto& old = act[a];
        auto split_list = [&](std::vector<int>& src, std::vector<int>& dst) {
          std::vector<int> keep;
          for (int j : src)
            (belongs(j) ? dst : keep).push_back(j);
          src = std::move(keep);
        };
        split_list(old.r, nb.r);
        split_list(old.u, nb.u);
        old.nodes.erase(std::remove_if(old.nodes.begin(), old.nodes.end(),
                                       [&](int w) { return bool(in_sub[w]); }),
                        old.nodes.end());
        act.push_back(std::move(nb));
        last_split_edge = v;
        break;
      }
      case 3: {  // pinned -> free
        auto& blk = act[ev->a];
        blk.r.erase(std::find(blk.r.begin(), blk.r.end(), ev->b));
        blk.u.push_back(ev->b);
        just_moved = ev->b;
        break;
      }
      case 4: {  // free -> pinned
        auto& blk = act[ev->a];
        const int j = ev->b >= 0 ? ev->b : -ev->b - 1;
        sgn[j] = ev->b >= 0 ? 1.0 : -1.0;
        blk.u.erase(std::find(blk.u.begin(), blk.u.end(), j));
        blk.r.push_back(j);
        just_moved = j;
        break;
      }
      case 5: {  // a zero block activates with every predictor pinned at zero
        const auto& b = zero_blocks[ev->a];
        const Eigen::VectorXd cnow = c + delta * cdot;
        ActiveBlock nb;
        nb.nodes = b.nodes;
        for (int v : b.nodes) {
          node_active[v] = 1;
          for (int j : node_preds[v]) {
            nb.r.push_back(j);
            sgn[j] = cnow[j] >= 0 ? 1.0 : -1.0;
          }
        }
        act.push_back(std::move(nb));
        break;
      }
      case 7:
        break;  // pooling drift: recomputed fresh next iteration
    }
    lambda = lambda_new;
  }
  fail(errc::degenerate_design, "homotopy failed to make progress");
}

}  // namespace cap
