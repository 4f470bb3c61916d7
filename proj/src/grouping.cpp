#include "cap/grouping.hpp"

#include <cmath>
#include <numeric>

namespace cap {

void validate_grouping(const Grouping& g, int p) {
  require(g.gamma.size() == g.groups.size() && g.weights.size() == g.groups.size(),
          errc::dimension_mismatch, "gamma/weights must have one entry per group");
  require(g.gamma0 >= 1.0 && !std::isnan(g.gamma0), errc::invalid_norm, "gamma0 < 1");
  for (std::size_t k = 0; k < g.groups.size(); ++k) {
    require(!g.groups[k].empty(), errc::empty_group, "group " + std::to_string(k) + " is empty");
    for (int j : g.groups[k])
      require(j >= 0 && j < p, errc::index_out_of_range,
              "group " + std::to_string(k) + " references index " + std::to_string(j));
    require(g.gamma[k] >= 1.0 && !std::isnan(g.gamma[k]), errc::invalid_norm,
            "group norm < 1 is not convex");
    require(g.weights[k] > 0.0, errc::nonpositive_weight, "group weight must be positive");
  }
}

bool groups_overlap(const Grouping& g) {
  std::vector<int> seen;
  for (const auto& grp : g.groups)
    for (int j : grp) {
      if (std::size_t(j) >= seen.size()) seen.resize(j + 1, 0);
      if (seen[j]++) return true;
    }
  return false;
}

bool groups_partition(const Grouping& g, int p) {
  std::vector<int> count(p, 0);
  for (const auto& grp : g.groups)
    for (int j : grp) {
      if (j < 0 || j >= p) return false;
      ++count[j];
    }
  for (int c : count)
    if (c != 1) return false;
  return true;
}

Grouping singleton_grouping(int p, double gamma, double gamma0) {
  Grouping g;
  g.gamma0 = gamma0;
  g.groups.reserve(p);
  for (int j = 0; j < p; ++j) g.groups.push_back({j});
  g.gamma.assign(p, gamma);
  g.weights.assign(p, 1.0);
  return g;
}

Grouping whole_grouping(int p, double gamma, double gamma0) {
  Grouping g;
  g.gamma0 = gamma0;
  g.groups.emplace_back(p);
  std::iota(g.groups[0].begin(), g.groups[0].end(), 0);
  g.gamma.assign(1, gamma);
  g.weights.assign(1, 1.0);
  return g;
}

Dataset group_normalize(const Dataset& ds, const Grouping& g) {
  validate_grouping(g, int(ds.p()));
  require(ds.standardized, errc::norm_mismatch, "group_normalize needs a standardized dataset");
  require(!groups_overlap(g), errc::overlapping_groups,
          "group_normalize is defined for nonoverlapping groups");
  require(!g.gamma.empty(), errc::empty_group, "no groups");
  const double gbar = g.gamma[0];
  for (double gm : g.gamma)
    require(gm == gbar, errc::norm_mismatch, "group_normalize needs a uniform group norm");
  require(gbar > 1.0, errc::invalid_norm, "conjugate exponent of gamma = 1 is unbounded");

  // conjugate exponent; infinity norm gives gbar* = 1 (divide by q_k).
  const double conj = std::isinf(gbar) ? 1.0 : gbar / (gbar - 1.0);

  Dataset out = ds;
  for (std::size_t k = 0; k < g.groups.size(); ++k) {
    const double f = std::pow(double(g.groups[k].size()), 1.0 / conj);
    for (int j : g.groups[k]) {
      out.x.col(j) /= f;
      out.col_scale[j] *= f;
    }
  }
  return out;
}

}  // namespace cap
