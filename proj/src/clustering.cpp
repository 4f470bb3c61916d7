#include "cap/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "cap/error.hpp"
#include "cap/rng.hpp"

namespace cap {

Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& x) {
  const int n = int(x.rows()), p = int(x.cols());
  require(n >= 2 && p >= 1, errc::invalid_shape, "need at least two rows");
  Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  Eigen::VectorXd sd = c.colwise().norm();
  for (int j = 0; j < p; ++j)
    require(sd[j] > 1e-12, errc::constant_column,
            "column " + std::to_string(j) + " has zero variance");
  c.array().rowwise() /= sd.transpose().array();
  Eigen::MatrixXd d = 1.0 - (c.transpose() * c).array().abs();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return (d + d.transpose()) / 2.0;
}

double clustering_cost(const Eigen::MatrixXd& distances, const std::vector<int>& medoids) {
  const int p = int(distances.rows());
  double total = 0.0;
  for (int i = 0; i < p; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int m : medoids) best = std::min(best, distances(i, m));
    total += best;
  }
  return total;
}

namespace {

// Uniform choice among candidates whose cost ties the best within 1e-12.
int pick_tied(const std::vector<int>& cand, const std::vector<double>& cost,
              std::mt19937_64& rng) {
  double best = *std::min_element(cost.begin(), cost.end());
  std::vector<int> tied;
  for (size_t i = 0; i < cand.size(); ++i)
    if (cost[i] <= best + 1e-12) tied.push_back(cand[i]);
  if (tied.size() == 1) return tied[0];
  std::uniform_int_distribution<size_t> u(0, tied.size() - 1);
  return tied[u(rng)];
}

}  // namespace

std::vector<int> pam_cluster(const Eigen::MatrixXd& distances, int k, std::uint64_t seed) {
  const int p = int(distances.rows());
  require(distances.cols() == p, errc::invalid_shape, "distance matrix must be square");
  for (int i = 0; i < p; ++i) {
    require(std::abs(distances(i, i)) <= 1e-12, errc::invalid_shape,
            "distance matrix needs a zero diagonal");
    for (int j = i + 1; j < p; ++j)
      require(std::abs(distances(i, j) - distances(j, i)) <= 1e-12, errc::invalid_shape,
              "distance matrix must be symmetric");
  }
  require(k >= 1 && k <= p, errc::invalid_k, "k must lie in [1, p]");

  auto rng = make_rng(seed);
  std::vector<int> medoids;
  std::vector<char> is_medoid(p, 0);

  // BUILD
  {
    std::vector<int> cand(p);
    std::vector<double> cost(p);
    for (int j = 0; j < p; ++j) {
      cand[j] = j;
      cost[j] = distances.col(j).sum();
    }
    const int first = pick_tied(cand, cost, rng);
    medoids.push_back(first);
    is_medoid[first] = 1;
  }
  Eigen::VectorXd nearest = distances.col(medoids[0]);
  while (int(medoids.size()) < k) {
    std::vector<int> cand;
    std::vector<double> cost;
    for (int j = 0; j < p; ++j) {
      if (is_medoid[j]) continue;
      cand.push_back(j);
      cost.push_back(nearest.cwiseMin(distances.col(j)).sum());
    }
    const int next = pick_tied(cand, cost, rng);
    medoids.push_back(next);
    is_medoid[next] = 1;
    nearest = nearest.cwiseMin(distances.col(next));
  }

  // SWAP: best-improving exchange until none improves
  double current = clustering_cost(distances, medoids);
  for (bool improved = true; improved;) {
    improved = false;
    int best_m = -1, best_j = -1;
    double best_cost = current;
    for (size_t mi = 0; mi < medoids.size(); ++mi) {
      const int old = medoids[mi];
      for (int j = 0; j < p; ++j) {
        if (is_medoid[j]) continue;
        medoids[mi] = j;
        const double c = clustering_cost(distances, medoids);
        if (c < best_cost - 1e-12) {
          best_cost = c;
          best_m = int(mi);
          best_j = j;
        }
      }
      medoids[mi] = old;
    }
    if (best_m >= 0) {
      is_medoid[medoids[best_m]] = 0;
      is_medoid[best_j] = 1;
      medoids[best_m] = best_j;
      current = best_cost;
      improved = true;
    }
  }

  std::sort(medoids.begin(), medoids.end());
  std::vector<int> labels(p);
  for (int i = 0; i < p; ++i) {
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < medoids.size(); ++m)
      if (distances(i, medoids[m]) < best) {
        best = distances(i, medoids[m]);
        arg = int(m);
      }
    labels[i] = arg;
  }
  return labels;
}

Grouping grouping_from_labels(const std::vector<int>& labels, double gamma, double gamma0) {
  std::map<int, std::vector<int>> by_label;
  for (size_t i = 0; i < labels.size(); ++i)
    by_label[labels[i]].push_back(int(i));
  Grouping g;
  g.gamma0 = gamma0;
  for (auto& [lab, idx] : by_label) {
    g.groups.push_back(std::move(idx));
    g.gamma.push_back(gamma);
    g.weights.push_back(1.0);
  }
  validate_grouping(g, int(labels.size()));
  return g;
}

double pair_agreement(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  const size_t p = labels_a.size();
  require(labels_b.size() == p && p >= 2, errc::invalid_shape,
          "label vectors must share a length of at least two");
  size_t agree = 0, pairs = 0;
  for (size_t i = 0; i < p; ++i)
    for (size_t j = i + 1; j < p; ++j) {
      const bool same_a = labels_a[i] == labels_a[j];
      const bool same_b = labels_b[i] == labels_b[j];
      agree += same_a == same_b;
      ++pairs;
    }
  return double(agree) / double(pairs);
}

}  // namespace cap
