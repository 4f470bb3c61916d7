#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cap/blasso.hpp"
#include "cap/hierarchy.hpp"
#include "cap/path.hpp"

namespace cap {

// ---- generators -----------------------------------------------------------

// Grouped-factor design: K latent factors Z with cov(Z_k,Z_k') = 2, 1, 0 for
// |k-k'| = 0, 1, >1; X_j = Z_{k(j)} + eta_j with cov(eta_j,eta_j') =
// 4*0.95^|j-j'| over the global predictor index. Predictors are contiguous
// blocks of `group_size` per factor; var(X_j) = 6, adjacent same-group
// covariance 2 + 4*0.95.
struct GroupedFactorDraw {
  Eigen::MatrixXd x;      // n x (k_groups*group_size)
  Eigen::MatrixXd sigma;  // analytic cov(X), p x p
  Grouping true_groups;   // contiguous blocks, infinity norm, weight 1
};
GroupedFactorDraw gen_grouped_factor(int k_groups, int group_size, int n, std::uint64_t seed);

// Fixed coefficient profile (1-based j): 0.10*(1+0.9^(j-1)) for j in 1..10,
// 0.04*(1+0.9^(j-11)) for 11..20, 0.01*(1+0.9^(j-21)) for 21..30, 0 after.
Eigen::VectorXd gen_beta_411(int p);

// Random coefficients with Laplace marginals of standard deviation alpha
// (density sqrt(2)/(2*alpha) * exp(-sqrt(2)|x|/alpha)); "grouped" draws one
// value per group shared by its members, "individual" one per predictor.
enum class LaplaceScheme { grouped, individual };
Eigen::VectorXd gen_laplace_beta(LaplaceScheme scheme, int k_groups, int group_size,
                                 double alpha, std::uint64_t seed);

// E[beta' Sigma beta] in closed form for the grouped-factor covariance and a
// Laplace coefficient scheme (used to pin the alpha calibration).
double laplace_signal_power(LaplaceScheme scheme, int k_groups, int group_size, double alpha);

// Two-way ANOVA family: d iid N(0,1) main effects, all d(d-1)/2 products as
// interaction columns (population covariance of the 55 columns is the
// identity for d = 10). Interaction strength levels fix the first main
// effects at (7,2,1,1,0,...) and the named interaction coefficients.
enum class AnovaLevel { none, weak, moderate, strong, very_strong };
struct AnovaDraw {
  Eigen::MatrixXd x;
  Eigen::VectorXd beta;
  HierarchyGraph graph;
  double snr = 0.0;  // reported convention: (||beta_main||^2 + 3*||beta_int||^2)/sigma^2
};
AnovaDraw gen_anova(int d, AnovaLevel level, int n, double sigma, std::uint64_t seed);

// Haar-tree design stacked `replicate_sets` times; sigma is derived from the
// requested signal-to-noise ratio against the deterministic design second
// moment x'x/n (so doubling beta doubles sigma).
struct WaveletDraw {
  Eigen::MatrixXd x;   // (time_points*replicate_sets) x (2^levels - 1)
  Eigen::MatrixXd sigma;  // x'x/n, the fixed-design second moment
  Eigen::VectorXd beta;
  HierarchyGraph tree;
  double sigma_noise = 0.0;
};
WaveletDraw gen_wavelet(const Eigen::VectorXd& beta_tree, double snr, int replicate_sets,
                        int levels = 4, int time_points = 16);

// (beta_hat - beta)' Sigma (beta_hat - beta), both in raw predictor units.
double model_error(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true,
                   const Eigen::MatrixXd& sigma);

// ---- experiment harness ---------------------------------------------------

struct ArmSpec {
  std::string name;                // defaults to solver/grouping/selection slug
  std::string solver = "lasso";    // lasso | ilasso | icap | hicap | blasso
  std::string grouping = "none";   // none | true | pam | singleton | compiled
  double k_ratio = 1.0;            // pam cluster count = round(k_ratio * k_groups)
  double gamma = inf_norm;         // group norm for blasso arms
  double gamma0 = 1.0;
  std::string selection = "cv";    // cv | aicc
  int folds = 10;
  std::string cv_scheme = "random";  // random | balanced
  bool normalize_groups = false;
  BlassoConfig blasso;
};

struct ExperimentSpec {
  std::string family = "grouped";  // grouped | anova | wavelet
  int n = 80;
  int k_groups = 10, group_size = 10;
  double sigma = 3.0;
  std::string beta_scheme = "fixed411";  // fixed411 | laplace_grouped | laplace_individual
  double alpha = 0.1;
  int anova_d = 10;
  std::string anova_level = "moderate";
  std::vector<double> wavelet_beta;      // 2^levels - 1 entries
  double snr = 0.4;
  int replicate_sets = 5, levels = 4, time_points = 16;
  int replications = 50;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<ArmSpec> arms;

  int p() const;
};

struct RepRecord {
  double model_error = 0.0;
  double lambda = 0.0;
  int n_selected = 0;
  int n_selected_groups = -1;  // true groups hit; -1 when family has none
  int df = -1;                 // -1 when unavailable (blasso)
  int hierarchy_gap = -1;      // -1 when family has no hierarchy
};

struct ArmReport {
  ArmSpec arm;
  std::vector<RepRecord> reps;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ArmReport> arms;
};

// Runs every (arm, replication) cell; per-replication data are drawn from
// seeds derived as mix_seed(seed, rep), so reports are identical for identical
// specs regardless of jobs. Replications may run on jobs > 1 threads.
ExperimentReport run_experiment(const ExperimentSpec& spec);

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean over replications
};
MetricSummary summarize(const std::vector<double>& values);

}  // namespace cap
