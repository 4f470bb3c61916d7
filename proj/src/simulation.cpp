#include "cap/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "cap/clustering.hpp"
#include "cap/model_selection.hpp"
#include "cap/rng.hpp"

namespace cap {

namespace {

// cov(X) for the grouped-factor design: latent tri-band part plus the
// AR-in-global-index noise part, independent of each other.
Eigen::MatrixXd grouped_factor_sigma(int k_groups, int group_size) {
  const int p = k_groups * group_size;
  Eigen::MatrixXd s(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i <= j; ++i) {
      const int dk = j / group_size - i / group_size;
      const double z = dk == 0 ? 2.0 : (dk == 1 ? 1.0 : 0.0);
      s(i, j) = s(j, i) = z + 4.0 * std::pow(0.95, j - i);
    }
  return s;
}

Eigen::MatrixXd gaussian_matrix(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = gauss(rng);
  return g;
}

}  // namespace

GroupedFactorDraw gen_grouped_factor(int k_groups, int group_size, int n,
                                     std::uint64_t seed) {
  require(k_groups >= 1 && group_size >= 1 && n >= 2, errc::invalid_shape,
          "need k_groups, group_size >= 1 and n >= 2");
  GroupedFactorDraw out;
  out.sigma = grouped_factor_sigma(k_groups, group_size);
  const int p = k_groups * group_size;
  Eigen::LLT<Eigen::MatrixXd> llt(out.sigma);
  require(llt.info() == Eigen::Success, errc::degenerate_design,
          "design covariance is not positive definite");
  auto rng = make_rng(seed);
  out.x = gaussian_matrix(n, p, rng) * llt.matrixL().transpose();
  for (int k = 0; k < k_groups; ++k) {
    std::vector<int> idx(group_size);
    for (int j = 0; j < group_size; ++j) idx[j] = k * group_size + j;
    out.true_groups.groups.push_back(std::move(idx));
    out.true_groups.gamma.push_back(inf_norm);
    out.true_groups.weights.push_back(1.0);
  }
  out.true_groups.gamma0 = 1.0;
  return out;
}

Eigen::VectorXd gen_beta_411(int p) {
  require(p >= 1, errc::invalid_shape, "p must be positive");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < std::min(p, 30); ++j) {
    const double base = j < 10 ? 0.10 : (j < 20 ? 0.04 : 0.01);
    beta[j] = base * (1.0 + std::pow(0.9, j % 10));
  }
  return beta;
}

Eigen::VectorXd gen_laplace_beta(LaplaceScheme scheme, int k_groups, int group_size,
                                 double alpha, std::uint64_t seed) {
  require(k_groups >= 1 && group_size >= 1, errc::invalid_shape,
          "need k_groups, group_size >= 1");
  require(alpha > 0, errc::invalid_shape, "alpha must be positive");
  const int p = k_groups * group_size;
  const double scale = alpha / std::sqrt(2.0);  // Laplace scale with sd alpha
  auto rng = make_rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  auto draw = [&] { return scale * (exp1(rng) - exp1(rng)); };
  Eigen::VectorXd beta(p);
  if (scheme == LaplaceScheme::grouped) {
    for (int k = 0; k < k_groups; ++k) {
      const double v = draw();
      for (int j = 0; j < group_size; ++j) beta[k * group_size + j] = v;
    }
  } else {
    for (int j = 0; j < p; ++j) beta[j] = draw();
  }
  return beta;
}

double laplace_signal_power(LaplaceScheme scheme, int k_groups, int group_size,
                            double alpha) {
  const Eigen::MatrixXd s = grouped_factor_sigma(k_groups, group_size);
  if (scheme == LaplaceScheme::individual) return alpha * alpha * s.trace();
  double total = 0.0;
  for (int k = 0; k < k_groups; ++k)
    total += s.block(k * group_size, k * group_size, group_size, group_size).sum();
  return alpha * alpha * total;
}

AnovaDraw gen_anova(int d, AnovaLevel level, int n, double sigma, std::uint64_t seed) {
  require(d >= 4, errc::invalid_shape, "need at least four main effects");
  require(n >= 2, errc::invalid_shape, "n must be at least 2");
  require(sigma > 0, errc::invalid_shape, "sigma must be positive");
  AnovaDraw out;
  out.graph = build_anova_graph(d);
  const int p = d + d * (d - 1) / 2;

  auto rng = make_rng(seed);
  const Eigen::MatrixXd z = gaussian_matrix(n, d, rng);
  out.x.resize(n, p);
  out.x.leftCols(d) = z;
  // interaction column for the pair (a, b), a < b, in lexicographic order
  auto rank = [d](int a, int b) { return a * d - a * (a + 1) / 2 + (b - a - 1); };
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      out.x.col(d + rank(a, b)) = z.col(a).cwiseProduct(z.col(b));

  out.beta = Eigen::VectorXd::Zero(p);
  out.beta[0] = 7.0;
  out.beta[1] = 2.0;
  out.beta[2] = 1.0;
  out.beta[3] = 1.0;
  auto inter = [&](int a, int b, double v) { out.beta[d + rank(a, b)] = v; };
  switch (level) {
    case AnovaLevel::none:
      break;
    case AnovaLevel::weak:
      inter(0, 1, 0.5);
      inter(1, 2, 0.1);
      inter(1, 3, 0.1);
      break;
    case AnovaLevel::moderate:
      inter(0, 1, 1.0);
      inter(1, 2, 0.5);
      inter(1, 3, 0.4);
      inter(2, 3, 0.1);
      break;
    case AnovaLevel::strong:
      inter(0, 1, 5.0);
      inter(1, 2, 4.0);
      inter(1, 3, 2.0);
      break;
    case AnovaLevel::very_strong:
      inter(0, 1, 7.0);
      inter(0, 2, 7.0);
      inter(0, 3, 7.0);
      inter(1, 2, 2.0);
      inter(1, 3, 2.0);
      inter(2, 3, 1.0);
      break;
  }
  const double main_sq = out.beta.head(d).squaredNorm();
  const double int_sq = out.beta.tail(p - d).squaredNorm();
  out.snr = (main_sq + 3.0 * int_sq) / (sigma * sigma);
  return out;
}

WaveletDraw gen_wavelet(const Eigen::VectorXd& beta_tree, double snr, int replicate_sets,
                        int levels, int time_points) {
  require(replicate_sets >= 1, errc::invalid_shape, "need at least one replicate set");
  require(snr > 0, errc::invalid_shape, "snr must be positive");
  WaveletDraw out;
  WaveletDesign wd = build_haar_tree(levels, time_points);
  const int p = int(wd.x.cols());
  require(int(beta_tree.size()) == p, errc::dimension_mismatch,
          "beta length must match the tree column count");
  out.tree = std::move(wd.tree);
  const int n = time_points * replicate_sets;
  out.x.resize(n, p);
  for (int r = 0; r < replicate_sets; ++r)
    out.x.middleRows(r * time_points, time_points) = wd.x;
  out.sigma = out.x.transpose() * out.x / double(n);
  out.beta = beta_tree;
  const double signal = beta_tree.dot(out.sigma * beta_tree);
  require(signal > 0, errc::invalid_shape, "signal power is zero");
  out.sigma_noise = std::sqrt(signal / snr);
  return out;
}

double model_error(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true,
                   const Eigen::MatrixXd& sigma) {
  require(beta_hat.size() == beta_true.size() && sigma.rows() == beta_hat.size() &&
              sigma.cols() == beta_hat.size(),
          errc::dimension_mismatch, "coefficient/covariance shapes disagree");
  const Eigen::VectorXd d = beta_hat - beta_true;
  return d.dot(sigma * d);
}

int ExperimentSpec::p() const {
  if (family == "grouped") return k_groups * group_size;
  if (family == "anova") return anova_d + anova_d * (anova_d - 1) / 2;
  if (family == "wavelet") return (1 << levels) - 1;
  fail(errc::config_error, "unknown family '" + family + "'");
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary out;
  if (values.empty()) return out;
  const double m = double(values.size());
  for (double v : values) out.mean += v;
  out.mean /= m;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (m - 1.0) / m);
  return out;
}

namespace {

AnovaLevel parse_level(const std::string& s) {
  if (s == "none") return AnovaLevel::none;
  if (s == "weak") return AnovaLevel::weak;
  if (s == "moderate") return AnovaLevel::moderate;
  if (s == "strong") return AnovaLevel::strong;
  if (s == "very_strong") return AnovaLevel::very_strong;
  fail(errc::config_error, "unknown anova level '" + s + "'");
}

// Everything one replication fits against, all in raw units.
struct RepData {
  Dataset ds;  // standardized
  Eigen::VectorXd beta_true;
  Eigen::MatrixXd sigma;
  Grouping true_groups;
  HierarchyGraph graph;
  bool has_groups = false, has_graph = false;
};

RepData make_rep(const ExperimentSpec& spec, int rep) {
  const std::uint64_t s = mix_seed(spec.seed, std::uint64_t(rep));
  RepData out;
  Dataset raw;
  if (spec.family == "grouped") {
    GroupedFactorDraw draw =
        gen_grouped_factor(spec.k_groups, spec.group_size, spec.n, mix_seed(s, 1));
    raw.x = std::move(draw.x);
    out.sigma = std::move(draw.sigma);
    out.true_groups = std::move(draw.true_groups);
    out.has_groups = true;
    if (spec.beta_scheme == "fixed411")
      out.beta_true = gen_beta_411(spec.p());
    else if (spec.beta_scheme == "laplace_grouped")
      out.beta_true = gen_laplace_beta(LaplaceScheme::grouped, spec.k_groups,
                                       spec.group_size, spec.alpha, mix_seed(s, 3));
    else if (spec.beta_scheme == "laplace_individual")
      out.beta_true = gen_laplace_beta(LaplaceScheme::individual, spec.k_groups,
                                       spec.group_size, spec.alpha, mix_seed(s, 3));
    else
      fail(errc::config_error, "unknown beta scheme '" + spec.beta_scheme + "'");
  } else if (spec.family == "anova") {
    AnovaDraw draw = gen_anova(spec.anova_d, parse_level(spec.anova_level), spec.n,
                               spec.sigma, mix_seed(s, 1));
    raw.x = std::move(draw.x);
    out.beta_true = std::move(draw.beta);
    out.graph = std::move(draw.graph);
    out.has_graph = true;
    out.sigma = Eigen::MatrixXd::Identity(spec.p(), spec.p());
  } else if (spec.family == "wavelet") {
    require(int(spec.wavelet_beta.size()) == spec.p(), errc::config_error,
            "wavelet_beta must have 2^levels - 1 entries");
    Eigen::VectorXd wb = Eigen::Map<const Eigen::VectorXd>(spec.wavelet_beta.data(),
                                                           spec.p());
    WaveletDraw draw =
        gen_wavelet(wb, spec.snr, spec.replicate_sets, spec.levels, spec.time_points);
    raw.x = std::move(draw.x);
    out.beta_true = std::move(draw.beta);
    out.graph = std::move(draw.tree);
    out.has_graph = true;
    out.sigma = std::move(draw.sigma);
  } else {
    fail(errc::config_error, "unknown family '" + spec.family + "'");
  }

  const double noise = spec.family == "wavelet"
                           ? std::sqrt(out.beta_true.dot(out.sigma * out.beta_true) /
                                       spec.snr)
                           : spec.sigma;
  auto rng = make_rng(mix_seed(s, 2));
  std::normal_distribution<double> gauss(0.0, 1.0);
  raw.y = raw.x * out.beta_true;
  for (int i = 0; i < raw.y.size(); ++i) raw.y[i] += noise * gauss(rng);
  out.ds = standardize(raw);
  return out;
}

Grouping arm_grouping(const ArmSpec& arm, const ExperimentSpec& spec, const RepData& rd,
                      std::uint64_t rep_seed) {
  const int p = int(rd.ds.p());
  Grouping g;
  if (arm.grouping == "true") {
    require(rd.has_groups, errc::config_error, "family has no true grouping");
    g = rd.true_groups;
  } else if (arm.grouping == "pam") {
    int k = int(std::lround(arm.k_ratio * spec.k_groups));
    k = std::max(1, std::min(k, p));
    const auto labels = pam_cluster(correlation_distance(rd.ds.x), k,
                                    mix_seed(rep_seed, 5));
    g = grouping_from_labels(labels);
  } else if (arm.grouping == "singleton") {
    g = singleton_grouping(p, inf_norm);
  } else if (arm.grouping == "compiled") {
    require(rd.has_graph, errc::config_error, "family has no hierarchy to compile");
    g = compile_penalty(rd.graph, p);
  } else {
    fail(errc::config_error, "solver needs a grouping, got '" + arm.grouping + "'");
  }
  if (arm.solver == "blasso") {
    std::fill(g.gamma.begin(), g.gamma.end(), arm.gamma);
    g.gamma0 = arm.gamma0;
  }
  return g;
}

RepRecord run_cell(const ExperimentSpec& spec, const ArmSpec& arm, int rep) {
  const std::uint64_t s = mix_seed(spec.seed, std::uint64_t(rep));
  RepData rd = make_rep(spec, rep);

  PathSolver build;
  if (arm.solver == "lasso") {
    build = [](const Dataset& d) { return lasso_path(d); };
  } else if (arm.solver == "ilasso") {
    build = [](const Dataset& d) { return ilasso_path(d); };
  } else if (arm.solver == "icap") {
    Grouping g = arm_grouping(arm, spec, rd, s);
    build = [g](const Dataset& d) { return icap_path(d, g); };
  } else if (arm.solver == "hicap") {
    require(rd.has_graph, errc::config_error, "family has no hierarchy");
    HierarchyGraph graph = rd.graph;
    build = [graph](const Dataset& d) { return hicap_path(d, graph); };
  } else if (arm.solver == "blasso") {
    Grouping g = arm_grouping(arm, spec, rd, s);
    BlassoConfig cfg = arm.blasso;
    build = [g, cfg](const Dataset& d) { return blasso_path(d, g, cfg); };
  } else {
    fail(errc::config_error, "unknown solver '" + arm.solver + "'");
  }

  if (arm.normalize_groups) {
    require(arm.solver == "icap" || arm.solver == "blasso", errc::config_error,
            "group normalization needs an explicit grouping");
    rd.ds = group_normalize(rd.ds, arm_grouping(arm, spec, rd, s));
  }

  SelectionResult sel;
  if (arm.selection == "aicc") {
    sel = aicc_select(build(rd.ds), rd.ds);
  } else if (arm.selection == "cv") {
    CvScheme scheme;
    if (arm.cv_scheme == "random")
      scheme = CvScheme::random;
    else if (arm.cv_scheme == "balanced")
      scheme = CvScheme::balanced;
    else
      fail(errc::config_error, "unknown cv scheme '" + arm.cv_scheme + "'");
    sel = cross_validate(rd.ds, build, arm.folds, scheme, mix_seed(s, 6));
  } else {
    fail(errc::config_error, "unknown selection rule '" + arm.selection + "'");
  }

  RepRecord rec;
  rec.lambda = sel.lambda;
  for (size_t i = 0; i < sel.candidate_lambdas.size(); ++i)
    if (sel.candidate_lambdas[i] == sel.lambda) {
      rec.df = sel.candidate_df[i];
      break;
    }
  const std::set<int> sup = support(sel.beta);
  rec.n_selected = int(sup.size());
  if (rd.has_groups) {
    rec.n_selected_groups = 0;
    for (const auto& grp : rd.true_groups.groups)
      rec.n_selected_groups +=
          std::any_of(grp.begin(), grp.end(), [&](int j) { return sup.count(j) > 0; });
  }
  if (rd.has_graph) rec.hierarchy_gap = hierarchy_gap(sup, rd.graph);
  rec.model_error =
      model_error(to_raw_coefficients(rd.ds, sel.beta), rd.beta_true, rd.sigma);
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  require(spec.replications >= 1, errc::config_error, "need at least one replication");
  require(!spec.arms.empty(), errc::config_error, "need at least one arm");
  spec.p();  // validates the family name

  ExperimentReport report;
  report.spec = spec;
  report.arms.resize(spec.arms.size());
  for (size_t a = 0; a < spec.arms.size(); ++a) {
    report.arms[a].arm = spec.arms[a];
    if (report.arms[a].arm.name.empty())
      report.arms[a].arm.name = spec.arms[a].solver + "-" + spec.arms[a].grouping + "-" +
                                spec.arms[a].selection;
    report.arms[a].reps.resize(spec.replications);
  }

  const int cells = int(spec.arms.size()) * spec.replications;
  const int jobs = std::max(1, std::min(spec.jobs, cells));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&](int w) {
    try {
      for (int cell = next++; cell < cells; cell = next++) {
        const int a = cell / spec.replications;
        const int r = cell % spec.replications;
        report.arms[a].reps[r] = run_cell(spec, report.arms[a].arm, r);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

}  // namespace cap
