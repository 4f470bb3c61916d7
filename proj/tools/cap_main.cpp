// Command-line front end. All lambda values are on the half-RSS scale:
// the objective is (1/2)||y - X beta||^2 + lambda * T(beta), so the gradient
// at beta = 0 equals -X'y and the first breakpoint sits at ||X'y|| in the
// dual norm of the penalty.
#include <CLI11.hpp>
#include <iostream>

#include "cap/clustering.hpp"
#include "cap/io.hpp"

namespace {

using namespace cap;

struct SolverArgs {
  std::string solver = "lasso";
  std::string x_path, y_path, groups_path, hierarchy_path;
  BlassoConfig blasso;
};

void add_solver_options(CLI::App* cmd, SolverArgs& a, bool fixed_solver = false) {
  if (!fixed_solver)
    cmd->add_option("--solver", a.solver, "lasso | ilasso | icap | hicap | blasso")
        ->required();
  cmd->add_option("--x", a.x_path, "design matrix CSV")->required();
  cmd->add_option("--y", a.y_path, "response CSV (single column)")->required();
  cmd->add_option("--groups", a.groups_path, "grouping JSON (icap, blasso)");
  cmd->add_option("--hierarchy", a.hierarchy_path, "hierarchy JSON (hicap, blasso)");
  cmd->add_option("--eps", a.blasso.eps, "blasso step size");
  cmd->add_option("--xi", a.blasso.xi, "blasso backward-step threshold");
  cmd->add_option("--max-steps", a.blasso.max_steps, "blasso step budget");
  cmd->add_option("--lambda-floor", a.blasso.lambda_floor, "blasso stopping lambda");
}

Dataset load_dataset(const SolverArgs& a) {
  Dataset raw;
  raw.x = read_matrix_csv(a.x_path);
  raw.y = read_vector_csv(a.y_path);
  return standardize(raw);  // idempotent on already standardized input
}

// Compatibility is checked before any numerics: the solver dictates which of
// --groups/--hierarchy must be present, and stray ones are rejected.
PathSolver make_solver(const SolverArgs& a, int p) {
  const bool has_g = !a.groups_path.empty();
  const bool has_h = !a.hierarchy_path.empty();
  if (a.solver == "lasso" || a.solver == "ilasso") {
    require(!has_g && !has_h, errc::config_error,
            "'" + a.solver + "' takes neither --groups nor --hierarchy");
    if (a.solver == "lasso") return [](const Dataset& d) { return lasso_path(d); };
    return [](const Dataset& d) { return ilasso_path(d); };
  }
  if (a.solver == "icap") {
    require(has_g && !has_h, errc::config_error, "'icap' needs --groups only");
    Grouping g = grouping_from_json(load_json_file(a.groups_path));
    validate_grouping(g, p);
    return [g](const Dataset& d) { return icap_path(d, g); };
  }
  if (a.solver == "hicap") {
    require(has_h && !has_g, errc::config_error, "'hicap' needs --hierarchy only");
    HierarchyGraph graph = graph_from_json(load_json_file(a.hierarchy_path));
    validate_graph(graph);
    return [graph](const Dataset& d) { return hicap_path(d, graph); };
  }
  if (a.solver == "blasso") {
    require(has_g != has_h, errc::config_error,
            "'blasso' needs exactly one of --groups or --hierarchy");
    Grouping g;
    if (has_g) {
      g = grouping_from_json(load_json_file(a.groups_path));
    } else {
      const nlohmann::json j = load_json_file(a.hierarchy_path);
      HierarchyGraph graph = graph_from_json(j);
      validate_graph(graph);
      std::vector<double> gamma, weights;
      if (j.contains("gamma")) gamma = j.at("gamma").get<std::vector<double>>();
      if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
      g = compile_penalty(graph, p, gamma, weights);
    }
    validate_grouping(g, p);
    const BlassoConfig cfg = a.blasso;
    return [g, cfg](const Dataset& d) { return blasso_path(d, g, cfg); };
  }
  fail(errc::config_error, "unknown solver '" + a.solver + "'");
}

void attach_raw_units(nlohmann::json& j, const Dataset& ds, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd raw = to_raw_coefficients(ds, beta);
  j["beta_raw"] = std::vector<double>(raw.data(), raw.data() + raw.size());
  j["intercept"] = raw_intercept(ds, beta);
}

int run_fit(const SolverArgs& a, double lambda, const std::string& out) {
  const Dataset ds = load_dataset(a);
  const RegularizationPath path = make_solver(a, int(ds.p()))(ds);
  const Eigen::VectorXd beta = interpolate(path, lambda);
  nlohmann::json j;
  j["solver"] = a.solver;
  j["lambda"] = lambda;
  j["beta"] = std::vector<double>(beta.data(), beta.data() + beta.size());
  j["df"] = path.approximate ? -1 : path_df(path, lambda);
  attach_raw_units(j, ds, beta);
  write_json_file(out, j);
  return 0;
}

int run_path(const SolverArgs& a, const std::string& out) {
  const Dataset ds = load_dataset(a);
  const RegularizationPath path = make_solver(a, int(ds.p()))(ds);
  write_json_file(out, path_to_json(path));
  return 0;
}

int run_select(const SolverArgs& a, const std::string& method, int folds,
               const std::string& scheme, std::uint64_t seed, bool seed_given,
               const std::string& out, const std::string& curve_out) {
  const Dataset ds = load_dataset(a);
  const PathSolver solver = make_solver(a, int(ds.p()));
  SelectionResult sel;
  if (method == "aicc") {
    sel = aicc_select(solver(ds), ds);
  } else if (method == "cv") {
    require(seed_given, errc::config_error, "--seed is required for cv");
    CvScheme cs;
    if (scheme == "random")
      cs = CvScheme::random;
    else if (scheme == "balanced")
      cs = CvScheme::balanced;
    else
      fail(errc::config_error, "unknown cv scheme '" + scheme + "'");
    sel = cross_validate(ds, solver, folds, cs, seed);
  } else {
    fail(errc::config_error, "unknown selection method '" + method + "'");
  }
  nlohmann::json j = selection_to_json(sel);
  j["solver"] = a.solver;
  attach_raw_units(j, ds, sel.beta);
  write_json_file(out, j);
  if (!curve_out.empty()) {
    std::string csv = "lambda,criterion,df\n";
    for (size_t i = 0; i < sel.candidate_lambdas.size(); ++i) {
      csv += std::to_string(sel.candidate_lambdas[i]);
      csv += ',' + std::to_string(sel.criterion_values[i]);
      csv += ',' + std::to_string(sel.candidate_df[i]) + '\n';
    }
    write_text_file(curve_out, csv);
  }
  return 0;
}

int run_cluster(const std::string& x_path, int k, std::uint64_t seed,
                const std::string& gamma, const std::string& out) {
  const Eigen::MatrixXd x = read_matrix_csv(x_path);
  const auto labels = pam_cluster(correlation_distance(x), k, seed);
  double g = inf_norm;
  if (gamma != "inf") {
    try {
      g = std::stod(gamma);
    } catch (const std::exception&) {
      fail(errc::config_error, "--gamma must be a number or 'inf'");
    }
  }
  write_json_file(out, grouping_to_json(grouping_from_labels(labels, g)));
  return 0;
}

int run_hierarchy_compile(const std::string& h_path, int p, const std::string& out) {
  const nlohmann::json j = load_json_file(h_path);
  HierarchyGraph graph = graph_from_json(j);
  validate_graph(graph);
  if (p <= 0) {
    for (const auto& node : graph.nodes)
      for (int idx : node) p = std::max(p, idx + 1);
  }
  std::vector<double> gamma, weights;
  if (j.contains("gamma")) gamma = j.at("gamma").get<std::vector<double>>();
  if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
  write_json_file(out, grouping_to_json(compile_penalty(graph, p, gamma, weights)));
  return 0;
}

int run_simulate(const std::string& spec_path, std::uint64_t seed, bool seed_given,
                 int jobs, const std::string& out, const std::string& summary_out) {
  const nlohmann::json j = load_json_file(spec_path);
  ExperimentSpec spec = experiment_spec_from_json(j);
  require(seed_given || j.contains("seed"), errc::config_error,
          "simulate needs a seed (in the spec file or via --seed)");
  if (seed_given) spec.seed = seed;
  if (jobs > 0) spec.jobs = jobs;
  const ExperimentReport report = run_experiment(spec);
  write_json_file(out, report_to_json(report));
  if (!summary_out.empty()) write_text_file(summary_out, report_summary_csv(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Composite absolute penalty regression: exact and approximate regularization "
      "paths, model selection, clustering, and simulation. Lambda is on the "
      "half-RSS scale: objective = (1/2)||y - X beta||^2 + lambda * T(beta). "
      "Design matrices are standardized internally (columns centered, variance 1; "
      "the response is centered); reported beta_raw/intercept undo this."};
  app.require_subcommand(1);

  SolverArgs fit_a;
  double fit_lambda = 0.0;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "solve at one lambda, write coefficients JSON");
  add_solver_options(fit, fit_a);
  fit->add_option("--lambda", fit_lambda, "penalty level (half-RSS scale)")->required();
  fit->add_option("--out", fit_out, "output JSON")->required();

  SolverArgs path_a;
  std::string path_out;
  auto* path = app.add_subcommand("path", "trace the full path, write path JSON");
  add_solver_options(path, path_a);
  path->add_option("--out", path_out, "output JSON")->required();

  SolverArgs sel_a;
  std::string sel_method, sel_scheme = "random", sel_out, sel_curve;
  int sel_folds = 10;
  std::uint64_t sel_seed = 0;
  auto* sel = app.add_subcommand("select", "pick lambda by aicc or cv");
  add_solver_options(sel, sel_a);
  sel->add_option("--method", sel_method, "aicc | cv")->required();
  sel->add_option("--folds", sel_folds, "cv fold count");
  sel->add_option("--cv-scheme", sel_scheme, "random | balanced");
  auto* sel_seed_opt = sel->add_option("--seed", sel_seed, "fold assignment seed");
  sel->add_option("--out", sel_out, "output JSON")->required();
  sel->add_option("--curve-out", sel_curve, "criterion curve CSV (lambda,criterion,df)");

  std::string cl_x, cl_gamma = "inf", cl_out;
  int cl_k = 0;
  std::uint64_t cl_seed = 0;
  auto* cluster = app.add_subcommand("cluster", "PAM predictor clustering to grouping JSON");
  cluster->add_option("--x", cl_x, "design matrix CSV")->required();
  cluster->add_option("--k", cl_k, "number of clusters")->required();
  cluster->add_option("--seed", cl_seed, "tie-break seed")->required();
  cluster->add_option("--gamma", cl_gamma, "group norm for the grouping (number or 'inf')");
  cluster->add_option("--out", cl_out, "output JSON")->required();

  std::string hc_hierarchy, hc_out;
  int hc_p = 0;
  auto* hc = app.add_subcommand("hierarchy-compile",
                                "compile a hierarchy graph into an overlapping grouping");
  hc->add_option("--hierarchy", hc_hierarchy, "hierarchy JSON")->required();
  hc->add_option("--p", hc_p, "predictor count (default: max index + 1)");
  hc->add_option("--out", hc_out, "output JSON")->required();

  std::string sim_spec, sim_out, sim_summary;
  std::uint64_t sim_seed = 0;
  int sim_jobs = 0;
  auto* sim = app.add_subcommand("simulate", "run an experiment spec");
  sim->add_option("--spec", sim_spec, "experiment spec JSON")->required();
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "override the spec seed");
  sim->add_option("--jobs", sim_jobs, "override the spec thread count");
  sim->add_option("--out", sim_out, "report JSON")->required();
  sim->add_option("--summary-out", sim_summary, "per-arm summary CSV");

  try {
    app.parse(argc, argv);
    if (*fit) return run_fit(fit_a, fit_lambda, fit_out);
    if (*path) return run_path(path_a, path_out);
    if (*sel)
      return run_select(sel_a, sel_method, sel_folds, sel_scheme, sel_seed,
                        sel_seed_opt->count() > 0, sel_out, sel_curve);
    if (*cluster) return run_cluster(cl_x, cl_k, cl_seed, cl_gamma, cl_out);
    if (*hc) return run_hierarchy_compile(hc_hierarchy, hc_p, hc_out);
    if (*sim)
      return run_simulate(sim_spec, sim_seed, sim_seed_opt->count() > 0, sim_jobs,
                          sim_out, sim_summary);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case errc::config_error:
      case errc::invalid_k:
      case errc::empty_group:
      case errc::index_out_of_range:
      case errc::invalid_norm:
      case errc::norm_mismatch:
      case errc::nonpositive_weight:
      case errc::overlapping_groups:
      case errc::cyclic_graph:
      case errc::not_a_tree:
      case errc::wrong_norms:
      case errc::nonconvex_norms:
      case errc::unknown_index:
      case errc::unsupported_solver:
      case errc::fold_too_small:
      case errc::scheme_unavailable:
        return 2;  // the request itself is invalid
      case errc::data_error:
      case errc::constant_column:
      case errc::dimension_mismatch:
      case errc::invalid_shape:
        return 3;  // the supplied data violate a precondition
      default:
        return 4;  // the solve itself failed
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
