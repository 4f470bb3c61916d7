#include "cap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cap {

namespace {

std::string shortest(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  require(ec == std::errc(), errc::data_error, "number formatting failed");
  return {buf, p};
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double norm_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    require(j.get<std::string>() == "inf", errc::config_error,
            "norm must be a number or \"inf\"");
    return inf_norm;
  }
  require(j.is_number(), errc::config_error, "norm must be a number or \"inf\"");
  return j.get<double>();
}

nlohmann::json norm_to_json(double g) {
  if (std::isinf(g)) return "inf";
  return g;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::data_error, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  size_t width = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool ok = true;
    for (size_t c = 0; c < cells.size(); ++c) ok = ok && parse_double(cells[c], row[c]);
    if (!ok) {
      require(first, errc::data_error, "non-numeric cell in '" + path + "'");
      first = false;  // header row
      continue;
    }
    first = false;
    if (rows.empty()) width = row.size();
    require(row.size() == width, errc::data_error, "ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), errc::data_error, "no data rows in '" + path + "'");
  Eigen::MatrixXd m(rows.size(), width);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j) m(int(i), int(j)) = rows[i][j];
  return m;
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  require(m.cols() == 1, errc::data_error,
          "expected a single column in '" + path + "'");
  return m.col(0);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  require(out.good(), errc::data_error, "cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << shortest(m(i, j));
    }
    out << '\n';
  }
  require(out.good(), errc::data_error, "write failed for '" + path + "'");
}

Grouping grouping_from_json(const nlohmann::json& j) {
  try {
    Grouping g;
    require(j.contains("groups"), errc::config_error, "grouping needs a \"groups\" array");
    g.groups = j.at("groups").get<std::vector<std::vector<int>>>();
    g.gamma0 = j.contains("gamma0") ? norm_from_json(j.at("gamma0")) : 1.0;
    if (j.contains("gamma"))
      for (const auto& e : j.at("gamma")) g.gamma.push_back(norm_from_json(e));
    else
      g.gamma.assign(g.groups.size(), inf_norm);
    if (j.contains("weights"))
      g.weights = j.at("weights").get<std::vector<double>>();
    else
      g.weights.assign(g.groups.size(), 1.0);
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("malformed grouping json: ") + e.what());
  }
}

nlohmann::json grouping_to_json(const Grouping& g) {
  nlohmann::json j;
  j["groups"] = g.groups;
  j["gamma0"] = norm_to_json(g.gamma0);
  j["gamma"] = nlohmann::json::array();
  for (double v : g.gamma) j["gamma"].push_back(norm_to_json(v));
  j["weights"] = g.weights;
  return j;
}

HierarchyGraph graph_from_json(const nlohmann::json& j) {
  try {
    HierarchyGraph g;
    require(j.contains("nodes"), errc::config_error, "hierarchy needs a \"nodes\" array");
    g.nodes = j.at("nodes").get<std::vector<std::vector<int>>>();
    if (j.contains("edges"))
      for (const auto& e : j.at("edges")) {
        require(e.is_array() && e.size() == 2, errc::config_error,
                "edges must be [parent, child] pairs");
        g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("malformed hierarchy json: ") + e.what());
  }
}

nlohmann::json graph_to_json(const HierarchyGraph& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes;
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.edges) j["edges"].push_back({a, b});
  return j;
}

nlohmann::json path_to_json(const RegularizationPath& p) {
  nlohmann::json j;
  j["solver"] = p.solver;
  j["fingerprint"] = p.fingerprint;
  if (p.approximate) {
    j["approximate"] = true;
    j["eps"] = p.eps;
    j["xi"] = p.xi;
  }
  j["breakpoints"] = nlohmann::json::array();
  for (const auto& bp : p.breakpoints) {
    nlohmann::json b;
    b["lambda"] = bp.lambda;
    b["beta"] = std::vector<double>(bp.beta.data(), bp.beta.data() + bp.beta.size());
    b["active_groups"] = bp.active_groups;
    b["df"] = bp.df;
    b["signs"] = std::vector<int>(bp.signs.data(), bp.signs.data() + bp.signs.size());
    b["group_state"] = nlohmann::json::array();
    for (const auto& gs : bp.group_state)
      b["group_state"].push_back({{"group", gs.group}, {"r", gs.r}, {"u", gs.u}});
    j["breakpoints"].push_back(std::move(b));
  }
  return j;
}

RegularizationPath path_from_json(const nlohmann::json& j) {
  try {
    RegularizationPath p;
    p.solver = j.at("solver").get<std::string>();
    p.fingerprint = j.at("fingerprint").get<std::uint64_t>();
    p.approximate = j.value("approximate", false);
    p.eps = j.value("eps", 0.0);
    p.xi = j.value("xi", 0.0);
    for (const auto& b : j.at("breakpoints")) {
      Breakpoint bp;
      bp.lambda = b.at("lambda").get<double>();
      const auto beta = b.at("beta").get<std::vector<double>>();
      bp.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), int(beta.size()));
      bp.active_groups = b.value("active_groups", std::vector<int>{});
      bp.df = b.at("df").get<int>();
      const auto signs = b.value("signs", std::vector<int>{});
      bp.signs = Eigen::Map<const Eigen::VectorXi>(signs.data(), int(signs.size()));
      if (b.contains("group_state"))
        for (const auto& gs : b.at("group_state")) {
          GroupState s;
          s.group = gs.at("group").get<int>();
          s.r = gs.at("r").get<std::vector<int>>();
          s.u = gs.at("u").get<std::vector<int>>();
          bp.group_state.push_back(std::move(s));
        }
      p.breakpoints.push_back(std::move(bp));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::data_error, std::string("malformed path json: ") + e.what());
  }
}

nlohmann::json selection_to_json(const SelectionResult& s) {
  nlohmann::json j;
  j["lambda"] = s.lambda;
  j["criterion"] = s.criterion;
  j["candidate_lambdas"] = s.candidate_lambdas;
  j["criterion_values"] = s.criterion_values;
  j["candidate_df"] = s.candidate_df;
  j["beta"] = std::vector<double>(s.beta.data(), s.beta.data() + s.beta.size());
  return j;
}

namespace {

const std::vector<std::string> kSpecKeys = {
    "family", "n", "k_groups", "group_size", "sigma", "beta_scheme", "alpha",
    "anova_d", "anova_level", "wavelet_beta", "snr", "replicate_sets", "levels",
    "time_points", "replications", "seed", "jobs", "arms"};
const std::vector<std::string> kArmKeys = {
    "name", "solver", "grouping", "k_ratio", "gamma", "gamma0", "selection",
    "folds", "cv_scheme", "normalize_groups", "blasso"};
const std::vector<std::string> kBlassoKeys = {"eps", "xi", "max_steps", "lambda_floor"};

void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    require(std::find(known.begin(), known.end(), it.key()) != known.end(),
            errc::config_error, "unknown key \"" + it.key() + "\" in " + where);
}

ArmSpec arm_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, kArmKeys, "arm");
  ArmSpec a;
  a.name = j.value("name", a.name);
  a.solver = j.value("solver", a.solver);
  a.grouping = j.value("grouping", a.grouping);
  a.k_ratio = j.value("k_ratio", a.k_ratio);
  if (j.contains("gamma")) a.gamma = norm_from_json(j.at("gamma"));
  a.gamma0 = j.value("gamma0", a.gamma0);
  a.selection = j.value("selection", a.selection);
  a.folds = j.value("folds", a.folds);
  a.cv_scheme = j.value("cv_scheme", a.cv_scheme);
  a.normalize_groups = j.value("normalize_groups", a.normalize_groups);
  if (j.contains("blasso")) {
    const auto& b = j.at("blasso");
    reject_unknown_keys(b, kBlassoKeys, "blasso config");
    a.blasso.eps = b.value("eps", a.blasso.eps);
    a.blasso.xi = b.value("xi", a.blasso.xi);
    a.blasso.max_steps = b.value("max_steps", a.blasso.max_steps);
    a.blasso.lambda_floor = b.value("lambda_floor", a.blasso.lambda_floor);
  }
  return a;
}

nlohmann::json arm_to_json(const ArmSpec& a) {
  nlohmann::json j;
  j["name"] = a.name;
  j["solver"] = a.solver;
  j["grouping"] = a.grouping;
  j["k_ratio"] = a.k_ratio;
  j["gamma"] = norm_to_json(a.gamma);
  j["gamma0"] = a.gamma0;
  j["selection"] = a.selection;
  j["folds"] = a.folds;
  j["cv_scheme"] = a.cv_scheme;
  j["normalize_groups"] = a.normalize_groups;
  j["blasso"] = {{"eps", a.blasso.eps},
                 {"xi", a.blasso.xi},
                 {"max_steps", a.blasso.max_steps},
                 {"lambda_floor", a.blasso.lambda_floor}};
  return j;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["family"] = s.family;
  j["n"] = s.n;
  j["k_groups"] = s.k_groups;
  j["group_size"] = s.group_size;
  j["sigma"] = s.sigma;
  j["beta_scheme"] = s.beta_scheme;
  j["alpha"] = s.alpha;
  j["anova_d"] = s.anova_d;
  j["anova_level"] = s.anova_level;
  j["wavelet_beta"] = s.wavelet_beta;
  j["snr"] = s.snr;
  j["replicate_sets"] = s.replicate_sets;
  j["levels"] = s.levels;
  j["time_points"] = s.time_points;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["jobs"] = s.jobs;
  j["arms"] = nlohmann::json::array();
  for (const auto& a : s.arms) j["arms"].push_back(arm_to_json(a));
  return j;
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  try {
    reject_unknown_keys(j, kSpecKeys, "experiment spec");
    ExperimentSpec s;
    s.family = j.value("family", s.family);
    s.n = j.value("n", s.n);
    s.k_groups = j.value("k_groups", s.k_groups);
    s.group_size = j.value("group_size", s.group_size);
    s.sigma = j.value("sigma", s.sigma);
    s.beta_scheme = j.value("beta_scheme", s.beta_scheme);
    s.alpha = j.value("alpha", s.alpha);
    s.anova_d = j.value("anova_d", s.anova_d);
    s.anova_level = j.value("anova_level", s.anova_level);
    s.wavelet_beta = j.value("wavelet_beta", s.wavelet_beta);
    s.snr = j.value("snr", s.snr);
    s.replicate_sets = j.value("replicate_sets", s.replicate_sets);
    s.levels = j.value("levels", s.levels);
    s.time_points = j.value("time_points", s.time_points);
    s.replications = j.value("replications", s.replications);
    s.seed = j.value("seed", s.seed);
    s.jobs = j.value("jobs", s.jobs);
    if (j.contains("arms"))
      for (const auto& a : j.at("arms")) s.arms.push_back(arm_from_json(a));
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("malformed experiment spec: ") + e.what());
  }
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["spec"] = spec_to_json(r.spec);
  j["arms"] = nlohmann::json::array();
  for (const auto& arm : r.arms) {
    nlohmann::json a;
    a["arm"] = arm_to_json(arm.arm);
    a["reps"] = nlohmann::json::array();
    for (const auto& rec : arm.reps)
      a["reps"].push_back({{"model_error", rec.model_error},
                           {"lambda", rec.lambda},
                           {"n_selected", rec.n_selected},
                           {"n_selected_groups", rec.n_selected_groups},
                           {"df", rec.df},
                           {"hierarchy_gap", rec.hierarchy_gap}});
    j["arms"].push_back(std::move(a));
  }
  return j;
}

std::string report_summary_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "arm,reps,model_error_mean,model_error_se,lambda_mean,lambda_se,"
         "n_selected_mean,n_selected_se,n_selected_groups_mean,n_selected_groups_se,"
         "df_mean,df_se,hierarchy_gap_mean,hierarchy_gap_se\n";
  for (const auto& arm : r.arms) {
    out << arm.arm.name << ',' << arm.reps.size();
    auto emit = [&](auto getter, bool skip_negative) {
      std::vector<double> vals;
      for (const auto& rec : arm.reps) {
        const double v = double(getter(rec));
        if (!skip_negative || v >= 0) vals.push_back(v);
      }
      if (vals.empty()) {
        out << ",,";
        return;
      }
      const MetricSummary ms = summarize(vals);
      out << ',' << shortest(ms.mean) << ',' << shortest(ms.se);
    };
    emit([](const RepRecord& x) { return x.model_error; }, false);
    emit([](const RepRecord& x) { return x.lambda; }, false);
    emit([](const RepRecord& x) { return x.n_selected; }, false);
    emit([](const RepRecord& x) { return x.n_selected_groups; }, true);
    emit([](const RepRecord& x) { return x.df; }, true);
    emit([](const RepRecord& x) { return x.hierarchy_gap; }, true);
    out << '\n';
  }
  return out.str();
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::config_error, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, "invalid json in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  require(out.good(), errc::data_error, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  require(out.good(), errc::data_error, "write failed for '" + path + "'");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), errc::data_error, "cannot write '" + path + "'");
  out << text;
  require(out.good(), errc::data_error, "write failed for '" + path + "'");
}

}  // namespace cap
