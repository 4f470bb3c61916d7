#pragma once

#include <string>

#include <json.hpp>

#include "cap/model_selection.hpp"
#include "cap/simulation.hpp"

namespace cap {

// CSV: comma-separated numeric matrix, optional single header row (detected by
// non-numeric first line). Errors map to data_error.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
Eigen::VectorXd read_vector_csv(const std::string& path);  // single column
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Grouping JSON: {"groups": [[0,1],[2,3]], "gamma0": 1, "gamma": ["inf","inf"],
// "weights": [1,1]}; norms are numbers or the string "inf".
Grouping grouping_from_json(const nlohmann::json& j);
nlohmann::json grouping_to_json(const Grouping& g);

// Hierarchy JSON: {"nodes": [[0],[1],[2]], "edges": [[0,2],[1,2]],
// "gamma": [...], "weights": [...]} (gamma/weights optional).
HierarchyGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const HierarchyGraph& g);

// Path JSON: {"solver": ..., "fingerprint": ..., "breakpoints": [{"lambda":
// ..., "beta": [...], "active_groups": [...], "df": ...} ...]} with
// "approximate"/"eps"/"xi" present for blasso paths. Numbers round-trip
// exactly (shortest representation that restores the same double).
nlohmann::json path_to_json(const RegularizationPath& p);
RegularizationPath path_from_json(const nlohmann::json& j);

nlohmann::json selection_to_json(const SelectionResult& s);

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const ExperimentReport& r);
// One row per arm: name, reps, and mean/se for each metric.
std::string report_summary_csv(const ExperimentReport& r);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cap
