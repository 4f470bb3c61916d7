#pragma once

#include <stdexcept>
#include <string>

namespace cap {

// Every failure the library raises carries one of these codes so callers
// (and the CLI exit-code mapping) can dispatch without parsing messages.
enum class errc {
  dimension_mismatch,
  constant_column,
  invalid_norm,
  norm_mismatch,
  index_out_of_range,
  empty_group,
  nonpositive_weight,
  overlapping_groups,
  cyclic_graph,
  not_a_tree,
  invalid_shape,
  unknown_index,
  wrong_norms,
  degenerate_design,
  nonconvex_norms,
  step_budget_exceeded,
  unsupported_solver,
  empty_candidate_set,
  fold_too_small,
  scheme_unavailable,
  invalid_k,
  not_psd,
  config_error,
  data_error,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::constant_column: return "constant_column";
    case errc::invalid_norm: return "invalid_norm";
    case errc::norm_mismatch: return "norm_mismatch";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::empty_group: return "empty_group";
    case errc::nonpositive_weight: return "nonpositive_weight";
    case errc::overlapping_groups: return "overlapping_groups";
    case errc::cyclic_graph: return "cyclic_graph";
    case errc::not_a_tree: return "not_a_tree";
    case errc::invalid_shape: return "invalid_shape";
    case errc::unknown_index: return "unknown_index";
    case errc::wrong_norms: return "wrong_norms";
    case errc::degenerate_design: return "degenerate_design";
    case errc::nonconvex_norms: return "nonconvex_norms";
    case errc::step_budget_exceeded: return "step_budget_exceeded";
    case errc::unsupported_solver: return "unsupported_solver";
    case errc::empty_candidate_set: return "empty_candidate_set";
    case errc::fold_too_small: return "fold_too_small";
    case errc::scheme_unavailable: return "scheme_unavailable";
    case errc::invalid_k: return "invalid_k";
    case errc::not_psd: return "not_psd";
    case errc::config_error: return "config_error";
    case errc::data_error: return "data_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace cap
