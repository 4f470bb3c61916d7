#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace cap::detail {

// Solve the symmetric positive semi-definite system g z = rhs. ok = false when
// the pivot spread says the system is numerically rank deficient; callers
// decide between raising degenerate_design and ending the path (saturation).
struct GramSolve {
  Eigen::VectorXd z;
  bool ok = true;
};
GramSolve solve_gram(const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs);

// Candidate event collector for homotopy steps. Smallest step wins; within the
// tie window the candidate offered first wins, so callers encode priority by
// offer order. Steps below -tie are ignored; small negatives clamp to zero.
class EventQueue {
 public:
  struct Cand {
    double delta = 0.0;
    int kind = -1;
    int a = -1;
    int b = -1;
  };

  void offer(double delta, int kind, int a = -1, int b = -1);
  std::optional<Cand> pick() const;

 private:
  std::vector<Cand> cands_;
};

// First root of f(delta) = sum_i coef_i |c_i + dc_i delta| + aff0 + aff1 delta
// on (min_delta, bound], walking the kinks where a term changes sign. f is
// piecewise linear; the root inside the located segment is exact. Returns
// nothing when f has no root in range.
std::optional<double> first_piecewise_root(const Eigen::VectorXd& c,
                                           const Eigen::VectorXd& dc,
                                           const Eigen::VectorXd& coef, double aff0,
                                           double aff1, double min_delta, double bound);

}  // namespace cap::detail
