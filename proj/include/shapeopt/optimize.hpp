#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "shapeopt/constraints.hpp"

namespace shapeopt {

enum class Sense { Minimize, Maximize };

// Scalar-valued function with optional gradient output.
using ScalarFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd* grad)>;

// Nonlinear constraint residual c(x); equality means c = 0, inequality c <= 0.
// `scale` divides the residual so violations are compared at O(1).
struct NonlinearConstraint {
  ScalarFn f;
  double scale = 1.0;
};

struct Problem {
  int n = 0;
  Sense sense = Sense::Minimize;
  ScalarFn objective;
  LinearSystem linear;  // residuals kept in the caller's (physical) scale
  std::vector<NonlinearConstraint> eq;
  std::vector<NonlinearConstraint> ineq;
  Eigen::VectorXd lower, upper;  // optional variable bounds (size 0 = none)
  // Optional diagonal preconditioner: the solver iterates in x = D * y and
  // reports x. Callers with wildly varying per-variable curvature (support
  // coefficients) should supply it.
  Eigen::VectorXd diag_scale;
  // Optional objective Hessian (dense, x-space). When absent the inner Newton
  // model carries the constraint curvature only.
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> objective_hessian;
};

struct SolveOptions {
  double tol_feas = 1e-7;
  double tol_grad = 1e-6;
  int max_iter = 500;            // accepted inner steps across all outer rounds
  double infeasible_tol = 1e-4;  // above this at the end -> Infeasible status
  bool throw_on_failure = false;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

struct HistoryEntry {
  double objective = 0.0;  // in the caller's sense
  double violation = 0.0;  // scaled max violation
  double merit = 0.0;      // augmented merit for the multipliers active then
  bool multiplier_reset = false;
};

struct SolveResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double feas_violation = 0.0;  // recomputed from scratch at x
  double kkt_residual = 0.0;    // scaled Lagrangian-gradient norm at x
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
  std::vector<HistoryEntry> history;

  bool converged() const { return status == SolveStatus::Converged; }
  bool feasible(double tol = 1e-4) const { return feas_violation <= tol; }
};

// Augmented-Lagrangian solver: inequality terms use the Rockafellar squared
// hinge, the inner subproblems are minimized with L-BFGS and a backtracking
// Armijo search. Max-sense problems run on the negated objective. The best
// iterate seen (feasible first, then objective) is returned, so the result is
// never worse than a feasible start.
SolveResult solve(const Problem& p, const Eigen::VectorXd& x0, const SolveOptions& opts = {});

// Runs solve per start concurrently, returns the best feasible result.
// Throws AllInfeasible when every start ends infeasible.
SolveResult multistart(const Problem& p, const std::vector<Eigen::VectorXd>& starts,
                       const SolveOptions& opts = {});

}  // namespace shapeopt
