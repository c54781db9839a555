#pragma once

#include <Eigen/Dense>
#include <memory>

#include "linsat/autodiff.hpp"
#include "linsat/constraints.hpp"
#include "linsat/sinkhorn.hpp"

namespace linsat {

struct ProjectionResult {
  Eigen::VectorXd x;          // in [0,1]^l
  Eigen::MatrixXd plan;       // 2 x n_cols
  ConvergenceReport report;
  std::shared_ptr<IterationTape> tape;  // null unless cfg.record_tape
  MarginalStack stack;
  Eigen::MatrixXd W;
  double tau = 0.1;
  double floor = 1e-30;
  double eps_lin = 0.0;  // constraint-space tolerance implied by cfg.tol
};

// W has 2 rows and n_cols columns: row 1 = [y, beta...], row 2 = beta.
Eigen::MatrixXd build_score_input(const Eigen::VectorXd& y, const MarginalStack& stack,
                                  double beta);

// Project y onto the feasible region of sys: S = exp(W/tau), multi-set
// Sinkhorn, x = first row of the plan over the first l columns. On
// non-convergence the best-effort x is returned with report.converged=false.
ProjectionResult project(const Eigen::VectorXd& y, const LinearConstraintSystem& sys,
                         const SolverConfig& cfg, double beta = 0.0);

// dLoss/dy from dLoss/dx through the unrolled iterations and exp(W/tau).
// Requires cfg.record_tape in the forward call.
Eigen::VectorXd project_backward(const ProjectionResult& result, const Eigen::VectorXd& dx);

}  // namespace linsat
