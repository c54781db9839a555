#include "linsat/layer.hpp"

#include <stdexcept>

namespace linsat {

Eigen::MatrixXd build_score_input(const Eigen::VectorXd& y, const MarginalStack& stack,
                                  double beta) {
  if (y.size() != stack.l) throw std::invalid_argument("y dimension does not match the system");
  if (!y.allFinite()) throw std::invalid_argument("y must be finite");
  Eigen::MatrixXd W = Eigen::MatrixXd::Constant(2, stack.n_cols, beta);
  W.row(0).head(stack.l) = y;
  return W;
}

ProjectionResult project(const Eigen::VectorXd& y, const LinearConstraintSystem& sys,
                         const SolverConfig& cfg, double beta) {
  ProjectionResult res;
  res.stack = compile_to_marginals(sys);
  res.W = build_score_input(y, res.stack, beta);
  res.tau = cfg.tau;
  res.floor = cfg.floor;
  Eigen::MatrixXd S = apply_entropic(res.W, cfg.tau, cfg.floor);
  SinkhornResult run = multi_set_sinkhorn(S, res.stack, cfg);
  res.plan = std::move(run.plan);
  res.report = std::move(run.report);
  res.tape = std::move(run.tape);
  res.x = res.plan.row(0).head(sys.l).cwiseMax(0.0).cwiseMin(1.0);
  res.eps_lin = cfg.tol * std::max(1.0, res.stack.h.size() ? res.stack.h.maxCoeff() : 1.0);
  return res;
}

Eigen::VectorXd project_backward(const ProjectionResult& result, const Eigen::VectorXd& dx) {
  if (!result.tape) throw std::invalid_argument("projection was run without a tape");
  if (dx.size() != result.x.size()) throw std::invalid_argument("dx dimension mismatch");
  Eigen::MatrixXd dplan = Eigen::MatrixXd::Zero(result.plan.rows(), result.plan.cols());
  dplan.row(0).head(dx.size()) = dx;
  std::vector<MarginalSet> sets = stack_to_sets(result.stack);
  Eigen::MatrixXd dS = backward(*result.tape, sets, dplan, result.floor);
  Eigen::MatrixXd dW = grad_entropic(dS, result.W, result.tau, result.floor);
  return dW.row(0).head(dx.size());
}

}  // namespace linsat
