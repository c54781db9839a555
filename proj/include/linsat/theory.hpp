#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "linsat/sinkhorn.hpp"

namespace linsat {

// Instance whose feasible plan Z is generated first, so every marginal set is
// met exactly by construction.
struct FeasibleInstance {
  Eigen::MatrixXd S;  // strictly positive scores
  Eigen::MatrixXd Z;  // m x n plan with unit column sums
  std::vector<MarginalSet> sets;
  double alpha = 0.0;
  double delta = 0.0;
  double h_hat = 0.0;  // max_eta h_eta
};

FeasibleInstance make_feasible_instance(uint64_t seed, int m, int n, int k);

// Audits the construction invariants; returns an empty list when clean.
std::vector<std::string> audit_instance(const FeasibleInstance& inst, double tol = 1e-9);

// (1/h) sum_{ij} z_{ij} u_j log(z_{ij} / plan_{ij}); 0 log 0 = 0. Throws when
// a positive-mass entry of Z meets a zero plan entry.
double matrix_kl(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& plan, const MarginalSet& set);

struct BoundCheck {
  bool ok = true;
  double worst_margin = 0.0;  // max over sets of D - bound (negative when ok)
  double bound = 0.0;         // log(1 + 2*delta/alpha)
  std::vector<double> divergences;
};

// Initial-divergence bound D(Z, plan0, eta) <= log(1 + 2*delta/alpha) for all
// sets, on the initialized plan of inst.S.
BoundCheck check_initial_bound(const FeasibleInstance& inst, double slack = 1e-9);

// Residuals of the per-step potential identities for one recorded row+column
// pair of set eta:
//   D(Z,before,eta) - D(Z,mid,eta)  = KL(pi_v || pi_v_t)   (row step)
//   D(Z,mid,eta)    - D(Z,after,eta) = KL(pi_u || pi_den)  (column step)
struct StepResiduals {
  double row = 0.0;
  double col = 0.0;
  double kl_row = 0.0;
  double kl_col = 0.0;
};
StepResiduals check_step_identities(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& before,
                                    const Eigen::MatrixXd& mid, const Eigen::MatrixXd& after,
                                    const MarginalSet& set);

struct TrajectoryPoint {
  int step = 0;  // index into the tape
  int eta = 0;
  Phase phase = Phase::Row;
  double l1 = 0.0;       // marginal gap driving this step
  double kl = 0.0;       // KL term of the step identity
  double divergence = 0.0;  // D(Z, plan-after-step, eta)
  double residual = 0.0;    // identity residual at this step
};

struct ConvergenceCurve {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<std::pair<double, int>> iters_to_eps;  // (eps, first cycle with max L1 <= eps)
  double initial_divergence = 0.0;   // D(Z, plan0, set 0)
  double final_divergence = 0.0;     // D(Z, plan_end, set 0)
  double kl_sum = 0.0;               // telescoped sum of step KL terms
  double budget = 0.0;               // log(1 + 2*delta/alpha)
  double max_residual = 0.0;
  ConvergenceReport report;
};

ConvergenceCurve convergence_curve(const FeasibleInstance& inst, const SolverConfig& cfg,
                                   const std::vector<double>& eps_grid);

// Random constraint system with a planted strictly interior point, so the
// system is feasible by construction. Coefficient supports are sparse (each
// entry active w.p. 0.25) and at most 3 equality rows are used; overflow
// equality draws become inequalities.
struct GeneratedSystem {
  LinearConstraintSystem sys;
  Eigen::VectorXd interior_point;
};
GeneratedSystem make_feasible_system(uint64_t seed, int l, int k);

}  // namespace linsat
