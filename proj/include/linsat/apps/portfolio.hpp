#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "linsat/constraints.hpp"
#include "linsat/layer.hpp"

namespace linsat {

struct PortfolioInstance {
  Eigen::MatrixXd prices;      // T days x n assets, positive
  std::vector<int> preferred;  // index set C
  double p_pref = 0.5;         // required allocation mass inside C
  double rf = 0.03;            // annual risk-free rate
};

// Synthetic geometric-random-walk prices; assets in the preferred set get the
// higher drift.
PortfolioInstance make_portfolio_instance(uint64_t seed, int n, int n_preferred, int days = 756,
                                          double p_pref = 0.5, double drift_pref = 0.15,
                                          double drift_other = 0.02, double vol = 0.2);

// sum(x) = 1 plus one covering row: sum_{i in C} x_i >= p.
LinearConstraintSystem pf_build_constraints(int n, const std::vector<int>& preferred,
                                            double p_pref);

// Annualized (252 trading days) excess return over volatility; empty when the
// return series has zero variance.
std::optional<double> sharpe_ratio(const Eigen::VectorXd& daily_returns, double rf);

struct PortfolioResult {
  Eigen::VectorXd x;
  double sharpe_in = 0.0;
  double sharpe_uniform = 0.0;  // in-sample Sharpe of the 1/n allocation
  std::optional<double> sharpe_out;
  double worst_violation = 0.0;  // max constraint violation over all iterates
  ConvergenceReport last_report;
};

// Gradient ascent on the in-sample Sharpe of the projected allocation; the
// first train_frac of the return series is in-sample, the rest held out.
PortfolioResult pf_optimize(const PortfolioInstance& inst, const SolverConfig& cfg, double lr,
                            int iters, double train_frac = 0.8);

}  // namespace linsat
