#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "linsat/constraints.hpp"

namespace linsat {

// Central finite differences, per coordinate.
Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& y, double step);

struct Assignment {
  std::vector<int> col_of_row;  // assignment per row (square problem)
  double value = 0.0;
};

// Optimal one-to-one assignment (shortest augmenting path, O(n^3)).
// Rectangular inputs are padded to square with zero cost; padded rows/columns
// appear as -1 in the result. maximize=true negates the costs.
Assignment hungarian(const Eigen::MatrixXd& cost, bool maximize = false);

struct Tour {
  std::vector<int> order;  // city sequence, order[0]=s, order[n-1]=e
  double length = 0.0;
};

// Exhaustive shortest Hamiltonian path s -> e; when priority >= 0, the
// priority city must appear within the first m+1 positions. Ties break to the
// lexicographically smallest order. n <= 11.
Tour tsp_exhaustive(const Eigen::MatrixXd& D, int s, int e, int priority = -1, int m = -1);

struct DiscretePoint {
  bool found = false;
  Eigen::VectorXd x;
  double score = 0.0;
};

// Enumerates x in {0,1}^l (l <= 16), keeps exactly-feasible points, maximizes
// w.x; lexicographically smallest argmax wins ties.
DiscretePoint discrete_limit_enumeration(const LinearConstraintSystem& sys,
                                         const Eigen::VectorXd& w, double tol = 1e-9);

struct SolverConfig;  // from sinkhorn.hpp

// Compares the analytic gradient of loss = w . project(y) against central
// finite differences of the same truncated forward map (the finite-difference
// runs are frozen at the recorded cycle count). Returns
// ||g_analytic - g_fd||_inf / max(||g_fd||_inf, 1e-12).
double grad_check_max_rel_err(const LinearConstraintSystem& sys, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, const SolverConfig& cfg, double step);

}  // namespace linsat
