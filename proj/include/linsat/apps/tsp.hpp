#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "linsat/constraints.hpp"
#include "linsat/layer.hpp"
#include "linsat/oracles.hpp"

namespace linsat {

// Open tour: start city s, end city e; when priority >= 0 that city must be
// visited within the first m+1 positions.
struct TspInstance {
  int n = 0;
  Eigen::MatrixXd coords;  // n x 2 points in the unit square
  Eigen::MatrixXd D;       // Euclidean distances
  int s = 0;
  int e = 1;
  int priority = -1;
  int m = -1;
};

TspInstance make_tsp_instance(uint64_t seed, int n, bool with_priority = false, int m = 3);

// Equality system over l = n^2 variables X_{i,k} (row-major: i*n + k):
// row/column sums 1, X_{s,1} = 1, X_{e,n} = 1, and for the priority variant
// sum_{k<=m+1} X_{p,k} = 1.
LinearConstraintSystem tsp_build_constraints(const TspInstance& inst);

// Relaxed tour length: sum_{ij} D_{ij} sum_k X_{ik} X_{j,k+1}, and its
// gradient in X.
double tsp_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D);
Eigen::MatrixXd tsp_objective_grad(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D);

struct TrainResult {
  Eigen::MatrixXd X;                     // final projected matrix
  std::vector<double> objective_history;
  ConvergenceReport last_report;
};

// Gradient descent on a trainable pre-projected score table: project, score,
// back-propagate, step.
TrainResult tsp_train_matrix(const TspInstance& inst, const SolverConfig& cfg, double lr,
                             int iters, uint64_t seed);

// Left-to-right beam decoding of a near-doubly-stochastic matrix; states are
// scored by the sum of log-probabilities. On beam exhaustion the width is
// widened once (x4), then the decode fails.
Tour beam_search_decode(const Eigen::MatrixXd& X, const TspInstance& inst, int width);

enum class HeuristicMode { NearestNeighbor, NearestInsertion, FarthestInsertion, RandomInsertion };

Tour heuristic_tour(const TspInstance& inst, HeuristicMode mode, uint64_t seed = 0);

double tour_length(const Eigen::MatrixXd& D, const std::vector<int>& order);
bool tour_feasible(const TspInstance& inst, const std::vector<int>& order);

// Fraction of instances whose 0.5-rounded projection is an exactly feasible
// binary assignment, per temperature.
struct RoundingStudy {
  std::vector<double> taus;
  std::vector<double> feasible_ratio;
};
RoundingStudy rounding_study(int num_instances, int n, const std::vector<double>& taus,
                             uint64_t seed, const SolverConfig& base_cfg,
                             double threshold = 0.5);

}  // namespace linsat
