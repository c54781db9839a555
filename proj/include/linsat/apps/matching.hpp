#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "linsat/constraints.hpp"
#include "linsat/layer.hpp"

namespace linsat {

struct MatchingInstance {
  Eigen::MatrixXd M;  // n1 x n2 matching scores
  int n1 = 0;
  int n2 = 0;
  int phi = 0;  // number of true correspondences
  std::vector<std::pair<int, int>> truth;
};

// Synthetic instance: a random partial injective correspondence of size phi;
// scores are 1 on true pairs plus Gaussian noise of scale sigma everywhere.
MatchingInstance make_matching_instance(uint64_t seed, int n1, int n2, int phi, double sigma);

// Packing system over l = n1*n2 variables (row-major i*n2 + j): column sums
// <= 1, row sums <= 1, total sum <= phi.
LinearConstraintSystem gm_build_constraints(int n1, int n2, int phi);

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // exactly phi of them
  double f1 = 0.0;
  Eigen::MatrixXd projected;  // n1 x n2
  ConvergenceReport report;
};

// Project the flattened scores, assign with the Hungarian algorithm on the
// projected matrix, keep the phi highest-scoring pairs, score F1 vs truth.
MatchResult gm_solve(const MatchingInstance& inst, const SolverConfig& cfg);

}  // namespace linsat
