#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "linsat/constraints.hpp"

namespace linsat {

struct SolverConfig {
  double tau = 0.1;
  double tol = 1e-6;          // L1 convergence threshold (0 = always run max_iters)
  int max_iters = 2000;       // cap on full cycles over all sets
  double floor = 1e-30;       // underflow clamp for scores and normalizers
  bool record_tape = false;
};

// One target marginal set: column masses u (length n) and row targets v
// (length m), with h = sum(u) = sum(v).
struct MarginalSet {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double h = 0.0;
};

std::vector<MarginalSet> stack_to_sets(const MarginalStack& stack);

enum class Phase { Row, Col };

struct StepRecord {
  int eta = 0;
  Phase phase = Phase::Row;
  Eigen::MatrixXd pre;     // plan before this normalization
  Eigen::VectorXd denom;   // clamped normalizers (per row or per column)
};

struct IterationTape {
  Eigen::MatrixXd S;             // score matrix the run started from
  Eigen::VectorXd init_colsum;   // column sums used by init_plan
  std::vector<StepRecord> steps;
  int cycles = 0;
};

struct ConvergenceReport {
  int cycles = 0;
  Eigen::VectorXd per_set_err;  // L1 row-marginal error per set at exit
  bool converged = false;
  double alpha = 0.0;  // min positive S entry / max S entry
  double delta = 0.0;  // max number of positive entries in any column
  int degenerate_rescues = 0;  // positive target met only via the floor clamp
};

struct SinkhornResult {
  Eigen::MatrixXd plan;
  ConvergenceReport report;
  std::shared_ptr<IterationTape> tape;  // null unless cfg.record_tape
};

// S_{ij} = exp(W_{ij}/tau), clamped below at cfg.floor.
Eigen::MatrixXd apply_entropic(const Eigen::MatrixXd& W, double tau, double floor = 1e-30);

// Column-normalize: positive columns sum to 1, zero columns stay zero.
Eigen::MatrixXd init_plan(const Eigen::MatrixXd& S);

// Row then column normalization for one set, in place. Columns with u_j = 0
// are untouched. Optional out-params capture the clamped denominators.
void row_step(Eigen::MatrixXd& plan, const MarginalSet& set, double floor,
              Eigen::VectorXd* denom_out = nullptr, int* rescues = nullptr);
void col_step(Eigen::MatrixXd& plan, const MarginalSet& set, double floor,
              Eigen::VectorXd* denom_out = nullptr, int* rescues = nullptr);

// L1 gap between achieved and target row marginals for one set:
// sum_i |sum_j plan_{ij} u_j - v_i|.
double l1_violation(const Eigen::MatrixXd& plan, const MarginalSet& set);
// Analog on the column side (post-row-step plans): sum_j u_j |colsum_j - 1|.
double l1_col_violation(const Eigen::MatrixXd& plan, const MarginalSet& set);

SinkhornResult multi_set_sinkhorn(const Eigen::MatrixXd& S,
                                  const std::vector<MarginalSet>& sets,
                                  const SolverConfig& cfg);
SinkhornResult multi_set_sinkhorn(const Eigen::MatrixXd& S, const MarginalStack& stack,
                                  const SolverConfig& cfg);

// Standalone single-set scaling loop (kept independent of the multi-set
// engine so the two can cross-check each other).
SinkhornResult classic_sinkhorn(const Eigen::MatrixXd& S, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& v, const SolverConfig& cfg);

}  // namespace linsat
