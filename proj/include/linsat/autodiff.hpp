#pragma once

#include <Eigen/Dense>
#include <vector>

#include "linsat/sinkhorn.hpp"

namespace linsat {

// Forward pass with tape recording; identical numbers to multi_set_sinkhorn.
SinkhornResult forward_with_tape(const Eigen::MatrixXd& S, const std::vector<MarginalSet>& sets,
                                 SolverConfig cfg);

// Re-run the recorded steps from tape.S; used to audit determinism.
Eigen::MatrixXd replay(const IterationTape& tape, const std::vector<MarginalSet>& sets,
                       double floor);

// Exact gradient of the truncated forward map: dLoss/dS from dLoss/dPlan.
// Entries whose normalizer hit the underflow floor propagate no gradient
// through that normalizer (the clamp is flat).
Eigen::MatrixXd backward(const IterationTape& tape, const std::vector<MarginalSet>& sets,
                         const Eigen::MatrixXd& dplan, double floor);

// Chain through S = exp(W/tau): dW = dS .* exp(W/tau) / tau, zero where the
// score was clamped at the floor.
Eigen::MatrixXd grad_entropic(const Eigen::MatrixXd& dS, const Eigen::MatrixXd& W, double tau,
                              double floor = 1e-30);

}  // namespace linsat
