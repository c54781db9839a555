#include "linsat/autodiff.hpp"

#include <stdexcept>

namespace linsat {

SinkhornResult forward_with_tape(const Eigen::MatrixXd& S, const std::vector<MarginalSet>& sets,
                                 SolverConfig cfg) {
  cfg.record_tape = true;
  return multi_set_sinkhorn(S, sets, cfg);
}

Eigen::MatrixXd replay(const IterationTape& tape, const std::vector<MarginalSet>& sets,
                       double floor) {
  Eigen::MatrixXd plan = init_plan(tape.S);
  for (const auto& rec : tape.steps) {
    if (rec.phase == Phase::Row)
      row_step(plan, sets[rec.eta], floor);
    else
      col_step(plan, sets[rec.eta], floor);
  }
  return plan;
}

Eigen::MatrixXd backward(const IterationTape& tape, const std::vector<MarginalSet>& sets,
                         const Eigen::MatrixXd& dplan, double floor) {
  if (dplan.rows() != tape.S.rows() || dplan.cols() != tape.S.cols())
    throw std::invalid_argument("gradient shape does not match the taped run");
  const int m = static_cast<int>(tape.S.rows());
  const int n = static_cast<int>(tape.S.cols());

  Eigen::MatrixXd g = dplan;
  for (auto it = tape.steps.rbegin(); it != tape.steps.rend(); ++it) {
    const StepRecord& rec = *it;
    const MarginalSet& set = sets[rec.eta];
    const Eigen::MatrixXd& P = rec.pre;
    Eigen::MatrixXd gp(m, n);
    if (rec.phase == Phase::Row) {
      // out_{ij} = P_{ij} v_i / den_i on support columns; den_i = max(P_i . u, floor)
      for (int i = 0; i < m; ++i) {
        double den = rec.denom(i);
        bool clamped = P.row(i).dot(set.u) < floor;
        double dden = 0.0;
        if (!clamped) {
          for (int j = 0; j < n; ++j)
            if (set.u(j) > 0.0) dden -= g(i, j) * P(i, j) * set.v(i) / (den * den);
        }
        for (int j = 0; j < n; ++j) {
          if (set.u(j) > 0.0)
            gp(i, j) = g(i, j) * set.v(i) / den + dden * set.u(j);
          else
            gp(i, j) = g(i, j);
        }
      }
    } else {
      // out_{ij} = P_{ij} u_j / den_j on support columns; den_j = max(u_j colsum_j, floor)
      for (int j = 0; j < n; ++j) {
        if (set.u(j) <= 0.0) {
          gp.col(j) = g.col(j);
          continue;
        }
        double den = rec.denom(j);
        bool clamped = P.col(j).sum() * set.u(j) < floor;
        double dden = 0.0;
        if (!clamped) {
          for (int i = 0; i < m; ++i) dden -= g(i, j) * P(i, j) * set.u(j) / (den * den);
        }
        for (int i = 0; i < m; ++i) gp(i, j) = g(i, j) * set.u(j) / den + dden * set.u(j);
      }
    }
    g = std::move(gp);
  }

  // init_plan: plan_{ij} = S_{ij} / c_j for positive columns, identity otherwise.
  Eigen::MatrixXd dS(m, n);
  for (int j = 0; j < n; ++j) {
    double c = tape.init_colsum(j);
    if (c > 0.0) {
      double dc = -g.col(j).dot(tape.S.col(j)) / (c * c);
      for (int i = 0; i < m; ++i) dS(i, j) = g(i, j) / c + dc;
    } else {
      dS.col(j) = g.col(j);
    }
  }
  return dS;
}

Eigen::MatrixXd grad_entropic(const Eigen::MatrixXd& dS, const Eigen::MatrixXd& W, double tau,
                              double floor) {
  if (dS.rows() != W.rows() || dS.cols() != W.cols())
    throw std::invalid_argument("gradient shape mismatch");
  Eigen::MatrixXd dW = Eigen::MatrixXd::Zero(W.rows(), W.cols());
  for (int j = 0; j < W.cols(); ++j)
    for (int i = 0; i < W.rows(); ++i) {
      double s = std::exp(W(i, j) / tau);
      if (s > floor) dW(i, j) = dS(i, j) * s / tau;
    }
  return dW;
}

}  // namespace linsat
