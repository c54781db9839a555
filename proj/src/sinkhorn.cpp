#include "linsat/sinkhorn.hpp"

#include <cmath>
#include <stdexcept>

namespace linsat {

std::vector<MarginalSet> stack_to_sets(const MarginalStack& stack) {
  std::vector<MarginalSet> sets(stack.k);
  for (int eta = 0; eta < stack.k; ++eta) {
    sets[eta].u = stack.U.row(eta);
    sets[eta].v = stack.V.row(eta);
    sets[eta].h = stack.h(eta);
  }
  return sets;
}

Eigen::MatrixXd apply_entropic(const Eigen::MatrixXd& W, double tau, double floor) {
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  if (!W.allFinite()) throw std::invalid_argument("non-finite score entry");
  return (W.array() / tau).exp().max(floor).matrix();
}

Eigen::MatrixXd init_plan(const Eigen::MatrixXd& S) {
  Eigen::MatrixXd plan = S;
  for (int j = 0; j < S.cols(); ++j) {
    double c = S.col(j).sum();
    if (c > 0.0) plan.col(j) /= c;
  }
  return plan;
}

void row_step(Eigen::MatrixXd& plan, const MarginalSet& set, double floor,
              Eigen::VectorXd* denom_out, int* rescues) {
  const int m = static_cast<int>(plan.rows());
  Eigen::VectorXd denom(m);
  for (int i = 0; i < m; ++i) {
    double raw = plan.row(i).dot(set.u);
    denom(i) = std::max(raw, floor);
    if (raw < floor && set.v(i) > 0.0 && rescues) ++(*rescues);
  }
  for (int j = 0; j < plan.cols(); ++j) {
    if (set.u(j) <= 0.0) continue;  // zero-mass column: untouched
    for (int i = 0; i < m; ++i) plan(i, j) = plan(i, j) * set.v(i) / denom(i);
  }
  if (denom_out) *denom_out = denom;
}

void col_step(Eigen::MatrixXd& plan, const MarginalSet& set, double floor,
              Eigen::VectorXd* denom_out, int* rescues) {
  const int n = static_cast<int>(plan.cols());
  Eigen::VectorXd denom = Eigen::VectorXd::Ones(n);
  for (int j = 0; j < n; ++j) {
    if (set.u(j) <= 0.0) continue;
    double raw = plan.col(j).sum() * set.u(j);
    denom(j) = std::max(raw, floor);
    if (raw < floor && rescues) ++(*rescues);
    plan.col(j) *= set.u(j) / denom(j);
  }
  if (denom_out) *denom_out = denom;
}

double l1_violation(const Eigen::MatrixXd& plan, const MarginalSet& set) {
  return ((plan * set.u) - set.v).cwiseAbs().sum();
}

double l1_col_violation(const Eigen::MatrixXd& plan, const MarginalSet& set) {
  double err = 0.0;
  for (int j = 0; j < plan.cols(); ++j)
    if (set.u(j) > 0.0) err += set.u(j) * std::abs(plan.col(j).sum() - 1.0);
  return err;
}

namespace {

void score_stats(const Eigen::MatrixXd& S, ConvergenceReport& rep) {
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
  int delta = 0;
  for (int j = 0; j < S.cols(); ++j) {
    int nz = 0;
    for (int i = 0; i < S.rows(); ++i) {
      double s = S(i, j);
      if (s > 0.0) {
        ++nz;
        smin = std::min(smin, s);
        smax = std::max(smax, s);
      }
    }
    delta = std::max(delta, nz);
  }
  rep.alpha = (smax > 0.0) ? smin / smax : 0.0;
  rep.delta = delta;
}

}  // namespace

SinkhornResult multi_set_sinkhorn(const Eigen::MatrixXd& S, const std::vector<MarginalSet>& sets,
                                  const SolverConfig& cfg) {
  if (sets.empty()) throw std::invalid_argument("need at least one marginal set");
  for (const auto& set : sets) {
    if (set.u.size() != S.cols() || set.v.size() != S.rows())
      throw std::invalid_argument("marginal set dimensions do not match the score matrix");
  }
  if (S.minCoeff() < 0.0 || !S.allFinite())
    throw std::invalid_argument("score matrix must be finite and non-negative");

  SinkhornResult res;
  res.report.per_set_err.resize(static_cast<int>(sets.size()));
  score_stats(S, res.report);
  if (cfg.record_tape) {
    res.tape = std::make_shared<IterationTape>();
    res.tape->S = S;
    res.tape->init_colsum = S.colwise().sum();
  }

  Eigen::MatrixXd plan = init_plan(S);
  const int k = static_cast<int>(sets.size());
  for (int cycle = 1; cycle <= cfg.max_iters; ++cycle) {
    for (int eta = 0; eta < k; ++eta) {
      if (cfg.record_tape) {
        StepRecord rec;
        rec.eta = eta;
        rec.phase = Phase::Row;
        rec.pre = plan;
        row_step(plan, sets[eta], cfg.floor, &rec.denom, &res.report.degenerate_rescues);
        res.tape->steps.push_back(std::move(rec));
        StepRecord rec2;
        rec2.eta = eta;
        rec2.phase = Phase::Col;
        rec2.pre = plan;
        col_step(plan, sets[eta], cfg.floor, &rec2.denom, &res.report.degenerate_rescues);
        res.tape->steps.push_back(std::move(rec2));
      } else {
        row_step(plan, sets[eta], cfg.floor, nullptr, &res.report.degenerate_rescues);
        col_step(plan, sets[eta], cfg.floor, nullptr, &res.report.degenerate_rescues);
      }
    }
    res.report.cycles = cycle;
    double worst = 0.0;
    for (int eta = 0; eta < k; ++eta) {
      res.report.per_set_err(eta) = l1_violation(plan, sets[eta]);
      worst = std::max(worst, res.report.per_set_err(eta));
    }
    if (cfg.tol > 0.0 && worst <= cfg.tol) {
      res.report.converged = true;
      break;
    }
  }
  if (cfg.record_tape) res.tape->cycles = res.report.cycles;
  res.plan = std::move(plan);
  return res;
}

SinkhornResult multi_set_sinkhorn(const Eigen::MatrixXd& S, const MarginalStack& stack,
                                  const SolverConfig& cfg) {
  return multi_set_sinkhorn(S, stack_to_sets(stack), cfg);
}

SinkhornResult classic_sinkhorn(const Eigen::MatrixXd& S, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& v, const SolverConfig& cfg) {
  const int m = static_cast<int>(S.rows()), n = static_cast<int>(S.cols());
  if (u.size() != n || v.size() != m) throw std::invalid_argument("marginal dimension mismatch");

  SinkhornResult res;
  res.report.per_set_err.resize(1);
  score_stats(S, res.report);

  Eigen::MatrixXd plan = S;
  for (int j = 0; j < n; ++j) {
    double c = plan.col(j).sum();
    if (c > 0.0) plan.col(j) /= c;
  }
  for (int cycle = 1; cycle <= cfg.max_iters; ++cycle) {
    for (int i = 0; i < m; ++i) {
      double raw = plan.row(i).dot(u);
      double den = std::max(raw, cfg.floor);
      if (raw < cfg.floor && v(i) > 0.0) ++res.report.degenerate_rescues;
      for (int j = 0; j < n; ++j)
        if (u(j) > 0.0) plan(i, j) = plan(i, j) * v(i) / den;
    }
    for (int j = 0; j < n; ++j) {
      if (u(j) <= 0.0) continue;
      double raw = plan.col(j).sum() * u(j);
      double den = std::max(raw, cfg.floor);
      if (raw < cfg.floor) ++res.report.degenerate_rescues;
      plan.col(j) *= u(j) / den;
    }
    res.report.cycles = cycle;
    res.report.per_set_err(0) = ((plan * u) - v).cwiseAbs().sum();
    if (cfg.tol > 0.0 && res.report.per_set_err(0) <= cfg.tol) {
      res.report.converged = true;
      break;
    }
  }
  res.plan = std::move(plan);
  return res;
}

}  // namespace linsat
