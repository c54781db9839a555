#include "linsat/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "linsat/autodiff.hpp"
#include "linsat/rng.hpp"

namespace linsat {

FeasibleInstance make_feasible_instance(uint64_t seed, int m, int n, int k) {
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("m, n, k must be >= 1");
  FeasibleInstance inst;
  auto rng = make_rng(seed, "feasible-instance");
  std::uniform_real_distribution<double> zdist(0.05, 1.0);
  std::uniform_real_distribution<double> udist(0.2, 2.0);
  std::uniform_real_distribution<double> sdist(0.1, 2.0);

  inst.Z.resize(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) inst.Z(i, j) = zdist(rng);
    inst.Z.col(j) /= inst.Z.col(j).sum();
  }
  inst.sets.resize(k);
  for (int eta = 0; eta < k; ++eta) {
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) u(j) = udist(rng);
    inst.sets[eta].u = u;
    inst.sets[eta].v = inst.Z * u;
    inst.sets[eta].h = u.sum();
    inst.h_hat = std::max(inst.h_hat, inst.sets[eta].h);
  }
  inst.S.resize(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) inst.S(i, j) = sdist(rng);
  inst.alpha = inst.S.minCoeff() / inst.S.maxCoeff();
  inst.delta = m;
  return inst;
}

std::vector<std::string> audit_instance(const FeasibleInstance& inst, double tol) {
  std::vector<std::string> issues;
  for (int j = 0; j < inst.Z.cols(); ++j)
    if (std::abs(inst.Z.col(j).sum() - 1.0) > tol)
      issues.push_back("Z column " + std::to_string(j) + " does not sum to 1");
  if (inst.Z.minCoeff() <= 0.0 || inst.Z.maxCoeff() >= 1.0)
    issues.push_back("Z entries must lie strictly inside (0,1)");
  for (size_t eta = 0; eta < inst.sets.size(); ++eta) {
    const auto& set = inst.sets[eta];
    if (std::abs(set.u.sum() - set.h) > tol * std::max(1.0, set.h))
      issues.push_back("set " + std::to_string(eta) + ": sum(u) != h");
    if (std::abs(set.v.sum() - set.h) > tol * std::max(1.0, set.h))
      issues.push_back("set " + std::to_string(eta) + ": sum(v) != h");
    if (l1_violation(inst.Z, set) > tol * std::max(1.0, set.h))
      issues.push_back("set " + std::to_string(eta) + ": Z misses the row marginals");
  }
  if (inst.S.minCoeff() <= 0.0) issues.push_back("S must be strictly positive");
  return issues;
}

double matrix_kl(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& plan, const MarginalSet& set) {
  double acc = 0.0;
  for (int j = 0; j < Z.cols(); ++j) {
    if (set.u(j) <= 0.0) continue;
    for (int i = 0; i < Z.rows(); ++i) {
      double mass = Z(i, j) * set.u(j);
      if (mass <= 0.0) continue;
      if (plan(i, j) <= 0.0)
        throw std::domain_error("matrix_kl: plan entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") is zero where Z carries mass");
      acc += mass * std::log(Z(i, j) / plan(i, j));
    }
  }
  return acc / set.h;
}

BoundCheck check_initial_bound(const FeasibleInstance& inst, double slack) {
  BoundCheck chk;
  chk.bound = std::log(1.0 + 2.0 * inst.delta / inst.alpha);
  Eigen::MatrixXd plan0 = init_plan(inst.S);
  chk.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& set : inst.sets) {
    double d = matrix_kl(inst.Z, plan0, set);
    chk.divergences.push_back(d);
    chk.worst_margin = std::max(chk.worst_margin, d - chk.bound);
    if (d > chk.bound + slack) chk.ok = false;
  }
  return chk;
}

namespace {

// KL term of the row step: sum_i (v_i/h) log(v_i / v_t_i), where v_t are the
// achieved row marginals of the pre-step plan. Masses stay scaled by 1/h so
// the identity with matrix_kl is exact.
double row_step_kl(const Eigen::MatrixXd& before, const MarginalSet& set) {
  Eigen::VectorXd vt = before * set.u;
  double acc = 0.0;
  for (int i = 0; i < set.v.size(); ++i) {
    if (set.v(i) <= 0.0) continue;
    acc += (set.v(i) / set.h) * std::log(set.v(i) / vt(i));
  }
  return acc;
}

// KL term of the column step: sum_j (u_j/h) log(u_j / den_j) with
// den_j = u_j * colsum_j of the post-row-step plan.
double col_step_kl(const Eigen::MatrixXd& mid, const MarginalSet& set) {
  double acc = 0.0;
  for (int j = 0; j < set.u.size(); ++j) {
    if (set.u(j) <= 0.0) continue;
    double den = set.u(j) * mid.col(j).sum();
    acc += (set.u(j) / set.h) * std::log(set.u(j) / den);
  }
  return acc;
}

}  // namespace

StepResiduals check_step_identities(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& before,
                                    const Eigen::MatrixXd& mid, const Eigen::MatrixXd& after,
                                    const MarginalSet& set) {
  StepResiduals res;
  double d_before = matrix_kl(Z, before, set);
  double d_mid = matrix_kl(Z, mid, set);
  double d_after = matrix_kl(Z, after, set);
  res.kl_row = row_step_kl(before, set);
  res.kl_col = col_step_kl(mid, set);
  res.row = std::abs((d_before - d_mid) - res.kl_row);
  res.col = std::abs((d_mid - d_after) - res.kl_col);
  return res;
}

ConvergenceCurve convergence_curve(const FeasibleInstance& inst, const SolverConfig& cfg,
                                   const std::vector<double>& eps_grid) {
  ConvergenceCurve curve;
  SinkhornResult run = forward_with_tape(inst.S, inst.sets, cfg);
  curve.report = run.report;
  curve.budget = std::log(1.0 + 2.0 * inst.delta / inst.alpha);

  const auto& steps = run.tape->steps;
  const int k = static_cast<int>(inst.sets.size());
  Eigen::MatrixXd plan0 = init_plan(inst.S);
  curve.initial_divergence = matrix_kl(inst.Z, plan0, inst.sets[0]);
  curve.final_divergence = matrix_kl(inst.Z, run.plan, inst.sets[0]);

  auto plan_after = [&](size_t s) -> const Eigen::MatrixXd& {
    return (s + 1 < steps.size()) ? steps[s + 1].pre : run.plan;
  };

  // Per-cycle max L1 over all sets; cycle 0 is the initialized plan.
  std::vector<double> cycle_err;
  auto max_err = [&](const Eigen::MatrixXd& plan) {
    double worst = 0.0;
    for (const auto& set : inst.sets) worst = std::max(worst, l1_violation(plan, set));
    return worst;
  };
  cycle_err.push_back(max_err(plan0));

  for (size_t s = 0; s + 1 < steps.size(); s += 2) {
    const StepRecord& row_rec = steps[s];
    const StepRecord& col_rec = steps[s + 1];
    const MarginalSet& set = inst.sets[row_rec.eta];
    const Eigen::MatrixXd& before = row_rec.pre;
    const Eigen::MatrixXd& mid = col_rec.pre;
    const Eigen::MatrixXd& after = plan_after(s + 1);

    StepResiduals sr = check_step_identities(inst.Z, before, mid, after, set);
    curve.max_residual = std::max(curve.max_residual, std::max(sr.row, sr.col));
    curve.kl_sum += sr.kl_row + sr.kl_col;

    TrajectoryPoint rowpt;
    rowpt.step = static_cast<int>(s);
    rowpt.eta = row_rec.eta;
    rowpt.phase = Phase::Row;
    rowpt.l1 = l1_violation(before, set);
    rowpt.kl = sr.kl_row;
    rowpt.divergence = matrix_kl(inst.Z, mid, set);
    rowpt.residual = sr.row;
    curve.trajectory.push_back(rowpt);

    TrajectoryPoint colpt;
    colpt.step = static_cast<int>(s + 1);
    colpt.eta = col_rec.eta;
    colpt.phase = Phase::Col;
    colpt.l1 = l1_col_violation(mid, set);
    colpt.kl = sr.kl_col;
    colpt.divergence = matrix_kl(inst.Z, after, set);
    colpt.residual = sr.col;
    curve.trajectory.push_back(colpt);

    if (row_rec.eta == k - 1) cycle_err.push_back(max_err(after));
  }

  for (double eps : eps_grid) {
    int first = -1;
    for (size_t c = 0; c < cycle_err.size(); ++c)
      if (cycle_err[c] <= eps) {
        first = static_cast<int>(c);
        break;
      }
    curve.iters_to_eps.emplace_back(eps, first);
  }
  return curve;
}

GeneratedSystem make_feasible_system(uint64_t seed, int l, int k) {
  if (l < 2 || k < 1) throw std::invalid_argument("need l >= 2 and k >= 1");
  GeneratedSystem gen;
  gen.sys.l = l;
  auto rng = make_rng(seed, "feasible-system");
  std::uniform_real_distribution<double> interior(0.15, 0.85);
  std::uniform_real_distribution<double> coef(0.2, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> kind_draw(0, 2);

  gen.interior_point.resize(l);
  for (int i = 0; i < l; ++i) gen.interior_point(i) = interior(rng);

  int equalities = 0;
  for (int row = 0; row < k; ++row) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(l);
    bool any = false;
    while (!any) {
      for (int i = 0; i < l; ++i) {
        if (unit(rng) < 0.25) {
          c(i) = coef(rng);
          any = true;
        } else {
          c(i) = 0.0;
        }
      }
    }
    double val = c.dot(gen.interior_point);
    int kind = kind_draw(rng);
    if (kind == 2 && equalities >= 3) kind = kind_draw(rng) % 2;
    if (kind == 0) {
      gen.sys.packing.push_back({c, val + 0.05 + 0.45 * unit(rng)});
    } else if (kind == 1) {
      gen.sys.covering.push_back({c, val * (0.5 + 0.45 * unit(rng))});
    } else {
      gen.sys.equality.push_back({c, val});
      ++equalities;
    }
  }
  return gen;
}

}  // namespace linsat
