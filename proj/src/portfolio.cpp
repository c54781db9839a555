#include "linsat/apps/portfolio.hpp"

#include <cmath>
#include <stdexcept>

#include "linsat/rng.hpp"

namespace linsat {

PortfolioInstance make_portfolio_instance(uint64_t seed, int n, int n_preferred, int days,
                                          double p_pref, double drift_pref, double drift_other,
                                          double vol) {
  if (n_preferred < 1 || n_preferred > n) throw std::invalid_argument("bad preferred count");
  PortfolioInstance inst;
  inst.p_pref = p_pref;
  for (int i = 0; i < n_preferred; ++i) inst.preferred.push_back(i);
  auto rng = make_rng(seed, "portfolio-instance");
  std::normal_distribution<double> noise(0.0, 1.0);
  inst.prices.resize(days, n);
  for (int a = 0; a < n; ++a) {
    double mu = a < n_preferred ? drift_pref : drift_other;
    double price = 100.0;
    for (int t = 0; t < days; ++t) {
      inst.prices(t, a) = price;
      double step = (mu - 0.5 * vol * vol) / 252.0 + vol / std::sqrt(252.0) * noise(rng);
      price *= std::exp(step);
    }
  }
  return inst;
}

LinearConstraintSystem pf_build_constraints(int n, const std::vector<int>& preferred,
                                            double p_pref) {
  LinearConstraintSystem sys;
  sys.l = n;
  sys.equality.push_back({Eigen::VectorXd::Ones(n), 1.0});
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
  for (int i : preferred) ind(i) = 1.0;
  sys.covering.push_back({ind, p_pref});
  return sys;
}

std::optional<double> sharpe_ratio(const Eigen::VectorXd& r, double rf) {
  if (r.size() < 2) throw std::invalid_argument("need at least two returns");
  double mu = r.mean();
  double var = (r.array() - mu).square().sum() / (r.size() - 1);
  if (var <= 0.0) return std::nullopt;
  return (252.0 * mu - rf) / (std::sqrt(252.0) * std::sqrt(var));
}

namespace {

Eigen::MatrixXd daily_returns(const Eigen::MatrixXd& prices) {
  Eigen::MatrixXd R(prices.rows() - 1, prices.cols());
  for (int t = 0; t + 1 < prices.rows(); ++t)
    R.row(t) = prices.row(t + 1).array() / prices.row(t).array() - 1.0;
  return R;
}

// Gradient of the annualized Sharpe in the allocation x.
Eigen::VectorXd sharpe_grad(const Eigen::MatrixXd& R, const Eigen::VectorXd& x, double rf) {
  Eigen::VectorXd r = R * x;
  const double n = static_cast<double>(r.size());
  double mu = r.mean();
  double sigma = std::sqrt((r.array() - mu).square().sum() / (n - 1));
  Eigen::VectorXd dmu = R.colwise().mean();
  Eigen::VectorXd dsigma = R.transpose() * (r.array() - mu).matrix() / ((n - 1) * sigma);
  return 252.0 * dmu / (std::sqrt(252.0) * sigma) -
         (252.0 * mu - rf) * dsigma / (std::sqrt(252.0) * sigma * sigma);
}

}  // namespace

PortfolioResult pf_optimize(const PortfolioInstance& inst, const SolverConfig& cfg, double lr,
                            int iters, double train_frac) {
  const int n = static_cast<int>(inst.prices.cols());
  LinearConstraintSystem sys = pf_build_constraints(n, inst.preferred, inst.p_pref);
  Eigen::MatrixXd R = daily_returns(inst.prices);
  int split = static_cast<int>(R.rows() * train_frac);
  Eigen::MatrixXd Rtrain = R.topRows(split);
  Eigen::MatrixXd Rtest = R.bottomRows(R.rows() - split);

  SolverConfig run_cfg = cfg;
  run_cfg.record_tape = true;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);

  PortfolioResult out;
  int restarts = 0;
  for (int t = 0; t < iters; ++t) {
    ProjectionResult proj = project(y, sys, run_cfg);
    out.worst_violation = std::max(out.worst_violation, max_violation(sys, proj.x));
    out.last_report = proj.report;
    auto s = sharpe_ratio(Rtrain * proj.x, inst.rf);
    if (!s) {
      if (restarts++ == 0) {
        y.array() += 1e-3;  // perturbation restart
        continue;
      }
      throw std::runtime_error("Sharpe undefined twice during optimization");
    }
    Eigen::VectorXd dx = sharpe_grad(Rtrain, proj.x, inst.rf);
    Eigen::VectorXd dy = project_backward(proj, dx);
    y += lr * dy;
    out.x = proj.x;
    out.sharpe_in = *s;
  }

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  out.sharpe_uniform = sharpe_ratio(Rtrain * uniform, inst.rf).value_or(0.0);
  if (Rtest.rows() >= 2) out.sharpe_out = sharpe_ratio(Rtest * out.x, inst.rf);
  return out;
}

}  // namespace linsat
