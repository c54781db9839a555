#include "linsat/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "linsat/layer.hpp"

namespace linsat {

Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& y, double step) {
  if (step <= 0.0) throw std::invalid_argument("step must be positive");
  Eigen::VectorXd g(y.size());
  for (int i = 0; i < y.size(); ++i) {
    Eigen::VectorXd yp = y, ym = y;
    yp(i) += step;
    ym(i) -= step;
    double fp = f(yp), fm = f(ym);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::domain_error("non-finite evaluation in finite differences");
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

Assignment hungarian(const Eigen::MatrixXd& cost, bool maximize) {
  const int n1 = static_cast<int>(cost.rows());
  const int n2 = static_cast<int>(cost.cols());
  const int n = std::max(n1, n2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(n1, n2) = maximize ? (-cost).eval() : cost;

  // Shortest augmenting path with row/column potentials, 1-based helpers.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0);
  std::vector<int> way(n + 1, 0), match(n + 1, 0);  // match[col] = row
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a(i0 - 1, j - 1) - pu[i0] - pv[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          pu[match[j]] += delta;
          pv[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment res;
  res.col_of_row.assign(n1, -1);
  for (int j = 1; j <= n; ++j) {
    int i = match[j] - 1;
    if (i < n1 && j - 1 < n2) {
      res.col_of_row[i] = j - 1;
      res.value += cost(i, j - 1);
    }
  }
  return res;
}

Tour tsp_exhaustive(const Eigen::MatrixXd& D, int s, int e, int priority, int m) {
  const int n = static_cast<int>(D.rows());
  if (n > 11) throw std::invalid_argument("exhaustive search limited to n <= 11");
  if (s == e || s < 0 || e < 0 || s >= n || e >= n) throw std::invalid_argument("bad endpoints");
  std::vector<int> middle;
  for (int i = 0; i < n; ++i)
    if (i != s && i != e) middle.push_back(i);
  std::sort(middle.begin(), middle.end());

  Tour best;
  best.length = std::numeric_limits<double>::infinity();
  do {
    if (priority >= 0) {
      // 1-based position of the priority city must be <= m+1; s sits at 1.
      int pos = 0;
      for (size_t i = 0; i < middle.size(); ++i)
        if (middle[i] == priority) pos = static_cast<int>(i) + 2;
      if (priority == e) pos = n;
      if (pos > m + 1) continue;
    }
    double len = 0.0;
    int prev = s;
    for (int c : middle) {
      len += D(prev, c);
      prev = c;
    }
    len += D(prev, e);
    if (len < best.length) {
      best.length = len;
      best.order.clear();
      best.order.push_back(s);
      best.order.insert(best.order.end(), middle.begin(), middle.end());
      best.order.push_back(e);
    }
  } while (std::next_permutation(middle.begin(), middle.end()));
  if (!std::isfinite(best.length)) throw std::domain_error("no feasible tour");
  return best;
}

DiscretePoint discrete_limit_enumeration(const LinearConstraintSystem& sys,
                                         const Eigen::VectorXd& w, double tol) {
  if (sys.l > 16) throw std::invalid_argument("enumeration limited to l <= 16");
  if (w.size() != sys.l) throw std::invalid_argument("weight dimension mismatch");
  DiscretePoint best;
  Eigen::VectorXd x(sys.l);
  const uint32_t limit = 1u << sys.l;
  for (uint32_t maskv = 0; maskv < limit; ++maskv) {
    for (int i = 0; i < sys.l; ++i) x(i) = (maskv >> (sys.l - 1 - i)) & 1u;
    if (max_violation(sys, x) > tol) continue;
    double score = w.dot(x);
    // strict improvement keeps the lexicographically smallest argmax
    if (!best.found || score > best.score) {
      best.found = true;
      best.score = score;
      best.x = x;
    }
  }
  return best;
}

double grad_check_max_rel_err(const LinearConstraintSystem& sys, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, const SolverConfig& cfg, double step) {
  SolverConfig fwd = cfg;
  fwd.record_tape = true;
  ProjectionResult proj = project(y, sys, fwd);

  Eigen::VectorXd ga = project_backward(proj, w);

  // Finite differences must evaluate the same truncated map: rerun with the
  // cycle count frozen at what the taped forward actually executed.
  SolverConfig frozen = cfg;
  frozen.record_tape = false;
  frozen.tol = 0.0;
  frozen.max_iters = proj.report.cycles;
  auto f = [&](const Eigen::VectorXd& yy) { return w.dot(project(yy, sys, frozen).x); };
  Eigen::VectorXd gfd = finite_diff_grad(f, y, step);

  double denom = std::max(gfd.cwiseAbs().maxCoeff(), 1e-12);
  return (ga - gfd).cwiseAbs().maxCoeff() / denom;
}

}  // namespace linsat
