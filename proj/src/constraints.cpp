#include "linsat/constraints.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace linsat {

namespace {

void check_row(ValidationReport& rep, const Eigen::VectorXd& coef, double rhs, int l,
               const std::string& tag) {
  if (coef.size() != l) {
    rep.violations.push_back(tag + ": coefficient length " + std::to_string(coef.size()) +
                             " != l=" + std::to_string(l));
    return;
  }
  for (int i = 0; i < coef.size(); ++i) {
    if (!std::isfinite(coef(i)) || coef(i) < 0.0) {
      rep.violations.push_back(tag + ": negative coefficient at index " + std::to_string(i));
      break;
    }
  }
  if (!std::isfinite(rhs) || rhs < 0.0) rep.violations.push_back(tag + ": negative rhs");
}

}  // namespace

ValidationReport validate_system(const LinearConstraintSystem& sys) {
  ValidationReport rep;
  if (sys.l <= 0) rep.violations.push_back("l must be positive");
  if (sys.num_rows() < 1) rep.violations.push_back("at least one constraint row required");
  int idx = 0;
  for (const auto& row : sys.packing)
    check_row(rep, row.a, row.b, sys.l, "packing[" + std::to_string(idx++) + "]");
  idx = 0;
  for (const auto& row : sys.covering) {
    std::string tag = "covering[" + std::to_string(idx++) + "]";
    check_row(rep, row.c, row.d, sys.l, tag);
    if (row.c.size() == sys.l && row.c.sum() < row.d)
      rep.violations.push_back(tag + ": sum(c) < d (infeasible by construction)");
  }
  idx = 0;
  for (const auto& row : sys.equality) {
    std::string tag = "equality[" + std::to_string(idx++) + "]";
    check_row(rep, row.e, row.f, sys.l, tag);
    if (row.e.size() == sys.l && row.f > row.e.sum())
      rep.violations.push_back(tag + ": f > sum(e) (infeasible by construction)");
  }
  rep.ok = rep.violations.empty();
  return rep;
}

MarginalStack compile_to_marginals(const LinearConstraintSystem& sys) {
  ValidationReport rep = validate_system(sys);
  if (!rep.ok) {
    std::string msg = "invalid constraint system:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }

  // Coverings with d=0 are vacuous and compile to nothing; equality rows with
  // zero total mass are no-ops as well.
  int n_ineq = static_cast<int>(sys.packing.size());
  for (const auto& row : sys.covering)
    if (row.d > 0.0) ++n_ineq;

  MarginalStack ms;
  ms.l = sys.l;
  ms.n_cols = sys.l + n_ineq;

  std::vector<Eigen::VectorXd> us;
  std::vector<Eigen::Vector2d> vs;
  int next_dummy = sys.l;

  for (const auto& row : sys.packing) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ms.n_cols);
    u.head(sys.l) = row.a;
    int j = next_dummy++;
    u(j) = row.b;
    us.push_back(u);
    vs.emplace_back(row.b, row.a.sum());
    ms.dummy_col.push_back(j);
    ms.kind.push_back(ConstraintKind::Packing);
    ms.gamma.push_back(0.0);
  }
  for (const auto& row : sys.covering) {
    if (row.d <= 0.0) continue;
    double gamma = std::floor(row.c.sum() / row.d);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ms.n_cols);
    u.head(sys.l) = row.c;
    int j = next_dummy++;
    u(j) = gamma * row.d;
    us.push_back(u);
    vs.emplace_back((gamma + 1.0) * row.d, row.c.sum() - row.d);
    ms.dummy_col.push_back(j);
    ms.kind.push_back(ConstraintKind::Covering);
    ms.gamma.push_back(gamma);
  }
  for (const auto& row : sys.equality) {
    if (row.e.sum() <= 0.0) continue;  // zero-mass no-op
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ms.n_cols);
    u.head(sys.l) = row.e;
    us.push_back(u);
    vs.emplace_back(row.f, row.e.sum() - row.f);
    ms.dummy_col.push_back(-1);
    ms.kind.push_back(ConstraintKind::Equality);
    ms.gamma.push_back(0.0);
  }

  ms.k = static_cast<int>(us.size());
  if (ms.k == 0) throw std::invalid_argument("constraint system compiles to zero marginal sets");
  ms.U.resize(ms.k, ms.n_cols);
  ms.V.resize(ms.k, 2);
  ms.h.resize(ms.k);
  for (int eta = 0; eta < ms.k; ++eta) {
    ms.U.row(eta) = us[eta];
    ms.V.row(eta) = vs[eta];
    ms.h(eta) = vs[eta].sum();
  }
  return ms;
}

double max_violation(const LinearConstraintSystem& sys, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& row : sys.packing) worst = std::max(worst, row.a.dot(x) - row.b);
  for (const auto& row : sys.covering) worst = std::max(worst, row.d - row.c.dot(x));
  for (const auto& row : sys.equality) worst = std::max(worst, std::abs(row.e.dot(x) - row.f));
  return worst;
}

Eigen::VectorXd plan_row_from_point(const LinearConstraintSystem& sys, const MarginalStack& stack,
                                    const Eigen::VectorXd& x, double tol) {
  if (x.size() != sys.l) throw std::invalid_argument("point dimension mismatch");
  if (x.minCoeff() < -tol || x.maxCoeff() > 1.0 + tol)
    throw std::invalid_argument("point outside the unit box");
  if (max_violation(sys, x) > tol) throw std::invalid_argument("point violates the system");

  Eigen::VectorXd z = Eigen::VectorXd::Zero(stack.n_cols);
  z.head(sys.l) = x;
  for (int eta = 0; eta < stack.k; ++eta) {
    int j = stack.dummy_col[eta];
    if (j < 0) continue;
    double used = stack.U.row(eta).head(sys.l).dot(x);
    double w = stack.U(eta, j);  // b for packing, gamma*d for covering
    double slack = stack.V(eta, 0) - used;
    z(j) = w > 0.0 ? slack / w : 0.0;
    z(j) = std::min(1.0, std::max(0.0, z(j)));
  }
  return z;
}

LinearConstraintSystem system_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LinearConstraintSystem sys;
  sys.l = j.at("l").get<int>();
  auto vec = [](const nlohmann::json& arr) {
    Eigen::VectorXd v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
    return v;
  };
  if (j.contains("packing"))
    for (const auto& row : j["packing"])
      sys.packing.push_back({vec(row.at("a")), row.at("b").get<double>()});
  if (j.contains("covering"))
    for (const auto& row : j["covering"])
      sys.covering.push_back({vec(row.at("c")), row.at("d").get<double>()});
  if (j.contains("equality"))
    for (const auto& row : j["equality"])
      sys.equality.push_back({vec(row.at("e")), row.at("f").get<double>()});
  return sys;
}

std::string system_to_json(const LinearConstraintSystem& sys) {
  nlohmann::json j;
  j["l"] = sys.l;
  auto arr = [](const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  j["packing"] = nlohmann::json::array();
  for (const auto& row : sys.packing) j["packing"].push_back({{"a", arr(row.a)}, {"b", row.b}});
  j["covering"] = nlohmann::json::array();
  for (const auto& row : sys.covering) j["covering"].push_back({{"c", arr(row.c)}, {"d", row.d}});
  j["equality"] = nlohmann::json::array();
  for (const auto& row : sys.equality) j["equality"].push_back({{"e", arr(row.e)}, {"f", row.f}});
  return j.dump(2);
}

}  // namespace linsat
