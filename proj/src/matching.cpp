#include "linsat/apps/matching.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "linsat/oracles.hpp"
#include "linsat/rng.hpp"

namespace linsat {

MatchingInstance make_matching_instance(uint64_t seed, int n1, int n2, int phi, double sigma) {
  if (phi > std::min(n1, n2)) throw std::invalid_argument("phi exceeds min(n1, n2)");
  MatchingInstance inst;
  inst.n1 = n1;
  inst.n2 = n2;
  inst.phi = phi;
  auto rng = make_rng(seed, "matching-instance");

  std::vector<int> rows(n1), cols(n2);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  for (int t = 0; t < phi; ++t) inst.truth.emplace_back(rows[t], cols[t]);

  std::normal_distribution<double> noise(0.0, sigma);
  inst.M = Eigen::MatrixXd::Zero(n1, n2);
  for (const auto& [i, j] : inst.truth) inst.M(i, j) = 1.0;
  if (sigma > 0.0)
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) inst.M(i, j) += noise(rng);
  return inst;
}

LinearConstraintSystem gm_build_constraints(int n1, int n2, int phi) {
  LinearConstraintSystem sys;
  sys.l = n1 * n2;
  auto pack = [&](auto&& fill, double rhs) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(sys.l);
    fill(a);
    sys.packing.push_back({a, rhs});
  };
  for (int j = 0; j < n2; ++j)
    pack([&](Eigen::VectorXd& a) {
      for (int i = 0; i < n1; ++i) a(i * n2 + j) = 1.0;
    }, 1.0);
  for (int i = 0; i < n1; ++i)
    pack([&](Eigen::VectorXd& a) {
      for (int j = 0; j < n2; ++j) a(i * n2 + j) = 1.0;
    }, 1.0);
  pack([&](Eigen::VectorXd& a) { a.setOnes(); }, static_cast<double>(phi));
  return sys;
}

MatchResult gm_solve(const MatchingInstance& inst, const SolverConfig& cfg) {
  LinearConstraintSystem sys = gm_build_constraints(inst.n1, inst.n2, inst.phi);
  Eigen::MatrixXd Mt = inst.M.transpose();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(Mt.data(), inst.n1 * inst.n2);

  MatchResult res;
  ProjectionResult proj = project(y, sys, cfg);
  res.report = proj.report;
  res.projected =
      Eigen::Map<const Eigen::MatrixXd>(proj.x.data(), inst.n2, inst.n1).transpose();

  Assignment asg = hungarian(res.projected, /*maximize=*/true);
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < inst.n1; ++i)
    if (asg.col_of_row[i] >= 0) candidates.emplace_back(i, asg.col_of_row[i]);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const auto& a, const auto& b) {
                     return res.projected(a.first, a.second) > res.projected(b.first, b.second);
                   });
  if (static_cast<int>(candidates.size()) < inst.phi)
    throw std::runtime_error("assignment produced fewer pairs than phi");
  candidates.resize(inst.phi);
  std::sort(candidates.begin(), candidates.end());
  res.pairs = candidates;

  std::set<std::pair<int, int>> truth(inst.truth.begin(), inst.truth.end());
  int correct = 0;
  for (const auto& p : res.pairs)
    if (truth.count(p)) ++correct;
  double precision = static_cast<double>(correct) / inst.phi;
  double recall = static_cast<double>(correct) / inst.truth.size();
  res.f1 = (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return res;
}

}  // namespace linsat
