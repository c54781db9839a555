#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <algorithm>
#include <set>

#include "doctest.h"
#include "linsat/apps/matching.hpp"
#include "linsat/constraints.hpp"

using namespace linsat;

TEST_CASE("constraint layout for a 3x3 problem with phi = 2") {
  auto sys = gm_build_constraints(3, 3, 2);
  CHECK(sys.l == 9);
  CHECK(sys.packing.size() == 7);  // 3 cols + 3 rows + 1 total
  CHECK(sys.covering.empty());
  CHECK(sys.equality.empty());
  CHECK(validate_system(sys).ok);

  // Total-mass row has all-ones coefficients and rhs phi.
  const auto& total = sys.packing.back();
  CHECK(total.b == 2.0);
  CHECK(total.a.sum() == doctest::Approx(9.0));
  CHECK(total.a.minCoeff() == 1.0);

  // Each variable appears in exactly one row-sum and one column-sum row.
  for (int v = 0; v < 9; ++v) {
    int hits = 0;
    for (size_t r = 0; r + 1 < sys.packing.size(); ++r)
      if (sys.packing[r].a(v) != 0.0) ++hits;
    CHECK(hits == 2);
  }
}

TEST_CASE("instance construction embeds the planted correspondence") {
  auto inst = make_matching_instance(4, 5, 7, 3, 0.0);
  CHECK(inst.n1 == 5);
  CHECK(inst.n2 == 7);
  CHECK(inst.truth.size() == 3);
  std::set<int> rows, cols;
  for (auto [i, j] : inst.truth) {
    CHECK(inst.M(i, j) == doctest::Approx(1.0));
    rows.insert(i);
    cols.insert(j);
  }
  CHECK(rows.size() == 3);  // injective
  CHECK(cols.size() == 3);
}

TEST_CASE("noise-free instances are solved exactly") {
  for (uint64_t seed : {0u, 1u, 2u, 3u, 4u}) {
    auto inst = make_matching_instance(seed, 4, 6, 3, 0.0);
    SolverConfig cfg;
    cfg.tau = 0.05;
    cfg.tol = 1e-6;
    cfg.max_iters = 4000;
    auto res = gm_solve(inst, cfg);
    CHECK(res.pairs.size() == 3);
    CHECK(res.f1 == doctest::Approx(1.0));
  }
}

TEST_CASE("moderate noise still yields perfect recovery") {
  auto inst = make_matching_instance(11, 5, 5, 4, 0.1);
  SolverConfig cfg;
  cfg.tau = 0.05;
  cfg.tol = 1e-6;
  cfg.max_iters = 4000;
  auto res = gm_solve(inst, cfg);
  CHECK(res.f1 == doctest::Approx(1.0));
  for (auto [i, j] : res.pairs) {
    CHECK(i >= 0);
    CHECK(i < 5);
    CHECK(j >= 0);
    CHECK(j < 5);
  }
}

TEST_CASE("result always returns exactly phi injective pairs") {
  auto inst = make_matching_instance(7, 4, 4, 2, 0.5);
  SolverConfig cfg;
  cfg.tau = 0.05;
  cfg.tol = 1e-6;
  cfg.max_iters = 4000;
  auto res = gm_solve(inst, cfg);
  CHECK(res.pairs.size() == 2);
  std::set<int> rows, cols;
  for (auto [i, j] : res.pairs) {
    rows.insert(i);
    cols.insert(j);
  }
  CHECK(rows.size() == 2);
  CHECK(cols.size() == 2);
  CHECK(res.projected.rows() == 4);
  CHECK(res.projected.cols() == 4);
  CHECK(res.projected.minCoeff() >= 0.0);
  CHECK(res.projected.sum() <= 2.0 + 1e-6);
}

TEST_CASE("relabeling rows permutes the solution consistently") {
  auto inst = make_matching_instance(9, 4, 5, 3, 0.05);
  SolverConfig cfg;
  cfg.tau = 0.05;
  cfg.tol = 1e-6;
  cfg.max_iters = 4000;
  auto base = gm_solve(inst, cfg);

  // Swap score rows 0 and 1 (and the truth labels with them).
  auto swapped = inst;
  swapped.M.row(0).swap(swapped.M.row(1));
  for (auto& [i, j] : swapped.truth) i = (i == 0) ? 1 : (i == 1 ? 0 : i);
  auto res = gm_solve(swapped, cfg);

  auto relabel = [](std::vector<std::pair<int, int>> ps) {
    for (auto& [i, j] : ps) i = (i == 0) ? 1 : (i == 1 ? 0 : i);
    std::sort(ps.begin(), ps.end());
    return ps;
  };
  auto lhs = base.pairs;
  std::sort(lhs.begin(), lhs.end());
  CHECK(relabel(res.pairs) == lhs);
  CHECK(res.f1 == doctest::Approx(base.f1));
}

TEST_CASE("phi equal to min(n1, n2) forces a full matching of the smaller side") {
  auto inst = make_matching_instance(13, 3, 5, 3, 0.0);
  SolverConfig cfg;
  cfg.tau = 0.05;
  cfg.tol = 1e-6;
  cfg.max_iters = 4000;
  auto res = gm_solve(inst, cfg);
  CHECK(res.pairs.size() == 3);
  std::set<int> rows;
  for (auto [i, j] : res.pairs) rows.insert(i);
  CHECK(rows == std::set<int>{0, 1, 2});
  CHECK(res.f1 == doctest::Approx(1.0));
}
