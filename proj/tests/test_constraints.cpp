#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include "doctest.h"
#include "linsat/constraints.hpp"
#include "linsat/oracles.hpp"
#include "linsat/sinkhorn.hpp"
#include "linsat/theory.hpp"

using namespace linsat;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}
}  // namespace

TEST_CASE("single packing row compiles to the worked example") {
  LinearConstraintSystem sys;
  sys.l = 4;
  sys.packing.push_back({vec({1, 1, 0, 0}), 1.0});
  MarginalStack ms = compile_to_marginals(sys);
  CHECK(ms.k == 1);
  CHECK(ms.n_cols == 5);
  CHECK(ms.U.row(0).transpose().isApprox(vec({1, 1, 0, 0, 1})));
  CHECK(ms.V(0, 0) == doctest::Approx(1.0));
  CHECK(ms.V(0, 1) == doctest::Approx(2.0));
  CHECK(ms.dummy_col[0] == 4);
}

TEST_CASE("single covering row uses the floor multiplier") {
  LinearConstraintSystem sys;
  sys.l = 3;
  sys.covering.push_back({vec({1, 1, 1}), 2.0});
  MarginalStack ms = compile_to_marginals(sys);
  CHECK(ms.gamma[0] == doctest::Approx(1.0));
  CHECK(ms.U.row(0).transpose().isApprox(vec({1, 1, 1, 2})));
  CHECK(ms.V(0, 0) == doctest::Approx(4.0));
  CHECK(ms.V(0, 1) == doctest::Approx(1.0));
  CHECK(ms.U.row(0).sum() == doctest::Approx(ms.V.row(0).sum()));  // mass 5
}

TEST_CASE("single equality row gets no dummy column") {
  LinearConstraintSystem sys;
  sys.l = 2;
  sys.equality.push_back({vec({2, 1}), 2.0});
  MarginalStack ms = compile_to_marginals(sys);
  CHECK(ms.n_cols == 2);
  CHECK(ms.dummy_col[0] == -1);
  CHECK(ms.U.row(0).transpose().isApprox(vec({2, 1})));
  CHECK(ms.V(0, 0) == doctest::Approx(2.0));
  CHECK(ms.V(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("validation names the offending rule") {
  LinearConstraintSystem sys;
  sys.l = 2;
  sys.covering.push_back({vec({1, 1}), 3.0});
  auto rep = validate_system(sys);
  CHECK(!rep.ok);
  CHECK(rep.violations.size() == 1);
  CHECK(rep.violations[0].find("sum(c) < d") != std::string::npos);

  LinearConstraintSystem neg;
  neg.l = 2;
  neg.packing.push_back({vec({-1, 1}), 1.0});
  auto rep2 = validate_system(neg);
  CHECK(!rep2.ok);
  CHECK(rep2.violations[0].find("negative coefficient") != std::string::npos);

  LinearConstraintSystem eq;
  eq.l = 2;
  eq.equality.push_back({vec({1, 1}), 3.0});
  CHECK(!validate_system(eq).ok);

  LinearConstraintSystem ok;
  ok.l = 4;
  ok.packing.push_back({vec({1, 1, 0, 0}), 1.0});
  CHECK(validate_system(ok).ok);
}

TEST_CASE("mass balance and dummy isolation on generated systems") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto gen = make_feasible_system(seed, 10, 6);
    MarginalStack ms = compile_to_marginals(gen.sys);
    for (int eta = 0; eta < ms.k; ++eta) {
      CHECK(std::abs(ms.U.row(eta).sum() - ms.V.row(eta).sum()) <=
            4 * std::numeric_limits<double>::epsilon() * ms.h(eta));
      CHECK(ms.U.minCoeff() >= 0.0);
      for (int other = 0; other < ms.k; ++other) {
        if (other == eta || ms.dummy_col[other] < 0) continue;
        CHECK(ms.U(eta, ms.dummy_col[other]) == 0.0);
      }
    }
  }
}

TEST_CASE("feasible points round-trip to plans meeting every marginal") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto gen = make_feasible_system(seed, 8, 5);
    MarginalStack ms = compile_to_marginals(gen.sys);
    Eigen::VectorXd z = plan_row_from_point(gen.sys, ms, gen.interior_point);
    Eigen::MatrixXd plan(2, ms.n_cols);
    plan.row(0) = z;
    plan.row(1) = Eigen::VectorXd::Ones(ms.n_cols) - z;
    auto sets = stack_to_sets(ms);
    for (const auto& set : sets) CHECK(l1_violation(plan, set) <= 1e-9);
  }
}

TEST_CASE("binary feasible points round-trip exactly (exhaustive, l = 6)") {
  LinearConstraintSystem sys;
  sys.l = 6;
  sys.packing.push_back({vec({1, 1, 1, 0, 0, 0}), 2.0});
  sys.covering.push_back({vec({0, 0, 1, 1, 1, 0}), 1.0});
  sys.equality.push_back({vec({1, 0, 0, 0, 0, 1}), 1.0});
  MarginalStack ms = compile_to_marginals(sys);
  auto sets = stack_to_sets(ms);
  int feasible_count = 0;
  for (uint32_t mask = 0; mask < (1u << 6); ++mask) {
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x(i) = (mask >> i) & 1u;
    if (max_violation(sys, x) > 1e-12) continue;
    ++feasible_count;
    Eigen::VectorXd z = plan_row_from_point(sys, ms, x);
    Eigen::MatrixXd plan(2, ms.n_cols);
    plan.row(0) = z;
    plan.row(1) = Eigen::VectorXd::Ones(ms.n_cols) - z;
    for (const auto& set : sets) CHECK(l1_violation(plan, set) <= 1e-12);
  }
  CHECK(feasible_count > 0);
}

TEST_CASE("degenerate rows: covering d=0 is dropped, packing b=0 kept") {
  LinearConstraintSystem sys;
  sys.l = 3;
  sys.covering.push_back({vec({1, 1, 0}), 0.0});
  sys.packing.push_back({vec({0, 1, 0}), 0.0});
  MarginalStack ms = compile_to_marginals(sys);
  CHECK(ms.k == 1);
  CHECK(ms.kind[0] == ConstraintKind::Packing);
  CHECK(ms.V(0, 0) == 0.0);  // forces x_2 = 0 through a zero row-1 target
}

TEST_CASE("json round trip preserves the system") {
  LinearConstraintSystem sys;
  sys.l = 3;
  sys.packing.push_back({vec({1, 0.5, 0}), 1.25});
  sys.covering.push_back({vec({0, 1, 1}), 0.75});
  sys.equality.push_back({vec({1, 1, 1}), 2.0});
  LinearConstraintSystem back = system_from_json(system_to_json(sys));
  CHECK(back.l == 3);
  CHECK(back.packing[0].a.isApprox(sys.packing[0].a));
  CHECK(back.packing[0].b == doctest::Approx(1.25));
  CHECK(back.covering[0].d == doctest::Approx(0.75));
  CHECK(back.equality[0].f == doctest::Approx(2.0));
}

TEST_CASE("compile rejects invalid systems") {
  LinearConstraintSystem sys;
  sys.l = 2;
  sys.covering.push_back({vec({1, 0}), 5.0});
  CHECK_THROWS_AS(compile_to_marginals(sys), std::invalid_argument);
}
