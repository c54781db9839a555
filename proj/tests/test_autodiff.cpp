#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include "doctest.h"
#include "linsat/autodiff.hpp"
#include "linsat/oracles.hpp"
#include "linsat/rng.hpp"
#include "linsat/theory.hpp"

using namespace linsat;

namespace {
std::vector<MarginalSet> one_set(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return {MarginalSet{u, v, u.sum()}};
}
}  // namespace

TEST_CASE("tape bookkeeping and exact replay") {
  auto inst = make_feasible_instance(3, 2, 4, 2);
  SolverConfig cfg;
  cfg.tol = 1e-8;
  cfg.max_iters = 200;
  auto res = forward_with_tape(inst.S, inst.sets, cfg);
  auto plain = multi_set_sinkhorn(inst.S, inst.sets, cfg);
  CHECK((res.plan - plain.plan).cwiseAbs().maxCoeff() == 0.0);
  CHECK(static_cast<int>(res.tape->steps.size()) == 2 * 2 * res.report.cycles);
  Eigen::MatrixXd replayed = replay(*res.tape, inst.sets, cfg.floor);
  CHECK((replayed - res.plan).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("zero upstream gradient gives zero dS") {
  auto inst = make_feasible_instance(7, 2, 5, 3);
  SolverConfig cfg;
  cfg.max_iters = 50;
  cfg.tol = 1e-7;
  auto res = forward_with_tape(inst.S, inst.sets, cfg);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 5);
  CHECK(backward(*res.tape, inst.sets, zero, cfg.floor).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward matches finite differences on a 2x2 doubly-stochastic projection") {
  Eigen::MatrixXd S(2, 2);
  S << 2, 1, 1, 2;
  Eigen::VectorXd u = Eigen::VectorXd::Ones(2), v = Eigen::VectorXd::Ones(2);
  SolverConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iters = 300;
  auto res = forward_with_tape(S, one_set(u, v), cfg);
  int cycles = res.report.cycles;

  Eigen::MatrixXd L(2, 2);
  L << 0.3, -1.2, 0.7, 0.4;  // random loss weights
  Eigen::MatrixXd dS = backward(*res.tape, one_set(u, v), L, cfg.floor);

  SolverConfig frozen = cfg;
  frozen.tol = 0.0;
  frozen.max_iters = cycles;
  auto f = [&](const Eigen::VectorXd& flat) {
    Eigen::MatrixXd Sp = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 2, 2);
    auto r = multi_set_sinkhorn(Sp, one_set(u, v), frozen);
    return (L.array() * r.plan.array()).sum();
  };
  Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(S.data(), 4);
  Eigen::VectorXd gfd = finite_diff_grad(f, flat, 1e-6);
  Eigen::VectorXd ga = Eigen::Map<const Eigen::VectorXd>(dS.data(), 4);
  CHECK((ga - gfd).cwiseAbs().maxCoeff() / gfd.cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("backward matches finite differences through multiple sets") {
  for (uint64_t seed = 11; seed < 14; ++seed) {
    auto inst = make_feasible_instance(seed, 2, 6, 3);
    SolverConfig cfg;
    cfg.tol = 1e-8;
    cfg.max_iters = 400;
    auto res = forward_with_tape(inst.S, inst.sets, cfg);
    auto rng = make_rng(seed, "loss");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd L(2, 6);
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 2; ++i) L(i, j) = normal(rng);
    Eigen::MatrixXd dS = backward(*res.tape, inst.sets, L, cfg.floor);

    SolverConfig frozen = cfg;
    frozen.tol = 0.0;
    frozen.max_iters = res.report.cycles;
    auto f = [&](const Eigen::VectorXd& flat) {
      Eigen::MatrixXd Sp = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 2, 6);
      auto r = multi_set_sinkhorn(Sp, inst.sets, frozen);
      return (L.array() * r.plan.array()).sum();
    };
    Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(inst.S.data(), 12);
    Eigen::VectorXd gfd = finite_diff_grad(f, flat, 1e-6);
    Eigen::VectorXd ga = Eigen::Map<const Eigen::VectorXd>(dS.data(), 12);
    CHECK((ga - gfd).cwiseAbs().maxCoeff() / gfd.cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("entropic chain rule") {
  Eigen::MatrixXd dS = Eigen::MatrixXd::Constant(2, 2, 3.0);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2, 2);
  CHECK(grad_entropic(dS, W, 1.0).isApprox(dS));
  CHECK(grad_entropic(dS, W, 0.5).isApprox((2.0 * dS).eval()));

  Eigen::MatrixXd Wc(1, 2);
  Wc << -100.0, 0.0;  // first entry underflows at tau=0.1
  Eigen::MatrixXd d1 = Eigen::MatrixXd::Ones(1, 2);
  Eigen::MatrixXd dW = grad_entropic(d1, Wc, 0.1);
  CHECK(dW(0, 0) == 0.0);
  CHECK(dW(0, 1) == doctest::Approx(10.0));
}

TEST_CASE("backward is deterministic") {
  auto inst = make_feasible_instance(21, 2, 4, 2);
  SolverConfig cfg;
  cfg.max_iters = 60;
  cfg.tol = 1e-9;
  auto res = forward_with_tape(inst.S, inst.sets, cfg);
  Eigen::MatrixXd L = Eigen::MatrixXd::Random(2, 4);
  Eigen::MatrixXd a = backward(*res.tape, inst.sets, L, cfg.floor);
  Eigen::MatrixXd b = backward(*res.tape, inst.sets, L, cfg.floor);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("finite-difference residual shrinks with the step (second order)") {
  Eigen::MatrixXd S(2, 2);
  S << 1.5, 0.7, 0.9, 1.8;
  Eigen::VectorXd u = Eigen::VectorXd::Ones(2), v = Eigen::VectorXd::Ones(2);
  SolverConfig cfg;
  cfg.tol = 0.0;
  cfg.max_iters = 40;
  auto res = forward_with_tape(S, one_set(u, v), cfg);
  Eigen::MatrixXd L(2, 2);
  L << 1, 2, -1, 0.5;
  Eigen::MatrixXd dS = backward(*res.tape, one_set(u, v), L, cfg.floor);
  auto f = [&](const Eigen::VectorXd& flat) {
    Eigen::MatrixXd Sp = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 2, 2);
    return (L.array() * multi_set_sinkhorn(Sp, one_set(u, v), cfg).plan.array()).sum();
  };
  Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(S.data(), 4);
  Eigen::VectorXd ga = Eigen::Map<const Eigen::VectorXd>(dS.data(), 4);
  double e1 = (finite_diff_grad(f, flat, 2e-4) - ga).cwiseAbs().maxCoeff();
  double e2 = (finite_diff_grad(f, flat, 1e-4) - ga).cwiseAbs().maxCoeff();
  CHECK(e2 <= e1 / 2.5);  // ~4x for a second-order scheme, allow slack
}
