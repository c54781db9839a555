#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "linsat/apps/matching.hpp"
#include "linsat/apps/portfolio.hpp"
#include "linsat/apps/tsp.hpp"
#include "linsat/autodiff.hpp"
#include "linsat/constraints.hpp"
#include "linsat/io.hpp"
#include "linsat/layer.hpp"
#include "linsat/oracles.hpp"
#include "linsat/rng.hpp"
#include "linsat/theory.hpp"

namespace {

using nlohmann::json;

json report_json(const linsat::ConvergenceReport& rep) {
  json j;
  j["cycles"] = rep.cycles;
  j["converged"] = rep.converged;
  j["alpha"] = rep.alpha;
  j["delta"] = rep.delta;
  j["degenerate_rescues"] = rep.degenerate_rescues;
  j["per_set_l1"] = std::vector<double>(rep.per_set_err.data(),
                                        rep.per_set_err.data() + rep.per_set_err.size());
  return j;
}

struct Manifest {
  std::string command;
  uint64_t seed = 0;
  json config;
  json input_digests = json::object();
  std::vector<std::string> outputs;

  void add_input(const std::string& path) { input_digests[path] = linsat::file_digest(path); }
  void write(const std::string& out_dir) {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    j["input_digests"] = input_digests;
    j["outputs"] = outputs;
    linsat::write_text_atomic(out_dir + "/manifest.json", j.dump(2));
  }
};

int finish(const std::string& out_dir, Manifest& mf, bool converged) {
  mf.write(out_dir);
  return converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection of real vectors onto positive linear constraints"};
  app.require_subcommand(1);

  double tau = 0.1, tol = 1e-6, beta = 0.0, lr = 0.1, sigma = 0.1, p_pref = 0.5, step = 1e-6;
  int max_iters = 2000, width = 128, iters = 300, n = 10, l = 8, k = 3, m = 2, n1 = 12, n2 = 12,
      phi = 8, npref = 3, count = 50;
  uint64_t seed = 0;
  bool pri = false;
  std::string constraints_path, y_path, scores_path, marginals_path, out_dir = "out";
  std::vector<double> taus = {0.1, 0.05, 0.01};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tau", tau, "entropic temperature");
    cmd->add_option("--tol", tol, "L1 convergence tolerance");
    cmd->add_option("--max-iters", max_iters, "cap on full cycles");
    cmd->add_option("--seed", seed, "64-bit seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* c_project = app.add_subcommand("project", "project a score vector onto a constraint system");
  c_project->add_option("--constraints", constraints_path, "constraint system JSON")->required();
  c_project->add_option("--y", y_path, "score vector CSV (one row or column)")->required();
  c_project->add_option("--beta", beta, "dummy fill value");
  add_common(c_project);

  auto* c_sinkhorn = app.add_subcommand("sinkhorn", "run the multi-set scaling loop on a score matrix");
  c_sinkhorn->add_option("--scores", scores_path, "score matrix CSV")->required();
  c_sinkhorn->add_option("--marginals", marginals_path, "marginal sets JSON: {\"sets\":[{\"u\":[],\"v\":[]}]}")
      ->required();
  add_common(c_sinkhorn);

  auto* c_grad = app.add_subcommand("grad-check", "compare analytic and finite-difference gradients");
  c_grad->add_option("--l", l, "variable count");
  c_grad->add_option("--k", k, "constraint count");
  c_grad->add_option("--step", step, "finite-difference step");
  add_common(c_grad);

  auto* c_theory = app.add_subcommand("theory", "record a convergence trajectory with its divergence audit");
  c_theory->add_option("--m", m, "plan rows");
  c_theory->add_option("--n", n, "plan columns");
  c_theory->add_option("--k", k, "marginal sets");
  add_common(c_theory);

  auto* c_tsp = app.add_subcommand("tsp", "trainable-matrix tour construction demo");
  c_tsp->add_option("--n", n, "city count");
  c_tsp->add_flag("--pri", pri, "add the priority-city constraint");
  c_tsp->add_option("--m", m, "priority step budget");
  c_tsp->add_option("--width", width, "beam width");
  c_tsp->add_option("--iters", iters, "gradient steps");
  c_tsp->add_option("--lr", lr, "learning rate");
  add_common(c_tsp);

  auto* c_match = app.add_subcommand("match", "partial matching demo");
  c_match->add_option("--n1", n1, "rows");
  c_match->add_option("--n2", n2, "columns");
  c_match->add_option("--phi", phi, "number of correspondences");
  c_match->add_option("--sigma", sigma, "score noise");
  add_common(c_match);

  auto* c_pf = app.add_subcommand("portfolio", "constrained allocation demo");
  c_pf->add_option("--n", n, "asset count");
  c_pf->add_option("--npref", npref, "preferred asset count");
  c_pf->add_option("--p", p_pref, "required preferred-set mass");
  c_pf->add_option("--iters", iters, "gradient steps");
  c_pf->add_option("--lr", lr, "learning rate");
  add_common(c_pf);

  auto* c_round = app.add_subcommand("round-study", "feasibility of 0.5-rounded projections per temperature");
  c_round->add_option("--count", count, "number of instances");
  c_round->add_option("--n", n, "city count");
  c_round->add_option("--taus", taus, "temperature grid");
  add_common(c_round);

  CLI11_PARSE(app, argc, argv);

  try {
    linsat::SolverConfig cfg;
    cfg.tau = tau;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    Manifest mf;
    mf.seed = seed;
    mf.config = {{"tau", tau}, {"tol", tol}, {"max_iters", max_iters}};

    if (c_project->parsed()) {
      mf.command = "project";
      mf.config["beta"] = beta;
      mf.add_input(constraints_path);
      mf.add_input(y_path);
      auto sys = linsat::system_from_json(linsat::read_text(constraints_path));
      Eigen::MatrixXd ym = linsat::read_csv_matrix(y_path);
      Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ym.data(), ym.size());
      auto res = linsat::project(y, sys, cfg, beta);
      linsat::write_csv_matrix(out_dir + "/x.csv", res.x.transpose());
      json rep = report_json(res.report);
      rep["eps_lin"] = res.eps_lin;
      rep["max_violation"] = linsat::max_violation(sys, res.x);
      linsat::write_text_atomic(out_dir + "/report.json", rep.dump(2));
      mf.outputs = {out_dir + "/x.csv", out_dir + "/report.json"};
      return finish(out_dir, mf, res.report.converged);
    }

    if (c_sinkhorn->parsed()) {
      mf.command = "sinkhorn";
      mf.add_input(scores_path);
      mf.add_input(marginals_path);
      Eigen::MatrixXd S = linsat::read_csv_matrix(scores_path);
      json mj = json::parse(linsat::read_text(marginals_path));
      std::vector<linsat::MarginalSet> sets;
      for (const auto& sj : mj.at("sets")) {
        linsat::MarginalSet set;
        auto uu = sj.at("u").get<std::vector<double>>();
        auto vv = sj.at("v").get<std::vector<double>>();
        set.u = Eigen::Map<Eigen::VectorXd>(uu.data(), uu.size());
        set.v = Eigen::Map<Eigen::VectorXd>(vv.data(), vv.size());
        set.h = set.u.sum();
        sets.push_back(std::move(set));
      }
      auto res = linsat::multi_set_sinkhorn(S, sets, cfg);
      linsat::write_csv_matrix(out_dir + "/plan.csv", res.plan);
      linsat::write_text_atomic(out_dir + "/report.json", report_json(res.report).dump(2));
      mf.outputs = {out_dir + "/plan.csv", out_dir + "/report.json"};
      return finish(out_dir, mf, res.report.converged);
    }

    if (c_grad->parsed()) {
      mf.command = "grad-check";
      mf.config["l"] = l;
      mf.config["k"] = k;
      mf.config["step"] = step;
      auto gen = linsat::make_feasible_system(seed, l, k);
      auto rng = linsat::make_rng(seed, "grad-check");
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd y(l), w(l);
      for (int i = 0; i < l; ++i) y(i) = normal(rng);
      for (int i = 0; i < l; ++i) w(i) = normal(rng);
      double err = linsat::grad_check_max_rel_err(gen.sys, y, w, cfg, step);
      json out = {{"max_rel_err", err}};
      std::cout << out.dump(2) << std::endl;
      linsat::write_text_atomic(out_dir + "/grad_check.json", out.dump(2));
      mf.outputs = {out_dir + "/grad_check.json"};
      return finish(out_dir, mf, true);
    }

    if (c_theory->parsed()) {
      mf.command = "theory";
      mf.config["m"] = m;
      mf.config["n"] = n;
      mf.config["k"] = k;
      auto inst = linsat::make_feasible_instance(seed, m, n, k);
      auto curve = linsat::convergence_curve(inst, cfg, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
      std::string csv = "step,eta,phase,l1,kl,divergence,residual\n";
      for (const auto& pt : curve.trajectory)
        csv += std::to_string(pt.step) + "," + std::to_string(pt.eta) + "," +
               (pt.phase == linsat::Phase::Row ? "row" : "col") + "," + std::to_string(pt.l1) +
               "," + std::to_string(pt.kl) + "," + std::to_string(pt.divergence) + "," +
               std::to_string(pt.residual) + "\n";
      linsat::write_text_atomic(out_dir + "/trajectory.csv", csv);
      json audit;
      audit["initial_divergence"] = curve.initial_divergence;
      audit["final_divergence"] = curve.final_divergence;
      audit["kl_sum"] = curve.kl_sum;
      audit["budget"] = curve.budget;
      audit["max_residual"] = curve.max_residual;
      audit["report"] = report_json(curve.report);
      json grid = json::array();
      for (const auto& [eps, it] : curve.iters_to_eps) grid.push_back({{"eps", eps}, {"cycles", it}});
      audit["iters_to_eps"] = grid;
      linsat::write_text_atomic(out_dir + "/audit.json", audit.dump(2));
      mf.outputs = {out_dir + "/trajectory.csv", out_dir + "/audit.json"};
      return finish(out_dir, mf, curve.report.converged);
    }

    if (c_tsp->parsed()) {
      mf.command = "tsp";
      mf.config["n"] = n;
      mf.config["pri"] = pri;
      mf.config["width"] = width;
      mf.config["iters"] = iters;
      mf.config["lr"] = lr;
      auto inst = linsat::make_tsp_instance(seed, n, pri, m);
      auto train = linsat::tsp_train_matrix(inst, cfg, lr, iters, seed);
      auto tour = linsat::beam_search_decode(train.X, inst, width);
      json out;
      out["tour"] = tour.order;
      out["length"] = tour.length;
      out["feasible"] = linsat::tour_feasible(inst, tour.order);
      out["relaxed_objective"] = train.objective_history.back();
      if (n <= 11) {
        auto opt = linsat::tsp_exhaustive(inst.D, inst.s, inst.e, inst.priority, inst.m);
        out["optimal_length"] = opt.length;
        out["ratio"] = tour.length / opt.length;
      }
      json heur;
      heur["nearest_neighbor"] =
          linsat::heuristic_tour(inst, linsat::HeuristicMode::NearestNeighbor).length;
      heur["nearest_insertion"] =
          linsat::heuristic_tour(inst, linsat::HeuristicMode::NearestInsertion).length;
      heur["farthest_insertion"] =
          linsat::heuristic_tour(inst, linsat::HeuristicMode::FarthestInsertion).length;
      heur["random_insertion"] =
          linsat::heuristic_tour(inst, linsat::HeuristicMode::RandomInsertion, seed).length;
      out["heuristics"] = heur;
      out["report"] = report_json(train.last_report);
      linsat::write_text_atomic(out_dir + "/tsp.json", out.dump(2));
      mf.outputs = {out_dir + "/tsp.json"};
      return finish(out_dir, mf, true);
    }

    if (c_match->parsed()) {
      mf.command = "match";
      mf.config["n1"] = n1;
      mf.config["n2"] = n2;
      mf.config["phi"] = phi;
      mf.config["sigma"] = sigma;
      auto inst = linsat::make_matching_instance(seed, n1, n2, phi, sigma);
      auto res = linsat::gm_solve(inst, cfg);
      json out;
      out["f1"] = res.f1;
      json pairs = json::array();
      for (const auto& [i, j] : res.pairs) pairs.push_back({i, j});
      out["pairs"] = pairs;
      out["report"] = report_json(res.report);
      linsat::write_text_atomic(out_dir + "/match.json", out.dump(2));
      mf.outputs = {out_dir + "/match.json"};
      return finish(out_dir, mf, res.report.converged);
    }

    if (c_pf->parsed()) {
      mf.command = "portfolio";
      mf.config["n"] = n;
      mf.config["npref"] = npref;
      mf.config["p"] = p_pref;
      mf.config["iters"] = iters;
      mf.config["lr"] = lr;
      auto inst = linsat::make_portfolio_instance(seed, n, npref, 756, p_pref);
      auto res = linsat::pf_optimize(inst, cfg, lr, iters);
      json out;
      out["allocation"] = std::vector<double>(res.x.data(), res.x.data() + res.x.size());
      out["sharpe_in"] = res.sharpe_in;
      out["sharpe_uniform"] = res.sharpe_uniform;
      if (res.sharpe_out) out["sharpe_out"] = *res.sharpe_out;
      out["worst_violation"] = res.worst_violation;
      out["report"] = report_json(res.last_report);
      linsat::write_text_atomic(out_dir + "/portfolio.json", out.dump(2));
      mf.outputs = {out_dir + "/portfolio.json"};
      return finish(out_dir, mf, res.last_report.converged);
    }

    if (c_round->parsed()) {
      mf.command = "round-study";
      mf.config["count"] = count;
      mf.config["n"] = n;
      mf.config["taus"] = taus;
      auto study = linsat::rounding_study(count, n, taus, seed, cfg);
      json out;
      out["taus"] = study.taus;
      out["feasible_ratio"] = study.feasible_ratio;
      linsat::write_text_atomic(out_dir + "/round_study.json", out.dump(2));
      mf.outputs = {out_dir + "/round_study.json"};
      return finish(out_dir, mf, true);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return 1;
  }
  return 1;
}
