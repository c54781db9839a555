#include "linsat/apps/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linsat/rng.hpp"

namespace linsat {

namespace {
inline int var(int i, int k, int n) { return i * n + k; }
}

TspInstance make_tsp_instance(uint64_t seed, int n, bool with_priority, int m) {
  if (n < 3) throw std::invalid_argument("need at least 3 cities");
  TspInstance inst;
  inst.n = n;
  auto rng = make_rng(seed, "tsp-instance");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  inst.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    inst.coords(i, 0) = unit(rng);
    inst.coords(i, 1) = unit(rng);
  }
  inst.D.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inst.D(i, j) = (inst.coords.row(i) - inst.coords.row(j)).norm();

  std::uniform_int_distribution<int> city(0, n - 1);
  inst.s = city(rng);
  do {
    inst.e = city(rng);
  } while (inst.e == inst.s);
  if (with_priority) {
    do {
      inst.priority = city(rng);
    } while (inst.priority == inst.s || inst.priority == inst.e);
    inst.m = m;
  }
  return inst;
}

LinearConstraintSystem tsp_build_constraints(const TspInstance& inst) {
  const int n = inst.n;
  LinearConstraintSystem sys;
  sys.l = n * n;
  auto unit_row = [&](auto&& fill) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(sys.l);
    fill(e);
    sys.equality.push_back({e, 1.0});
  };
  for (int i = 0; i < n; ++i)
    unit_row([&](Eigen::VectorXd& e) {
      for (int k = 0; k < n; ++k) e(var(i, k, n)) = 1.0;
    });
  for (int k = 0; k < n; ++k)
    unit_row([&](Eigen::VectorXd& e) {
      for (int i = 0; i < n; ++i) e(var(i, k, n)) = 1.0;
    });
  unit_row([&](Eigen::VectorXd& e) { e(var(inst.s, 0, n)) = 1.0; });
  unit_row([&](Eigen::VectorXd& e) { e(var(inst.e, n - 1, n)) = 1.0; });
  if (inst.priority >= 0)
    unit_row([&](Eigen::VectorXd& e) {
      for (int k = 0; k <= std::min(inst.m, n - 1); ++k) e(var(inst.priority, k, n)) = 1.0;
    });
  return sys;
}

double tsp_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
  const int n = static_cast<int>(X.rows());
  double obj = 0.0;
  for (int k = 0; k + 1 < n; ++k) obj += X.col(k).transpose() * D * X.col(k + 1);
  return obj;
}

Eigen::MatrixXd tsp_objective_grad(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    g.col(k) += D * X.col(k + 1);
    g.col(k + 1) += D.transpose() * X.col(k);
  }
  return g;
}

TrainResult tsp_train_matrix(const TspInstance& inst, const SolverConfig& cfg, double lr,
                             int iters, uint64_t seed) {
  const int n = inst.n;
  LinearConstraintSystem sys = tsp_build_constraints(inst);
  auto rng = make_rng(seed, "tsp-train");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(n * n);
  for (int i = 0; i < y.size(); ++i) y(i) = normal(rng);

  SolverConfig run_cfg = cfg;
  run_cfg.record_tape = true;
  TrainResult out;
  for (int t = 0; t < iters; ++t) {
    ProjectionResult proj = project(y, sys, run_cfg);
    Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(proj.x.data(), n, n).transpose();
    double obj = tsp_objective(X, inst.D);
    if (!std::isfinite(obj)) throw std::runtime_error("objective diverged during training");
    out.objective_history.push_back(obj);
    Eigen::MatrixXd gX = tsp_objective_grad(X, inst.D);
    Eigen::MatrixXd gXt = gX.transpose();  // back to row-major variable order
    Eigen::VectorXd dx = Eigen::Map<const Eigen::VectorXd>(gXt.data(), n * n);
    Eigen::VectorXd dy = project_backward(proj, dx);
    y -= lr * dy;
    out.last_report = proj.report;
    if (t + 1 == iters) {
      out.X = X;
    }
  }
  return out;
}

double tour_length(const Eigen::MatrixXd& D, const std::vector<int>& order) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < order.size(); ++i) len += D(order[i], order[i + 1]);
  return len;
}

bool tour_feasible(const TspInstance& inst, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != inst.n) return false;
  std::vector<char> seen(inst.n, 0);
  for (int c : order) {
    if (c < 0 || c >= inst.n || seen[c]) return false;
    seen[c] = 1;
  }
  if (order.front() != inst.s || order.back() != inst.e) return false;
  if (inst.priority >= 0) {
    int pos = -1;
    for (size_t i = 0; i < order.size(); ++i)
      if (order[i] == inst.priority) pos = static_cast<int>(i) + 1;
    if (pos > inst.m + 1) return false;
  }
  return true;
}

namespace {

struct BeamState {
  std::vector<int> seq;
  uint32_t visited = 0;
  double score = 0.0;
};

Tour beam_decode_once(const Eigen::MatrixXd& X, const TspInstance& inst, int width, bool& ok) {
  const int n = inst.n;
  auto logp = [&](int city, int k) { return std::log(std::max(X(city, k), 1e-300)); };

  std::vector<BeamState> beam;
  beam.push_back({{inst.s}, 1u << inst.s, logp(inst.s, 0)});
  for (int k = 1; k + 1 < n; ++k) {
    std::vector<BeamState> next;
    for (const auto& st : beam) {
      bool pri_pending = inst.priority >= 0 && !(st.visited >> inst.priority & 1u);
      // Last chance to honor the priority deadline: position k+1 == m+1.
      bool must_pick_priority = pri_pending && k == inst.m;
      if (pri_pending && k > inst.m) continue;
      for (int c = 0; c < n; ++c) {
        if (c == inst.e || (st.visited >> c & 1u)) continue;
        if (must_pick_priority && c != inst.priority) continue;
        BeamState ext = st;
        ext.seq.push_back(c);
        ext.visited |= 1u << c;
        ext.score += logp(c, k);
        next.push_back(std::move(ext));
      }
    }
    if (next.empty()) {
      ok = false;
      return {};
    }
    std::sort(next.begin(), next.end(), [](const BeamState& a, const BeamState& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.seq < b.seq;
    });
    if (static_cast<int>(next.size()) > width) next.resize(width);
    beam = std::move(next);
  }

  const BeamState* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& st : beam) {
    double sc = st.score + logp(inst.e, n - 1);
    if (sc > best_score || (sc == best_score && best && st.seq < best->seq)) {
      best_score = sc;
      best = &st;
    }
  }
  if (!best) {
    ok = false;
    return {};
  }
  Tour t;
  t.order = best->seq;
  t.order.push_back(inst.e);
  t.length = tour_length(inst.D, t.order);
  ok = true;
  return t;
}

}  // namespace

Tour beam_search_decode(const Eigen::MatrixXd& X, const TspInstance& inst, int width) {
  if (X.rows() != inst.n || X.cols() != inst.n) throw std::invalid_argument("matrix shape mismatch");
  bool ok = false;
  Tour t = beam_decode_once(X, inst, width, ok);
  if (!ok) t = beam_decode_once(X, inst, width * 4, ok);
  if (!ok) throw std::runtime_error("beam search exhausted even after widening");
  return t;
}

namespace {

Tour nearest_neighbor_tour(const TspInstance& inst) {
  const int n = inst.n;
  std::vector<int> remaining;
  for (int i = 0; i < n; ++i)
    if (i != inst.s && i != inst.e) remaining.push_back(i);
  std::vector<int> order = {inst.s};
  int cur = inst.s;
  while (!remaining.empty()) {
    int next_pos = static_cast<int>(order.size()) + 1;  // 1-based position being filled
    int pick = -1;
    bool pri_pending = inst.priority >= 0 &&
                       std::find(order.begin(), order.end(), inst.priority) == order.end();
    if (pri_pending && next_pos == inst.m + 1) {
      pick = inst.priority;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (int c : remaining)
        if (inst.D(cur, c) < best) {
          best = inst.D(cur, c);
          pick = c;
        }
    }
    order.push_back(pick);
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    cur = pick;
  }
  order.push_back(inst.e);
  Tour t;
  t.order = order;
  t.length = tour_length(inst.D, order);
  return t;
}

Tour insertion_tour(const TspInstance& inst, HeuristicMode mode, uint64_t seed) {
  const int n = inst.n;
  std::vector<int> tour = {inst.s, inst.e};
  std::vector<int> remaining;
  for (int i = 0; i < n; ++i)
    if (i != inst.s && i != inst.e) remaining.push_back(i);
  auto rng = make_rng(seed, "random-insertion");

  while (!remaining.empty()) {
    int u = -1;
    if (mode == HeuristicMode::RandomInsertion) {
      std::uniform_int_distribution<size_t> pickd(0, remaining.size() - 1);
      u = remaining[pickd(rng)];
    } else {
      double best = mode == HeuristicMode::NearestInsertion
                        ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
      for (int cand : remaining) {
        double dist = std::numeric_limits<double>::infinity();
        for (int v : tour) dist = std::min(dist, inst.D(cand, v));
        bool better = mode == HeuristicMode::NearestInsertion ? dist < best : dist > best;
        if (better) {
          best = dist;
          u = cand;
        }
      }
    }

    // Insert after 0-based index j, i.e. 1-based position j+2.
    int pri_idx = -1;
    if (inst.priority >= 0) {
      for (size_t i = 0; i < tour.size(); ++i)
        if (tour[i] == inst.priority) pri_idx = static_cast<int>(i);
    }
    int lo = 0, hi = static_cast<int>(tour.size()) - 2;
    // A priority city sitting exactly at the deadline position blocks
    // insertions in front of it.
    if (pri_idx == inst.m && pri_idx >= 0) lo = std::max(lo, pri_idx);
    // The priority city itself may only land within the deadline.
    if (u == inst.priority) hi = std::min(hi, inst.m - 1);
    if (lo > hi) throw std::runtime_error("insertion heuristic has no legal position");

    int best_j = lo;
    double best_inc = std::numeric_limits<double>::infinity();
    for (int j = lo; j <= hi; ++j) {
      double inc = inst.D(tour[j], u) + inst.D(u, tour[j + 1]) - inst.D(tour[j], tour[j + 1]);
      if (inc < best_inc) {
        best_inc = inc;
        best_j = j;
      }
    }
    tour.insert(tour.begin() + best_j + 1, u);
    remaining.erase(std::find(remaining.begin(), remaining.end(), u));
  }
  Tour t;
  t.order = tour;
  t.length = tour_length(inst.D, tour);
  return t;
}

}  // namespace

Tour heuristic_tour(const TspInstance& inst, HeuristicMode mode, uint64_t seed) {
  if (mode == HeuristicMode::NearestNeighbor) return nearest_neighbor_tour(inst);
  return insertion_tour(inst, mode, seed);
}

RoundingStudy rounding_study(int num_instances, int n, const std::vector<double>& taus,
                             uint64_t seed, const SolverConfig& base_cfg, double threshold) {
  RoundingStudy out;
  out.taus = taus;
  out.feasible_ratio.assign(taus.size(), 0.0);
  for (int inst_id = 0; inst_id < num_instances; ++inst_id) {
    TspInstance inst = make_tsp_instance(derive_seed(seed, "round-study", inst_id), n);
    LinearConstraintSystem sys = tsp_build_constraints(inst);
    auto rng = make_rng(seed, "round-study-y", inst_id);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd y(n * n);
    for (int i = 0; i < y.size(); ++i) y(i) = normal(rng);
    for (size_t ti = 0; ti < taus.size(); ++ti) {
      SolverConfig cfg = base_cfg;
      cfg.tau = taus[ti];
      ProjectionResult proj = project(y, sys, cfg);
      Eigen::VectorXd xb(proj.x.size());
      for (int i = 0; i < xb.size(); ++i) xb(i) = proj.x(i) > threshold ? 1.0 : 0.0;
      if (max_violation(sys, xb) <= 1e-12) out.feasible_ratio[ti] += 1.0;
    }
  }
  for (double& r : out.feasible_ratio) r /= num_instances;
  return out;
}

}  // namespace linsat
