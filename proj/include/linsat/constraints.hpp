#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace linsat {

struct PackingRow {
  Eigen::VectorXd a;
  double b = 0.0;
};

struct CoveringRow {
  Eigen::VectorXd c;
  double d = 0.0;
};

struct EqualityRow {
  Eigen::VectorXd e;
  double f = 0.0;
};

// Positive linear constraint system over x in [0,1]^l:
//   A x <= b,  C x >= d,  E x = f, all coefficients and rhs non-negative.
struct LinearConstraintSystem {
  int l = 0;
  std::vector<PackingRow> packing;
  std::vector<CoveringRow> covering;
  std::vector<EqualityRow> equality;

  int num_rows() const {
    return static_cast<int>(packing.size() + covering.size() + equality.size());
  }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport validate_system(const LinearConstraintSystem& sys);

enum class ConstraintKind { Packing, Covering, Equality };

// One marginal set per constraint row: column masses u over the plan columns
// and the two row targets v, with total mass h = v(0) + v(1).
struct MarginalStack {
  int k = 0;       // number of marginal sets (degenerate rows are dropped)
  int l = 0;       // decision-vector dimension
  int n_cols = 0;  // l + number of inequality constraints kept
  Eigen::MatrixXd U;  // k x n_cols
  Eigen::MatrixXd V;  // k x 2
  Eigen::VectorXd h;  // k
  std::vector<int> dummy_col;          // per set; -1 for equality sets
  std::vector<ConstraintKind> kind;    // per set
  std::vector<double> gamma;           // per set; covering multiplier, else 0
};

// Throws std::invalid_argument if validate_system fails.
MarginalStack compile_to_marginals(const LinearConstraintSystem& sys);

// Max over constraint rows of the amount by which x breaks the row
// (0 when x is feasible).
double max_violation(const LinearConstraintSystem& sys, const Eigen::VectorXd& x);

// First row of the 2 x n_cols transport plan induced by a point x that
// satisfies the system; inequality dummies carry the slack. The result meets
// every compiled marginal exactly (up to rounding). Throws if x is infeasible
// beyond `tol`.
Eigen::VectorXd plan_row_from_point(const LinearConstraintSystem& sys,
                                    const MarginalStack& stack,
                                    const Eigen::VectorXd& x,
                                    double tol = 1e-9);

// JSON round-trip, schema:
// {"l": int, "packing": [{"a": [...], "b": x}],
//  "covering": [{"c": [...], "d": x}], "equality": [{"e": [...], "f": x}]}
LinearConstraintSystem system_from_json(const std::string& text);
std::string system_to_json(const LinearConstraintSystem& sys);

}  // namespace linsat
