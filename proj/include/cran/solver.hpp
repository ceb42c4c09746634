#pragma once

#include <vector>

namespace cran {

// Sparse linear form a . z over a subset of variables.
struct SparseLin {
  std::vector<int> idx;
  std::vector<double> coef;
  void add(int i, double c) {
    idx.push_back(i);
    coef.push_back(c);
  }
  double dot(const std::vector<double>& z) const {
    double s = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) s += coef[i] * z[idx[i]];
    return s;
  }
};

// coef * ln(c0 + a.z).  Callers keep c0 > 0 and a, z >= 0 so the argument
// stays positive over the whole box.
struct LogTerm {
  double coef = 0;
  double c0 = 0;
  SparseLin arg;
};

// coef * sqrt(E(E+2s))/(s+E) with E = scale * z[var]; the square-root
// dispersion factor kept exact where it appears with concave sign.
struct SqrtVTerm {
  double coef = 0;
  int var = 0;
  double scale = 0;
  double sigma = 0;
};

// c0 + lin.z + sum logs + sum roots.  All constraint expressions assembled
// in this project are concave in z (logs of affine forms, the concave
// dispersion root, affine parts), so "expr >= 0" describes a convex set.
struct Expr {
  double c0 = 0;
  SparseLin lin;
  std::vector<LogTerm> logs;
  std::vector<SqrtVTerm> roots;

  double value(const std::vector<double>& z) const;
  // grad += w * dexpr/dz
  void accumulate_grad(const std::vector<double>& z, std::vector<double>& grad,
                       double w) const;
};

struct Subproblem {
  int n = 0;
  std::vector<double> lo, hi;
  Expr obj;                      // minimized
  std::vector<double> obj_quad;  // optional 0.5*q_i*z_i^2 add-on (tests)
  std::vector<Expr> cons;        // each required >= 0
  std::vector<double> scale;     // positive normalization per constraint
};

enum class SolveStatus { kOptimal, kIterLimit, kInfeasible };

struct SolveOptions {
  double tol = 1e-6;
  int max_iters = 25000;  // total projected-gradient iterations
  // Leave variables that start pinned to a box face (gradient pushing into
  // it) out of the objective normalization.  With a penalty-weighted block
  // sitting at zero, the free variables' gradients would otherwise vanish
  // under the scale and the solve would stop at its starting point.
  bool pinned_scale = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kIterLimit;
  int iters = 0;
  double max_violation = 0;  // in normalized units
  double stationarity = 0;
};

// Multiplier state carried between successive solves of structurally
// identical subproblems; avoids re-learning the active set from scratch.
struct MultiplierState {
  std::vector<double> lam;
  double rho = 0;
};

// Augmented-Lagrangian method with projected Barzilai-Borwein descent on
// box-normalized variables.  Fully deterministic.  `z` carries the warm
// start in and the solution out; `warm`, when given, does the same for the
// constraint multipliers.
SolveResult solve_convex(const Subproblem& sp, std::vector<double>& z,
                         const SolveOptions& opt = {},
                         MultiplierState* warm = nullptr);

}  // namespace cran
