#pragma once

#include <vector>

#include "netreg/design.hpp"

namespace netreg {

/// Penalty on the N block: lambda_n * sum_j weights[j] * |beta_j| plus an
/// optional ridge term l2 * |beta|_2^2 (used by the elastic-net and pilot
/// fits; zero for the plain weighted-l1 objective).
struct PenaltySpec {
  double lambda_n = 0.0;
  double nu = 1.0;  // recorded tuning exponent; not used by the solver itself
  Vector weights;
  double l2 = 0.0;
};

struct PartialFitResult {
  Vector alpha;  // length t, never shrunk
  Vector beta;   // length q
  std::vector<Index> active_set;  // support of beta above the zero threshold
  PenaltySpec penalty;
  double residual_variance = 0.0;  // |y - U a - N b|^2 / n
  bool converged = false;
  int iterations = 0;
  double objective_value = 0.0;
  std::vector<double> objective_path;  // objective after each sweep
};

struct SolverOptions {
  double tol = 1e-7;    // max absolute coefficient change between sweeps
  int max_iter = 5000;  // sweeps
};

/// Minimizes |y - U a - N b|^2 + l2 |b|^2 + lambda_n sum w_j |b_j| by
/// alternating an exact least-squares solve for the unpenalized block with
/// cyclic coordinate descent over b (soft threshold lambda_n w_j / 2 — the
/// quadratic term carries no 1/2). Rank-deficient U is an error. warm_beta,
/// when given, seeds the penalized block.
PartialFitResult solve_partial_lasso(const DesignPartition& design, const Vector& y,
                                     const PenaltySpec& penalty,
                                     const SolverOptions& options = {},
                                     const Vector* warm_beta = nullptr);

/// First-order optimality residuals at a fit:
///   gradient_u   |U' r|_inf
///   active       max_j over nonzero beta_j of |2 N_j' r - 2 l2 b_j - lambda_n w_j sgn(b_j)|
///   inactive     max_j over zero beta_j of |2 N_j' r| - lambda_n w_j (can be < 0)
struct KktResiduals {
  double gradient_u = 0.0;
  double active = 0.0;
  double inactive = 0.0;
};

KktResiduals kkt_residuals(const DesignPartition& design, const Vector& y,
                           const PartialFitResult& fit);

double partial_lasso_objective(const DesignPartition& design, const Vector& y,
                               const Vector& alpha, const Vector& beta,
                               const PenaltySpec& penalty);

}  // namespace netreg
