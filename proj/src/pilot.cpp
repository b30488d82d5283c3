#include "netreg/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace netreg {

double lasso_lambda_max(const DesignPartition& design, const Vector& y,
                        const Vector* weights) {
  if (y.size() != design.U.rows()) {
    throw ValidationError("response length does not match the design");
  }
  if (weights != nullptr && weights->size() != design.q()) {
    throw ValidationError("weights length does not match N");
  }
  if (design.q() == 0) {
    return 0.0;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design.U);
  if (qr.rank() < design.t()) {
    throw NumericalError(
        "unpenalized block U is rank-deficient; reduce hubs or confounders");
  }
  const Vector r0 = y - design.U * qr.solve(y);
  double lmax = 0.0;
  for (Index j = 0; j < design.q(); ++j) {
    const double w = weights != nullptr ? (*weights)(j) : 1.0;
    if (w <= 0.0) continue;  // unpenalized coordinate: no finite threshold needed
    lmax = std::max(lmax, 2.0 * std::abs(design.N.col(j).dot(r0)) / w);
  }
  return lmax;
}

double pilot_ridge_default(const DesignPartition& design, const Vector& y) {
  const double lmax = lasso_lambda_max(design, y);
  return lmax > 0.0 ? 1e-3 * lmax : 1e-3;
}

PartialFitResult perturbed_elastic_net(const DesignPartition& design, const Vector& y,
                                       double lambda1, double lambda2,
                                       const SolverOptions& options,
                                       const Vector* warm_beta) {
  PenaltySpec penalty;
  penalty.lambda_n = lambda1;
  penalty.l2 = lambda2;
  penalty.weights = Vector::Ones(design.q());
  return solve_partial_lasso(design, y, penalty, options, warm_beta);
}

Vector pilot_estimator(const DesignPartition& design, const Vector& y,
                       double ridge_perturbation) {
  if (!(ridge_perturbation > 0.0)) {
    throw ValidationError("ridge_perturbation must be positive");
  }
  const Index n = y.size();
  const Index q = design.q();
  if (q == 0) {
    return Vector();
  }

  const double lmax = lasso_lambda_max(design, y);
  if (lmax <= 0.0 || n < 10) {
    // nothing to tune (orthogonal residual) or too few rows to stripe:
    // fall back to the pure ridge-perturbed fit
    return perturbed_elastic_net(design, y, 0.0, ridge_perturbation).beta;
  }

  const std::vector<double> grid = log_spaced_grid(lmax, 0.01 * lmax, 20);
  constexpr int kFolds = 5;
  std::vector<double> sse(grid.size(), 0.0);
  std::vector<Index> held_out(grid.size(), 0);

  for (int f = 0; f < kFolds; ++f) {
    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < n; ++i) {
      (i % kFolds == f ? test_rows : train_rows).push_back(i);
    }
    const DesignPartition train = subset_rows(design, train_rows);
    const DesignPartition test = subset_rows(design, test_rows);
    Vector y_train(train_rows.size()), y_test(test_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) y_train(i) = y(train_rows[i]);
    for (std::size_t i = 0; i < test_rows.size(); ++i) y_test(i) = y(test_rows[i]);

    Vector warm = Vector::Zero(q);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const PartialFitResult fit =
          perturbed_elastic_net(train, y_train, grid[g], ridge_perturbation, {}, &warm);
      warm = fit.beta;
      const Vector pred = test.U * fit.alpha + test.N * fit.beta;
      sse[g] += (y_test - pred).squaredNorm();
      held_out[g] += y_test.size();
    }
  }

  std::size_t best = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double mse = sse[g] / static_cast<double>(held_out[g]);
    if (mse < best_mse) {  // strict: ties keep the larger lambda1
      best_mse = mse;
      best = g;
    }
  }
  return perturbed_elastic_net(design, y, grid[best], ridge_perturbation).beta;
}

Vector adaptive_weights(const Vector& pilot, double nu, double floor) {
  if (!(nu > 0.0)) {
    throw ValidationError("nu must be positive");
  }
  if (!(floor > 0.0)) {
    throw ValidationError("weight floor must be positive");
  }
  Vector w(pilot.size());
  for (Index j = 0; j < pilot.size(); ++j) {
    w(j) = std::pow(std::max(std::abs(pilot(j)), floor), -nu);
  }
  return w;
}

}  // namespace netreg
