#include "netreg/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

namespace netreg {

FoldAssignment make_folds(Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || static_cast<Index>(folds) > n) {
    throw ValidationError("folds must satisfy 2 <= folds <= n");
  }
  const std::vector<Index> perm = random_permutation(n, seed);
  FoldAssignment out;
  out.train_rows.resize(folds);
  out.test_rows.resize(folds);
  for (Index i = 0; i < n; ++i) {
    const int f = static_cast<int>(i % folds);
    out.test_rows[f].push_back(perm[i]);
  }
  for (int f = 0; f < folds; ++f) {
    std::sort(out.test_rows[f].begin(), out.test_rows[f].end());
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      out.train_rows[f].insert(out.train_rows[f].end(), out.test_rows[g].begin(),
                               out.test_rows[g].end());
    }
    std::sort(out.train_rows[f].begin(), out.train_rows[f].end());
  }
  return out;
}

std::vector<double> default_nu_grid() { return {0.5, 1.0, 2.0}; }

std::vector<double> adaptive_lambda_grid(const DesignPartition& design,
                                         const Vector& y,
                                         const std::vector<double>& nu_grid,
                                         int size, double min_ratio) {
  if (nu_grid.empty()) {
    throw ValidationError("nu_grid must be non-empty");
  }
  if (size < 1 || !(min_ratio > 0.0 && min_ratio < 1.0)) {
    throw ValidationError("invalid lambda grid parameters");
  }
  const Vector pilot = pilot_estimator(design, y, pilot_ridge_default(design, y));
  double top = 0.0;
  for (double nu : nu_grid) {
    const Vector w = adaptive_weights(pilot, nu);
    top = std::max(top, lasso_lambda_max(design, y, &w));
  }
  if (top <= 0.0) {
    return {0.0};
  }
  if (size == 1) {
    return {top};
  }
  return log_spaced_grid(top, min_ratio * top, size);
}

namespace {

void check_fold_rank(const DesignPartition& train, int fold_index) {
  Eigen::ColPivHouseholderQR<Matrix> qr(train.U);
  if (qr.rank() < train.t()) {
    throw NumericalError("cross-validation fold " + std::to_string(fold_index + 1) +
                         " has a rank-deficient unpenalized block; reduce hubs "
                         "or confounders");
  }
}

}  // namespace

CvResult cross_validate(const DesignPartition& design, const Vector& y,
                        const std::vector<double>& nu_grid,
                        const std::vector<double>& lambda_grid, int folds,
                        std::uint64_t seed, const SolverOptions& options) {
  if (folds != 5 && folds != 10) {
    throw ValidationError("folds must be 5 or 10");
  }
  if (nu_grid.empty() || lambda_grid.empty()) {
    throw ValidationError("tuning grids must be non-empty");
  }
  for (double nu : nu_grid) {
    if (!(nu > 0.0)) {
      throw ValidationError("nu grid entries must be positive");
    }
  }
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 0.0)) {
      throw ValidationError("lambda grid entries must be non-negative");
    }
    if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1])) {
      throw ValidationError("lambda grid must be strictly decreasing");
    }
  }
  const Index n = y.size();
  if (n != design.U.rows()) {
    throw ValidationError("response length does not match the design");
  }

  const std::size_t n_nu = nu_grid.size();
  const std::size_t n_lambda = lambda_grid.size();
  const std::size_t n_grid = n_nu * n_lambda;

  CvResult result;
  result.folds = folds;
  result.grid.resize(n_grid);
  for (std::size_t a = 0; a < n_nu; ++a) {
    for (std::size_t g = 0; g < n_lambda; ++g) {
      result.grid[a * n_lambda + g] = {nu_grid[a], lambda_grid[g]};
    }
  }

  const FoldAssignment plan = make_folds(n, folds, seed);
  // fold_mse[point][fold]
  std::vector<std::vector<double>> fold_mse(n_grid, std::vector<double>(folds, 0.0));

  for (int f = 0; f < folds; ++f) {
    const DesignPartition train = subset_rows(design, plan.train_rows[f]);
    const DesignPartition test = subset_rows(design, plan.test_rows[f]);
    check_fold_rank(train, f);
    Vector y_train(train.U.rows()), y_test(test.U.rows());
    for (Index i = 0; i < y_train.size(); ++i) y_train(i) = y(plan.train_rows[f][i]);
    for (Index i = 0; i < y_test.size(); ++i) y_test(i) = y(plan.test_rows[f][i]);

    Vector fold_pilot;
    try {
      fold_pilot = pilot_estimator(train, y_train, pilot_ridge_default(train, y_train));
    } catch (const NumericalError& e) {
      throw NumericalError("cross-validation fold " + std::to_string(f + 1) + ": " +
                           e.what());
    }

    for (std::size_t a = 0; a < n_nu; ++a) {
      const Vector w = adaptive_weights(fold_pilot, nu_grid[a]);
      Vector warm = Vector::Zero(train.q());
      for (std::size_t g = 0; g < n_lambda; ++g) {
        PenaltySpec penalty;
        penalty.lambda_n = lambda_grid[g];
        penalty.nu = nu_grid[a];
        penalty.weights = w;
        const PartialFitResult fit =
            solve_partial_lasso(train, y_train, penalty, options, &warm);
        warm = fit.beta;
        const Vector pred = test.U * fit.alpha + test.N * fit.beta;
        fold_mse[a * n_lambda + g][f] =
            (y_test - pred).squaredNorm() / static_cast<double>(y_test.size());
      }
    }
  }

  result.cv_error.resize(n_grid);
  result.cv_se.resize(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    double mean = 0.0;
    for (double v : fold_mse[g]) mean += v;
    mean /= folds;
    double ss = 0.0;
    for (double v : fold_mse[g]) ss += (v - mean) * (v - mean);
    result.cv_error[g] = mean;
    result.cv_se[g] = std::sqrt(ss / (folds - 1)) / std::sqrt(double(folds));
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < n_grid; ++g) {
    const double err = result.cv_error[g];
    const double best_err = result.cv_error[best];
    const CvPoint& cand = result.grid[g];
    const CvPoint& incumbent = result.grid[best];
    const bool better =
        err < best_err ||
        (err == best_err && (cand.lambda_n > incumbent.lambda_n ||
                             (cand.lambda_n == incumbent.lambda_n &&
                              cand.nu > incumbent.nu)));
    if (better) best = g;
  }
  result.chosen = result.grid[best];

  result.pilot = pilot_estimator(design, y, pilot_ridge_default(design, y));
  PenaltySpec penalty;
  penalty.lambda_n = result.chosen.lambda_n;
  penalty.nu = result.chosen.nu;
  penalty.weights = adaptive_weights(result.pilot, result.chosen.nu);
  result.refit = solve_partial_lasso(design, y, penalty, options);
  return result;
}

}  // namespace netreg
