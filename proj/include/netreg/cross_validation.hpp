#pragma once

#include <cstdint>
#include <vector>

#include "netreg/pilot.hpp"

namespace netreg {

struct FoldAssignment {
  std::vector<std::vector<Index>> train_rows;
  std::vector<std::vector<Index>> test_rows;
};

/// Seeded shuffle dealt round-robin; row lists come back sorted. Requires
/// 2 <= folds <= n.
FoldAssignment make_folds(Index n, int folds, std::uint64_t seed);

std::vector<double> default_nu_grid();  // {0.5, 1, 2}

/// 'size' log-spaced lambda_n values shared across the nu grid, from the
/// largest weighted lambda_max over nu (weights from the full-data pilot at
/// the default ridge perturbation) down to min_ratio times it.
std::vector<double> adaptive_lambda_grid(const DesignPartition& design,
                                         const Vector& y,
                                         const std::vector<double>& nu_grid,
                                         int size = 50, double min_ratio = 1e-3);

struct CvPoint {
  double nu = 0.0;
  double lambda_n = 0.0;
};

struct CvResult {
  std::vector<CvPoint> grid;
  std::vector<double> cv_error;  // mean over folds of held-out MSE
  std::vector<double> cv_se;     // sd of fold MSEs / sqrt(folds)
  CvPoint chosen;
  int folds = 0;
  PartialFitResult refit;  // full-data fit at the chosen pair
  Vector pilot;            // full-data pilot behind the refit weights
};

/// Tunes (nu, lambda_n) by k-fold CV: the pilot and weights are recomputed on
/// each training fold, the held-out MSE is averaged per grid point, ties
/// break toward larger lambda_n then larger nu, and the final model is refit
/// on all rows with a fresh full-data pilot. folds must be 5 or 10.
CvResult cross_validate(const DesignPartition& design, const Vector& y,
                        const std::vector<double>& nu_grid,
                        const std::vector<double>& lambda_grid, int folds,
                        std::uint64_t seed, const SolverOptions& options = {});

}  // namespace netreg
