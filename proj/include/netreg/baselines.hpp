#pragma once

#include <string>

#include "netreg/cross_validation.hpp"

namespace netreg {

enum class BaselineMethod { lasso, adaptive_lasso, elastic_net, ridge };

std::string to_string(BaselineMethod method);
BaselineMethod baseline_from_string(const std::string& name);

struct BaselineConfig {
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
  double enet_mix = 0.5;  // l1 share of the elastic-net penalty
  std::vector<double> nu_grid = {0.5, 1.0, 2.0};  // adaptive lasso only
  SolverOptions solver;
};

/// Baseline fit plus everything needed to predict on new data and audit the
/// tuning path. All baselines keep (intercept, Z) unpenalized and penalize
/// every predictor; ridge solves its normal equations directly.
struct BaselineFit {
  BaselineMethod method = BaselineMethod::lasso;
  DesignPartition design;
  PartialFitResult fit;
  std::vector<double> lambda_grid;
  std::vector<double> cv_error;
  std::vector<double> cv_se;
  double chosen_lambda = 0.0;
  double chosen_nu = 1.0;
};

BaselineFit fit_baseline_detailed(BaselineMethod method, const Dataset& dataset,
                                  int folds, std::uint64_t seed,
                                  const BaselineConfig& config = {});

/// Convenience wrapper over raw matrices with synthesized column names.
PartialFitResult fit_baseline(BaselineMethod method, const Matrix& Z,
                              const Matrix& X, const Vector& y, int folds,
                              std::uint64_t seed);

}  // namespace netreg
