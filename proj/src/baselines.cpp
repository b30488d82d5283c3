#include "netreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace netreg {

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::lasso: return "lasso";
    case BaselineMethod::adaptive_lasso: return "alasso";
    case BaselineMethod::elastic_net: return "enet";
    case BaselineMethod::ridge: return "ridge";
  }
  throw ValidationError("unknown baseline method");
}

BaselineMethod baseline_from_string(const std::string& name) {
  if (name == "lasso") return BaselineMethod::lasso;
  if (name == "alasso" || name == "adaptive_lasso") return BaselineMethod::adaptive_lasso;
  if (name == "enet" || name == "elastic_net") return BaselineMethod::elastic_net;
  if (name == "ridge") return BaselineMethod::ridge;
  throw ValidationError("unknown baseline method: " + name);
}

namespace {

HubPartition empty_hub_partition(Index p) {
  HubPartition hubs;
  hubs.delta = 0.0;
  hubs.tau = default_tau(p);
  hubs.h = 0;
  hubs.nonhub_indices.resize(p);
  std::iota(hubs.nonhub_indices.begin(), hubs.nonhub_indices.end(), Index{0});
  return hubs;
}

struct PathCv {
  std::vector<double> cv_error;
  std::vector<double> cv_se;
  std::size_t best = 0;
};

// CV for a single-lambda l1/l2 path: lambda1 = mix*L, l2 = (1 - mix)*L.
PathCv cv_mixed_path(const DesignPartition& design, const Vector& y,
                     const std::vector<double>& grid, double mix, int folds,
                     std::uint64_t seed, const SolverOptions& options) {
  const FoldAssignment plan = make_folds(y.size(), folds, seed);
  std::vector<std::vector<double>> fold_mse(grid.size(),
                                            std::vector<double>(folds, 0.0));
  for (int f = 0; f < folds; ++f) {
    const DesignPartition train = subset_rows(design, plan.train_rows[f]);
    const DesignPartition test = subset_rows(design, plan.test_rows[f]);
    Vector y_train(train.U.rows()), y_test(test.U.rows());
    for (Index i = 0; i < y_train.size(); ++i) y_train(i) = y(plan.train_rows[f][i]);
    for (Index i = 0; i < y_test.size(); ++i) y_test(i) = y(plan.test_rows[f][i]);

    Vector warm = Vector::Zero(train.q());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const PartialFitResult fit = perturbed_elastic_net(
          train, y_train, mix * grid[g], (1.0 - mix) * grid[g], options, &warm);
      warm = fit.beta;
      const Vector pred = test.U * fit.alpha + test.N * fit.beta;
      fold_mse[g][f] =
          (y_test - pred).squaredNorm() / static_cast<double>(y_test.size());
    }
  }

  PathCv out;
  out.cv_error.resize(grid.size());
  out.cv_se.resize(grid.size());
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (double v : fold_mse[g]) mean += v;
    mean /= folds;
    double ss = 0.0;
    for (double v : fold_mse[g]) ss += (v - mean) * (v - mean);
    out.cv_error[g] = mean;
    out.cv_se[g] = std::sqrt(ss / (folds - 1)) / std::sqrt(double(folds));
    if (mean < best_err) {  // strict: ties keep the larger lambda
      best_err = mean;
      out.best = g;
    }
  }
  return out;
}

BaselineFit fit_ridge(const DesignPartition& design, const Vector& y, int folds,
                      std::uint64_t seed, const BaselineConfig& config) {
  const Index t = design.t();
  const Index q = design.q();

  // Pure l2 on the N block: solve the normal equations directly per lambda.
  const auto solve_at = [&](const DesignPartition& d, const Vector& yy,
                            double lambda) {
    Eigen::ColPivHouseholderQR<Matrix> qr(d.U);
    if (qr.rank() < d.t()) {
      throw NumericalError(
          "unpenalized block U is rank-deficient; reduce hubs or confounders");
    }
    Matrix D(d.U.rows(), t + q);
    D.leftCols(t) = d.U;
    D.rightCols(q) = d.N;
    Matrix G = D.transpose() * D;
    G.bottomRightCorner(q, q).diagonal().array() += lambda;
    const Vector rhs = D.transpose() * yy;
    Eigen::LDLT<Matrix> ldlt(G);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("ridge normal equations are not solvable");
    }
    const Vector coef = ldlt.solve(rhs);
    return std::make_pair(Vector(coef.head(t)), Vector(coef.tail(q)));
  };

  double top = design.N.squaredNorm();  // trace of N'N
  std::vector<double> grid;
  if (top <= 0.0) {
    grid = {0.0};
  } else if (config.lambda_grid_size == 1) {
    grid = {top};
  } else {
    grid = log_spaced_grid(top, 1e-8 * top, config.lambda_grid_size);
  }

  const FoldAssignment plan = make_folds(y.size(), folds, seed);
  std::vector<std::vector<double>> fold_mse(grid.size(),
                                            std::vector<double>(folds, 0.0));
  for (int f = 0; f < folds; ++f) {
    const DesignPartition train = subset_rows(design, plan.train_rows[f]);
    const DesignPartition test = subset_rows(design, plan.test_rows[f]);
    Vector y_train(train.U.rows()), y_test(test.U.rows());
    for (Index i = 0; i < y_train.size(); ++i) y_train(i) = y(plan.train_rows[f][i]);
    for (Index i = 0; i < y_test.size(); ++i) y_test(i) = y(plan.test_rows[f][i]);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto [alpha, beta] = solve_at(train, y_train, grid[g]);
      const Vector pred = test.U * alpha + test.N * beta;
      fold_mse[g][f] =
          (y_test - pred).squaredNorm() / static_cast<double>(y_test.size());
    }
  }

  BaselineFit out;
  out.method = BaselineMethod::ridge;
  out.lambda_grid = grid;
  out.cv_error.resize(grid.size());
  out.cv_se.resize(grid.size());
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (double v : fold_mse[g]) mean += v;
    mean /= folds;
    double ss = 0.0;
    for (double v : fold_mse[g]) ss += (v - mean) * (v - mean);
    out.cv_error[g] = mean;
    out.cv_se[g] = std::sqrt(ss / (folds - 1)) / std::sqrt(double(folds));
    if (mean < best_err) {
      best_err = mean;
      best = g;
    }
  }
  out.chosen_lambda = grid[best];

  const auto [alpha, beta] = solve_at(design, y, out.chosen_lambda);
  PartialFitResult fit;
  fit.alpha = alpha;
  fit.beta = beta;
  fit.penalty.lambda_n = 0.0;
  fit.penalty.nu = 1.0;
  fit.penalty.weights = Vector::Zero(q);
  fit.penalty.l2 = out.chosen_lambda;
  for (Index j = 0; j < q; ++j) {
    if (std::abs(fit.beta(j)) > kZeroThreshold) fit.active_set.push_back(j);
  }
  const Vector r = y - design.U * fit.alpha - design.N * fit.beta;
  fit.residual_variance = r.squaredNorm() / static_cast<double>(y.size());
  fit.converged = true;
  fit.iterations = 1;
  fit.objective_value =
      partial_lasso_objective(design, y, fit.alpha, fit.beta, fit.penalty);
  fit.objective_path.push_back(fit.objective_value);
  out.fit = std::move(fit);
  return out;
}

}  // namespace

BaselineFit fit_baseline_detailed(BaselineMethod method, const Dataset& dataset,
                                  int folds, std::uint64_t seed,
                                  const BaselineConfig& config) {
  if (folds != 5 && folds != 10) {
    throw ValidationError("folds must be 5 or 10");
  }
  validate_dataset(dataset);
  DesignPartition design =
      build_design(dataset, empty_hub_partition(dataset.n_predictors()));

  if (method == BaselineMethod::ridge) {
    BaselineFit out = fit_ridge(design, dataset.y, folds, seed, config);
    out.design = std::move(design);
    return out;
  }

  if (method == BaselineMethod::adaptive_lasso) {
    const std::vector<double> lambda_grid =
        adaptive_lambda_grid(design, dataset.y, config.nu_grid,
                             config.lambda_grid_size, config.lambda_min_ratio);
    const CvResult cv = cross_validate(design, dataset.y, config.nu_grid,
                                       lambda_grid, folds, seed, config.solver);
    BaselineFit out;
    out.method = method;
    out.design = std::move(design);
    out.fit = cv.refit;
    out.lambda_grid = lambda_grid;
    // flatten the (nu, lambda) surface to the chosen-nu slice for reporting
    for (std::size_t g = 0; g < cv.grid.size(); ++g) {
      if (cv.grid[g].nu == cv.chosen.nu) {
        out.cv_error.push_back(cv.cv_error[g]);
        out.cv_se.push_back(cv.cv_se[g]);
      }
    }
    out.chosen_lambda = cv.chosen.lambda_n;
    out.chosen_nu = cv.chosen.nu;
    return out;
  }

  const double mix = method == BaselineMethod::elastic_net ? config.enet_mix : 1.0;
  if (!(mix > 0.0 && mix <= 1.0)) {
    throw ValidationError("elastic-net mix must lie in (0, 1]");
  }
  const double l1_max = lasso_lambda_max(design, dataset.y);
  std::vector<double> grid;
  if (l1_max <= 0.0) {
    grid = {0.0};
  } else if (config.lambda_grid_size == 1) {
    grid = {l1_max / mix};
  } else {
    grid = log_spaced_grid(l1_max / mix, config.lambda_min_ratio * l1_max / mix,
                           config.lambda_grid_size);
  }

  const PathCv cv =
      cv_mixed_path(design, dataset.y, grid, mix, folds, seed, config.solver);
  const double chosen = grid[cv.best];
  const PartialFitResult fit = perturbed_elastic_net(
      design, dataset.y, mix * chosen, (1.0 - mix) * chosen, config.solver);

  BaselineFit out;
  out.method = method;
  out.design = std::move(design);
  out.fit = fit;
  out.lambda_grid = grid;
  out.cv_error = cv.cv_error;
  out.cv_se = cv.cv_se;
  out.chosen_lambda = chosen;
  return out;
}

PartialFitResult fit_baseline(BaselineMethod method, const Matrix& Z,
                              const Matrix& X, const Vector& y, int folds,
                              std::uint64_t seed) {
  Dataset dataset;
  dataset.y = y;
  dataset.Z = Z;
  dataset.X = X;
  for (Index j = 0; j < Z.cols(); ++j) {
    dataset.z_names.push_back("Z" + std::to_string(j + 1));
  }
  for (Index j = 0; j < X.cols(); ++j) {
    dataset.x_names.push_back("X" + std::to_string(j + 1));
  }
  return fit_baseline_detailed(method, dataset, folds, seed).fit;
}

}  // namespace netreg
