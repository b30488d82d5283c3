#include "netreg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <set>

#include "netreg/metrics.hpp"

namespace netreg {

NetworkGuidedOptions RunConfig::to_options() const {
  NetworkGuidedOptions opt;
  opt.delta = delta;
  opt.tau_override = tau_override;
  opt.gamma = gamma;
  opt.glasso_lambda_grid = glasso_lambda_grid;
  opt.glasso_grid_size = glasso_grid_size;
  opt.glasso_min_ratio = glasso_min_ratio;
  opt.lambda_grid = lambda_grid;
  opt.lambda_grid_size = lambda_grid_size;
  opt.lambda_min_ratio = lambda_min_ratio;
  opt.nu_grid = nu_grid;
  opt.folds = folds;
  opt.seed = seed;
  opt.standardize = standardize;
  opt.glasso = glasso;
  opt.solver = solver;
  return opt;
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {
      "delta",          "tau",
      "gamma",          "folds",
      "nu_grid",        "lambda_grid",
      "glasso_lambda_grid",
      "lambda_grid_size", "lambda_min_ratio",
      "glasso_grid_size", "glasso_min_ratio",
      "seed",           "standardize",
      "holdout_fraction",
      "glasso_tol",     "glasso_max_iter",
      "solver_tol",     "solver_max_iter",
  };
  if (!doc.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    if (known.find(item.key()) == known.end()) {
      throw ValidationError("unknown config key: " + item.key());
    }
  }

  RunConfig config;
  try {
    config.delta = doc.value("delta", config.delta);
    if (doc.contains("tau") && !doc["tau"].is_null()) {
      config.tau_override = doc["tau"].get<Index>();
    }
    config.gamma = doc.value("gamma", config.gamma);
    config.folds = doc.value("folds", config.folds);
    if (doc.contains("nu_grid")) {
      config.nu_grid = doc["nu_grid"].get<std::vector<double>>();
    }
    if (doc.contains("lambda_grid")) {
      config.lambda_grid = doc["lambda_grid"].get<std::vector<double>>();
    }
    if (doc.contains("glasso_lambda_grid")) {
      config.glasso_lambda_grid =
          doc["glasso_lambda_grid"].get<std::vector<double>>();
    }
    config.lambda_grid_size = doc.value("lambda_grid_size", config.lambda_grid_size);
    config.lambda_min_ratio = doc.value("lambda_min_ratio", config.lambda_min_ratio);
    config.glasso_grid_size = doc.value("glasso_grid_size", config.glasso_grid_size);
    config.glasso_min_ratio = doc.value("glasso_min_ratio", config.glasso_min_ratio);
    config.seed = doc.value("seed", config.seed);
    config.standardize = doc.value("standardize", config.standardize);
    config.holdout_fraction = doc.value("holdout_fraction", config.holdout_fraction);
    config.glasso.tol = doc.value("glasso_tol", config.glasso.tol);
    config.glasso.max_iter = doc.value("glasso_max_iter", config.glasso.max_iter);
    config.solver.tol = doc.value("solver_tol", config.solver.tol);
    config.solver.max_iter = doc.value("solver_max_iter", config.solver.max_iter);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed config value: ") + e.what());
  }

  if (!(config.delta >= 0.0 && config.delta < 1.0)) {
    throw ValidationError("delta must lie in [0, 1)");
  }
  if (config.tau_override && *config.tau_override < 0) {
    throw ValidationError("tau must be non-negative");
  }
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) {
    throw ValidationError("ebic gamma must lie in [0, 1]");
  }
  if (config.folds != 5 && config.folds != 10) {
    throw ValidationError("folds must be 5 or 10");
  }
  for (double nu : config.nu_grid) {
    if (!(nu > 0.0)) throw ValidationError("nu grid entries must be positive");
  }
  for (const std::vector<double>* grid :
       {&config.lambda_grid, &config.glasso_lambda_grid}) {
    for (std::size_t i = 0; i < grid->size(); ++i) {
      if (!((*grid)[i] >= 0.0)) {
        throw ValidationError("lambda grid entries must be non-negative");
      }
      if (i > 0 && !((*grid)[i] < (*grid)[i - 1])) {
        throw ValidationError("lambda grid must be strictly decreasing");
      }
    }
  }
  if (config.lambda_grid_size < 1 || config.glasso_grid_size < 1) {
    throw ValidationError("grid size must be at least 1");
  }
  if (!(config.lambda_min_ratio > 0.0 && config.lambda_min_ratio <= 1.0) ||
      !(config.glasso_min_ratio > 0.0 && config.glasso_min_ratio <= 1.0)) {
    throw ValidationError("min_ratio must lie in (0, 1]");
  }
  if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 1.0)) {
    throw ValidationError("holdout_fraction must lie in [0, 1)");
  }
  return config;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["delta"] = config.delta;
  if (config.tau_override) {
    doc["tau"] = *config.tau_override;
  } else {
    doc["tau"] = nullptr;
  }
  doc["gamma"] = config.gamma;
  doc["folds"] = config.folds;
  doc["nu_grid"] = config.nu_grid;
  doc["lambda_grid"] = config.lambda_grid;
  doc["glasso_lambda_grid"] = config.glasso_lambda_grid;
  doc["lambda_grid_size"] = config.lambda_grid_size;
  doc["lambda_min_ratio"] = config.lambda_min_ratio;
  doc["glasso_grid_size"] = config.glasso_grid_size;
  doc["glasso_min_ratio"] = config.glasso_min_ratio;
  doc["seed"] = config.seed;
  doc["standardize"] = config.standardize;
  doc["holdout_fraction"] = config.holdout_fraction;
  doc["glasso_tol"] = config.glasso.tol;
  doc["glasso_max_iter"] = config.glasso.max_iter;
  doc["solver_tol"] = config.solver.tol;
  doc["solver_max_iter"] = config.solver.max_iter;
  return doc;
}

namespace {

template <typename F>
auto stage(const char* label, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage ") + label + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("stage ") + label + ": " + e.what());
  }
}

Dataset take_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.z_names = data.z_names;
  out.x_names = data.x_names;
  out.y.resize(rows.size());
  out.Z.resize(rows.size(), data.Z.cols());
  out.X.resize(rows.size(), data.X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.y(static_cast<Index>(i)) = data.y(rows[i]);
    if (data.Z.cols() > 0) out.Z.row(static_cast<Index>(i)) = data.Z.row(rows[i]);
    out.X.row(static_cast<Index>(i)) = data.X.row(rows[i]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json metrics_json(const Vector& y, const Vector& pred) {
  nlohmann::ordered_json out;
  out["rmse"] = rmse(y, pred);
  const std::optional<double> slope = calibration_slope(y, pred);
  if (slope) {
    out["csl"] = *slope;
  } else {
    out["csl"] = nullptr;
  }
  return out;
}

}  // namespace

nlohmann::ordered_json run_pipeline(const Dataset& dataset, const RunConfig& config) {
  stage("input", [&] { validate_dataset(dataset); return 0; });

  const Index n = dataset.n();
  Dataset train = dataset;
  Dataset holdout;
  bool has_holdout = false;
  if (config.holdout_fraction > 0.0) {
    const Index n_test =
        static_cast<Index>(std::floor(config.holdout_fraction * n));
    if (n_test < 3 || n - n_test < 3) {
      throw ValidationError("holdout split leaves too few rows");
    }
    const std::vector<Index> perm =
        random_permutation(n, mix_seed(config.seed, 999));
    std::vector<Index> test_rows(perm.begin(), perm.begin() + n_test);
    std::vector<Index> train_rows(perm.begin() + n_test, perm.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    holdout = take_rows(dataset, test_rows);
    train = take_rows(dataset, train_rows);
    has_holdout = true;
  }

  const NetworkGuidedOptions options = config.to_options();
  const NetworkEstimate network =
      stage("network estimation", [&] { return estimate_network(train.X, options); });
  const NetworkGuidedFit fit = stage("network-guided fit", [&] {
    return fit_with_network(train, network, options);
  });

  nlohmann::ordered_json report;
  report["timestamp"] = utc_timestamp();
  report["config"] = run_config_to_json(config);

  report["data"] = {
      {"rows_total", n},
      {"rows_fit", train.n()},
      {"rows_holdout", has_holdout ? holdout.n() : 0},
      {"confounders", train.z_names},
      {"proteins", train.n_predictors()},
  };

  {
    nlohmann::ordered_json net;
    net["chosen_lambda"] = network.selection.chosen_lambda;
    net["edge_count"] = network.selection.fit.edge_count;
    net["converged"] = network.selection.fit.converged;
    net["all_grid_points_nonconverged"] = network.selection.all_nonconverged;
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < network.selection.lambdas.size(); ++i) {
      path.push_back({{"lambda", network.selection.lambdas[i]},
                      {"ebic", network.selection.scores[i]},
                      {"edges", network.selection.edge_counts[i]}});
    }
    net["ebic_path"] = std::move(path);
    report["network"] = std::move(net);
  }

  {
    nlohmann::ordered_json hubs;
    hubs["delta"] = fit.hubs.delta;
    hubs["tau"] = fit.hubs.tau;
    hubs["h"] = fit.hubs.h;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (Index idx : fit.hubs.hub_indices) {
      members.push_back({{"index", idx + 1},
                         {"name", train.x_names[static_cast<std::size_t>(idx)]},
                         {"centrality", network.centrality.phi(idx)}});
    }
    hubs["members"] = std::move(members);
    hubs["nonhub_count"] = static_cast<Index>(fit.hubs.nonhub_indices.size());
    report["hubs"] = std::move(hubs);
  }

  {
    const PartialFitResult& refit = fit.cv.refit;
    const OriginalScaleCoefficients coefs =
        original_scale_coefficients(fit.design, refit.alpha, refit.beta);

    nlohmann::ordered_json model;
    model["nu"] = fit.cv.chosen.nu;
    model["lambda_n"] = fit.cv.chosen.lambda_n;
    model["folds"] = fit.cv.folds;
    model["converged"] = refit.converged;
    model["iterations"] = refit.iterations;
    model["residual_variance"] = refit.residual_variance;

    nlohmann::ordered_json curve = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < fit.cv.grid.size(); ++g) {
      curve.push_back({{"nu", fit.cv.grid[g].nu},
                       {"lambda_n", fit.cv.grid[g].lambda_n},
                       {"cv_error", fit.cv.cv_error[g]},
                       {"cv_se", fit.cv.cv_se[g]}});
    }
    model["cv_curve"] = std::move(curve);

    nlohmann::ordered_json coefficients;
    coefficients["intercept"] = coefs.intercept;
    nlohmann::ordered_json confounders = nlohmann::ordered_json::array();
    for (Index j = 0; j < coefs.confounders.size(); ++j) {
      confounders.push_back({{"name", train.z_names[static_cast<std::size_t>(j)]},
                             {"estimate", coefs.confounders(j)}});
    }
    coefficients["confounders"] = std::move(confounders);

    std::vector<bool> is_hub(train.n_predictors(), false);
    for (Index idx : fit.hubs.hub_indices) is_hub[static_cast<std::size_t>(idx)] = true;
    std::vector<bool> is_active(train.n_predictors(), false);
    for (Index j : fit.cv.refit.active_set) {
      is_active[static_cast<std::size_t>(fit.design.nonhub_cols[j])] = true;
    }
    for (Index idx : fit.hubs.hub_indices) is_active[static_cast<std::size_t>(idx)] = true;

    nlohmann::ordered_json proteins = nlohmann::ordered_json::array();
    nlohmann::ordered_json active_nonhubs = nlohmann::ordered_json::array();
    for (Index j = 0; j < train.n_predictors(); ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      proteins.push_back({{"name", train.x_names[js]},
                          {"estimate", coefs.proteins(j)},
                          {"hub", static_cast<bool>(is_hub[js])},
                          {"active", static_cast<bool>(is_active[js])}});
      if (is_active[js] && !is_hub[js]) {
        active_nonhubs.push_back(train.x_names[js]);
      }
    }
    coefficients["proteins"] = std::move(proteins);
    model["coefficients"] = std::move(coefficients);
    model["active_nonhubs"] = std::move(active_nonhubs);

    nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
    for (Index idx : fit.design.dropped_cols) {
      dropped.push_back(train.x_names[static_cast<std::size_t>(idx)]);
    }
    model["dropped_columns"] = std::move(dropped);

    const KktResiduals kkt = kkt_residuals(fit.design, train.y, refit);
    model["kkt"] = {{"gradient_u", kkt.gradient_u},
                    {"active", kkt.active},
                    {"inactive", kkt.inactive}};
    report["model"] = std::move(model);

    nlohmann::ordered_json evaluation;
    const Vector train_pred =
        predict_response(fit.design, refit.alpha, refit.beta, train.Z, train.X);
    evaluation["train"] = metrics_json(train.y, train_pred);
    if (has_holdout) {
      const Vector test_pred = predict_response(fit.design, refit.alpha,
                                                refit.beta, holdout.Z, holdout.X);
      evaluation["holdout"] = metrics_json(holdout.y, test_pred);
    }
    report["evaluation"] = std::move(evaluation);
  }

  return report;
}

}  // namespace netreg
