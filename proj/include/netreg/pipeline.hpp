#pragma once

#include <nlohmann/json.hpp>

#include "netreg/ng_fit.hpp"

namespace netreg {

/// Everything configurable about a single network-guided analysis. Every
/// field has a default, so `{}` is a valid JSON config.
struct RunConfig {
  double delta = 0.02;
  std::optional<Index> tau_override;
  double gamma = 0.5;
  int folds = 5;
  std::vector<double> nu_grid = {0.5, 1.0, 2.0};
  std::vector<double> lambda_grid;         // empty: data-driven
  std::vector<double> glasso_lambda_grid;  // empty: data-driven
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
  int glasso_grid_size = 30;
  double glasso_min_ratio = 0.01;
  std::uint64_t seed = 1;
  bool standardize = true;        // standardize X before the GGM stage
  double holdout_fraction = 0.0;  // (0,1): seeded train/test split
  GlassoOptions glasso;
  SolverOptions solver;

  NetworkGuidedOptions to_options() const;
};

RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

/// standardize -> glasso/eBIC -> partial correlations -> centrality -> hubs
/// -> design -> pilot/CV -> refit, serialized as a JSON report. Module errors
/// are rethrown with a stage label. The "timestamp" field is the only
/// run-dependent part of the output.
nlohmann::ordered_json run_pipeline(const Dataset& dataset, const RunConfig& config);

}  // namespace netreg
