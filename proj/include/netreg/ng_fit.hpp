#pragma once

#include <optional>

#include "netreg/cross_validation.hpp"
#include "netreg/dataset.hpp"
#include "netreg/network.hpp"

namespace netreg {

struct NetworkGuidedOptions {
  double delta = 0.02;
  std::optional<Index> tau_override;  // empty = floor((p + 20) / 16)
  double gamma = 0.5;                 // eBIC
  std::vector<double> glasso_lambda_grid;  // empty = data-driven default
  int glasso_grid_size = 30;
  double glasso_min_ratio = 0.01;
  std::vector<double> lambda_grid;  // empty = data-driven adaptive grid
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
  std::vector<double> nu_grid = {0.5, 1.0, 2.0};
  int folds = 5;
  std::uint64_t seed = 1;
  bool standardize = true;  // standardize X before the GGM stage
  GlassoOptions glasso;
  SolverOptions solver;
};

/// GGM stage output: eBIC-selected precision fit, its partial correlations,
/// and the degree centralities. Independent of delta, so one estimate serves
/// several hub budgets.
struct NetworkEstimate {
  PrecisionSelection selection;
  PartialCorrelationMatrix rho;
  CentralityVector centrality;
};

NetworkEstimate estimate_network(const Matrix& X, const NetworkGuidedOptions& options);

struct NetworkGuidedFit {
  HubPartition hubs;
  DesignPartition design;
  CvResult cv;
  double network_lambda = 0.0;
  Index network_edges = 0;
  bool network_nonconverged = false;
};

/// Regression stage on a previously estimated network.
NetworkGuidedFit fit_with_network(const Dataset& dataset, const NetworkEstimate& network,
                                  const NetworkGuidedOptions& options);

/// Full pipeline: estimate_network on dataset.X, then fit_with_network.
NetworkGuidedFit fit_network_guided(const Dataset& dataset,
                                    const NetworkGuidedOptions& options);

}  // namespace netreg
