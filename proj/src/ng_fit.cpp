#include "netreg/ng_fit.hpp"

#include <limits>

namespace netreg {

NetworkEstimate estimate_network(const Matrix& X, const NetworkGuidedOptions& options) {
  EbicConfig config;
  config.gamma = options.gamma;
  if (!options.glasso_lambda_grid.empty()) {
    config.lambda_grid = options.glasso_lambda_grid;
  } else {
    const Matrix S =
        options.standardize
            ? empirical_covariance(standardize_columns(X).values).matrix
            : empirical_covariance(X).matrix;
    config.lambda_grid =
        default_glasso_grid(S, options.glasso_grid_size, options.glasso_min_ratio);
  }

  NetworkEstimate net;
  if (options.standardize) {
    net.selection = select_precision_by_ebic(X, config, options.glasso);
  } else {
    // mirror select_precision_by_ebic without the standardization step
    const CovarianceEstimate cov = empirical_covariance(X);
    PrecisionSelection selection;
    selection.all_nonconverged = true;
    double best = std::numeric_limits<double>::infinity();
    bool have = false;
    for (double lambda : config.lambda_grid) {
      PrecisionEstimate fit = graphical_lasso(cov, lambda, options.glasso);
      const double score = ebic_score(fit, X.rows(), X.cols(), config.gamma);
      selection.lambdas.push_back(lambda);
      selection.scores.push_back(score);
      selection.edge_counts.push_back(fit.edge_count);
      if (fit.converged) selection.all_nonconverged = false;
      if (!have || score < best) {
        best = score;
        selection.fit = std::move(fit);
        selection.chosen_lambda = lambda;
        have = true;
      }
    }
    net.selection = std::move(selection);
  }
  net.rho = partial_correlations(net.selection.fit);
  net.centrality = degree_centrality(net.rho);
  return net;
}

NetworkGuidedFit fit_with_network(const Dataset& dataset, const NetworkEstimate& network,
                                  const NetworkGuidedOptions& options) {
  validate_dataset(dataset);
  const Index p = dataset.n_predictors();
  if (network.centrality.phi.size() != p) {
    throw ValidationError("network size does not match the predictor count");
  }
  const Index tau = options.tau_override.value_or(default_tau(p));

  NetworkGuidedFit out;
  out.hubs = select_hubs(network.centrality, options.delta, tau);
  out.design = build_design(dataset, out.hubs);
  const std::vector<double> lambda_grid =
      !options.lambda_grid.empty()
          ? options.lambda_grid
          : adaptive_lambda_grid(out.design, dataset.y, options.nu_grid,
                                 options.lambda_grid_size, options.lambda_min_ratio);
  out.cv = cross_validate(out.design, dataset.y, options.nu_grid, lambda_grid,
                          options.folds, options.seed, options.solver);
  out.network_lambda = network.selection.chosen_lambda;
  out.network_edges = network.selection.fit.edge_count;
  out.network_nonconverged = network.selection.all_nonconverged;
  return out;
}

NetworkGuidedFit fit_network_guided(const Dataset& dataset,
                                    const NetworkGuidedOptions& options) {
  validate_dataset(dataset);
  const NetworkEstimate network = estimate_network(dataset.X, options);
  return fit_with_network(dataset, network, options);
}

}  // namespace netreg
